import json
import time

import pytest

from procgraph.errors import OutOfRange, PathExplosion, UnknownParam
from procgraph.evaluate import STATS
from procgraph.materials.samplers import LIBRARY
from procgraph.rng import RandomStream
from procgraph.sampler import SamplerFn, run_sampler
from procgraph.tracer import DistributionGraph, InstanceTrace, list_params, replay, trace_distribution, trace_instance

BY_ID = {s.id: s for s in LIBRARY}


def _leaf(i):
    return SamplerFn(lambda ctx: ctx.g.value(float(i)), f"leaf{i}")


LEAVES = [_leaf(i) for i in range(3)]


@SamplerFn
def three_way(ctx):
    return ctx.choose("c", [1, 2, 3], LEAVES)


@SamplerFn
def two_then_three(ctx):
    a = ctx.choose("a", [1, 1], LEAVES[:2])
    b = ctx.choose("b", [1, 1, 1], LEAVES)
    return a + b


@SamplerFn
def toy(ctx):
    # 1 fair binary choice and one uniform: 2 x 8 discretized outcomes
    k = ctx.choose("k", [1, 1], LEAVES[:2])
    return k * ctx.uniform("u", 0.0, 1.0)


@SamplerFn
def plain(ctx):
    return ctx.g.position()


def path_of(trace: InstanceTrace):
    return trace.choice_path()


def test_deterministic_sampler_has_no_events():
    t = trace_instance(plain, 3)
    assert not [e for e in t.events if type(e).__name__ in ("Draw", "Choice")]


def test_three_way_choice():
    d = trace_distribution(three_way)
    root = d.defs[d.root].body
    choices = [n for n in root if type(n).__name__ == "ChoiceNode"]
    assert len(choices) == 1 and len(choices[0].branches) == 3
    assert d.path_count() == 3
    assert abs(sum(choices[0].probabilities) - 1.0) <= 1e-12


def test_product_rule():
    d = trace_distribution(two_then_three)
    paths = d.paths()
    assert len(paths) == 6 and len({p.choices for p in paths}) == 6
    assert abs(sum(p.probability for p in paths) - 1.0) <= 1e-12


def test_path_set_matches_seed_sweep_on_toy():
    d = trace_distribution(toy)
    expected = {p.choices for p in d.paths()}
    seen = {path_of(trace_instance(toy, s)) for s in range(2000)}
    assert seen == expected == {(("k", 0),), (("k", 1),)}


@pytest.mark.parametrize("sid", ["tiles", "bricks"])
def test_exhaustiveness_on_library(sid):
    f = BY_ID[sid]
    d = trace_distribution(f)
    expected = {p.choices for p in d.paths()}
    seen = set()
    for seed in range(2**16):
        _, record = run_sampler(f, RandomStream(seed))
        seen.add(tuple((r.name, r.value) for r in record if r.spec.kind == "discrete"))
    assert seen == expected


@pytest.mark.parametrize("f", LIBRARY, ids=lambda f: f.id)
def test_instance_trace_equals_direct_run(f):
    STATS.reset()
    for seed in (7, 8, 123456789):
        t = trace_instance(f, seed)
        assert t.graph.serialize() == run_sampler(f, RandomStream(seed))[0].serialize()
    assert STATS.node_evals == 0


@pytest.mark.parametrize("f", LIBRARY, ids=lambda f: f.id)
def test_instance_path_is_a_distribution_path(f):
    d = trace_distribution(f)
    paths = {p.choices for p in d.paths()}
    for seed in range(5):
        assert path_of(trace_instance(f, seed)) in paths


def test_library_trace_is_fast():
    t0 = time.perf_counter()
    for f in LIBRARY:
        trace_distribution(f)
    assert time.perf_counter() - t0 < 1.0


def test_shared_subsamplers_memoized():
    d = trace_distribution(BY_ID["composed"])
    keys = list(d.defs)
    assert len(keys) == len(set(keys))
    # each base material appears in several composites but is traced once
    assert sum(1 for k in keys if k.startswith("wood@")) == 1


def test_path_explosion():
    @SamplerFn
    def wide(ctx):
        acc = ctx.g.value(0.0)
        for i in range(8):
            acc = acc + ctx.choose(f"c{i}", [1, 1, 1], LEAVES)
        return acc

    assert trace_distribution(wide).path_count() == 3**8
    with pytest.raises(PathExplosion):
        trace_distribution(wide, bound=1000)


def test_replay_identity():
    for f in LIBRARY:
        t = trace_instance(f, 11)
        assert replay(t).serialize() == t.graph.serialize()


def test_replay_continuous_override_changes_values_only():
    t = trace_instance(BY_ID["wood"], 5)
    name, spec = next((n, s) for n, s in t.specs().items() if s.kind == "uniform")
    other = spec.lo + 0.123 * (spec.hi - spec.lo)
    a = replay(t, {name: other})
    b = replay(t, {name: spec.lo + 0.877 * (spec.hi - spec.lo)})
    base = t.graph
    assert [n.op for n in a.nodes] == [n.op for n in base.nodes]
    diff_a = {i for i, (x, y) in enumerate(zip(a.nodes, base.nodes)) if x != y}
    diff_b = {i for i, (x, y) in enumerate(zip(b.nodes, base.nodes)) if x != y}
    assert diff_a and diff_a == diff_b
    assert len(diff_a) < len(base.nodes)
    assert replay(t, {name: t.values()[name]}).serialize() == base.serialize()


def test_replay_choice_override_matches_some_seed():
    f = BY_ID["base_material"]
    t = trace_instance(f, 0)
    (name, taken), *_ = t.choice_path()
    target = (taken + 1) % len(t.specs()[name].weights)
    ops = [n.op for n in replay(t, {name: target}).nodes]
    for seed in range(1, 500):
        other = trace_instance(f, seed)
        if dict(other.choice_path())[name] == target:
            assert [n.op for n in other.graph.nodes] == ops
            break
    else:
        pytest.fail("no seed took the branch")


def test_replay_errors():
    t = trace_instance(BY_ID["wood"], 1)
    with pytest.raises(UnknownParam):
        replay(t, {"nope": 1.0})
    name, spec = next((n, s) for n, s in t.specs().items() if s.kind == "uniform")
    with pytest.raises(OutOfRange):
        replay(t, {name: spec.hi + 1.0})
    b = trace_instance(BY_ID["base_material"], 1)
    (cname, _), *_ = b.choice_path()
    with pytest.raises(OutOfRange):
        replay(b, {cname: 99})


def test_manifest():
    entries = list_params(trace_distribution(toy))
    assert [e.name for e in entries] == ["k", "u"]
    for f in LIBRARY:
        names = [e.name for e in list_params(trace_distribution(f))]
        assert len(names) == len(set(names))
        assert names == [e.name for e in list_params(trace_distribution(f))]


def test_manifest_values_reproduce_asset():
    f = BY_ID["paint"]
    a, b = trace_instance(f, 1), trace_instance(f, 2)
    values = {e.name: e.value for e in list_params(a)}
    assert replay(b, values).serialize() == a.graph.serialize()


def test_trace_json_round_trip():
    t = trace_instance(BY_ID["composed"], 4)
    back = InstanceTrace.from_json(json.loads(json.dumps(t.to_json())))
    assert back.values() == t.values() and back.graph == t.graph
    d = trace_distribution(BY_ID["composed"])
    doc = d.to_json()
    assert all(n["ctrl"] for n in doc["nodes"] if n["op"] in ("Param", "Choice", "Call"))
    d2 = DistributionGraph.from_json(json.loads(json.dumps(doc)))
    assert d2.path_count() == d.path_count()
    assert [p.choices for p in d2.paths()] == [p.choices for p in d.paths()]
