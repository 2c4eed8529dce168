import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procgraph import ops
from procgraph.errors import DuplicateParam, EmptyWeights, InvalidRange, NonPositiveWeight, PurityViolation, UntraceableControlFlow
from procgraph.materials.samplers import LIBRARY
from procgraph.rng import RandomStream, choice, mix64, normal, randint, split, uniform
from procgraph.sampler import SamplerFn, deterministic, run_sampler, sample
from procgraph.tracer import trace_distribution, trace_instance

# published splitmix64 outputs for state 0
SPLITMIX_VECTORS = [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
BY_ID = {s.id: s for s in LIBRARY}


def test_mixer_matches_reference_vectors():
    golden = 0x9E3779B97F4A7C15
    assert [mix64(k * golden) for k in (1, 2, 3)] == SPLITMIX_VECTORS


def test_degenerate_uniform():
    assert uniform(RandomStream(3), 5, 5) == 5.0
    with pytest.raises(InvalidRange):
        uniform(RandomStream(3), 2, 1)
    with pytest.raises(InvalidRange):
        normal(RandomStream(3), 0, -1)
    with pytest.raises(InvalidRange):
        randint(RandomStream(3), 0)
    with pytest.raises(InvalidRange):
        RandomStream(-1)


def test_uniform_mean():
    x = RandomStream(11).uniform_array(0.0, 1.0, 10**6)
    assert abs(x.mean() - 0.5) < 0.002
    assert x.min() >= 0.0 and x.max() < 1.0


def test_scalar_and_array_draws_agree():
    a, b = RandomStream(4), RandomStream(4)
    xs = [a.random() for _ in range(50)]
    assert xs == b.random_array(50).tolist()
    assert a.counter == b.counter == 50


def test_draw_costs():
    s = RandomStream(1)
    s.uniform(0, 1)
    s.randint(7)
    s.choice([1, 2])
    assert s.counter == 3
    s.normal(0, 1)
    assert s.counter == 5


def test_sibling_splits_uncorrelated():
    s = RandomStream(99)
    a = s.split("a").random_array(10**5)
    b = s.split("b").random_array(10**5)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_choice_frequencies():
    s = RandomStream(5)
    assert all(choice(s, [1]) == 0 for _ in range(100))
    hits = sum(choice(s, [1, 1]) for _ in range(10**5))
    assert abs(hits / 1e5 - 0.5) < 0.005
    zeros = sum(choice(s, [3, 1]) == 0 for _ in range(10**5))
    assert abs(zeros / 1e5 - 0.75) < 0.01
    with pytest.raises(EmptyWeights):
        choice(s, [])
    with pytest.raises(NonPositiveWeight):
        choice(s, [1, 0])


def test_split_purity_and_isolation():
    s = RandomStream(8)
    assert split(s, "x") == split(s, "x")
    assert s.counter == 0
    ref = split(s, "x").random_array(10)
    y = split(s, "y")
    y.random_array(1000)
    s.random()
    assert split(s, "x").random_array(10).tolist() == ref.tolist()
    assert not np.any(split(s, "x").random_array(100) == split(s, "y").random_array(100))


@given(st.integers(0, 2**64 - 1), st.text(max_size=8), st.integers(0, 50))
def test_stream_identity_determines_draws(seed, label, skip):
    a = RandomStream(seed).split(label)
    a.random_array(skip)
    b = RandomStream(seed, (label,), skip)
    assert a.raw() == b.raw()


@SamplerFn
def constant_sampler(ctx):
    g = ctx.g
    return ops.perlin_noise(g.position(), frequency=2.0)


def _left(ctx):
    return ctx.g.value(1.0)


def _right(ctx):
    return ctx.g.value(2.0)


LEFT, RIGHT = SamplerFn(_left, "left"), SamplerFn(_right, "right")


@SamplerFn
def two_way(ctx):
    return ctx.choose("side", [1.0, 1.0], [LEFT, RIGHT])


def test_zero_draw_sampler_is_seed_independent():
    ref = sample(constant_sampler, 0).serialize()
    assert all(sample(constant_sampler, s).serialize() == ref for s in range(20))


def test_two_branches_observed():
    seen = {run_sampler(two_way, RandomStream(s))[1][0].value for s in range(10**4)}
    assert seen == {0, 1}


def test_record_is_ordered():
    graph, record = run_sampler(BY_ID["composed"], RandomStream(3))
    names = [r.name for r in record]
    assert len(names) == len(set(names)) and names
    assert all(r.spec.contains(r.value) for r in record)


@settings(max_examples=30)
@given(st.sampled_from([s.id for s in LIBRARY]), st.integers(0, 2**64 - 1))
def test_library_reproducible(sid, seed):
    f = BY_ID[sid]
    assert sample(f, seed).serialize() == sample(f, seed).serialize()


def test_order_independence():
    root = RandomStream(42)
    wood, paint = BY_ID["wood"], BY_ID["paint"]
    solo_a = run_sampler(wood, root.split("A"))[0].serialize()
    solo_b = run_sampler(paint, root.split("B"))[0].serialize()
    ab = [run_sampler(wood, root.split("A"))[0].serialize(), run_sampler(paint, root.split("B"))[0].serialize()]
    ba = [run_sampler(paint, root.split("B"))[0].serialize(), run_sampler(wood, root.split("A"))[0].serialize()]
    assert ab == [solo_a, solo_b] and ba == [solo_b, solo_a]


def test_draw_values_do_not_depend_on_sibling_draws():
    @SamplerFn
    def one(ctx):
        return ctx.g.value(ctx.uniform("x", 0, 1))

    @SamplerFn
    def two(ctx):
        ctx.uniform("extra", 0, 1)
        return ctx.g.value(ctx.uniform("x", 0, 1))

    assert run_sampler(one, RandomStream(1))[1][0].value == run_sampler(two, RandomStream(1))[1][1].value


@deterministic
def _leaky(ctx):
    return ctx.uniform("oops", 0, 1)


@SamplerFn
def leaky_sampler(ctx):
    return ctx.g.value(_leaky(ctx))


def test_purity_firewall():
    with pytest.raises(PurityViolation):
        run_sampler(leaky_sampler, RandomStream(0))
    with pytest.raises(PurityViolation):
        trace_distribution(leaky_sampler)


def test_library_is_pure():
    for f in LIBRARY:
        trace_distribution(f)


@SamplerFn
def branches_on_data(ctx):
    k = ctx.choice("k", [1.0, 1.0])
    return ctx.g.value(1.0 if k == 0 else 2.0)


def test_untraceable_control_flow():
    run_sampler(branches_on_data, RandomStream(0))
    with pytest.raises(UntraceableControlFlow):
        trace_instance(branches_on_data, 0)
    with pytest.raises(UntraceableControlFlow):
        trace_distribution(branches_on_data)


def test_duplicate_param():
    @SamplerFn
    def twice(ctx):
        ctx.uniform("a", 0, 1)
        return ctx.g.value(ctx.uniform("a", 0, 1))

    with pytest.raises(DuplicateParam):
        run_sampler(twice, RandomStream(0))
