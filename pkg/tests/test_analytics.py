import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from procgraph.analytics import (
    count_params,
    cyclomatic,
    cyclomatic_cfg,
    diversity,
    entropy,
    enumerate_counts,
    enumerate_entropy,
    normal_variation,
)
from procgraph.errors import EvenWindow, UnboundedParam
from procgraph.materials.samplers import LIBRARY
from procgraph.rng import RandomStream
from procgraph.sampler import SamplerFn, run_sampler
from procgraph.tracer import trace_distribution

BY_ID = {s.id: s for s in LIBRARY}


def dist(body, id="s"):
    return trace_distribution(SamplerFn(body, id))


def _draws(n, id):
    def body(ctx):
        acc = ctx.g.value(0.0)
        for i in range(n):
            acc = acc + ctx.uniform(f"u{i}", 0.0, 1.0)
        return acc

    return SamplerFn(body, id)


def _leaf(i):
    return SamplerFn(lambda ctx: ctx.g.value(float(i)), f"leaf{i}")


LEAVES = [_leaf(i) for i in range(6)]


def test_fair_choice_counts():
    g = dist(lambda ctx: ctx.choose("c", [1, 1], [_draws(2, "two"), _draws(4, "four")]))
    assert count_params(g) == (3.0, 1.0)


def test_deterministic_counts():
    g = dist(lambda ctx: ctx.g.position())
    assert count_params(g) == (0.0, 0.0)
    assert cyclomatic(g) == 1 and entropy(g) == 0.0


def test_cyclomatic_examples():
    assert cyclomatic(dist(lambda ctx: ctx.choose("c", [1] * 5, LEAVES[:5]))) == 5

    def seq(ctx):
        return ctx.choose("a", [1, 1], LEAVES[:2]) + ctx.choose("b", [1, 1, 1], LEAVES[:3])

    assert cyclomatic(dist(seq)) == 4 == cyclomatic_cfg(dist(seq))


def test_entropy_examples():
    def branch_param(ctx):
        return ctx.choose("c", [1, 1], [_draws(1, "one"), LEAVES[0]])

    assert entropy(dist(branch_param)) == pytest.approx(2.5, abs=1e-12)
    assert entropy(dist(lambda ctx: ctx.g.value(ctx.uniform("u", 0, 1)))) == 3.0


def _outcome_entropy(outcomes):
    """Entropy of an explicit {outcome: probability} table."""
    return -math.fsum(p * math.log2(p) for p in outcomes.values())


def test_entropy_matches_joint_table():
    def toy(ctx):
        return ctx.choose("k", [1, 1], LEAVES[:2]) * ctx.uniform("u", 0.0, 1.0)

    table = {}
    for k, b in itertools.product(range(2), range(8)):
        table[(k, b)] = 0.5 / 8
    assert len(table) == 16
    assert abs(entropy(dist(toy)) - _outcome_entropy(table)) <= 1e-9
    assert entropy(dist(toy)) == pytest.approx(4.0, abs=1e-12)


def test_entropy_bounds_discrete_part():
    for f in LIBRARY:
        g = trace_distribution(f)
        paths = g.paths()
        h_paths = -math.fsum(p.probability * math.log2(p.probability) for p in paths)
        assert entropy(g) >= h_paths - 1e-9
        r = diversity(g)
        assert min(r.cont_params_mean, r.disc_params_mean, r.cyclomatic, r.entropy_bits) >= 0


def test_unbounded_param():
    with pytest.raises(UnboundedParam):
        entropy(dist(lambda ctx: ctx.g.value(ctx.normal("n", 0.0, 1.0))))


@pytest.mark.parametrize("f", LIBRARY, ids=lambda f: f.id)
def test_dp_matches_enumeration(f):
    g = trace_distribution(f)
    cont, disc = count_params(g)
    bc, bd = enumerate_counts(g)
    assert abs(cont - bc) <= 1e-9 and abs(disc - bd) <= 1e-9
    assert abs(entropy(g) - enumerate_entropy(g)) <= 1e-9
    assert cyclomatic(g) == cyclomatic_cfg(g)


def test_means_agree_with_monte_carlo():
    f = BY_ID["composed"]
    cont, disc = count_params(trace_distribution(f))
    n = 3000
    c = d = 0
    for seed in range(n):
        for r in run_sampler(f, RandomStream(seed))[1]:
            if r.spec.kind == "discrete":
                d += 1
            else:
                c += 1
    assert abs(c / n - cont) / cont < 0.02
    assert abs(d / n - disc) / disc < 0.02


@settings(max_examples=25)
@given(st.lists(st.sampled_from(LIBRARY), min_size=2, max_size=4, unique_by=lambda f: f.id))
def test_composition_monotonicity(parts):
    k = len(parts)
    g = trace_distribution(SamplerFn(lambda ctx, p: ctx.choose("pick", [1] * k, parts, p), "wrap", "material"))
    subs = [trace_distribution(f) for f in parts]
    assert entropy(g) == pytest.approx(math.log2(k) + sum(entropy(s) for s in subs) / k, abs=1e-9)
    assert entropy(g) > sum(entropy(s) for s in subs) / k
    assert cyclomatic(g) > max(cyclomatic(s) for s in subs)


def brute_variation(n, window):
    h, w, _ = n.shape
    r = window // 2
    valid = np.linalg.norm(n, axis=2) > 0.5
    v = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            if not valid[y, x]:
                continue
            total = 0.0
            for yy in range(max(0, y - r), min(h, y + r + 1)):
                for xx in range(max(0, x - r), min(w, x + r + 1)):
                    if valid[yy, xx] and (yy, xx) != (y, x):
                        total += math.acos(max(-1.0, min(1.0, float(n[y, x] @ n[yy, xx]))))
            v[y, x] = total
    return v


def test_constant_map_is_zero():
    n = np.zeros((20, 20, 3))
    n[..., 2] = 1.0
    v, mean, _ = normal_variation(n)
    assert np.all(v == 0.0) and mean == 0.0


def test_two_region_map():
    n = np.zeros((32, 32, 3))
    n[:, :16, 2] = 1.0
    n[:, 16:, 0] = 1.0
    v, _, _ = normal_variation(n, window=5)
    assert np.abs(v - brute_variation(n, 5)).max() <= 1e-9
    # centre-line pixel away from the top and bottom: 5 rows x 2 columns across the split
    assert v[10, 15] == pytest.approx(10 * math.pi / 2, abs=1e-12)
    assert v[10, 5] == 0.0


def test_random_map_against_brute_force():
    rng = np.random.default_rng(2)
    n = rng.normal(size=(24, 24, 3))
    n /= np.linalg.norm(n, axis=2, keepdims=True)
    n[3:6, 10:14] = 0.0
    v, mean, _ = normal_variation(n, window=7)
    ref = brute_variation(n, 7)
    assert np.abs(v - ref).max() <= 1e-9
    valid = np.linalg.norm(n, axis=2) > 0
    assert mean == pytest.approx(ref[valid].mean(), abs=1e-9)


def _rotation(rng):
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.linalg.det(q))


def test_rotation_invariance():
    rng = np.random.default_rng(7)
    n = rng.normal(size=(20, 20, 3))
    n /= np.linalg.norm(n, axis=2, keepdims=True)
    v, _, _ = normal_variation(n)
    for _ in range(3):
        rotated = n @ _rotation(rng).T
        assert np.abs(normal_variation(rotated)[0] - v).max() <= 1e-9


def test_default_window_and_even_window():
    n = np.zeros((40, 40, 3))
    n[:, 20:, 2] = 1.0
    n[:, :20, 0] = 1.0
    assert np.array_equal(normal_variation(n)[0], normal_variation(n, 15)[0])
    with pytest.raises(EvenWindow):
        normal_variation(n, 14)
