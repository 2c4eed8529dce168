import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from procgraph import catalog, noise, ops, patterns
from procgraph.color import hsv_to_rgb, rgb_to_hsv
from procgraph.errors import DegenerateRange, EvalDomainError, InvalidMortar, MissingAuxField
from procgraph.evaluate import SampleBatch, evaluate
from procgraph.graph import GraphBuilder
from procgraph.mesh import compute_curvature, make_cube, vertex_batch
from procgraph.rng import RandomStream

N = 1_000_000
FROZEN_PERLIN = [-0.20543219027763995, -0.2608956811073182, -0.4259783122837384]


def points(n, lo=-50.0, hi=50.0, label="pts"):
    return RandomStream(2024).split(label).uniform_array(lo, hi, 3 * n).reshape(n, 3)


def eval_op(build, pts, output="out", aux=None):
    g = GraphBuilder()
    graph = g.finalize({output: build(g, g.position())})
    return evaluate(graph, output, SampleBatch(pts, aux or {})).data


# noise


def test_perlin_zero_on_lattice():
    lattice = np.round(points(10_000, -500, 500, "lattice"))
    assert np.all(noise.perlin_noise(lattice) == 0.0)


def test_perlin_bounded():
    assert np.abs(noise.perlin_noise(points(N))).max() <= 1.0


def test_perlin_deterministic_and_graph_matches_kernel():
    p = points(1000)
    a = eval_op(lambda g, x: ops.perlin_noise(x, frequency=2.0), p)
    assert a.tobytes() == noise.perlin_noise(p, 2.0).tobytes()
    assert a.tobytes() == eval_op(lambda g, x: ops.perlin_noise(x, frequency=2.0), p).tobytes()


MASK = (1 << 64) - 1
GRADS = [(1, 1, 0), (-1, 1, 0), (1, -1, 0), (-1, -1, 0), (1, 0, 1), (-1, 0, 1), (1, 0, -1), (-1, 0, -1),
         (0, 1, 1), (0, -1, 1), (0, 1, -1), (0, -1, -1)]


def _mix(x):
    x &= MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def _hash(ix, iy, iz):
    g = 0x9E3779B97F4A7C15
    h = _mix(ix + g)
    h = _mix(h ^ ((iy + 2 * g) & MASK))
    return _mix(h ^ ((iz + 3 * g) & MASK))


def perlin_oracle(x, y, z):
    """Scalar big-integer reference for one point."""
    ix, iy, iz = math.floor(x), math.floor(y), math.floor(z)
    fx, fy, fz = x - ix, y - iy, z - iz

    def fade(t):
        return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)

    def corner(dx, dy, dz):
        gx, gy, gz = GRADS[_hash(ix + dx, iy + dy, iz + dz) % 12]
        return gx * (fx - dx) + gy * (fy - dy) + gz * (fz - dz)

    def lerp(a, b, t):
        return a + t * (b - a)

    u, v, w = fade(fx), fade(fy), fade(fz)
    y0 = lerp(lerp(corner(0, 0, 0), corner(1, 0, 0), u), lerp(corner(0, 1, 0), corner(1, 1, 0), u), v)
    y1 = lerp(lerp(corner(0, 0, 1), corner(1, 0, 1), u), lerp(corner(0, 1, 1), corner(1, 1, 1), u), v)
    return lerp(y0, y1, w) / 1.0364


def test_perlin_matches_scalar_oracle():
    p = points(300, -40, 40, "oracle")
    got = noise.perlin_noise(p)
    want = np.array([perlin_oracle(*q) for q in p])
    assert np.max(np.abs(got - want)) <= 1e-15


def test_perlin_frozen_values():
    # frozen from the scalar oracle above
    p = np.array([[0.5, 0.25, 0.125], [1.3, -2.7, 0.45], [10.01, 3.3, -7.7]])
    assert np.allclose(noise.perlin_noise(p), FROZEN_PERLIN, rtol=0, atol=1e-15)


def test_fbm_single_octave_is_perlin():
    p = points(5000)
    assert noise.fbm(p, 1.7, 1).tobytes() == noise.perlin_noise(p, 1.7).tobytes()


def test_fbm_geometric_bound():
    p = points(N, label="fbm")
    assert np.abs(noise.fbm(p, 1.0, 3, 2.0, 0.5)).max() <= 1.75
    assert noise.fbm_bound(3, 0.5) == 1.75


@pytest.mark.parametrize("octaves", [1, 2, 5])
def test_fbm_zero_on_lattice_with_integer_lacunarity(octaves):
    lattice = np.round(points(5000, -100, 100, "fl"))
    assert np.all(noise.fbm(lattice, 1.0, octaves, 3.0, 0.7) == 0.0)


def test_voronoi_zero_at_feature_point():
    _, _, center = noise.voronoi(points(200, -20, 20, "v"), 1.0)
    d, _, _ = noise.voronoi(center, 1.0)
    assert np.all(d == 0.0)


def test_voronoi_distance_bound():
    d, cid, _ = noise.voronoi(points(200_000, -30, 30, "vb"), 2.5)
    assert d.max() <= math.sqrt(3) / 2.5
    assert cid.min() >= 0.0 and cid.max() < 1.0


def test_voronoi_id_constant_near_feature():
    _, cid, center = noise.voronoi(points(500, -20, 20, "vc"), 1.0)
    jitter = RandomStream(3).uniform_array(-1e-4, 1e-4, center.size).reshape(center.shape)
    _, cid2, _ = noise.voronoi(center + jitter, 1.0)
    _, cid0, _ = noise.voronoi(center, 1.0)
    assert np.array_equal(cid0, cid2)


def test_white_noise_moments_and_ks():
    w = noise.white_noise(points(N, label="white"))
    assert abs(w.mean() - 0.5) < 0.01
    assert stats.kstest(w[:100_000], "uniform").statistic < 0.01
    assert w.min() >= 0.0 and w.max() < 1.0


def test_white_noise_repeatable():
    p = points(100)
    assert noise.white_noise(p).tobytes() == noise.white_noise(p.copy()).tobytes()


# math


def test_map_range_mix_smoothstep():
    p = np.zeros((1, 3))
    assert eval_op(lambda g, x: ops.map_range(0.5, 0.0, 1.0, 10.0, 20.0, g=g), p)[0] == 15.0
    assert patterns.smoothstep(0.0, 1.0, np.array([0.5]))[0] == 0.5
    a = np.array([0.1, -3.0, 1e300])
    b = np.array([7.0, 2.0, -1e300])
    assert np.array_equal(patterns.mix(a, b, 0.0), a)
    assert np.array_equal(patterns.mix(a, b, 1.0), b)


def test_map_range_degenerate():
    g = GraphBuilder()
    graph = g.finalize({"out": ops.map_range(0.5, 1.0, 1.0, 0.0, 1.0, g=g)})
    with pytest.raises(DegenerateRange):
        evaluate(graph, "out", SampleBatch(np.zeros((1, 3))))
    assert issubclass(DegenerateRange, EvalDomainError)


def test_hsv_examples():
    assert np.array_equal(hsv_to_rgb(0.0, 1.0, 1.0), [1.0, 0.0, 0.0])
    assert np.allclose(hsv_to_rgb(1.0 / 3.0, 1.0, 1.0), [0.0, 1.0, 0.0], atol=1e-15)
    assert np.array_equal(hsv_to_rgb(1.25, 0.5, 0.5), hsv_to_rgb(0.25, 0.5, 0.5))


def test_hsv_round_trip():
    s = RandomStream(11)
    h = s.uniform_array(0.0, 1.0, 10_000)
    sat = s.uniform_array(0.01, 1.0, 10_000)
    val = s.uniform_array(0.01, 1.0, 10_000)
    back = rgb_to_hsv(hsv_to_rgb(h, sat, val))
    dh = np.abs(back[:, 0] - h)
    dh = np.minimum(dh, 1.0 - dh)
    assert max(dh.max(), np.abs(back[:, 1] - sat).max(), np.abs(back[:, 2] - val).max()) < 1e-12


@given(st.floats(0, 1, exclude_max=True), st.floats(1e-3, 1), st.floats(1e-3, 1))
def test_hsv_round_trip_property(h, s, v):
    back = rgb_to_hsv(hsv_to_rgb(h, s, v))
    assert min(abs(back[0] - h), 1 - abs(back[0] - h)) < 1e-12
    assert abs(back[1] - s) < 1e-12 and abs(back[2] - v) < 1e-12


# shapes


def uv_grid(n):
    c = (np.arange(n) + 0.5) / n
    u, v = np.meshgrid(c, c)
    return np.stack([u.ravel(), v.ravel()], axis=1)


def test_brick_center_and_mortar():
    rows, cols = 8, 4
    center = np.array([[0.5 / cols, 0.5 / rows]])  # row 0 is unshifted
    mask, _, cuv = patterns.brick_grid(center, rows, cols, 0.01, 0.5)
    assert mask[0] == 1.0 and np.allclose(cuv[0], [0.5, 0.5], atol=1e-12)
    midline = np.array([[0.3, 1.0 / rows], [0.7, 2.0 / rows]])
    mask, _, _ = patterns.brick_grid(midline, rows, cols, 0.01, 0.5)
    assert np.all(mask == 0.0)


@pytest.mark.parametrize("rows,cols,mortar", [(8, 4, 0.01), (5, 3, 0.02), (12, 6, 0.005)])
def test_brick_area_fraction(rows, cols, mortar):
    expected = (1.0 - cols * mortar) * (1.0 - rows * mortar)  # analytic area of the brick interiors
    # one jittered sample per pixel: pixel centers alone alias against the band edges
    jitter = RandomStream(rows * 100 + cols).uniform_array(-0.5, 0.5, 2 * 2048 * 2048).reshape(-1, 2) / 2048
    mask, _, cuv = patterns.brick_grid(uv_grid(2048) + jitter, rows, cols, mortar, 0.5)
    assert abs(mask.mean() - expected) < 1e-3
    assert cuv.min() >= 0.0 and cuv.max() <= 1.0


def test_invalid_mortar():
    g = GraphBuilder()
    x, y, _ = ops.separate_xyz(g.position())
    with pytest.raises(InvalidMortar):
        ops.brick_grid(ops.combine_xy(x, y), rows=4, cols=4, mortar_width=0.3)


def test_tile_zero_grout_is_full():
    mask, _, _ = patterns.tile_grid(uv_grid(256), 5, 7, 0.0)
    assert np.all(mask == 1.0)


def test_planks_periodic_in_u():
    s = RandomStream(12)
    u = s.uniform_array(0.0, 1.0, 20_000)
    v = s.uniform_array(0.0, 1.0, 20_000)
    a = patterns.plank_grid(np.stack([u, v], 1), 0.1, 0.4, 0.004)
    b = patterns.plank_grid(np.stack([u + 1.0, v], 1), 0.1, 0.4, 0.004)
    # floating-point rounding at u + 1 may move a point across a cell edge
    agree = (a[0] == b[0]) & (a[1] == b[1])
    assert agree.mean() > 0.999


def test_adjacent_tile_ids_distinct():
    n = 100
    centers = (np.arange(n) + 0.5) / n
    u, v = np.meshgrid(centers, centers)
    _, cid, _ = patterns.tile_grid(np.stack([u.ravel(), v.ravel()], 1), n, n, 0.0)
    cid = cid.reshape(n, n)
    pairs = np.concatenate([(cid[:, 1:] != cid[:, :-1]).ravel(), (cid[1:] != cid[:-1]).ravel()])
    assert len(pairs) > 10_000 - 200 and pairs.mean() > 0.99


# masks


def test_scratches_density_zero():
    assert np.all(patterns.scratches(points(10_000), 0.0, 0.2, 0.01, 0.0) == 0.0)


def test_cracks_zero_width_measure_zero():
    assert patterns.cracks(points(N, label="cracks"), 4.0, 0.0).mean() < 1e-3


def test_smudge_coverage_calibrated():
    m = patterns.smudges(points(N, label="smudge"), 3.0, 0.3)
    assert abs(m.mean() - 0.3) <= 0.05


def test_edge_wear_on_cube():
    cube = compute_curvature(make_cube(4, 1.0))
    curv = cube.attributes["curvature"]
    v = cube.vertices
    on_bound = np.sum((np.abs(v) < 1e-9) | (np.abs(v - 1.0) < 1e-9), axis=1)
    edge, interior = on_bound >= 2, on_bound == 1
    wear = patterns.edge_wear(v, curv, 1.0, 5.0)
    assert wear[edge].min() > wear[interior].max()
    assert np.all(patterns.edge_wear(v, np.zeros(len(v)), 1.0, 5.0) == 0.0)
    assert np.all(patterns.edge_wear(v, curv, 0.0, 5.0) == 0.0)
    batch = vertex_batch(cube)
    g = GraphBuilder()
    graph = g.finalize({"out": ops.edge_wear(g.position(), g.attribute("curvature"), intensity=1.0, noise_scale=5.0)})
    assert np.array_equal(evaluate(graph, "out", batch).data, wear)


def test_edge_wear_needs_curvature():
    g = GraphBuilder()
    graph = g.finalize({"out": ops.edge_wear(g.position(), g.attribute("curvature"))})
    with pytest.raises(MissingAuxField):
        evaluate(graph, "out", SampleBatch(np.zeros((4, 3))))


@pytest.mark.parametrize(
    "build",
    [
        lambda g, p: ops.scratches(p, density=0.7, length=0.3, width=0.02),
        lambda g, p: ops.cracks(p, scale=3.0, width=0.05),
        lambda g, p: ops.smudges(p, scale=2.0, coverage=0.6),
        lambda g, p: ops.voronoi(p, frequency=2.0).cell_id,
        lambda g, p: ops.white_noise(p),
    ],
)
def test_mask_outputs_in_unit_interval(build):
    out = eval_op(build, points(N, -20, 20, "mask"))
    assert out.min() >= 0.0 and out.max() <= 1.0


def test_evaluation_ignores_ambient_state():
    p = points(2000)
    build = lambda g, x: ops.fbm(x, frequency=3.0, octaves=5) + ops.white_noise(x)  # noqa: E731
    first = eval_op(build, p)
    np.random.seed(123)
    np.random.random(10)
    assert eval_op(build, p).tobytes() == first.tobytes()


def test_catalog_signatures_static():
    for sig in catalog.CATALOG.values():
        assert len(set(sig.input_names)) == len(sig.input_names)
        assert len(set(sig.output_names)) == len(sig.output_names)
    manifest = catalog.manifest()
    assert len(manifest) == len(catalog.CATALOG) >= 40
