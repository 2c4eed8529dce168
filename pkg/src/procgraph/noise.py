"""Deterministic lattice noise: integer hashing, gradient noise, fbm, cellular
noise and white noise.

All functions take ``p`` as an ``(n, 3)`` float64 array and are pure. Hashing
uses wrapping uint64 arithmetic with a splitmix64 finalizer, so results are
bit-identical on any IEEE-754 platform.
"""

import numpy as np

M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
GOLDEN2 = np.uint64((0x9E3779B97F4A7C15 * 2) % 2**64)
GOLDEN3 = np.uint64((0x9E3779B97F4A7C15 * 3) % 2**64)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

# max over the unit cell of sum_c w_c * max_g |g . (f - c)| for the 12 edge
# gradients is 1.03635 (grid search + Nelder-Mead); dividing by a slightly
# larger value keeps |noise| <= 1 for every gradient assignment.
PERLIN_NORMALIZER = 1.0364

GRADIENTS = np.array(
    [
        [1, 1, 0], [-1, 1, 0], [1, -1, 0], [-1, -1, 0],
        [1, 0, 1], [-1, 0, 1], [1, 0, -1], [-1, 0, -1],
        [0, 1, 1], [0, -1, 1], [0, 1, -1], [0, -1, -1],
    ],
    dtype=np.float64,
)


def mix64(x):
    """splitmix64 finalizer on a uint64 array (wrapping)."""
    x = np.asarray(x, dtype=np.uint64)
    x = x ^ (x >> _S30)
    x = x * M1
    x = x ^ (x >> _S27)
    x = x * M2
    return x ^ (x >> _S31)


def _u64(a):
    return np.asarray(a, dtype=np.int64).view(np.uint64)


def hash3(ix, iy, iz, salt=0):
    """Hash integer lattice coordinates (int64 arrays) to uint64."""
    h = mix64(_u64(ix) + GOLDEN)
    h = mix64(h ^ (_u64(iy) + GOLDEN2))
    h = mix64(h ^ (_u64(iz) + GOLDEN3) ^ np.uint64(salt & 0xFFFFFFFFFFFFFFFF))
    return h


def to_unit(h):
    """uint64 -> float64 in [0, 1) using the top 53 bits."""
    return (h >> _S11).astype(np.float64) * _INV53


def _fade(t):
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _lerp(a, b, t):
    return a + t * (b - a)


def perlin_noise(p, frequency=1.0):
    p = np.asarray(p, dtype=np.float64) * frequency
    cell = np.floor(p)
    f = p - cell
    i = cell.astype(np.int64)
    u = _fade(f)
    corner = {}
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                h = hash3(i[:, 0] + dx, i[:, 1] + dy, i[:, 2] + dz)
                g = GRADIENTS[(h % np.uint64(12)).astype(np.intp)]
                off = f - np.array([dx, dy, dz], dtype=np.float64)
                corner[dx, dy, dz] = g[:, 0] * off[:, 0] + g[:, 1] * off[:, 1] + g[:, 2] * off[:, 2]
    ux, uy, uz = u[:, 0], u[:, 1], u[:, 2]
    x00 = _lerp(corner[0, 0, 0], corner[1, 0, 0], ux)
    x10 = _lerp(corner[0, 1, 0], corner[1, 1, 0], ux)
    x01 = _lerp(corner[0, 0, 1], corner[1, 0, 1], ux)
    x11 = _lerp(corner[0, 1, 1], corner[1, 1, 1], ux)
    y0 = _lerp(x00, x10, uy)
    y1 = _lerp(x01, x11, uy)
    return _lerp(y0, y1, uz) / PERLIN_NORMALIZER


def fbm(p, frequency=1.0, octaves=4, lacunarity=2.0, gain=0.5):
    p = np.asarray(p, dtype=np.float64)
    total = perlin_noise(p, frequency)
    amp = 1.0
    freq = frequency
    for _ in range(1, octaves):
        amp *= gain
        freq *= lacunarity
        total = total + amp * perlin_noise(p, freq)
    return total


def fbm_bound(octaves, gain):
    return sum(gain**i for i in range(octaves))


def _feature_offsets(h):
    """Three uniforms in [0, 1) per cell hash."""
    return np.stack(
        [to_unit(mix64(h + np.uint64(k))) for k in (1, 2, 3)],
        axis=-1,
    )


def voronoi_f1f2(p, frequency=1.0):
    """Nearest and second-nearest feature distances (lattice units), plus the
    winning cell's integer coordinates and feature point (lattice units)."""
    q = np.asarray(p, dtype=np.float64) * frequency
    cell = np.floor(q).astype(np.int64)
    n = q.shape[0]
    f1 = np.full(n, np.inf)
    f2 = np.full(n, np.inf)
    win_cell = np.zeros((n, 3), dtype=np.int64)
    win_point = np.zeros((n, 3), dtype=np.float64)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                c = cell + np.array([dx, dy, dz], dtype=np.int64)
                h = hash3(c[:, 0], c[:, 1], c[:, 2], salt=0x5EED)
                point = c.astype(np.float64) + _feature_offsets(h)
                d = np.sqrt(np.sum((point - q) ** 2, axis=1))
                closer = d < f1
                f2 = np.where(closer, f1, np.minimum(f2, d))
                f1 = np.where(closer, d, f1)
                win_cell[closer] = c[closer]
                win_point[closer] = point[closer]
    return f1, f2, win_cell, win_point


def voronoi(p, frequency=1.0):
    """Returns (distance, cell_id, cell_center) in the units of ``p``."""
    f1, _, win_cell, win_point = voronoi_f1f2(p, frequency)
    cell_id = to_unit(hash3(win_cell[:, 0], win_cell[:, 1], win_cell[:, 2], salt=0xCE11))
    return f1 / frequency, cell_id, win_point / frequency


WHITE_QUANTUM = 65536.0


def white_noise(p, salt=0):
    p = np.asarray(p, dtype=np.float64)
    q = np.round(p * WHITE_QUANTUM).astype(np.int64)
    return to_unit(hash3(q[:, 0], q[:, 1], q[:, 2], salt=0xAB1E ^ salt))


def cell_hash(ix, iy, iz=0, salt=0):
    """White noise of integer cell coordinates, equal to ``white_noise`` at
    those coordinates."""
    q = [np.asarray(a, dtype=np.int64) * np.int64(WHITE_QUANTUM) for a in (ix, iy, iz)]
    q = np.broadcast_arrays(*q)
    return to_unit(hash3(q[0], q[1], q[2], salt=0xAB1E ^ salt))
