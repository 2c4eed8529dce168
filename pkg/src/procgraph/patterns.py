"""Shader math, shape generators (bricks, tiles, planks) and mask generators
(scratches, cracks, smudges, edge wear) as numpy kernels."""

import numpy as np

from . import noise
from .errors import DegenerateRange


def mix(a, b, t):
    """a + (b - a) * t, returning a and b bit-exactly at t == 0 and t == 1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if a.ndim == 2 and t.ndim == 1:
        t = t[:, None]
    with np.errstate(invalid="ignore", over="ignore"):
        mid = a + (b - a) * t
    return np.where(t == 0.0, a, np.where(t == 1.0, b, mid))


def clamp(x, lo, hi):
    return np.minimum(np.maximum(x, lo), hi)


def smoothstep(lo, hi, x):
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    width = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.clip((x - lo) / np.where(width == 0, 1.0, width), 0.0, 1.0)
    t = np.where(width == 0, (x >= lo).astype(np.float64), t)
    return t * t * (3.0 - 2.0 * t)


def map_range(x, from_lo, from_hi, to_lo, to_hi, clamp=False):
    from_lo, from_hi = np.asarray(from_lo, float), np.asarray(from_hi, float)
    if np.any(from_hi == from_lo):
        raise DegenerateRange()
    t = (x - from_lo) / (from_hi - from_lo)
    out = to_lo + t * (to_hi - to_lo)
    if clamp:
        out = np.clip(out, np.minimum(to_lo, to_hi), np.maximum(to_lo, to_hi))
    return out


def rotate90(uv, turns):
    k = (np.floor(turns).astype(np.int64) % 4)[:, None]
    c = uv - 0.5
    x, y = c[:, :1], c[:, 1:]
    r1 = np.concatenate([-y, x], axis=1) + 0.5
    r2 = np.concatenate([-x, -y], axis=1) + 0.5
    r3 = np.concatenate([y, -x], axis=1) + 0.5
    return np.where(k == 0, uv, np.where(k == 1, r1, np.where(k == 2, r2, r3)))


# ---------------------------------------------------------------------------
# shapes. Mortar/grout/gap widths are in uv units; the band is centered on the
# cell boundary, so each cell loses half the width on every side.


def _cells(u_scaled, v_scaled, n_u, n_v, half_width):
    """Shared cell logic given coordinates scaled to cell units."""
    cu = np.floor(u_scaled)
    cv = np.floor(v_scaled)
    lu = (u_scaled - cu) / n_u  # distance from the cell's left edge, uv units
    lv = (v_scaled - cv) / n_v
    w = 1.0 / n_u
    h = 1.0 / n_v
    inside = (lu >= half_width) & (lu <= w - half_width) & (lv >= half_width) & (lv <= h - half_width)
    cell_uv = np.stack(
        [
            np.clip((lu - half_width) / (w - 2 * half_width), 0.0, 1.0),
            np.clip((lv - half_width) / (h - 2 * half_width), 0.0, 1.0),
        ],
        axis=1,
    )
    return inside.astype(np.float64), cu.astype(np.int64), cv.astype(np.int64), cell_uv


def brick_grid(uv, rows, cols, mortar_width, row_offset, salt=0xB41C):
    u, v = uv[:, 0], uv[:, 1]
    vs = v * rows
    r = np.floor(vs)
    shift = np.mod(r, 2.0) * row_offset
    us = u * cols + shift
    mask, c, r, cell_uv = _cells(us, vs, cols, rows, mortar_width / 2.0)
    cell_id = noise.cell_hash(np.mod(c, cols), np.mod(r, rows), 0, salt)
    return mask, cell_id, cell_uv


def tile_grid(uv, nx, ny, grout):
    return brick_grid(uv, ny, nx, grout, 0.0, salt=0x711E)


def plank_grid(uv, plank_width, length_mean, gap):
    u, v = uv[:, 0], uv[:, 1]
    vs = v / plank_width
    r = np.floor(vs).astype(np.int64)
    jitter = noise.cell_hash(r, 0, 0, 0x9A4C)
    n_r = np.maximum(1.0, np.round(1.0 / (length_mean * (0.6 + 0.8 * jitter))))
    offset = noise.cell_hash(r, 1, 0, 0x9A4C)
    us = (u + offset) * n_r
    mask, c, _, cell_uv = _cells(us, vs, n_r, 1.0 / plank_width, gap / 2.0)
    cell_id = noise.cell_hash(np.mod(c, n_r.astype(np.int64)), r, 0, 0x9A4D)
    return mask, cell_id, cell_uv


# ---------------------------------------------------------------------------
# masks


def scratches(p, density, length, width, seed_offset):
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    if density <= 0.0:
        return np.zeros(n)
    xy = p[:, :2] / length
    cell = np.floor(xy).astype(np.int64)
    salt = int(round(seed_offset * 1000.0)) & 0xFFFFFFFF
    hit = np.zeros(n, dtype=bool)
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            cx = cell[:, 0] + dx
            cy = cell[:, 1] + dy
            h = noise.hash3(cx, cy, np.zeros_like(cx), salt=0x5C7A ^ salt)
            present = noise.to_unit(h) < density
            ox = noise.to_unit(noise.mix64(h + np.uint64(1)))
            oy = noise.to_unit(noise.mix64(h + np.uint64(2)))
            ang = 2.0 * np.pi * noise.to_unit(noise.mix64(h + np.uint64(3)))
            center = np.stack([cx + ox, cy + oy], axis=1)
            direction = np.stack([np.cos(ang), np.sin(ang)], axis=1)
            rel = xy - center
            s = np.clip(np.sum(rel * direction, axis=1), -0.5, 0.5)
            closest = rel - s[:, None] * direction
            dist = np.sqrt(np.sum(closest * closest, axis=1)) * length
            hit |= present & (dist < width)
    return hit.astype(np.float64)


def cracks(p, scale, width):
    f1, f2, _, _ = noise.voronoi_f1f2(p, scale)
    return ((f2 - f1) < width).astype(np.float64)


SMUDGE_SOFTNESS = 0.05
SMUDGE_OCTAVES = 4
# coverage -> fbm threshold such that mean(smoothstep(t - s, t + s, fbm)) ==
# coverage; Monte Carlo over 4e6 points (fbm with 4 octaves, lacunarity 2,
# gain 0.5), solved with brentq.
SMUDGE_CALIBRATION = (
    (0.0, 3.0), (0.05, 0.49671), (0.1, 0.39304), (0.15, 0.32021), (0.2, 0.26125),
    (0.25, 0.20984), (0.3, 0.16323), (0.35, 0.11993), (0.4, 0.07874), (0.45, 0.03891),
    (0.5, -0.00016), (0.55, -0.03929), (0.6, -0.07911), (0.65, -0.12025), (0.7, -0.16361),
    (0.75, -0.21008), (0.8, -0.26118), (0.85, -0.32001), (0.9, -0.39272), (0.95, -0.49649),
    (1.0, -3.0),
)


def smudge_threshold(coverage):
    cov, thr = zip(*SMUDGE_CALIBRATION)
    if coverage <= cov[1]:
        if coverage == 0.0:
            return thr[0]
        return thr[1] + (0.05 - coverage) / 0.05 * (1.0 - thr[1])
    if coverage >= cov[-2]:
        if coverage == 1.0:
            return thr[-1]
        return thr[-2] - (coverage - 0.95) / 0.05 * (1.0 + thr[-2])
    return float(np.interp(coverage, cov, thr))


def smudges(p, scale, coverage):
    t = smudge_threshold(coverage)
    value = noise.fbm(p, scale, SMUDGE_OCTAVES, 2.0, 0.5)
    return smoothstep(t - SMUDGE_SOFTNESS, t + SMUDGE_SOFTNESS, value)


def edge_wear(p, curvature, intensity, noise_scale):
    modulation = 0.75 + 0.25 * noise.fbm(p, noise_scale, 3, 2.0, 0.5)
    return clamp(curvature * intensity * modulation, 0.0, 1.0)
