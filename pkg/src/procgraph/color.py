"""Hexcone HSV <-> RGB conversions, vectorized over numpy arrays."""

import numpy as np

from .kinds import Color


def hsv_to_rgb(h, s, v):
    h = np.asarray(h, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    h, s, v = np.broadcast_arrays(h, s, v)
    h6 = (h - np.floor(h)) * 6.0
    sector = np.floor(h6)
    f = h6 - sector
    sector = sector.astype(np.int64) % 6
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    r = np.choose(sector, [v, q, p, p, t, v])
    g = np.choose(sector, [t, v, v, q, p, p])
    b = np.choose(sector, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def rgb_to_hsv(rgb):
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
        safe = np.where(delta > 0, delta, 1.0)
        hr = np.mod((g - b) / safe, 6.0)
        hg = (b - r) / safe + 2.0
        hb = (r - g) / safe + 4.0
    h = np.where(mx == r, hr, np.where(mx == g, hg, hb))
    h = np.where(delta > 0, h / 6.0, 0.0)
    return np.stack([h, s, mx], axis=-1)


def hsv_literal(h: float, s: float, v: float) -> Color:
    """Color constant from HSV components, via the same kernel as the op."""
    rgb = hsv_to_rgb(h, s, v)
    return Color(float(rgb[0]), float(rgb[1]), float(rgb[2]))


def rgb_to_hsv_literal(color) -> tuple:
    hsv = rgb_to_hsv(np.asarray(color, dtype=np.float64))
    return float(hsv[0]), float(hsv[1]), float(hsv[2])
