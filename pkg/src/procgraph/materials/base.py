"""The six base materials.

Each builder takes the material's ``vector`` input (a Vec3 handle) and
keyword params, validates them against ``PARAMS`` and returns a
:class:`Material`. Colors are given as HSV triples in [0, 1]. ``|displacement|``
never exceeds the ``displacement`` param of the material.
"""

from __future__ import annotations

import math

from .. import ops
from ..color import hsv_literal
from ..errors import OutOfRangeParam
from ..graph import Graph, GraphBuilder, Out
from ..kinds import Vec3
from ..sampler import deterministic
from .interfaces import Material, check_hsv, check_range

TAU = 2.0 * math.pi

# name -> param -> (default, lo, hi); HSV colors are listed in COLORS
PARAMS = {
    "wood": {
        "ring_frequency": (8.0, 1.0, 64.0),
        "warp": (0.4, 0.0, 4.0),
        "warp_scale": (3.0, 0.1, 32.0),
        "center_u": (-0.6, -4.0, 4.0),
        "center_v": (0.4, -4.0, 4.0),
        "roughness_lo": (0.45, 0.0, 1.0),
        "roughness_hi": (0.7, 0.0, 1.0),
        "displacement": (0.002, 0.0, 0.02),
    },
    "marble": {
        "vein_scale": (4.0, 0.5, 32.0),
        "turbulence": (1.5, 0.0, 6.0),
        "sharpness": (6.0, 1.0, 16.0),
        "roughness": (0.15, 0.0, 1.0),
        "displacement": (0.001, 0.0, 0.01),
    },
    "paint": {
        "noise_amplitude": (0.04, 0.0, 0.5),
        "noise_scale": (6.0, 0.1, 64.0),
        "roughness": (0.5, 0.0, 1.0),
        "roughness_noise": (0.1, 0.0, 0.5),
        "displacement": (0.0005, 0.0, 0.005),
    },
    "metal": {
        "anisotropy": (12.0, 1.0, 64.0),
        "streak_scale": (4.0, 0.1, 64.0),
        "streak_strength": (0.5, 0.0, 1.0),
        "roughness": (0.2, 0.0, 0.6),
        "displacement": (0.0005, 0.0, 0.005),
    },
    "fabric": {
        "weave_count": (48.0, 4.0, 256.0),
        "thread_contrast": (0.4, 0.0, 1.0),
        "roughness": (0.85, 0.0, 1.0),
        "displacement": (0.001, 0.0, 0.01),
    },
    "concrete": {
        "aggregate_scale": (24.0, 1.0, 128.0),
        "aggregate_contrast": (0.3, 0.0, 1.0),
        "mottle_scale": (3.0, 0.1, 32.0),
        "mottle_strength": (0.15, 0.0, 0.5),
        "roughness": (0.85, 0.0, 1.0),
        "displacement": (0.003, 0.0, 0.02),
    },
}

COLORS = {
    "wood": {"light": (0.08, 0.45, 0.78), "dark": (0.06, 0.65, 0.42)},
    "marble": {"base": (0.1, 0.03, 0.92), "vein": (0.6, 0.1, 0.35)},
    "paint": {"color": (0.55, 0.5, 0.7)},
    "metal": {"color": (0.1, 0.08, 0.8)},
    "fabric": {"color_a": (0.62, 0.55, 0.45), "color_b": (0.62, 0.35, 0.65)},
    "concrete": {"color": (0.1, 0.05, 0.6)},
}


def resolve_params(material: str, given: dict) -> dict:
    """Defaults merged with ``given``; every value range-checked."""
    numeric, colors = PARAMS[material], COLORS[material]
    unknown = set(given) - set(numeric) - set(colors)
    if unknown:
        raise OutOfRangeParam(f"{material}: unknown params {sorted(unknown)}")
    out = {}
    for name, (default, lo, hi) in numeric.items():
        out[name] = float(check_range(f"{material}.{name}", float(given.get(name, default)), lo, hi))
    for name, default in colors.items():
        out[name] = hsv_literal(*check_hsv(f"{material}.{name}", given.get(name, default)))
    return out


@deterministic
def wood(p: Out, **params) -> Material:
    """Concentric rings around an axis parallel to z, warped by fbm."""
    k = resolve_params("wood", params)
    x, y, _ = ops.separate_xyz(p)
    r = ops.length(ops.combine_xyz(x - k["center_u"], y - k["center_v"], 0.0))
    d = r * k["ring_frequency"] + ops.fbm(p, frequency=k["warp_scale"], octaves=3) * k["warp"]
    ring = ops.sin(d * TAU) * 0.5 + 0.5
    return Material(
        ops.mix(k["dark"], k["light"], ring),
        ops.mix(k["roughness_lo"], k["roughness_hi"], ring),
        (ring - 0.5) * (2.0 * k["displacement"]),
        {"base": "wood"},
    )


@deterministic
def marble(p: Out, **params) -> Material:
    k = resolve_params("marble", params)
    x, y, _ = ops.separate_xyz(p)
    n = ops.fbm(p, frequency=k["vein_scale"] * 0.5, octaves=5)
    phase = (x + y * 0.35) * k["vein_scale"] + n * k["turbulence"]
    veins = (1.0 - ops.absolute(ops.sin(phase * math.pi))) ** k["sharpness"]
    g = p.builder
    return Material(
        ops.mix(k["base"], k["vein"], veins),
        g.value(k["roughness"]),
        veins * -k["displacement"],
        {"base": "marble"},
    )


@deterministic
def paint(p: Out, **params) -> Material:
    """Flat color with faint fbm tint and roughness noise."""
    k = resolve_params("paint", params)
    n = ops.fbm(p, frequency=k["noise_scale"], octaves=3)
    g = p.builder
    return Material(
        g.value(k["color"]) * (n * k["noise_amplitude"] + 1.0),
        ops.clamp(n * k["roughness_noise"] + k["roughness"], 0.0, 1.0),
        n * (k["displacement"] / 1.75),
        {"base": "paint"},
    )


@deterministic
def metal(p: Out, **params) -> Material:
    """Low roughness with streaks stretched along x."""
    k = resolve_params("metal", params)
    q = p * Vec3(1.0, k["anisotropy"], 1.0)
    streak = ops.clamp(ops.fbm(q, frequency=k["streak_scale"], octaves=4) * 0.5 + 0.5, 0.0, 1.0)
    g = p.builder
    return Material(
        g.value(k["color"]) * (1.0 - streak * (0.5 * k["streak_strength"])),
        ops.clamp((streak - 0.5) * (0.2 * k["streak_strength"]) + k["roughness"], 0.0, 1.0),
        (streak - 0.5) * (2.0 * k["displacement"]),
        {"base": "metal"},
    )


@deterministic
def fabric(p: Out, **params) -> Material:
    """Plain weave: threads along x and y alternate over/under."""
    k = resolve_params("fabric", params)
    x, y, _ = ops.separate_xyz(p)
    n = k["weave_count"]
    warp_thread = ops.absolute(ops.sin(y * (n * math.pi)))
    weft_thread = ops.absolute(ops.sin(x * (n * math.pi)))
    over = ops.step(0.0, ops.sin(x * (n * 0.5 * math.pi)) * ops.sin(y * (n * 0.5 * math.pi)))
    profile = ops.mix(warp_thread, weft_thread, over)
    shade = profile * k["thread_contrast"] + (1.0 - k["thread_contrast"])
    g = p.builder
    return Material(
        ops.mix(k["color_a"], k["color_b"], over) * shade,
        g.value(k["roughness"]),
        profile * k["displacement"],
        {"base": "fabric"},
    )


@deterministic
def concrete(p: Out, **params) -> Material:
    """Voronoi aggregate over an fbm mottle."""
    k = resolve_params("concrete", params)
    cells = ops.voronoi(p, frequency=k["aggregate_scale"])
    pebble = 1.0 - ops.clamp(cells.distance * (2.0 * k["aggregate_scale"]), 0.0, 1.0)
    mottle = ops.fbm(p, frequency=k["mottle_scale"], octaves=4)
    tone = (cells.cell_id - 0.5) * pebble * k["aggregate_contrast"] + mottle * k["mottle_strength"] + 1.0
    g = p.builder
    return Material(
        g.value(k["color"]) * tone,
        ops.clamp(mottle * 0.1 + k["roughness"], 0.0, 1.0),
        (pebble - 0.5) * (2.0 * k["displacement"]),
        {"base": "concrete"},
    )


BASES = {"wood": wood, "marble": marble, "paint": paint, "metal": metal, "fabric": fabric, "concrete": concrete}


def make_material(name: str, params: dict | None = None) -> Graph:
    """Standalone material graph with a position input."""
    if name not in BASES:
        raise OutOfRangeParam(f"unknown material {name!r}; choose from {sorted(BASES)}")
    g = GraphBuilder()
    m = BASES[name](g.position(), **(params or {}))
    return g.finalize(m.graph_outputs(), m.graph_meta())


def make_wood(params=None, **kw) -> Graph:
    return make_material("wood", {**(params or {}), **kw})


def make_marble(params=None, **kw) -> Graph:
    return make_material("marble", {**(params or {}), **kw})


def make_paint(params=None, **kw) -> Graph:
    return make_material("paint", {**(params or {}), **kw})


def make_metal(params=None, **kw) -> Graph:
    return make_material("metal", {**(params or {}), **kw})


def make_fabric(params=None, **kw) -> Graph:
    return make_material("fabric", {**(params or {}), **kw})


def make_concrete(params=None, **kw) -> Graph:
    return make_material("concrete", {**(params or {}), **kw})
