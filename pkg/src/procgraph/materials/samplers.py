"""Random material samplers.

Every sampler takes the material's ``vector`` input and draws all of its
parameters through the context, so it can be traced, replayed and analyzed.

Branch weights (all constant):

* ``sample_base_material``: the six bases, uniform.
* ``sample_shaped``: shape uniform over 3, cell base uniform over 6, grout
  concrete or paint.
* ``sample_layered``: base and top uniform over 6, mask uniform over 4.
* ``sample_composed``: plain base 0.4, shaped 0.3, layered 0.3.

The ``<base>_wide`` samplers are standalone and never used by the composites.
"""

from __future__ import annotations

from ..sampler import sampler
from . import base, masks, shapes
from .compose import apply_shape, layer

# ranges drawn by the samplers (a sub-box of each material's legal range)
DRAW_RANGES = {
    "wood": {
        "ring_frequency": (4.0, 20.0),
        "warp": (0.1, 1.2),
        "warp_scale": (1.0, 6.0),
        "center_u": (-1.5, -0.3),
        "center_v": (-1.0, 2.0),
        "roughness_lo": (0.35, 0.55),
        "roughness_hi": (0.6, 0.85),
        "displacement": (0.0, 0.004),
    },
    "marble": {
        "vein_scale": (2.0, 8.0),
        "turbulence": (0.5, 3.0),
        "sharpness": (3.0, 12.0),
        "roughness": (0.05, 0.3),
        "displacement": (0.0, 0.002),
    },
    "paint": {
        "noise_amplitude": (0.0, 0.1),
        "noise_scale": (2.0, 16.0),
        "roughness": (0.2, 0.8),
        "roughness_noise": (0.0, 0.2),
        "displacement": (0.0, 0.001),
    },
    "metal": {
        "anisotropy": (4.0, 32.0),
        "streak_scale": (2.0, 8.0),
        "streak_strength": (0.1, 0.9),
        "roughness": (0.05, 0.45),
        "displacement": (0.0, 0.001),
    },
    "fabric": {
        "weave_count": (24.0, 96.0),
        "thread_contrast": (0.2, 0.7),
        "roughness": (0.7, 1.0),
        "displacement": (0.0, 0.002),
    },
    "concrete": {
        "aggregate_scale": (12.0, 48.0),
        "aggregate_contrast": (0.1, 0.5),
        "mottle_scale": (1.0, 6.0),
        "mottle_strength": (0.05, 0.3),
        "roughness": (0.7, 0.95),
        "displacement": (0.0, 0.006),
    },
}

# hue range per color slot; saturation and value ranges are shared per slot
HUE_RANGES = {
    "wood": {"light": ((0.04, 0.12), (0.3, 0.6), (0.6, 0.9)), "dark": ((0.03, 0.1), (0.5, 0.8), (0.25, 0.5))},
    "marble": {"base": ((0.0, 1.0), (0.0, 0.1), (0.8, 0.98)), "vein": ((0.0, 1.0), (0.0, 0.3), (0.2, 0.5))},
    "paint": {"color": ((0.0, 1.0), (0.2, 0.9), (0.3, 0.95))},
    "metal": {"color": ((0.05, 0.15), (0.0, 0.4), (0.55, 0.95))},
    "fabric": {"color_a": ((0.0, 1.0), (0.2, 0.8), (0.3, 0.8)), "color_b": ((0.0, 1.0), (0.2, 0.8), (0.3, 0.8))},
    "concrete": {"color": ((0.05, 0.15), (0.0, 0.12), (0.4, 0.75))},
}


def _draw_base(ctx, p, name):
    params = {k: ctx.uniform(k, lo, hi) for k, (lo, hi) in DRAW_RANGES[name].items()}
    for slot, ranges in HUE_RANGES[name].items():
        params[slot] = tuple(ctx.uniform(f"{slot}_{c}", lo, hi) for c, (lo, hi) in zip("hsv", ranges))
    return base.BASES[name](p, **params)


@sampler(id="wood", interface="material")
def sample_wood(ctx, p):
    return _draw_base(ctx, p, "wood")


@sampler(id="marble", interface="material")
def sample_marble(ctx, p):
    return _draw_base(ctx, p, "marble")


@sampler(id="paint", interface="material")
def sample_paint(ctx, p):
    return _draw_base(ctx, p, "paint")


@sampler(id="metal", interface="material")
def sample_metal(ctx, p):
    return _draw_base(ctx, p, "metal")


@sampler(id="fabric", interface="material")
def sample_fabric(ctx, p):
    return _draw_base(ctx, p, "fabric")


@sampler(id="concrete", interface="material")
def sample_concrete(ctx, p):
    return _draw_base(ctx, p, "concrete")


BASE_SAMPLERS = [sample_wood, sample_marble, sample_paint, sample_metal, sample_fabric, sample_concrete]


# "<base>_wide": every numeric param over its full legal range, colors over the whole HSV cube.
# New distributions for an asset follow the same "<asset>_<variant>" naming.


def _wide_sampler(name):
    def body(ctx, p):
        params = {k: ctx.uniform(k, lo, hi) for k, (_, lo, hi) in base.PARAMS[name].items()}
        for slot in base.COLORS[name]:
            params[slot] = tuple(ctx.uniform(f"{slot}_{c}", 0.0, 1.0) for c in "hsv")
        return base.BASES[name](p, **params)

    body.__name__ = f"sample_{name}_wide"
    return sampler(body, id=f"{name}_wide", interface="material")


WIDE_SAMPLERS = [_wide_sampler(name) for name in base.BASES]


@sampler(id="base_material", interface="material")
def sample_base_material(ctx, p):
    return ctx.choose("base", [1.0] * len(BASE_SAMPLERS), BASE_SAMPLERS, p)


# shapes


@sampler(id="bricks", interface="shape")
def sample_bricks(ctx, p):
    rows = 4 + ctx.randint("rows", 13)
    cols = 2 + ctx.randint("cols", 7)
    extent = min(1.0 / rows, 1.0 / cols)
    return shapes.bricks(
        p,
        rows=rows,
        cols=cols,
        mortar_width=ctx.uniform("mortar", 0.04, 0.15) * extent,
        row_offset=ctx.uniform("row_offset", 0.25, 0.75),
    )


@sampler(id="tiles", interface="shape")
def sample_tiles(ctx, p):
    n = 2 + ctx.randint("count", 11)
    return shapes.tiles(p, nx=n, ny=n, grout=ctx.uniform("grout", 0.03, 0.12) / n)


@sampler(id="planks", interface="shape")
def sample_planks(ctx, p):
    width = ctx.uniform("plank_width", 0.08, 0.25)
    return shapes.planks(
        p,
        plank_width=width,
        length_mean=ctx.uniform("length_mean", 0.25, 0.8),
        gap=ctx.uniform("gap", 0.01, 0.05) * width,
    )


SHAPE_SAMPLERS = [sample_bricks, sample_tiles, sample_planks]
GROUT_SAMPLERS = [sample_concrete, sample_paint]


@sampler(id="shaped", interface="material")
def sample_shaped(ctx, p):
    shape = ctx.choose("shape", [1.0] * len(SHAPE_SAMPLERS), SHAPE_SAMPLERS, p)
    grout = ctx.choose("grout", [1.0, 1.0], GROUT_SAMPLERS, p)

    def cell(q):
        return ctx.choose("cell", [1.0] * len(BASE_SAMPLERS), BASE_SAMPLERS, q)

    return apply_shape(
        p,
        shape,
        [cell],
        grout,
        variation=ctx.uniform("variation", 0.05, 0.6),
        recess_depth=ctx.uniform("recess", 0.0005, 0.004),
    )


# masks


@sampler(id="scratches", interface="mask")
def sample_scratches(ctx, p):
    return masks.scratches(
        p,
        density=ctx.uniform("density", 0.1, 0.8),
        length=ctx.uniform("length", 0.05, 0.3),
        width=ctx.uniform("width", 0.001, 0.006),
        seed_offset=ctx.uniform("seed_offset", 0.0, 1000.0),
    )


@sampler(id="cracks", interface="mask")
def sample_cracks(ctx, p):
    return masks.cracks(
        p,
        scale=ctx.uniform("scale", 2.0, 10.0),
        width=ctx.uniform("width", 0.005, 0.04),
        depth=ctx.uniform("depth", 0.001, 0.006),
    )


@sampler(id="smudges", interface="mask")
def sample_smudges(ctx, p):
    return masks.smudges(p, scale=ctx.uniform("scale", 1.0, 8.0), coverage=ctx.uniform("coverage", 0.1, 0.6))


@sampler(id="edge_wear", interface="mask")
def sample_edge_wear(ctx, p):
    return masks.edge_wear(p, intensity=ctx.uniform("intensity", 0.3, 2.0), noise_scale=ctx.uniform("noise_scale", 2.0, 12.0))


MASK_SAMPLERS = [sample_scratches, sample_cracks, sample_smudges, sample_edge_wear]


@sampler(id="layered", interface="material")
def sample_layered(ctx, p):
    bottom = ctx.choose("base", [1.0] * len(BASE_SAMPLERS), BASE_SAMPLERS, p)
    top = ctx.choose("top", [1.0] * len(BASE_SAMPLERS), BASE_SAMPLERS, p)
    mask = ctx.choose("mask", [1.0] * len(MASK_SAMPLERS), MASK_SAMPLERS, p)
    return layer(bottom, top, mask)


COMPOSED_WEIGHTS = (0.4, 0.3, 0.3)


@sampler(id="composed", interface="material")
def sample_composed(ctx, p):
    return ctx.choose("kind", COMPOSED_WEIGHTS, [sample_base_material, sample_shaped, sample_layered], p)


MATERIAL_SAMPLERS = BASE_SAMPLERS + [sample_base_material, sample_shaped, sample_layered, sample_composed]
LIBRARY = MATERIAL_SAMPLERS + WIDE_SAMPLERS + SHAPE_SAMPLERS + MASK_SAMPLERS
