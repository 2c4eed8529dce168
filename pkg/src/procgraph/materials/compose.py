"""Composition: materials laid out by a shape, and materials layered through a mask."""

from __future__ import annotations

from typing import Callable, Sequence

from .. import ops
from ..errors import InterfaceMismatch
from ..graph import Out
from ..sampler import deterministic
from .interfaces import Mask, Material, Shape

HUE_JITTER = 0.08
VALUE_JITTER = 0.3


def _cell_coordinates(p: Out, shape: Shape, variation: float) -> Out:
    cuv = shape.cell_uv
    x, y, z = ops.separate_xyz(p)
    if variation > 0:
        # quarter turns and a z offset keyed by cell id decorrelate neighbouring cells
        cuv = ops.rotate90(cuv, ops.floor(shape.cell_id * 4.0))
        z = z + shape.cell_id * 17.0
    u, v = ops.separate_xy(cuv)
    return ops.combine_xyz(u, v, z)


def _jitter(surface: Out, cell_id: Out, variation: float) -> Out:
    h, s, v = ops.separate_xyz(ops.rgb_to_hsv(surface))
    h = h + (cell_id - 0.5) * (HUE_JITTER * variation)
    v = v * ((ops.fract(cell_id * 7.0) - 0.5) * (VALUE_JITTER * variation) + 1.0)
    return ops.hsv_to_rgb(h, s, v)


def apply_shape(
    p: Out,
    shape: Shape,
    cells: Sequence[Callable[[Out], Material]],
    grout: Material,
    variation: float = 0.0,
    recess_depth: float = 0.002,
) -> Material:
    """Fill the cells of ``shape`` with materials and the bands between them with ``grout``.

    Cell materials are built on the cell's own uv (``cell_uv`` as x, y and the
    input's z). With several candidates a cell picks ``cells[floor(id * k)]``.
    With ``variation > 0`` every cell also gets a hue/value jitter and a
    quarter-turn rotation keyed by its id. Grout displacement sits
    ``recess_depth`` below the grout material's own displacement.
    """
    if not isinstance(shape, Shape):
        raise InterfaceMismatch(f"apply_shape needs a Shape, got {type(shape).__name__}")
    if not isinstance(grout, Material):
        raise InterfaceMismatch(f"grout must be a Material, got {type(grout).__name__}")
    if not cells:
        raise InterfaceMismatch("apply_shape needs at least one cell material")
    q = _cell_coordinates(p, shape, variation)
    built = [f(q) for f in cells]
    for m in built:
        if not isinstance(m, Material):
            raise InterfaceMismatch(f"cell material builder returned {type(m).__name__}")
    cell = built[0]
    k = len(built)
    surface, rough, disp = cell.surface, cell.roughness, cell.displacement
    for i, m in enumerate(built[1:], start=1):
        pick = ops.step(i / k, shape.cell_id)
        surface = ops.mix(surface, m.surface, pick)
        rough = ops.mix(rough, m.roughness, pick)
        disp = ops.mix(disp, m.displacement, pick)
    if variation > 0:
        surface = _jitter(surface, shape.cell_id, variation)
    meta = {"shape": True, "cells": [m.meta for m in built], "grout": grout.meta}
    return Material(
        ops.mix(grout.surface, surface, shape.mask),
        ops.mix(grout.roughness, rough, shape.mask),
        ops.mix(grout.displacement - recess_depth, disp, shape.mask),
        meta,
    )


@deterministic
def layer(base: Material, top: Material, mask: Mask) -> Material:
    """Blend every channel from ``base`` to ``top`` by ``mask``; crack masks also cut into displacement."""
    for name, m in (("base", base), ("top", top)):
        if not isinstance(m, Material):
            raise InterfaceMismatch(f"layer {name} must be a Material, got {type(m).__name__}")
    if not isinstance(mask, Mask):
        raise InterfaceMismatch(f"layer mask must be a Mask, got {type(mask).__name__}")
    t = mask.mask
    disp = ops.mix(base.displacement, top.displacement, t)
    if mask.crack_depth > 0:
        disp = disp - t * mask.crack_depth
    meta = {"layer": {"base": base.meta, "top": top.meta, "crack_depth": mask.crack_depth}}
    return Material(
        ops.mix(base.surface, top.surface, t),
        ops.mix(base.roughness, top.roughness, t),
        disp,
        meta,
    )
