"""Shape generators: bricks, tiles and planks over the xy plane of the input."""

from __future__ import annotations

from .. import ops
from ..graph import Out
from ..sampler import deterministic
from .interfaces import Shape


def _uv(p: Out) -> Out:
    x, y, _ = ops.separate_xyz(p)
    return ops.combine_xy(x, y)


@deterministic
def bricks(p: Out, rows: int = 8, cols: int = 4, mortar_width: float = 0.01, row_offset: float = 0.5) -> Shape:
    r = ops.brick_grid(_uv(p), rows=rows, cols=cols, mortar_width=mortar_width, row_offset=row_offset)
    return Shape(r.mask, r.cell_id, r.cell_uv)


@deterministic
def tiles(p: Out, nx: int = 4, ny: int = 4, grout: float = 0.01) -> Shape:
    r = ops.tile_grid(_uv(p), nx=nx, ny=ny, grout=grout)
    return Shape(r.mask, r.cell_id, r.cell_uv)


@deterministic
def planks(p: Out, plank_width: float = 0.125, length_mean: float = 0.5, gap: float = 0.004) -> Shape:
    r = ops.plank_grid(_uv(p), plank_width=plank_width, length_mean=length_mean, gap=gap)
    return Shape(r.mask, r.cell_id, r.cell_uv)


SHAPES = {"bricks": bricks, "tiles": tiles, "planks": planks}
