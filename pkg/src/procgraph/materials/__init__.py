"""Compositional material library: 6 bases, 3 shapes, 4 masks, and their samplers."""

from .base import (
    BASES,
    PARAMS,
    concrete,
    fabric,
    make_concrete,
    make_fabric,
    make_marble,
    make_material,
    make_metal,
    make_paint,
    make_wood,
    marble,
    metal,
    paint,
    resolve_params,
    wood,
)
from .compose import apply_shape, layer
from .interfaces import Mask, Material, Shape, check_graph_interface
from .masks import MASKS
from .samplers import (
    BASE_SAMPLERS,
    LIBRARY,
    MASK_SAMPLERS,
    MATERIAL_SAMPLERS,
    SHAPE_SAMPLERS,
    WIDE_SAMPLERS,
    sample_base_material,
    sample_composed,
    sample_layered,
    sample_shaped,
)
from .shapes import SHAPES

__all__ = [
    "BASES", "PARAMS", "MASKS", "SHAPES", "LIBRARY", "BASE_SAMPLERS", "MASK_SAMPLERS", "MATERIAL_SAMPLERS",
    "SHAPE_SAMPLERS", "WIDE_SAMPLERS", "Material", "Mask", "Shape", "apply_shape", "layer", "check_graph_interface",
    "make_material", "make_wood", "make_marble", "make_paint", "make_metal", "make_fabric", "make_concrete",
    "wood", "marble", "paint", "metal", "fabric", "concrete", "resolve_params",
    "sample_base_material", "sample_composed", "sample_layered", "sample_shaped",
]
