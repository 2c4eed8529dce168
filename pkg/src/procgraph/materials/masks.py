"""Mask generators. Every output is a Float in [0, 1]."""

from __future__ import annotations

from .. import ops
from ..graph import Out
from ..sampler import deterministic
from .interfaces import Mask


@deterministic
def scratches(p: Out, density: float = 0.5, length: float = 0.2, width: float = 0.003, seed_offset: float = 0.0) -> Mask:
    return Mask(ops.scratches(p, density=density, length=length, width=width, seed_offset=seed_offset))


@deterministic
def cracks(p: Out, scale: float = 4.0, width: float = 0.02, depth: float = 0.003) -> Mask:
    """Voronoi-edge cracks; ``depth`` is how far a layered material is recessed."""
    return Mask(ops.cracks(p, scale=scale, width=width), crack_depth=depth)


@deterministic
def smudges(p: Out, scale: float = 3.0, coverage: float = 0.3) -> Mask:
    return Mask(ops.smudges(p, scale=scale, coverage=coverage))


@deterministic
def edge_wear(p: Out, intensity: float = 1.0, noise_scale: float = 5.0) -> Mask:
    """Wear driven by the ``curvature`` attribute of the sampled surface."""
    curvature = p.builder.attribute("curvature", "Float")
    return Mask(ops.edge_wear(p, curvature, intensity=intensity, noise_scale=noise_scale))


MASKS = {"scratches": scratches, "cracks": cracks, "smudges": smudges, "edge_wear": edge_wear}
