"""Material, Mask and Shape handles plus interface checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InterfaceMismatch, OutOfRangeParam
from ..graph import Graph, Out
from ..kinds import ValueKind

MATERIAL_OUTPUTS = {"surface": ValueKind.Color, "roughness": ValueKind.Float, "displacement": ValueKind.Float}
MASK_OUTPUTS = {"mask": ValueKind.Float}
SHAPE_OUTPUTS = {"mask": ValueKind.Float, "cell_id": ValueKind.Float, "cell_uv": ValueKind.Vec2}


def _expect(handle, kind, what):
    if not isinstance(handle, Out):
        raise InterfaceMismatch(f"{what}: expected a graph handle, got {type(handle).__name__}")
    if handle.kind is not kind:
        raise InterfaceMismatch(f"{what}: expected {kind}, got {handle.kind}")


@dataclass
class Material:
    """Surface color, roughness in [0, 1] and scalar displacement (meters).

    The volume slot is part of the interface but always empty here; it is
    recorded in the graph metadata.
    """

    surface: Out
    roughness: Out
    displacement: Out
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name, kind in MATERIAL_OUTPUTS.items():
            _expect(getattr(self, name), kind, f"material.{name}")

    def graph_outputs(self) -> dict:
        return {"surface": self.surface, "roughness": self.roughness, "displacement": self.displacement}

    def graph_meta(self) -> dict:
        return {"interface": "material", "volume": None, **self.meta}


@dataclass
class Mask:
    mask: Out
    crack_depth: float = 0.0  # > 0 marks a crack mask: layering also recesses displacement

    def __post_init__(self):
        _expect(self.mask, ValueKind.Float, "mask")

    def graph_outputs(self) -> dict:
        return {"mask": self.mask}

    def graph_meta(self) -> dict:
        meta = {"interface": "mask"}
        if self.crack_depth > 0:
            meta["crack_depth"] = self.crack_depth
        return meta


@dataclass
class Shape:
    mask: Out
    cell_id: Out
    cell_uv: Out

    def __post_init__(self):
        for name, kind in SHAPE_OUTPUTS.items():
            _expect(getattr(self, name), kind, f"shape.{name}")

    def graph_outputs(self) -> dict:
        return {"mask": self.mask, "cell_id": self.cell_id, "cell_uv": self.cell_uv}

    def graph_meta(self) -> dict:
        return {"interface": "shape"}


def check_graph_interface(graph: Graph, interface: str) -> None:
    """Raise InterfaceMismatch unless the graph exposes exactly the interface's sockets."""
    expected = {"material": MATERIAL_OUTPUTS, "mask": MASK_OUTPUTS, "shape": SHAPE_OUTPUTS}[interface]
    if set(graph.outputs) != set(expected):
        raise InterfaceMismatch(f"{interface} outputs {sorted(graph.outputs)} != {sorted(expected)}")
    for name, kind in expected.items():
        if graph.output_kind(name) is not kind:
            raise InterfaceMismatch(f"{interface}.{name} is {graph.output_kind(name)}, expected {kind}")


def check_range(name: str, value, lo, hi):
    if not (lo <= value <= hi):
        raise OutOfRangeParam(f"{name}={value!r} outside [{lo}, {hi}]")
    return value


def check_hsv(name: str, hsv):
    if len(hsv) != 3:
        raise OutOfRangeParam(f"{name} must be an (h, s, v) triple")
    h, s, v = (float(c) for c in hsv)
    check_range(f"{name}.h", h, 0.0, 1.0)
    check_range(f"{name}.s", s, 0.0, 1.0)
    check_range(f"{name}.v", v, 0.0, 1.0)
    return h, s, v
