"""Static catalog of primitive operations.

Every op has a fixed set of input sockets, params and output sockets; nothing
here depends on param values. Input kinds are either a concrete
:class:`ValueKind`, ``"T"`` (generic, resolved by kind inference) or ``"any"``
(accepted as-is, e.g. the input of ``cast``). Output kinds are a concrete kind,
``"T"`` (the inferred kind) or ``"param:<name>"`` (read from a param).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .kinds import ValueKind

F = ValueKind.Float
I = ValueKind.Int
B = ValueKind.Bool
V2 = ValueKind.Vec2
V3 = ValueKind.Vec3
C = ValueKind.Color


@dataclass(frozen=True)
class ParamSpec:
    name: str
    kind: str
    default: object = None
    lo: float | None = None
    hi: float | None = None
    lo_open: bool = False
    choices: tuple = ()

    @property
    def required(self):
        return self.default is None

    def describe_range(self) -> str:
        if self.choices:
            return "one of " + ", ".join(map(str, self.choices))
        if self.lo is None and self.hi is None:
            return "any"
        left = "(" if self.lo_open else "["
        lo = "-inf" if self.lo is None else repr(self.lo)
        hi = "inf" if self.hi is None else repr(self.hi)
        return f"{left}{lo}, {hi}]"

    def accepts(self, value) -> bool:
        if self.choices:
            return value in self.choices
        if self.kind in ("Float", "Int"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return False
            if self.kind == "Int" and not isinstance(value, int):
                return False
            if not math.isfinite(value):
                return False
            if self.lo is not None and (value <= self.lo if self.lo_open else value < self.lo):
                return False
            if self.hi is not None and value > self.hi:
                return False
            return True
        if self.kind == "Bool":
            return isinstance(value, bool)
        if self.kind == "Str":
            return isinstance(value, str)
        return True


@dataclass(frozen=True)
class OpSignature:
    name: str
    inputs: tuple  # ((socket, kind), ...)
    outputs: tuple  # ((socket, kind), ...)
    params: tuple = ()
    category: str = "math"
    doc: str = ""
    inlinable: bool = False
    symbol: str | None = None
    aux: tuple = field(default=())

    @property
    def input_names(self):
        return tuple(name for name, _ in self.inputs)

    @property
    def output_names(self):
        return tuple(name for name, _ in self.outputs)

    def input_kind(self, socket):
        return dict(self.inputs)[socket]

    def param(self, name) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def manifest(self) -> dict:
        return {
            "name": self.name,
            "category": self.category,
            "inputs": [{"name": n, "kind": str(k)} for n, k in self.inputs],
            "params": [
                {"name": p.name, "kind": p.kind, "default": p.default, "range": p.describe_range()}
                for p in self.params
            ],
            "outputs": [{"name": n, "kind": str(k)} for n, k in self.outputs],
            "doc": self.doc,
        }


def _pos(name, default=None):
    return ParamSpec(name, "Float", default, lo=0.0, lo_open=True)


def _unit(name, default=None):
    return ParamSpec(name, "Float", default, lo=0.0, hi=1.0)


_OPS: list[OpSignature] = []


def _op(name, inputs, outputs, params=(), category="math", doc="", **kw):
    _OPS.append(OpSignature(name, tuple(inputs), tuple(outputs), tuple(params), category, doc, **kw))


# inputs and constants
_op("value", [], [("out", "param:v")], [ParamSpec("v", "any")], "input", "constant literal")
_op("position", [], [("out", V3)], [], "input", "sample point position")
_op(
    "attribute",
    [],
    [("out", "param:kind")],
    [ParamSpec("name", "Str"), ParamSpec("kind", "Str", "Float", choices=tuple(k.value for k in ValueKind))],
    "input",
    "named auxiliary per-point field",
)
_op(
    "cast",
    [("x", "any")],
    [("out", "param:target")],
    [ParamSpec("target", "Str", choices=tuple(k.value for k in ValueKind))],
    "convert",
    "explicit kind conversion from the cast table",
    inlinable=True,
)

# arithmetic
_SYMBOLS = {"add": "+", "sub": "-", "mul": "*", "div": "/", "floordiv": "//", "mod": "%", "pow": "**"}
for _name in ("add", "sub", "mul", "div", "floordiv", "mod", "pow", "minimum", "maximum"):
    _op(_name, [("a", "T"), ("b", "T")], [("out", "T")], doc=f"elementwise {_name}",
        inlinable=True, symbol=_SYMBOLS.get(_name))
for _name, _doc in (
    ("neg", "negation"),
    ("absolute", "absolute value"),
    ("floor", "floor"),
    ("fract", "x - floor(x)"),
    ("sqrt", "square root"),
    ("sin", "sine (radians)"),
    ("cos", "cosine (radians)"),
):
    _op(_name, [("x", "T")], [("out", "T")], doc=_doc, inlinable=True, symbol="-" if _name == "neg" else None)

_op("step", [("edge", F), ("x", F)], [("out", F)], doc="1 where x >= edge else 0")
_op("mix", [("a", "T"), ("b", "T"), ("t", F)], [("out", "T")], doc="a + (b - a) * t", inlinable=True)
_op("clamp", [("x", F), ("lo", F), ("hi", F)], [("out", F)], doc="min(max(x, lo), hi)")
_op("smoothstep", [("lo", F), ("hi", F), ("x", F)], [("out", F)], doc="Hermite 3t^2 - 2t^3")
_op(
    "map_range",
    [("x", F), ("from_lo", F), ("from_hi", F), ("to_lo", F), ("to_hi", F)],
    [("out", F)],
    [ParamSpec("clamp", "Bool", False)],
    doc="linear remap between ranges",
)

# vectors
_op("combine_xyz", [("x", F), ("y", F), ("z", F)], [("out", V3)], category="vector")
_op("separate_xyz", [("v", V3)], [("x", F), ("y", F), ("z", F)], category="vector")
_op("combine_xy", [("x", F), ("y", F)], [("out", V2)], category="vector")
_op("separate_xy", [("v", V2)], [("x", F), ("y", F)], category="vector")
_op("dot", [("a", V3), ("b", V3)], [("out", F)], category="vector")
_op("length", [("v", V3)], [("out", F)], category="vector")
_op("normalize", [("v", V3)], [("out", V3)], category="vector", doc="zero vectors stay zero")
_op("rotate90", [("uv", V2), ("turns", F)], [("out", V2)], category="vector",
    doc="rotate uv about (0.5, 0.5) by floor(turns) mod 4 quarter turns")

# color
_op("hsv_to_rgb", [("h", F), ("s", F), ("v", F)], [("out", C)], category="color", doc="hexcone; h wraps mod 1")
_op("rgb_to_hsv", [("c", C)], [("out", V3)], category="color", doc="hexcone inverse")

# noise
_op("perlin_noise", [("p", V3)], [("out", F)], [_pos("frequency", 1.0)], "noise", "gradient noise in [-1, 1]")
_op(
    "fbm",
    [("p", V3)],
    [("out", F)],
    [
        _pos("frequency", 1.0),
        ParamSpec("octaves", "Int", 4, lo=1, hi=16),
        _pos("lacunarity", 2.0),
        ParamSpec("gain", "Float", 0.5, lo=0.0, hi=1.0),
    ],
    "noise",
    "fractal sum of perlin octaves",
)
_op(
    "voronoi",
    [("p", V3)],
    [("distance", F), ("cell_id", F), ("cell_center", V3)],
    [_pos("frequency", 1.0)],
    "noise",
    "nearest-feature cellular noise",
)
_op("white_noise", [("p", V3)], [("out", F)], [], "noise", "hash of quantized position to [0, 1)")

# shapes
_SHAPE_OUT = [("mask", F), ("cell_id", F), ("cell_uv", V2)]
_op(
    "brick_grid",
    [("uv", V2)],
    _SHAPE_OUT,
    [
        ParamSpec("rows", "Int", 8, lo=1, hi=4096),
        ParamSpec("cols", "Int", 4, lo=1, hi=4096),
        ParamSpec("mortar_width", "Float", 0.01, lo=0.0),
        ParamSpec("row_offset", "Float", 0.5, lo=0.0, hi=1.0),
    ],
    "shape",
    "running-bond bricks with mortar bands",
)
_op(
    "tile_grid",
    [("uv", V2)],
    _SHAPE_OUT,
    [
        ParamSpec("nx", "Int", 4, lo=1, hi=4096),
        ParamSpec("ny", "Int", 4, lo=1, hi=4096),
        ParamSpec("grout", "Float", 0.01, lo=0.0),
    ],
    "shape",
    "rectangular tiles with grout bands",
)
_op(
    "plank_grid",
    [("uv", V2)],
    _SHAPE_OUT,
    [
        ParamSpec("plank_width", "Float", 0.125, lo=0.0, hi=1.0, lo_open=True),
        ParamSpec("length_mean", "Float", 0.5, lo=0.0, hi=1.0, lo_open=True),
        ParamSpec("gap", "Float", 0.004, lo=0.0),
    ],
    "shape",
    "floor planks with per-row random lengths",
)

# masks
_op(
    "scratches",
    [("p", V3)],
    [("out", F)],
    [
        _unit("density", 0.5),
        _pos("length", 0.2),
        _pos("width", 0.003),
        ParamSpec("seed_offset", "Float", 0.0),
    ],
    "mask",
    "union of hashed line segments",
)
_op("cracks", [("p", V3)], [("out", F)], [_pos("scale", 4.0), ParamSpec("width", "Float", 0.02, lo=0.0)],
    "mask", "voronoi edge mask")
_op("smudges", [("p", V3)], [("out", F)], [_pos("scale", 3.0), _unit("coverage", 0.3)],
    "mask", "thresholded fbm with calibrated coverage")
_op(
    "edge_wear",
    [("p", V3), ("curvature", F)],
    [("out", F)],
    [ParamSpec("intensity", "Float", 1.0, lo=0.0), _pos("noise_scale", 5.0)],
    "mask",
    "curvature-driven wear modulated by fbm",
)

CATALOG: dict[str, OpSignature] = {sig.name: sig for sig in _OPS}

BINARY_SYMBOLS = {sig.symbol: sig.name for sig in _OPS if sig.symbol and len(sig.inputs) == 2}


def manifest() -> list[dict]:
    return [sig.manifest() for sig in _OPS]
