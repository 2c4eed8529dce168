"""Value kinds, literal types, kind inference and the cast table."""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

from .errors import AmbiguousKind, InvalidParam, UnsupportedCast


class ValueKind(str, enum.Enum):
    Int = "Int"
    Float = "Float"
    Vec2 = "Vec2"
    Vec3 = "Vec3"
    Color = "Color"
    Bool = "Bool"

    def __str__(self):
        return self.value

    @property
    def arity(self) -> int:
        return _ARITY[self]


_ARITY = {
    ValueKind.Int: 1,
    ValueKind.Float: 1,
    ValueKind.Bool: 1,
    ValueKind.Vec2: 2,
    ValueKind.Vec3: 3,
    ValueKind.Color: 3,
}

SCALARS = (ValueKind.Int, ValueKind.Float)
VECTORS = (ValueKind.Vec2, ValueKind.Vec3, ValueKind.Color)


class Vec2(NamedTuple):
    x: float
    y: float


class Vec3(NamedTuple):
    x: float
    y: float
    z: float


class Color(NamedTuple):
    r: float
    g: float
    b: float


_LITERAL_TYPES = {Vec2: ValueKind.Vec2, Vec3: ValueKind.Vec3, Color: ValueKind.Color}


def literal_kind(value) -> ValueKind:
    """Kind of a Python literal; plain tuples of length 2/3 read as Vec2/Vec3."""
    if isinstance(value, bool):
        return ValueKind.Bool
    if isinstance(value, int):
        return ValueKind.Int
    if isinstance(value, float):
        return ValueKind.Float
    kind = _LITERAL_TYPES.get(type(value))
    if kind is not None:
        return kind
    if isinstance(value, (tuple, list)) and len(value) in (2, 3):
        return ValueKind.Vec2 if len(value) == 2 else ValueKind.Vec3
    raise TypeError(f"not a graph literal: {value!r}")


def coerce_literal(value, kind: ValueKind):
    """Normalize a literal to its canonical Python form for ``kind``."""
    if kind is ValueKind.Bool:
        return bool(value)
    if kind is ValueKind.Int:
        return int(value)
    if kind is ValueKind.Float:
        return float(value)
    comps = tuple(float(v) for v in value)
    if kind is ValueKind.Vec2:
        return Vec2(*comps)
    if kind is ValueKind.Vec3:
        return Vec3(*comps)
    return Color(*comps)


# Tagged values: {"kind": ..., "v": ...}. Params may additionally carry strings.


def tag(value) -> dict:
    if isinstance(value, str):
        return {"kind": "Str", "v": value}
    kind = literal_kind(value)
    v = coerce_literal(value, kind)
    if kind.arity > 1:
        v = list(v)
    return {"kind": kind.value, "v": v}


def untag(tagged: dict):
    if not isinstance(tagged, dict) or set(tagged) != {"kind", "v"}:
        raise ValueError(f"malformed tagged value: {tagged!r}")
    kind = tagged["kind"]
    if kind == "Str":
        if not isinstance(tagged["v"], str):
            raise ValueError(f"malformed string value: {tagged!r}")
        return tagged["v"]
    return coerce_literal(tagged["v"], ValueKind(kind))


# Kind inference. Int < Float; scalars broadcast against vector kinds;
# distinct vector kinds never mix implicitly; Bool takes part in no arithmetic.

ARITHMETIC_OPS = ("add", "sub", "mul", "div", "floordiv", "mod", "pow", "minimum", "maximum")
_FLOAT_RESULT_OPS = ("div", "pow")


def infer_binary(op: str, a: ValueKind, b: ValueKind) -> ValueKind:
    a, b = ValueKind(a), ValueKind(b)
    if ValueKind.Bool in (a, b):
        raise AmbiguousKind(op, (a, b))
    if a in SCALARS and b in SCALARS:
        if a is ValueKind.Int and b is ValueKind.Int and op not in _FLOAT_RESULT_OPS:
            return ValueKind.Int
        return ValueKind.Float
    if a in SCALARS:
        return b
    if b in SCALARS:
        return a
    if a is b:
        return a
    raise AmbiguousKind(op, (a, b))


def infer_kind(op: str, input_kinds) -> ValueKind:
    """Result kind for a generic op given the kinds of its generic inputs."""
    kinds = [ValueKind(k) for k in input_kinds]
    if not kinds:
        raise AmbiguousKind(op, kinds)
    if op in ARITHMETIC_OPS or op == "mix":
        result = kinds[0]
        for k in kinds[1:]:
            result = infer_binary(op, result, k)
        return result
    if len(kinds) == 1:
        if kinds[0] is ValueKind.Bool:
            raise AmbiguousKind(op, kinds)
        return kinds[0]
    raise AmbiguousKind(op, kinds)


# Closed cast table: (source, target) -> short description.
CAST_TABLE = {
    (ValueKind.Float, ValueKind.Int): "truncate toward zero",
    (ValueKind.Int, ValueKind.Float): "exact widening",
    (ValueKind.Bool, ValueKind.Int): "False -> 0, True -> 1",
    (ValueKind.Bool, ValueKind.Float): "False -> 0.0, True -> 1.0",
    (ValueKind.Vec3, ValueKind.Color): "identity bits",
    (ValueKind.Color, ValueKind.Vec3): "identity bits",
    (ValueKind.Float, ValueKind.Vec3): "splat (x, x, x)",
    (ValueKind.Int, ValueKind.Vec3): "splat (x, x, x)",
    (ValueKind.Float, ValueKind.Color): "splat (x, x, x)",
    (ValueKind.Vec3, ValueKind.Float): "component mean",
    (ValueKind.Color, ValueKind.Float): "component mean",
    (ValueKind.Vec2, ValueKind.Vec3): "(x, y, 0)",
    (ValueKind.Vec3, ValueKind.Vec2): "(x, y)",
}


def check_cast(source: ValueKind, target: ValueKind) -> None:
    source, target = ValueKind(source), ValueKind(target)
    if source is target:
        return
    if (source, target) not in CAST_TABLE:
        raise UnsupportedCast(f"no cast from {source} to {target}")


def cast_literal(value, target: ValueKind):
    """Apply the cast table to a Python literal (used for constant folding)."""
    source = literal_kind(value)
    target = ValueKind(target)
    check_cast(source, target)
    if source is target:
        return coerce_literal(value, target)
    if target is ValueKind.Int:
        return int(math.trunc(float(value)))
    if target is ValueKind.Float:
        if source in (ValueKind.Vec3, ValueKind.Color):
            return (value[0] + value[1] + value[2]) / 3.0
        return float(value)
    if target in (ValueKind.Vec3, ValueKind.Color):
        if source in SCALARS:
            x = float(value)
            return coerce_literal((x, x, x), target)
        if source is ValueKind.Vec2:
            return Vec3(float(value[0]), float(value[1]), 0.0)
        return coerce_literal(value, target)
    if target is ValueKind.Vec2:
        return Vec2(float(value[0]), float(value[1]))
    raise InvalidParam(f"unhandled cast {source} -> {target}")
