"""Greedy alignment relations between objects and walls.

Objects face local +y; their back is the local -y side. A placement is
computed from world AABBs and then post-checked with the collision module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import NoFeasiblePlacement
from .collision import ColliderCache, CollisionWorld, SceneObject
from .room import room_panels

RELATIONS = ("back-to", "side-of", "on-top-of")


@dataclass(frozen=True)
class Wall:
    """An axis-aligned wall plane with its inward normal, optionally backed by the room object."""

    name: str
    point: np.ndarray
    normal: np.ndarray
    room: SceneObject | None = None

    @classmethod
    def of_room(cls, name: str, width: float, depth: float, height: float, room: SceneObject | None = None):
        p = room_panels(width, depth, height)[name]
        return cls(name, p.origin.copy(), p.inward.copy(), room)


def _axis(v: np.ndarray) -> tuple:
    k = int(np.argmax(np.abs(v)))
    return k, 1.0 if v[k] > 0 else -1.0


def _shift(obj: SceneObject, axis: int, delta: float) -> SceneObject:
    t = obj.translation.copy()
    t[axis] += delta
    return obj.moved(translation=t)


def facing_angle(normal) -> float:
    """Rotation that turns an object's back (local -y) toward a wall with inward ``normal``."""
    return math.atan2(-normal[0], normal[1])


def _back_to(obj: SceneObject, wall: Wall, gap: float) -> SceneObject:
    n = np.asarray(wall.normal, dtype=np.float64)
    placed = obj.moved(rotation=facing_angle(n))
    # rotating about the origin moves the box; restore the footprint center
    lo0, hi0 = obj.aabb()
    lo1, hi1 = placed.aabb()
    placed = placed.moved(translation=placed.translation + 0.5 * ((lo0 + hi0) - (lo1 + hi1)))
    k, sign = _axis(n)
    lo, hi = placed.aabb()
    plane = float(wall.point[k])
    if sign > 0:
        return _shift(placed, k, plane + gap - lo[k])
    return _shift(placed, k, plane - gap - hi[k])


def _side_of(obj: SceneObject, target: SceneObject, gap: float, side: int) -> SceneObject:
    d = np.array([math.cos(target.rotation), math.sin(target.rotation), 0.0]) * side
    k, sign = _axis(d)
    lo, hi = obj.aabb()
    tlo, thi = target.aabb()
    if sign > 0:
        return _shift(obj, k, thi[k] + gap - lo[k])
    return _shift(obj, k, tlo[k] - gap - hi[k])


def _on_top_of(obj: SceneObject, target: SceneObject, gap: float) -> SceneObject:
    lo, _ = obj.aabb()
    _, thi = target.aabb()
    return _shift(obj, 2, thi[2] + gap - lo[2])


def align(
    obj: SceneObject,
    target,
    relation: str,
    gap: float = 0.0,
    side: int = 1,
    cache: ColliderCache | None = None,
) -> SceneObject:
    """Place ``obj`` relative to ``target`` and return the moved object.

    ``back-to`` needs a :class:`Wall`; it rotates ``obj`` so its back faces
    the wall and slides it along the wall normal until the gap is met.
    ``side-of`` slides along the target's local x axis (``side`` = +1 or -1).
    ``on-top-of`` sets the bottom of ``obj`` to the top of the target plus gap.
    Coordinates not named by the relation are kept.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    if relation == "back-to":
        if not isinstance(target, Wall):
            raise TypeError("back-to needs a Wall target")
        placed = _back_to(obj, target, gap)
        other = target.room
        k, sign = _axis(np.asarray(target.normal))
        lo, hi = placed.aabb()
        plane = float(target.point[k])
        if (sign > 0 and lo[k] < plane - 1e-9) or (sign < 0 and hi[k] > plane + 1e-9):
            raise NoFeasiblePlacement(f"object crosses wall {target.name}")
    else:
        if not isinstance(target, SceneObject):
            raise TypeError(f"{relation} needs a SceneObject target")
        placed = _side_of(obj, target, gap, side) if relation == "side-of" else _on_top_of(obj, target, gap)
        other = target
    if other is not None:
        world = CollisionWorld([other], cache)
        if world.collides_with_any(placed):
            raise NoFeasiblePlacement(f"{relation} placement interpenetrates its target")
    return placed
