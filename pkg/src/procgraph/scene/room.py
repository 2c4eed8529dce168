"""Room shells: floor, ceiling and four walls as quad grids with window cutouts.

Wall coordinates are (u, v) in meters: v is height above the floor, u runs
along the wall (along +x for the south and north walls, along +y for the
west and east walls). Every panel is wound so its normal faces into the room.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import OverlappingWindows, WindowOutOfBounds
from ..mesh import Mesh, _new

WALLS = ("south", "north", "west", "east")
SNAP = 1e-12


@dataclass(frozen=True)
class Window:
    wall: str
    u0: float
    v0: float
    u1: float
    v1: float

    @property
    def area(self) -> float:
        return (self.u1 - self.u0) * (self.v1 - self.v0)

    def to_json(self) -> dict:
        return {"wall": self.wall, "rect": [self.u0, self.v0, self.u1, self.v1]}

    @classmethod
    def from_json(cls, d: dict) -> "Window":
        return cls(d["wall"], *map(float, d["rect"]))


@dataclass(frozen=True)
class Panel:
    name: str
    origin: np.ndarray  # world point at (u, v) = (0, 0)
    u_axis: np.ndarray
    v_axis: np.ndarray
    u_len: float
    v_len: float
    inward: np.ndarray

    def point(self, u, v):
        return self.origin + np.multiply.outer(u, self.u_axis) + np.multiply.outer(v, self.v_axis)


def room_panels(width: float, depth: float, height: float) -> dict:
    ex, ey, ez = np.eye(3)
    return {
        "floor": Panel("floor", np.zeros(3), ex, ey, width, depth, ez),
        "ceiling": Panel("ceiling", height * ez, ex, ey, width, depth, -ez),
        "south": Panel("south", np.zeros(3), ex, ez, width, height, ey),
        "north": Panel("north", depth * ey, ex, ez, width, height, -ey),
        "west": Panel("west", np.zeros(3), ey, ez, depth, height, ex),
        "east": Panel("east", width * ex, ey, ez, depth, height, -ex),
    }


def wall_normal(wall: str) -> np.ndarray:
    """Inward unit normal of a wall (pointing into the room)."""
    return room_panels(1.0, 1.0, 1.0)[wall].inward.copy()


def _grid_lines(length: float, quad_size: float, cuts) -> np.ndarray:
    n = max(1, math.ceil(length / quad_size - 1e-9))
    lines = list(np.linspace(0.0, length, n + 1))
    lines.extend(cuts)
    lines.sort()
    out = [lines[0]]
    for x in lines[1:]:
        if x - out[-1] > SNAP:
            out.append(x)
        else:
            # prefer the exact cut value over the nearby regular line
            out[-1] = x if x in cuts else out[-1]
    return np.array(out)


def validate_windows(width, depth, height, windows) -> None:
    panels = room_panels(width, depth, height)
    for w in windows:
        if w.wall not in WALLS:
            raise WindowOutOfBounds(f"unknown wall {w.wall!r}")
        p = panels[w.wall]
        if not (0.0 <= w.u0 < w.u1 <= p.u_len and 0.0 <= w.v0 < w.v1 <= p.v_len):
            raise WindowOutOfBounds(f"window {w} outside {w.wall} wall {p.u_len} x {p.v_len}")
    for i, a in enumerate(windows):
        for b in windows[i + 1:]:
            if a.wall != b.wall:
                continue
            if min(a.u1, b.u1) > max(a.u0, b.u0) and min(a.v1, b.v1) > max(a.v0, b.v0):
                raise OverlappingWindows(f"windows {a} and {b} overlap")


def _panel_mesh(panel: Panel, quad_size: float, holes) -> tuple:
    us = _grid_lines(panel.u_len, quad_size, [c for h in holes for c in (h.u0, h.u1)])
    vs = _grid_lines(panel.v_len, quad_size, [c for h in holes for c in (h.v0, h.v1)])
    uu, vv = np.meshgrid(us, vs)  # (nv, nu)
    verts = panel.point(uu.ravel(), vv.ravel())
    nu = len(us)
    i, j = np.meshgrid(np.arange(nu - 1), np.arange(len(vs) - 1))
    i, j = i.ravel(), j.ravel()
    a = j * nu + i
    faces = np.stack([a, a + 1, a + nu + 1, a + nu], axis=1)
    cu = 0.5 * (us[i] + us[i + 1])
    cv = 0.5 * (vs[j] + vs[j + 1])
    keep = np.ones(len(faces), dtype=bool)
    for h in holes:
        keep &= ~((cu > h.u0) & (cu < h.u1) & (cv > h.v0) & (cv < h.v1))
    faces = faces[keep]
    uv = np.stack([uu.ravel() / panel.u_len, vv.ravel() / panel.v_len], axis=1)[faces]
    if np.dot(np.cross(panel.u_axis, panel.v_axis), panel.inward) < 0:
        faces = faces[:, ::-1]
        uv = uv[:, ::-1]
    return verts, faces, uv


def make_room(
    width: float,
    depth: float,
    height: float,
    quad_size: float = 0.5,
    windows=(),
    include_floor: bool = True,
    include_ceiling: bool = True,
) -> Mesh:
    """Quad-only room shell over [0, width] x [0, depth] x [0, height].

    Each panel is split on a regular grid of at most ``quad_size`` and on
    every window edge, so a window removes whole quads and the hole matches
    the rectangle exactly.
    """
    if min(width, depth, height) <= 0 or quad_size <= 0:
        raise ValueError("room dimensions and quad_size must be positive")
    windows = [w if isinstance(w, Window) else Window(*w) for w in windows]
    validate_windows(width, depth, height, windows)
    panels = room_panels(width, depth, height)
    names = ["floor", "ceiling", *WALLS]
    verts, faces, uvs = [], [], []
    offset = 0
    for name in names:
        if (name == "floor" and not include_floor) or (name == "ceiling" and not include_ceiling):
            continue
        v, f, uv = _panel_mesh(panels[name], quad_size, [w for w in windows if w.wall == name])
        verts.append(v)
        faces.append(f + offset)
        uvs.append(uv)
        offset += len(v)
    verts = np.concatenate(verts)
    faces = np.concatenate(faces)
    # drop vertices only used by removed quads
    used = np.unique(faces)
    remap = np.full(len(verts), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return _new(verts[used], remap[faces], np.concatenate(uvs))


def panel_face_counts(width, depth, height, quad_size) -> dict:
    """Face count per panel of a window-free room (regular grid only)."""
    out = {}
    for name, p in room_panels(width, depth, height).items():
        nu = max(1, math.ceil(p.u_len / quad_size - 1e-9))
        nv = max(1, math.ceil(p.v_len / quad_size - 1e-9))
        out[name] = nu * nv
    return out
