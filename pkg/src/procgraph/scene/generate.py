"""Random rooms: shell, displaced material floor, furniture proxies and cameras.

A scene is stored as generator references plus transforms, so loading it
rebuilds every mesh from the same functions and seeds that made it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NoFeasiblePlacement
from ..mesh import Mesh, compute_curvature, displace, make_box, make_cylinder, make_grid
from ..rng import RandomStream
from ..materials import sample_composed
from ..sampler import sample
from .arrange import Wall, align
from .cameras import CameraSpec, random_cameras
from .collision import ColliderCache, CollisionWorld, SceneObject
from .planning import BoxWorld
from .room import WALLS, Window, make_room, room_panels

SCENE_VERSION = 1
CAMERA_CLEARANCE = 0.25  # meters between a camera and any furniture box
PLACEMENT_ATTEMPTS = 20

# furniture proxies: size ranges (x, y, z) in meters
FURNITURE = {
    "sofa": ((1.6, 2.4), (0.8, 1.0), (0.7, 0.9)),
    "shelf": ((0.8, 1.4), (0.3, 0.45), (1.4, 2.0)),
    "table": ((0.5, 0.9), (0.5, 0.9), (0.45, 0.75)),
    "cabinet": ((0.5, 1.0), (0.4, 0.6), (0.6, 1.1)),
}


def build_mesh(source: dict) -> Mesh:
    """Rebuild a mesh from its generator reference."""
    gen = source["generator"]
    if gen == "room":
        return make_room(
            source["width"],
            source["depth"],
            source["height"],
            source["quad_size"],
            [Window.from_json(w) for w in source["windows"]],
            include_floor=False,
        )
    if gen == "floor":
        return make_floor(source["width"], source["depth"], source["quad_size"], source["material_seed"], source["amplitude"])
    if gen == "box":
        return make_box(tuple(source["size"]))
    if gen == "cylinder":
        return make_cylinder(source["radius"], source["height"], source["segments"])
    raise ValueError(f"unknown mesh generator {gen!r}")


def make_floor(width: float, depth: float, quad_size: float, material_seed: int | None, amplitude: float = 1.0) -> Mesh:
    """Floor grid displaced along +z by a composed material (flat when ``material_seed`` is None)."""
    nx = max(1, math.ceil(width / quad_size - 1e-9))
    ny = max(1, math.ceil(depth / quad_size - 1e-9))
    grid = compute_curvature(make_grid(nx, ny, (width, depth)))
    if material_seed is None:
        return grid
    graph = sample(sample_composed, int(material_seed))
    return displace(grid, graph, "displacement", amplitude)


@dataclass
class Scene:
    seed: int
    width: float
    depth: float
    height: float
    objects: list = field(default_factory=list)
    cameras: list = field(default_factory=list)

    @property
    def bounds(self):
        return np.zeros(3), np.array([self.width, self.depth, self.height])

    def furniture(self) -> list:
        return [o for o in self.objects if "furniture" in o.tags]

    def free_space(self, inflate: float = CAMERA_CLEARANCE, margin: float = CAMERA_CLEARANCE) -> BoxWorld:
        """Point validator shared by camera placement and trajectory planning."""
        lo, hi = self.bounds
        return BoxWorld.from_scene((lo + margin, hi - margin), self.furniture(), inflate)

    def to_json(self) -> dict:
        return {
            "version": SCENE_VERSION,
            "seed": self.seed,
            "room": {"width": self.width, "depth": self.depth, "height": self.height},
            "objects": [
                {
                    "source": o.source,
                    "translation": o.translation.tolist(),
                    "rotation": o.rotation,
                    "scale": o.scale,
                    "tags": list(o.tags),
                    "solid": o.solid,
                }
                for o in self.objects
            ],
            "cameras": [c.to_json() for c in self.cameras],
        }

    @classmethod
    def from_json(cls, d: dict) -> "Scene":
        if d.get("version") != SCENE_VERSION:
            raise ValueError(f"unsupported scene version {d.get('version')!r}")
        meshes: dict = {}
        objects = []
        for o in d["objects"]:
            key = json.dumps(o["source"], sort_keys=True)
            if key not in meshes:
                meshes[key] = build_mesh(o["source"])
            objects.append(
                SceneObject(meshes[key], o["translation"], o["rotation"], o["scale"], tuple(o["tags"]), o["source"], o["solid"])
            )
        r = d["room"]
        return cls(d["seed"], r["width"], r["depth"], r["height"], objects, [CameraSpec.from_json(c) for c in d["cameras"]])

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Scene":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _random_windows(s: RandomStream, width, depth, height) -> list:
    panels = room_panels(width, depth, height)
    windows = []
    for wall in WALLS:
        if s.random() < 0.5:
            p = panels[wall]
            w = round(s.uniform(0.6, min(1.6, p.u_len - 0.6)), 3)
            h = round(s.uniform(0.6, min(1.2, p.v_len - 1.2)), 3)
            u0 = round(s.uniform(0.3, p.u_len - w - 0.3), 3)
            v0 = round(s.uniform(0.8, p.v_len - h - 0.2), 3)
            windows.append(Window(wall, u0, v0, u0 + w, v0 + h))
    return windows


def _box(s: RandomStream, kind: str, material_seed: int) -> SceneObject:
    size = [round(s.uniform(lo, hi), 3) for lo, hi in FURNITURE[kind]]
    src = {"generator": "box", "size": size}
    return SceneObject(make_box(tuple(size)), tags=("furniture", kind), source=src | {"material_seed": material_seed})


def _inside(obj: SceneObject, width, depth) -> bool:
    lo, hi = obj.aabb()
    return bool(lo[0] >= -1e-9 and lo[1] >= -1e-9 and hi[0] <= width + 1e-9 and hi[1] <= depth + 1e-9)


def _place(s, obj, kind, world, placed, room_obj, width, depth, height):
    """Greedy relation placement with collision rejection; returns None when every attempt fails."""
    for _ in range(PLACEMENT_ATTEMPTS):
        lo, hi = obj.aabb()
        x = s.uniform(0.0, max(width - (hi[0] - lo[0]), 0.0))
        y = s.uniform(0.0, max(depth - (hi[1] - lo[1]), 0.0))
        cand = obj.moved(translation=np.array([x, y, 0.0]) - np.array([lo[0], lo[1], 0.0]) + obj.translation)
        try:
            if kind in ("sofa", "shelf", "cabinet"):
                wall = Wall.of_room(WALLS[s.randint(4)], width, depth, height, room_obj)
                cand = align(cand, wall, "back-to", 0.0, cache=world.cache)
            elif kind == "table" and placed:
                anchor = placed[s.randint(len(placed))]
                cand = align(cand, anchor, "side-of", round(s.uniform(0.05, 0.3), 3), side=1 if s.random() < 0.5 else -1, cache=world.cache)
        except NoFeasiblePlacement:
            continue
        if _inside(cand, width, depth) and not world.collides_with_any(cand):
            return cand
    return None


def sample_room(
    seed: int,
    n_cameras: int = 12,
    resolution=(128, 128),
    floor_quad: float = 0.04,
    floor_amplitude: float = 1.0,
    quad_size: float = 0.5,
    displaced_floor: bool = True,
    stereo_baseline: float | None = None,
) -> Scene:
    """Sample a furnished room with ``n_cameras`` random views; a pure function of its arguments."""
    s = RandomStream(seed).split("room")
    width = round(s.uniform(3.5, 6.0), 3)
    depth = round(s.uniform(3.0, 5.0), 3)
    height = round(s.uniform(2.4, 3.0), 3)
    windows = _random_windows(s.split("windows"), width, depth, height)
    room_src = {
        "generator": "room",
        "width": width,
        "depth": depth,
        "height": height,
        "quad_size": quad_size,
        "windows": [w.to_json() for w in windows],
    }
    room_obj = SceneObject(build_mesh(room_src), tags=("room",), source=room_src, solid=False)
    floor_src = {
        "generator": "floor",
        "width": width,
        "depth": depth,
        "quad_size": floor_quad,
        "material_seed": s.split("floor").randint(2**31) if displaced_floor else None,
        "amplitude": floor_amplitude,
    }
    floor_obj = SceneObject(build_mesh(floor_src), tags=("floor",), source=floor_src, solid=False)

    # furniture rests on the nominal floor plane; the floor grid is left out of placement checks
    world = CollisionWorld([room_obj], ColliderCache())
    fs = s.split("furniture")
    kinds = ["sofa", "table", "shelf", "cabinet", "table"][: 2 + fs.randint(4)]
    placed = []
    for i, kind in enumerate(kinds):
        si = fs.split(f"item{i}")
        obj = _box(si, kind, si.randint(2**31))
        cand = _place(si, obj, kind, world, placed, room_obj, width, depth, height)
        if cand is not None:
            world.add(cand)
            placed.append(cand)

    scene = Scene(seed, width, depth, height, [room_obj, floor_obj, *placed])
    free = scene.free_space()
    lo, hi = free.lo.copy(), free.hi.copy()
    lo[2], hi[2] = max(lo[2], 0.8), min(hi[2], 2.0)
    scene.cameras = random_cameras(s.split("cameras"), (lo, hi), n_cameras, free, stereo_baseline, resolution=resolution)
    return scene
