"""End-to-end dataset runs: rooms, cameras and ground-truth frames on disk.

Every scene draws its seed from a stream split off the run seed, so the
output tree depends only on the run seed, the flags and the tool version,
never on the worker count.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .gt import render_gt
from .io import depth_preview, normal_preview, write_pfm, write_png
from .rng import RandomStream
from .scene.collision import ColliderCache
from .scene.generate import sample_room

FORMATS = ("pfm", "png")


def scene_seeds(seed: int, n: int) -> list:
    root = RandomStream(seed)
    return [root.split(f"scene{i}").randint(2**31) for i in range(n)]


@dataclass
class DatasetManifest:
    seed: int
    scenes: int
    cameras_per_scene: int
    resolution: int
    format: str
    version: str
    entries: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "tool": "procgraph",
            "version": self.version,
            "seed": self.seed,
            "scenes": self.scenes,
            "cameras_per_scene": self.cameras_per_scene,
            "resolution": self.resolution,
            "format": self.format,
            "entries": self.entries,
        }

    def files(self) -> list:
        out = []
        for e in self.entries:
            out.append(e["scene"])
            for cam in e["cameras"]:
                out.extend(cam["files"].values())
        return out


def _render_scene(scene_seed: int, cams: int, res: int, out_dir: str, fmt: str) -> dict:
    scene = sample_room(scene_seed, n_cameras=cams, resolution=(res, res))
    scene_file = f"scene{scene_seed}.json"
    scene.save(os.path.join(out_dir, scene_file))
    cache = ColliderCache()
    cameras = []
    for k, cam in enumerate(scene.cameras):
        frame = render_gt(scene, cam, cache=cache)
        stem = f"scene{scene_seed}_cam{k}"
        if fmt == "pfm":
            files = {"depth": f"{stem}_depth.pfm", "normal": f"{stem}_normal.pfm"}
            write_pfm(os.path.join(out_dir, files["depth"]), frame.depth)
            write_pfm(os.path.join(out_dir, files["normal"]), frame.normal)
        else:
            files = {"depth": f"{stem}_depth.png", "normal": f"{stem}_normal.png"}
            write_png(os.path.join(out_dir, files["depth"]), depth_preview(frame.depth), srgb=False)
            write_png(os.path.join(out_dir, files["normal"]), normal_preview(frame.normal), srgb=False)
        cameras.append({"camera": k, "files": files})
    return {"scene_seed": scene_seed, "scene": scene_file, "cameras": cameras}


def run_dataset(seed: int, scenes: int, cams: int = 12, res: int = 128, out_dir: str = "dataset", fmt: str = "pfm", threads: int = 1) -> DatasetManifest:
    """Generate ``scenes`` rooms with ``cams`` views each and write GT plus ``manifest.json``."""
    from . import __version__

    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if scenes < 1 or cams < 1 or res < 1:
        raise ValueError("scenes, cams and res must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    seeds = scene_seeds(seed, scenes)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            entries = list(pool.map(lambda s: _render_scene(s, cams, res, out_dir, fmt), seeds))
    else:
        entries = [_render_scene(s, cams, res, out_dir, fmt) for s in seeds]
    manifest = DatasetManifest(seed, scenes, cams, res, fmt, __version__, entries)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest
