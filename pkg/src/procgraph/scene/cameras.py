"""Pinhole cameras and the rigs that place them.

Camera frames follow the OpenCV convention in a z-up world: x right, y down,
z forward. ``right = forward x up`` and ``down = forward x right``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import PlacementExhausted
from ..rng import RandomStream

UP = np.array([0.0, 0.0, 1.0])
MAX_ATTEMPTS = 100
DEFAULT_FOV = math.radians(60.0)


@dataclass(frozen=True, eq=False)
class CameraSpec:
    position: np.ndarray
    look_at: np.ndarray
    fov: float = DEFAULT_FOV  # vertical, radians
    resolution: tuple = (128, 128)  # (width, height)
    baseline: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=np.float64).reshape(3))
        object.__setattr__(self, "look_at", np.asarray(self.look_at, dtype=np.float64).reshape(3))
        object.__setattr__(self, "resolution", (int(self.resolution[0]), int(self.resolution[1])))
        if np.array_equal(self.position, self.look_at):
            raise ValueError("camera position equals look-at point")
        if not 0.0 < self.fov < math.pi:
            raise ValueError("fov must lie in (0, pi)")
        if min(self.resolution) < 1:
            raise ValueError("resolution must be positive")

    @property
    def forward(self) -> np.ndarray:
        f = self.look_at - self.position
        return f / np.linalg.norm(f)

    @property
    def right(self) -> np.ndarray:
        f = self.forward
        r = np.cross(f, UP)
        if np.linalg.norm(r) < 1e-12:
            # looking straight up or down; any horizontal right vector will do
            r = np.cross(f, np.array([0.0, 1.0, 0.0]))
        return r / np.linalg.norm(r)

    @property
    def down(self) -> np.ndarray:
        return np.cross(self.forward, self.right)

    @property
    def rotation(self) -> np.ndarray:
        """World-to-camera rotation; rows are right, down, forward."""
        return np.stack([self.right, self.down, self.forward])

    @property
    def focal_px(self) -> float:
        return 0.5 * self.resolution[1] / math.tan(0.5 * self.fov)

    @property
    def intrinsics(self) -> np.ndarray:
        w, h = self.resolution
        f = self.focal_px
        return np.array([[f, 0.0, 0.5 * w], [0.0, f, 0.5 * h], [0.0, 0.0, 1.0]])

    def ray_directions(self) -> np.ndarray:
        """(h, w, 3) world directions through pixel centers, scaled to unit forward component."""
        w, h = self.resolution
        f = self.focal_px
        x = (np.arange(w) + 0.5 - 0.5 * w) / f
        y = (np.arange(h) + 0.5 - 0.5 * h) / f
        xx, yy = np.meshgrid(x, y)
        return self.forward + xx[..., None] * self.right + yy[..., None] * self.down

    def stereo_twin(self, baseline: float | None = None) -> "CameraSpec":
        b = self.baseline if baseline is None else baseline
        if b is None or b <= 0:
            raise ValueError("stereo twin needs a positive baseline")
        off = self.right * b
        return CameraSpec(self.position + off, self.look_at + off, self.fov, self.resolution, b)

    def to_json(self) -> dict:
        d = {
            "position": self.position.tolist(),
            "look_at": self.look_at.tolist(),
            "fov": self.fov,
            "resolution": list(self.resolution),
        }
        if self.baseline is not None:
            d["baseline"] = self.baseline
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CameraSpec":
        return cls(d["position"], d["look_at"], d["fov"], tuple(d["resolution"]), d.get("baseline"))


def circular_rig(center, radius: float, n: int, look_at=None, fov: float = DEFAULT_FOV, resolution=(128, 128)) -> list:
    """``n`` cameras at equally spaced azimuths (starting at +x) on a horizontal circle."""
    if n < 1:
        raise ValueError("n must be >= 1")
    center = np.asarray(center, dtype=np.float64)
    target = center if look_at is None else np.asarray(look_at, dtype=np.float64)
    cams = []
    for k in range(n):
        a = 2.0 * math.pi * k / n
        pos = center + radius * np.array([math.cos(a), math.sin(a), 0.0])
        cams.append(CameraSpec(pos, target, fov, resolution))
    return cams


def random_cameras(
    s: RandomStream,
    bbox,
    n: int,
    free=None,
    stereo_baseline: float | None = None,
    fov: float = DEFAULT_FOV,
    resolution=(128, 128),
    max_pitch: float = 0.3,
) -> list:
    """Cameras at uniform positions in ``bbox`` with uniform yaw and pitch in [-max_pitch, max_pitch].

    ``free(points) -> bool`` rejects positions; each view gets at most 100
    attempts. With a baseline every view is followed by its right twin, and
    both positions must be free.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    lo = np.asarray(bbox[0], dtype=np.float64)
    hi = np.asarray(bbox[1], dtype=np.float64)
    if not np.all(hi >= lo):
        raise ValueError("invalid bounding box")
    cams = []
    for k in range(n):
        sk = s.split(f"camera{k}")
        for _ in range(MAX_ATTEMPTS):
            pos = np.array([sk.uniform(lo[i], hi[i]) for i in range(3)])
            yaw = sk.uniform(0.0, 2.0 * math.pi)
            pitch = sk.uniform(-max_pitch, max_pitch)
            d = np.array([math.cos(yaw) * math.cos(pitch), math.sin(yaw) * math.cos(pitch), math.sin(pitch)])
            cam = CameraSpec(pos, pos + d, fov, resolution, stereo_baseline)
            group = [cam] if stereo_baseline is None else [cam, cam.stereo_twin()]
            if free is None or bool(np.all(free(np.array([c.position for c in group])))):
                cams.extend(group)
                break
        else:
            raise PlacementExhausted(f"camera {k}: no free position after {MAX_ATTEMPTS} attempts")
    return cams


def _point_at(path: np.ndarray, cum: np.ndarray, s: float) -> np.ndarray:
    total = cum[-1]
    if s >= total:
        d = path[-1] - path[-2]
        return path[-1] + d / np.linalg.norm(d) * (s - total)
    i = int(np.searchsorted(cum, s, side="right")) - 1
    i = min(max(i, 0), len(path) - 2)
    seg = cum[i + 1] - cum[i]
    t = 0.0 if seg == 0 else (s - cum[i]) / seg
    return path[i] + (path[i + 1] - path[i]) * t


def path_to_cameras(path, spacing: float, look_ahead: float, fov: float = DEFAULT_FOV, resolution=(128, 128)) -> list:
    """Cameras every ``spacing`` meters of arc length, each looking ``look_ahead`` meters further on.

    Past the end of the path the look-at point continues along the last segment.
    """
    path = np.asarray(path, dtype=np.float64).reshape(-1, 3)
    if len(path) == 0:
        raise ValueError("path is empty")
    if spacing <= 0 or look_ahead <= 0:
        raise ValueError("spacing and look_ahead must be positive")
    # drop repeated points so every segment has a direction
    keep = np.concatenate([[True], np.any(np.diff(path, axis=0) != 0, axis=1)])
    path = path[keep]
    if len(path) < 2:
        raise ValueError("path needs two distinct points to define a view direction")
    cum = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(path, axis=0), axis=1))])
    count = int(math.floor(cum[-1] / spacing + 1e-9)) + 1
    cams = []
    for k in range(count):
        s = k * spacing
        cams.append(CameraSpec(_point_at(path, cum, s), _point_at(path, cum, s + look_ahead), fov, resolution))
    return cams
