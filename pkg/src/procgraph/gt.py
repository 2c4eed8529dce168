"""Ground-truth frames by ray casting: depth, camera-space normals, disparity.

Depth is the z-depth along the camera's forward axis, which is what the
rectified stereo relation ``d = f B / Z`` expects. Normals are the mesh's
vertex normals interpolated barycentrically, turned to face the camera.
Misses get depth ``inf`` and a zero normal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mesh import triangulate
from .scene.cameras import CameraSpec
from .scene.collision import ColliderCache


@dataclass(eq=False)
class GTFrame:
    depth: np.ndarray  # (h, w) meters, inf where nothing is hit
    normal: np.ndarray  # (h, w, 3) unit camera-space normals, zero on misses
    disparity: np.ndarray | None = None  # (h, w) pixels
    object_id: np.ndarray | None = None  # (h, w) index into the object list, -1 on misses

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.depth)


def _objects(scene):
    return list(scene.objects) if hasattr(scene, "objects") else list(scene)


def render_gt(scene, camera: CameraSpec, resolution=None, cache: ColliderCache | None = None) -> GTFrame:
    """One primary ray per pixel center; ``resolution`` (w, h) overrides the camera's."""
    if resolution is not None:
        camera = CameraSpec(camera.position, camera.look_at, camera.fov, tuple(resolution), camera.baseline)
    cache = cache if cache is not None else ColliderCache()
    w, h = camera.resolution
    dirs = camera.ray_directions().reshape(-1, 3)
    n = len(dirs)
    t_best = np.full(n, np.inf)
    obj_best = np.full(n, -1, dtype=np.int64)
    normal_w = np.zeros((n, 3))
    for k, obj in enumerate(_objects(scene)):
        bvh = cache.get(obj.mesh)
        if bvh.n_triangles == 0:
            continue
        c, s = math.cos(obj.rotation), math.sin(obj.rotation)
        rt = np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])  # inverse rotation
        o_local = (rt @ (camera.position - obj.translation)) / obj.scale
        d_local = (dirs @ rt.T) / obj.scale
        t, tri, u, v = bvh.intersect_rays(np.broadcast_to(o_local, d_local.shape).copy(), d_local, t_best)
        hit = (tri >= 0) & (t < t_best)
        if not hit.any():
            continue
        t_best[hit] = t[hit]
        obj_best[hit] = k
        tri_faces = triangulate(obj.mesh).faces[tri[hit]]
        vn = obj.mesh.normals[tri_faces]  # (m, 3, 3)
        uu, vv = u[hit][:, None], v[hit][:, None]
        nl = (1.0 - uu - vv) * vn[:, 0] + uu * vn[:, 1] + vv * vn[:, 2]
        bad = np.linalg.norm(nl, axis=1) < 1e-12
        if bad.any():
            tv = bvh.triangles[tri[hit][bad]]
            nl[bad] = np.cross(tv[:, 1] - tv[:, 0], tv[:, 2] - tv[:, 0])
        normal_w[hit] = nl @ rt  # local -> world is rt.T
    valid = np.isfinite(t_best)
    nc = normal_w @ camera.rotation.T
    nc /= np.where(valid, np.linalg.norm(nc, axis=1), 1.0)[:, None]
    # face the camera: the ray runs along +z in camera space
    dc = dirs @ camera.rotation.T
    flip = np.sum(nc * dc, axis=1) > 0
    nc[flip] *= -1.0
    nc[~valid] = 0.0
    return GTFrame(t_best.reshape(h, w), nc.reshape(h, w, 3), None, obj_best.reshape(h, w))


def disparity_from_depth(depth, focal_px: float, baseline: float) -> np.ndarray:
    """Rectified-stereo disparity ``focal_px * baseline / depth``; infinite depth maps to 0."""
    if not (focal_px > 0 and baseline > 0):
        raise ValueError("focal length and baseline must be positive")
    depth = np.asarray(depth, dtype=np.float64)
    with np.errstate(divide="ignore"):
        d = focal_px * baseline / depth
    return np.where(np.isfinite(depth), d, 0.0)


def render_stereo(scene, camera: CameraSpec, cache: ColliderCache | None = None):
    """Left frame with disparity attached, and the right frame from the stereo twin."""
    if not camera.baseline:
        raise ValueError("stereo rendering needs a camera baseline")
    cache = cache if cache is not None else ColliderCache()
    left = render_gt(scene, camera, cache=cache)
    right = render_gt(scene, camera.stereo_twin(), cache=cache)
    left.disparity = disparity_from_depth(left.depth, camera.focal_px, camera.baseline)
    right.disparity = disparity_from_depth(right.depth, camera.focal_px, camera.baseline)
    return left, right
