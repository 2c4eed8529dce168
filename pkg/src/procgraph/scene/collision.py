"""Scene objects, the collider cache and triangle-level collision checks.

Two objects collide when some pair of their world-space triangles properly
penetrate: each triangle strictly straddles the other's plane and the two
cut segments overlap along the intersection line by more than a tolerance.
Coplanar contact and touching edges are therefore free, so objects aligned
with a zero gap never report a collision.

Overlap through flush faces (two equal boxes shifted along one axis) has no
proper crossing, so solid objects add a containment test: a vertex or
triangle centroid of one object strictly inside the other also counts.
"Strictly inside" means an odd number of crossings along a fixed ray and no
surface within ``PLANE_EPS`` of the point along that ray. Open shells (rooms,
floors) set ``solid=False`` and skip it.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from ..mesh import Mesh, triangulate
from .bvh import BVH, moller_trumbore_many

PLANE_EPS = 1e-9  # meters: minimum penetration depth of a vertex through a plane
OVERLAP_EPS = 1e-9  # meters: minimum overlap of the two cut segments
# generic direction so parity rays avoid axis-aligned edges and faces
RAY_DIR = np.array([0.5773502691896258, 0.6172133998483676, 0.5345224838248488])
RAY_DIR = RAY_DIR / np.linalg.norm(RAY_DIR)


def rotation_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(eq=False)
class SceneObject:
    """A placed mesh: world = Rz(rotation) (scale * local) + translation."""

    mesh: Mesh
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: float = 0.0
    scale: float = 1.0
    tags: tuple = ()
    source: dict = field(default_factory=dict)  # generator reference for scene files
    solid: bool = True  # closed mesh; enables the containment test

    def __post_init__(self):
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(3)
        if not self.scale > 0:
            raise ValueError("object scale must be > 0")

    @property
    def matrix(self) -> np.ndarray:
        return rotation_z(self.rotation)

    def to_world(self, points: np.ndarray) -> np.ndarray:
        # written out elementwise so every caller gets bit-identical coordinates
        p = np.asarray(points, dtype=np.float64) * self.scale
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        t = self.translation
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        return np.stack([c * x - s * y + t[0], s * x + c * y + t[1], z + t[2]], axis=-1)

    def world_vertices(self) -> np.ndarray:
        return self.to_world(self.mesh.vertices)

    def world_triangles(self) -> np.ndarray:
        tri = triangulate(self.mesh)
        return self.to_world(tri.vertices)[tri.faces]

    def aabb(self):
        w = self.world_vertices()
        return w.min(axis=0), w.max(axis=0)

    def moved(self, translation=None, rotation=None) -> "SceneObject":
        return SceneObject(
            self.mesh,
            self.translation if translation is None else translation,
            self.rotation if rotation is None else rotation,
            self.scale,
            self.tags,
            self.source,
            self.solid,
        )


def mesh_hash(mesh: Mesh) -> str:
    h = hashlib.sha1()
    h.update(np.ascontiguousarray(mesh.vertices).tobytes())
    h.update(np.ascontiguousarray(mesh.faces).tobytes())
    return h.hexdigest()


class ColliderCache:
    """Object-space BVHs keyed by mesh content; duplicates share one entry."""

    def __init__(self):
        self._bvhs: dict = {}
        self._tris: dict = {}
        self._keys: dict = {}  # id(mesh) -> hash, avoids rehashing shared meshes
        self.builds = 0

    def __len__(self):
        return len(self._bvhs)

    def key(self, mesh: Mesh) -> str:
        k = self._keys.get(id(mesh))
        if k is None or k[0] is not mesh:
            k = (mesh, mesh_hash(mesh))
            self._keys[id(mesh)] = k
        return k[1]

    def get(self, mesh: Mesh) -> BVH:
        key = self.key(mesh)
        bvh = self._bvhs.get(key)
        if bvh is None:
            tri = triangulate(mesh)
            bvh = BVH(tri.vertices[tri.faces])
            self._bvhs[key] = bvh
            self.builds += 1
        return bvh


def _cut_interval(tri, dist, direction, eps):
    """Interval along ``direction`` of the segment where a plane cuts each triangle.

    ``tri`` (n, 3, 3), ``dist`` (n, 3) signed vertex distances to the plane.
    """
    proj = np.einsum("nij,nj->ni", tri, direction)  # (n, 3)
    lo = np.full(len(tri), np.inf)
    hi = np.full(len(tri), -np.inf)
    on = np.abs(dist) <= eps
    for i in range(3):
        lo = np.where(on[:, i], np.minimum(lo, proj[:, i]), lo)
        hi = np.where(on[:, i], np.maximum(hi, proj[:, i]), hi)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        di, dj = dist[:, i], dist[:, j]
        cross = ((di > eps) & (dj < -eps)) | ((di < -eps) & (dj > eps))
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(cross, di / (di - dj), 0.0)
        t = proj[:, i] + (proj[:, j] - proj[:, i]) * s
        lo = np.where(cross, np.minimum(lo, t), lo)
        hi = np.where(cross, np.maximum(hi, t), hi)
    return lo, hi


def triangles_penetrate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise proper-penetration test for triangle arrays a[i] vs b[i], shapes (n, 3, 3)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) == 0:
        return np.zeros(0, dtype=bool)
    na = np.cross(a[:, 1] - a[:, 0], a[:, 2] - a[:, 0])
    nb = np.cross(b[:, 1] - b[:, 0], b[:, 2] - b[:, 0])
    la = np.linalg.norm(na, axis=1)
    lb = np.linalg.norm(nb, axis=1)
    valid = (la > 0) & (lb > 0)
    na = na / np.where(la > 0, la, 1.0)[:, None]
    nb = nb / np.where(lb > 0, lb, 1.0)[:, None]
    db = np.einsum("nij,nj->ni", b - a[:, :1], na)  # b's vertices vs a's plane
    da = np.einsum("nij,nj->ni", a - b[:, :1], nb)
    straddle_b = (db > PLANE_EPS).any(axis=1) & (db < -PLANE_EPS).any(axis=1)
    straddle_a = (da > PLANE_EPS).any(axis=1) & (da < -PLANE_EPS).any(axis=1)
    d = np.cross(na, nb)
    ld = np.linalg.norm(d, axis=1)
    ok = valid & straddle_a & straddle_b & (ld > 1e-12)
    d = d / np.where(ld > 0, ld, 1.0)[:, None]
    lo_a, hi_a = _cut_interval(a, da, d, PLANE_EPS)
    lo_b, hi_b = _cut_interval(b, db, d, PLANE_EPS)
    overlap = np.minimum(hi_a, hi_b) - np.maximum(lo_a, lo_b)
    return ok & (overlap > OVERLAP_EPS)


def _probe_points(tris: np.ndarray) -> np.ndarray:
    """Vertices and centroids of world triangles; the containment sample set."""
    pts = np.concatenate([tris.reshape(-1, 3), tris.mean(axis=1)])
    return np.unique(pts, axis=0)


def _in_box(pts, lo, hi):
    return np.all((pts > lo) & (pts < hi), axis=1)


def _inside_from_counts(count, touch) -> np.ndarray:
    return (count % 2 == 1) & ~touch


def _aabb_overlap(lo_a, hi_a, lo_b, hi_b, pad=0.0) -> bool:
    return bool(np.all(lo_a <= hi_b + pad) and np.all(lo_b <= hi_a + pad))


def _tri_boxes(tris):
    return tris.min(axis=1), tris.max(axis=1)


class CollisionWorld:
    """Objects plus a shared collider cache; queries never mutate the cache except to add meshes."""

    def __init__(self, objects=(), cache: ColliderCache | None = None):
        self.objects: list = list(objects)
        self.cache = cache if cache is not None else ColliderCache()
        for obj in self.objects:
            self.cache.get(obj.mesh)

    def add(self, obj: SceneObject) -> int:
        self.objects.append(obj)
        self.cache.get(obj.mesh)
        return len(self.objects) - 1

    def _world(self, obj: SceneObject):
        bvh = self.cache.get(obj.mesh)
        tris = obj.to_world(bvh.triangles.reshape(-1, 3)).reshape(-1, 3, 3)
        return bvh, tris

    def pair_collides(self, a: SceneObject, b: SceneObject) -> bool:
        lo_a, hi_a = a.aabb()
        lo_b, hi_b = b.aabb()
        if not _aabb_overlap(lo_a, hi_a, lo_b, hi_b, PLANE_EPS):
            return False
        bvh_a, tris_a = self._world(a)
        bvh_b, tris_b = self._world(b)
        # only b's triangles inside the overlap region can hit a
        blo, bhi = _tri_boxes(tris_b)
        olo = np.maximum(lo_a, lo_b) - PLANE_EPS
        ohi = np.minimum(hi_a, hi_b) + PLANE_EPS
        near = np.flatnonzero(np.all((blo <= ohi) & (bhi >= olo), axis=1))
        wlo, whi = bvh_a.world_boxes(a.matrix, a.scale, a.translation)
        qi, ti = bvh_a.query_boxes(blo[near], bhi[near], wlo, whi, pad=PLANE_EPS)
        if qi.size and triangles_penetrate(tris_a[ti], tris_b[near[qi]]).any():
            return True
        if a.solid and self._contains(bvh_a, tris_a, wlo, whi, lo_a, hi_a, tris_b):
            return True
        if b.solid:
            blo_n, bhi_n = bvh_b.world_boxes(b.matrix, b.scale, b.translation)
            if self._contains(bvh_b, tris_b, blo_n, bhi_n, lo_b, hi_b, tris_a):
                return True
        return False

    @staticmethod
    def _contains(bvh, tris, wlo, whi, lo, hi, other_tris) -> bool:
        pts = _probe_points(other_tris)
        pts = pts[_in_box(pts, lo, hi)]
        if len(pts) == 0:
            return False
        dirs = np.broadcast_to(RAY_DIR, pts.shape)
        count, touch = bvh.count_crossings(pts, dirs, PLANE_EPS, tris, wlo, whi)
        return bool(_inside_from_counts(count, touch).any())

    def check_collision(self, index: int | None = None) -> list:
        """Colliding pairs (i, j), i < j; restricted to pairs involving ``index`` if given."""
        pairs = []
        n = len(self.objects)
        boxes = [o.aabb() for o in self.objects]
        for i in range(n):
            for j in range(i + 1, n):
                if index is not None and index not in (i, j):
                    continue
                if not _aabb_overlap(*boxes[i], *boxes[j], PLANE_EPS):
                    continue
                if self.pair_collides(self.objects[i], self.objects[j]):
                    pairs.append((i, j))
        return pairs

    def collides_with_any(self, obj: SceneObject, ignore=()) -> bool:
        lo, hi = obj.aabb()
        for k, other in enumerate(self.objects):
            if k in ignore:
                continue
            if _aabb_overlap(lo, hi, *other.aabb(), PLANE_EPS) and self.pair_collides(obj, other):
                return True
        return False


def check_collision(world: CollisionWorld, index: int | None = None) -> list:
    return world.check_collision(index)


def brute_force_collisions(objects, chunk: int = 200_000) -> list:
    """Reference: every triangle pair of every object pair, no culling."""
    tris = [o.world_triangles() for o in objects]
    pairs = []
    for i in range(len(objects)):
        for j in range(i + 1, len(objects)):
            a, b = tris[i], tris[j]
            ia, ib = np.meshgrid(np.arange(len(a)), np.arange(len(b)), indexing="ij")
            ia, ib = ia.ravel(), ib.ravel()
            hit = False
            for s in range(0, len(ia), chunk):
                if triangles_penetrate(a[ia[s:s + chunk]], b[ib[s:s + chunk]]).any():
                    hit = True
                    break
            if not hit:
                for host, other in ((i, j), (j, i)):
                    if objects[host].solid and _brute_contains(tris[host], tris[other]):
                        hit = True
                        break
            if hit:
                pairs.append((i, j))
    return pairs


def _brute_contains(host_tris: np.ndarray, other_tris: np.ndarray) -> bool:
    lo = host_tris.reshape(-1, 3).min(axis=0)
    hi = host_tris.reshape(-1, 3).max(axis=0)
    pts = _probe_points(other_tris)
    pts = pts[_in_box(pts, lo, hi)]
    if len(pts) == 0:
        return False
    dirs = np.broadcast_to(RAY_DIR, pts.shape)
    t, _, _ = moller_trumbore_many(pts, np.ascontiguousarray(dirs), host_tris, t_min=-np.inf)
    count = np.sum(np.isfinite(t) & (t > PLANE_EPS), axis=1)
    touch = np.any(np.abs(t) <= PLANE_EPS, axis=1)
    return bool(_inside_from_counts(count, touch).any())
