"""Polygon meshes: generation, displacement, normals, curvature, OBJ text."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateFace
from .evaluate import SampleBatch, evaluate
from .graph import Graph
from .kinds import ValueKind

AREA_EPS = 1e-14


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray  # (V, 3)
    faces: np.ndarray  # (F, k) vertex indices, uniform arity 3 or 4
    uv: np.ndarray  # (F, k, 2) per face corner
    normals: np.ndarray | None = None  # (V, 3)
    attributes: dict = field(default_factory=dict)

    @property
    def arity(self) -> int:
        return int(self.faces.shape[1])

    @property
    def is_quad(self) -> bool:
        return self.faces.ndim == 2 and self.faces.shape[1] == 4

    def __len__(self):
        return len(self.faces)

    def check(self) -> None:
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("face index out of range")

    def vertex_uv(self) -> np.ndarray:
        """One uv per vertex, taken from the first face corner that uses it."""
        out = np.zeros((len(self.vertices), 2))
        flat_idx = self.faces.reshape(-1)
        flat_uv = self.uv.reshape(-1, 2)
        # reversed so the first occurrence wins
        out[flat_idx[::-1]] = flat_uv[::-1]
        return out

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


def _new(vertices, faces, uv, attributes=None) -> Mesh:
    m = Mesh(
        np.ascontiguousarray(vertices, dtype=np.float64),
        np.ascontiguousarray(faces, dtype=np.int64),
        np.ascontiguousarray(uv, dtype=np.float64),
        None,
        dict(attributes or {}),
    )
    m.check()
    return compute_normals(m)


def make_grid(nx: int, ny: int, size=1.0) -> Mesh:
    """Planar quad grid in z = 0 covering [0, sx] x [0, sy]."""
    if nx < 1 or ny < 1:
        raise ValueError("grid needs nx, ny >= 1")
    sx, sy = (size, size) if np.isscalar(size) else size
    u = np.linspace(0.0, 1.0, nx + 1)
    v = np.linspace(0.0, 1.0, ny + 1)
    uu, vv = np.meshgrid(u, v)  # (ny+1, nx+1)
    verts = np.stack([uu.ravel() * sx, vv.ravel() * sy, np.zeros(uu.size)], axis=1)
    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    a = (j * (nx + 1) + i).ravel()
    faces = np.stack([a, a + 1, a + nx + 2, a + nx + 1], axis=1)
    corner_uv = np.stack([uu.ravel(), vv.ravel()], axis=1)[faces]
    return _new(verts, faces, corner_uv)


def make_cube(n: int = 1, size=1.0) -> Mesh:
    """Closed quad cube [0, size]^3, each side split n x n, shared vertices welded."""
    t = np.linspace(0.0, size, n + 1)
    lookup: dict = {}
    verts = []

    def vid(p):
        key = tuple(np.round(p, 12))
        if key not in lookup:
            lookup[key] = len(verts)
            verts.append(p)
        return lookup[key]

    faces, uvs = [], []
    # (fixed axis, fixed value, u axis, v axis) with outward winding
    sides = [
        (2, 0.0, 1, 0), (2, size, 0, 1),
        (1, 0.0, 0, 2), (1, size, 2, 0),
        (0, 0.0, 2, 1), (0, size, 1, 2),
    ]
    for axis, val, ua, va in sides:
        for j in range(n):
            for i in range(n):
                quad, quv = [], []
                for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    p = np.zeros(3)
                    p[axis] = val
                    p[ua] = t[i + di]
                    p[va] = t[j + dj]
                    quad.append(vid(p))
                    quv.append(((i + di) / n, (j + dj) / n))
                faces.append(quad)
                uvs.append(quv)
    return _new(np.array(verts), np.array(faces), np.array(uvs))


def make_box(size=(1.0, 1.0, 1.0), welded: bool = False) -> Mesh:
    """Axis-aligned box [0, sx] x [0, sy] x [0, sz].

    Unwelded boxes give every side its own four vertices, so interpolated
    vertex normals stay flat across each face.
    """
    sx, sy, sz = (size,) * 3 if np.isscalar(size) else size
    cube = make_cube(1, 1.0)
    scale = np.array([sx, sy, sz], dtype=np.float64)
    if welded:
        return _new(cube.vertices * scale, cube.faces, cube.uv)
    verts = (cube.vertices * scale)[cube.faces].reshape(-1, 3)
    faces = np.arange(len(verts)).reshape(-1, 4)
    return _new(verts, faces, cube.uv)


def make_cylinder(radius: float = 0.5, height: float = 1.0, segments: int = 16) -> Mesh:
    """Closed quad cylinder around the z axis, base at z = 0.

    Caps are quad fans (center, three consecutive rim points), so
    ``segments`` must be even. Side and cap vertices are not shared.
    """
    if segments < 4 or segments % 2:
        raise ValueError("cylinder needs an even number of segments >= 4")
    a = 2.0 * np.pi * np.arange(segments) / segments
    rim = np.stack([radius * np.cos(a), radius * np.sin(a)], axis=1)
    verts, faces, uvs = [], [], []

    def add(points, quads, quv):
        base = sum(len(v) for v in verts)
        verts.append(np.asarray(points, dtype=np.float64))
        faces.append(np.asarray(quads) + base)
        uvs.append(np.asarray(quv, dtype=np.float64))

    # side: rim ring at z = 0 and z = height, with a seam column
    ring = np.concatenate([rim, rim[:1]])
    side = np.concatenate([np.c_[ring, np.zeros(len(ring))], np.c_[ring, np.full(len(ring), height)]])
    k = len(ring)
    i = np.arange(segments)
    quads = np.stack([i, i + 1, i + 1 + k, i + k], axis=1)
    su = np.arange(k) / segments
    side_uv = np.stack([np.r_[su, su], np.r_[np.zeros(k), np.ones(k)]], axis=1)
    add(side, quads, side_uv[quads])
    for z, flip in ((0.0, True), (height, False)):
        pts = np.concatenate([[[0.0, 0.0, z]], np.c_[rim, np.full(segments, z)]])
        j = np.arange(0, segments, 2)
        q = np.stack([np.zeros_like(j), 1 + j, 1 + (j + 1) % segments, 1 + (j + 2) % segments], axis=1)
        if flip:
            q = q[:, ::-1]
        cap_uv = 0.5 + 0.5 * pts[:, :2] / radius
        add(pts, q, cap_uv[q])
    return _new(np.concatenate(verts), np.concatenate(faces), np.concatenate(uvs))


def make_icosphere(subdivisions: int = 3, radius=1.0) -> Mesh:
    phi = (1.0 + 5.0**0.5) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    verts = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        cache: dict = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    v = np.array(verts) * radius
    f = np.array(faces)
    d = v / radius
    u = 0.5 + np.arctan2(d[:, 1], d[:, 0]) / (2 * np.pi)
    w = 0.5 + np.arcsin(np.clip(d[:, 2], -1, 1)) / np.pi
    return _new(v, f, np.stack([u, w], axis=1)[f])


def face_area_vectors(mesh: Mesh) -> np.ndarray:
    """Newell area vectors: direction = face normal, length = face area."""
    p = mesh.vertices[mesh.faces]  # (F, k, 3)
    q = np.roll(p, -1, axis=1)
    return 0.5 * np.cross(p, q).sum(axis=1)


def compute_normals(mesh: Mesh) -> Mesh:
    av = face_area_vectors(mesh)
    areas = np.linalg.norm(av, axis=1)
    bad = np.flatnonzero(areas <= AREA_EPS)
    if bad.size:
        raise DegenerateFace(int(bad[0]))
    acc = np.zeros_like(mesh.vertices)
    for c in range(mesh.arity):
        np.add.at(acc, mesh.faces[:, c], av)
    norm = np.linalg.norm(acc, axis=1, keepdims=True)
    normals = np.where(norm > 0, acc / np.where(norm > 0, norm, 1.0), 0.0)
    return replace(mesh, normals=normals)


def edges(mesh: Mesh):
    """Unique undirected edges and, per edge, up to two incident faces (-1 if none)."""
    k = mesh.arity
    a = mesh.faces.reshape(-1)
    b = np.roll(mesh.faces, -1, axis=1).reshape(-1)
    face_of = np.repeat(np.arange(len(mesh.faces)), k)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    key = lo * len(mesh.vertices) + hi
    order = np.argsort(key, kind="stable")
    key_s = key[order]
    uniq, start, counts = np.unique(key_s, return_index=True, return_counts=True)
    if counts.max(initial=0) > 2:
        raise ValueError("non-manifold edge shared by more than two faces")
    f0 = face_of[order[start]]
    f1 = np.where(counts == 2, face_of[order[np.minimum(start + 1, len(order) - 1)]], -1)
    ev = np.stack([uniq // len(mesh.vertices), uniq % len(mesh.vertices)], axis=1)
    return ev, np.stack([f0, f1], axis=1)


def compute_curvature(mesh: Mesh) -> Mesh:
    """Add a "curvature" attribute: mean dihedral deficit (radians) over incident interior edges."""
    av = face_area_vectors(mesh)
    fn = av / np.linalg.norm(av, axis=1, keepdims=True)
    ev, ef = edges(mesh)
    interior = ef[:, 1] >= 0
    ev, ef = ev[interior], ef[interior]
    n0, n1 = fn[ef[:, 0]], fn[ef[:, 1]]
    angle = np.arctan2(np.linalg.norm(np.cross(n0, n1), axis=1), np.sum(n0 * n1, axis=1))
    total = np.zeros(len(mesh.vertices))
    count = np.zeros(len(mesh.vertices))
    for c in range(2):
        np.add.at(total, ev[:, c], angle)
        np.add.at(count, ev[:, c], 1.0)
    curv = np.where(count > 0, total / np.maximum(count, 1.0), 0.0)
    attrs = dict(mesh.attributes)
    attrs["curvature"] = curv
    return replace(mesh, attributes=attrs)


def vertex_batch(mesh: Mesh) -> SampleBatch:
    aux = {"uv": mesh.vertex_uv()}
    if mesh.normals is not None:
        aux["normal"] = mesh.normals
    aux.update(mesh.attributes)
    return SampleBatch(mesh.vertices, aux)


def displace(mesh: Mesh, graph: Graph, output: str = "displacement", amplitude: float = 1.0) -> Mesh:
    if graph.output_kind(output) not in (ValueKind.Float, ValueKind.Int):
        raise TypeError(f"displacement output {output!r} must be Float")
    if mesh.normals is None:
        mesh = compute_normals(mesh)
    values = evaluate(graph, output, vertex_batch(mesh)).flat.astype(np.float64)
    verts = mesh.vertices + mesh.normals * (amplitude * values)[:, None]
    return compute_normals(replace(mesh, vertices=verts))


def triangulate(mesh: Mesh) -> Mesh:
    if mesh.arity == 3:
        return mesh
    f = mesh.faces
    tris = np.concatenate([f[:, [0, 1, 2]], f[:, [0, 2, 3]]])
    uv = np.concatenate([mesh.uv[:, [0, 1, 2]], mesh.uv[:, [0, 2, 3]]])
    return replace(mesh, faces=tris, uv=uv)


def transform(mesh: Mesh, matrix=None, offset=(0.0, 0.0, 0.0)) -> Mesh:
    m = np.eye(3) if matrix is None else np.asarray(matrix, float)
    verts = mesh.vertices @ m.T + np.asarray(offset, float)
    return compute_normals(replace(mesh, vertices=verts))


def merge(meshes) -> Mesh:
    meshes = list(meshes)
    if len({m.arity for m in meshes}) != 1:
        meshes = [triangulate(m) for m in meshes]
    offset = 0
    faces = []
    for m in meshes:
        faces.append(m.faces + offset)
        offset += len(m.vertices)
    return _new(
        np.concatenate([m.vertices for m in meshes]),
        np.concatenate(faces),
        np.concatenate([m.uv for m in meshes]),
    )


def to_obj(mesh: Mesh) -> str:
    """Wavefront OBJ text with v, vt (one per face corner), vn and f v/vt/vn."""
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}")
    for t in mesh.uv.reshape(-1, 2):
        lines.append(f"vt {t[0]:.9g} {t[1]:.9g}")
    normals = mesh.normals if mesh.normals is not None else compute_normals(mesh).normals
    for n in normals:
        lines.append(f"vn {n[0]:.9g} {n[1]:.9g} {n[2]:.9g}")
    k = mesh.arity
    for fi, face in enumerate(mesh.faces):
        corners = " ".join(f"{vi + 1}/{fi * k + c + 1}/{vi + 1}" for c, vi in enumerate(face))
        lines.append(f"f {corners}")
    return "\n".join(lines) + "\n"
