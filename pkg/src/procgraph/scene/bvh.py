"""Bounding volume hierarchy over triangles with batched (numpy) queries.

Queries carry index sets down the tree: a node is visited once with every
ray or box that reaches it, so the per-node work is a handful of vector ops.
"""

from __future__ import annotations

import numpy as np

LEAF_SIZE = 8


class BVH:
    """Median-split BVH. Arrays are indexed by node; leaves own ``tri_index[start:start+count]``."""

    def __init__(self, triangles: np.ndarray, leaf_size: int = LEAF_SIZE):
        tris = np.asarray(triangles, dtype=np.float64).reshape(-1, 3, 3)
        self.triangles = tris
        n = len(tris)
        tmin = tris.min(axis=1)
        tmax = tris.max(axis=1)
        cent = tris.mean(axis=1)
        order = np.arange(n)
        lo, hi, left, right, start, count = [], [], [], [], [], []

        def new_node(a, b):
            idx = order[a:b]
            lo.append(tmin[idx].min(axis=0) if b > a else np.zeros(3))
            hi.append(tmax[idx].max(axis=0) if b > a else np.zeros(3))
            left.append(-1)
            right.append(-1)
            start.append(a)
            count.append(b - a)
            return len(lo) - 1

        root = new_node(0, n)
        stack = [(root, 0, n)]
        while stack:
            node, a, b = stack.pop()
            if b - a <= leaf_size:
                continue
            idx = order[a:b]
            c = cent[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            mid = (b - a) // 2
            part = np.argpartition(c[:, axis], mid, kind="introselect")
            order[a:b] = idx[part]
            l_node = new_node(a, a + mid)
            r_node = new_node(a + mid, b)
            left[node], right[node] = l_node, r_node
            count[node] = 0
            stack.append((l_node, a, a + mid))
            stack.append((r_node, a + mid, b))
        self.lo = np.array(lo).reshape(-1, 3)
        self.hi = np.array(hi).reshape(-1, 3)
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.start = np.array(start, dtype=np.int64)
        self.count = np.array(count, dtype=np.int64)
        self.tri_index = order
        self.n_triangles = n

    def __len__(self):
        return len(self.lo)

    def is_leaf(self, node: int) -> bool:
        return self.left[node] < 0

    def leaf_triangles(self, node: int) -> np.ndarray:
        s = self.start[node]
        return self.tri_index[s:s + self.count[node]]

    def world_boxes(self, rotation: np.ndarray, scale: float, translation: np.ndarray):
        """Conservative world-space AABBs of every node under x -> R (s x) + t."""
        corners = np.stack(
            [np.where([(k >> 0) & 1, (k >> 1) & 1, (k >> 2) & 1], self.hi, self.lo) for k in range(8)],
            axis=1,
        )  # (N, 8, 3)
        w = (corners * scale) @ rotation.T + translation
        return w.min(axis=1), w.max(axis=1)

    # queries

    def query_boxes(self, qlo: np.ndarray, qhi: np.ndarray, node_lo=None, node_hi=None, pad: float = 0.0):
        """All (query index, triangle index) pairs whose boxes overlap a leaf box.

        ``node_lo``/``node_hi`` replace the stored boxes (e.g. world-space boxes).
        """
        node_lo = self.lo if node_lo is None else node_lo
        node_hi = self.hi if node_hi is None else node_hi
        empty = (np.zeros(0, np.int64), np.zeros(0, np.int64))
        if self.n_triangles == 0 or len(qlo) == 0:
            return empty
        out_q, out_t = [], []
        stack = [(0, np.arange(len(qlo)))]
        while stack:
            node, ids = stack.pop()
            hit = np.all((qlo[ids] <= node_hi[node] + pad) & (qhi[ids] >= node_lo[node] - pad), axis=1)
            ids = ids[hit]
            if ids.size == 0:
                continue
            if self.left[node] < 0:
                tris = self.leaf_triangles(node)
                out_q.append(np.repeat(ids, len(tris)))
                out_t.append(np.tile(tris, len(ids)))
            else:
                stack.append((self.left[node], ids))
                stack.append((self.right[node], ids))
        if not out_q:
            return empty
        return np.concatenate(out_q), np.concatenate(out_t)

    def count_crossings(self, origins, directions, eps, triangles=None, node_lo=None, node_hi=None):
        """Per ray: number of hits with t > eps and whether any hit has |t| <= eps.

        ``triangles``/``node_lo``/``node_hi`` substitute world-space data for
        the stored object-space arrays.
        """
        tris_all = self.triangles if triangles is None else triangles
        node_lo = self.lo if node_lo is None else node_lo
        node_hi = self.hi if node_hi is None else node_hi
        n = len(origins)
        count = np.zeros(n, dtype=np.int64)
        touch = np.zeros(n, dtype=bool)
        if self.n_triangles == 0 or n == 0:
            return count, touch
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / directions
        stack = [(0, np.arange(n))]
        while stack:
            node, ids = stack.pop()
            o = origins[ids]
            with np.errstate(invalid="ignore"):
                t0 = (node_lo[node] - eps - o) * inv[ids]
                t1 = (node_hi[node] + eps - o) * inv[ids]
            tnear = np.nanmax(np.minimum(t0, t1), axis=1)
            tfar = np.nanmin(np.maximum(t0, t1), axis=1)
            ids = ids[(tnear <= tfar) & (tfar >= -eps)]
            if ids.size == 0:
                continue
            if self.left[node] >= 0:
                stack.append((self.right[node], ids))
                stack.append((self.left[node], ids))
                continue
            tris = self.leaf_triangles(node)
            t, _, _ = moller_trumbore_many(origins[ids], directions[ids], tris_all[tris], t_min=-np.inf)
            count[ids] += np.sum(np.isfinite(t) & (t > eps), axis=1)
            touch[ids] |= np.any(np.abs(t) <= eps, axis=1)
        return count, touch

    def intersect_rays(self, origins: np.ndarray, directions: np.ndarray, t_max=None):
        """Nearest hit per ray: returns (t, triangle index or -1, barycentric u, v)."""
        n = len(origins)
        t_best = np.full(n, np.inf) if t_max is None else np.array(t_max, dtype=np.float64, copy=True)
        tri_best = np.full(n, -1, dtype=np.int64)
        u_best = np.zeros(n)
        v_best = np.zeros(n)
        if self.n_triangles == 0 or n == 0:
            return t_best, tri_best, u_best, v_best
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / directions
        stack = [(0, np.arange(n))]
        while stack:
            node, ids = stack.pop()
            o = origins[ids]
            iv = inv[ids]
            with np.errstate(invalid="ignore"):
                t0 = (self.lo[node] - o) * iv
                t1 = (self.hi[node] - o) * iv
            tnear = np.nanmax(np.minimum(t0, t1), axis=1)
            tfar = np.nanmin(np.maximum(t0, t1), axis=1)
            keep = (tnear <= tfar) & (tfar >= 0) & (tnear <= t_best[ids])
            ids = ids[keep]
            if ids.size == 0:
                continue
            if self.left[node] >= 0:
                stack.append((self.right[node], ids))
                stack.append((self.left[node], ids))
                continue
            tris = self.leaf_triangles(node)
            t, u, v = moller_trumbore_many(origins[ids], directions[ids], self.triangles[tris])
            j = np.argmin(t, axis=1)
            rows = np.arange(len(ids))
            t_hit = t[rows, j]
            better = t_hit < t_best[ids]
            if better.any():
                sel = ids[better]
                t_best[sel] = t_hit[better]
                tri_best[sel] = tris[j[better]]
                u_best[sel] = u[rows, j][better]
                v_best[sel] = v[rows, j][better]
        return t_best, tri_best, u_best, v_best


def moller_trumbore_many(o: np.ndarray, d: np.ndarray, tris: np.ndarray, eps: float = 1e-14, t_min: float = 1e-9):
    """Rays (m) against triangles (k): (m, k) arrays of t, u, v; misses get t = inf."""
    v0 = tris[:, 0][None]
    e1 = (tris[:, 1] - tris[:, 0])[None]
    e2 = (tris[:, 2] - tris[:, 0])[None]
    dd = d[:, None, :]
    pvec = np.cross(dd, e2)
    det = np.sum(pvec * e1, axis=2)
    ok = np.abs(det) > eps
    inv_det = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
    tvec = o[:, None, :] - v0
    u = np.sum(tvec * pvec, axis=2) * inv_det
    qvec = np.cross(tvec, e1)
    v = np.sum(qvec * dd, axis=2) * inv_det
    t = np.sum(qvec * e2, axis=2) * inv_det
    hit = ok & (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > t_min)
    return np.where(hit, t, np.inf), u, v
