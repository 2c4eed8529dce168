"""RRT* in 3D position space and the free-space validators it plans against."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import NoPathFound
from ..rng import RandomStream


class BoxWorld:
    """Free space = inside ``bounds`` and outside every obstacle box grown by ``inflate``."""

    def __init__(self, bounds, boxes=(), inflate: float = 0.0):
        lo, hi = bounds
        self.lo = np.asarray(lo, dtype=np.float64)
        self.hi = np.asarray(hi, dtype=np.float64)
        boxes = list(boxes)
        self.box_lo = np.array([b[0] for b in boxes], dtype=np.float64).reshape(-1, 3) - inflate
        self.box_hi = np.array([b[1] for b in boxes], dtype=np.float64).reshape(-1, 3) + inflate

    @classmethod
    def from_scene(cls, bounds, objects, inflate: float = 0.1):
        return cls(bounds, [o.aabb() for o in objects], inflate)

    def __call__(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        ok = np.all((p >= self.lo) & (p <= self.hi), axis=1)
        if len(self.box_lo):
            inside = np.all(
                (p[:, None, :] > self.box_lo[None]) & (p[:, None, :] < self.box_hi[None]), axis=2
            ).any(axis=1)
            ok &= ~inside
        return ok


def segment_free(free, a, b, resolution: float) -> bool:
    """Dense check of segment a-b: both endpoints and samples no more than ``resolution`` apart."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = max(1, math.ceil(math.dist(a, b) / resolution))
    t = (np.arange(n + 1) / n)[:, None]
    return bool(free(a + (b - a) * t).all())


def segments_free(free, a: np.ndarray, b: np.ndarray, resolution: float) -> np.ndarray:
    """Batched :func:`segment_free` for segment arrays a, b of shape (m, 3)."""
    m = len(a)
    if m == 0:
        return np.zeros(0, dtype=bool)
    lengths = np.sqrt(np.sum((b - a) ** 2, axis=1))
    counts = np.maximum(1, np.ceil(lengths / resolution).astype(np.int64))
    seg = np.repeat(np.arange(m), counts + 1)
    # sample index within each segment, 0..count
    idx = np.arange(len(seg)) - np.repeat(np.cumsum(counts + 1) - (counts + 1), counts + 1)
    t = (idx / counts[seg])[:, None]
    ok = free(a[seg] + (b[seg] - a[seg]) * t)
    return np.logical_and.reduceat(ok, np.concatenate([[0], np.cumsum(counts + 1)[:-1]]))


def path_free(free, path, resolution: float) -> bool:
    return all(segment_free(free, path[i], path[i + 1], resolution) for i in range(len(path) - 1))


def path_length(path) -> float:
    p = np.asarray(path, dtype=np.float64)
    return float(np.sum(np.linalg.norm(np.diff(p, axis=0), axis=1))) if len(p) > 1 else 0.0


@dataclass
class PlanResult:
    path: np.ndarray  # (k, 3) polyline from start to goal
    cost: float
    cost_trace: list = field(default_factory=list)  # best cost after each iteration (inf before a solution)
    iterations: int = 0
    tree_size: int = 0


def rrt_star(
    start,
    goal,
    free,
    bounds,
    stream: RandomStream,
    step: float = 0.5,
    gamma: float | None = None,
    goal_bias: float = 0.05,
    max_iters: int = 5000,
    target_cost: float | None = None,
) -> PlanResult:
    """Plan from ``start`` to ``goal`` through the free space ``free(points) -> bool``.

    Segments are validated at ``step / 10``. The neighbour radius is
    ``min(gamma * (log n / n) ** (1/3), 2 * step)`` with ``gamma`` defaulting
    to twice the cube root of the sampling box volume. Nodes within ``step``
    of the goal that see it directly join the goal set; the reported cost is
    the best over that set and never increases. ``target_cost`` stops the
    search early once the best cost reaches it.
    """
    start = np.asarray(start, dtype=np.float64)
    goal = np.asarray(goal, dtype=np.float64)
    lo = np.asarray(bounds[0], dtype=np.float64)
    hi = np.asarray(bounds[1], dtype=np.float64)
    res = step / 10.0
    if not (free(start[None])[0] and free(goal[None])[0]):
        raise ValueError("start and goal must be collision-free")
    if np.array_equal(start, goal):
        return PlanResult(np.stack([start]), 0.0, [0.0], 0, 1)
    if gamma is None:
        gamma = 2.0 * float(np.prod(hi - lo)) ** (1.0 / 3.0)

    cap = max_iters + 1
    nodes = np.zeros((cap, 3))
    parent = np.full(cap, -1, dtype=np.int64)
    cost = np.zeros(cap)
    children: list = [[] for _ in range(cap)]
    nodes[0] = start
    n = 1
    goal_set: list = []
    best = math.inf
    best_node = -1
    trace = []

    def connect_goal(k):
        nonlocal best, best_node
        d = math.dist(goal, nodes[k])
        if d <= step and segment_free(free, nodes[k], goal, res):
            goal_set.append(k)
            if cost[k] + d < best:
                best, best_node = cost[k] + d, k

    def refresh_best():
        nonlocal best, best_node
        g = np.array(goal_set, dtype=np.int64)
        c = cost[g] + np.sqrt(np.sum((nodes[g] - goal) ** 2, axis=1))
        j = int(np.argmin(c))
        if c[j] < best:
            best, best_node = float(c[j]), int(g[j])

    connect_goal(0)
    it = 0
    for it in range(1, max_iters + 1):
        if stream.random() < goal_bias:
            x_rand = goal
        else:
            x_rand = np.array([stream.uniform(lo[i], hi[i]) for i in range(3)])
        d_all = np.sqrt(np.sum((nodes[:n] - x_rand) ** 2, axis=1))
        near_i = int(np.argmin(d_all))
        d = float(d_all[near_i])
        if d == 0.0:
            trace.append(best)
            continue
        x_new = x_rand if d <= step else nodes[near_i] + (x_rand - nodes[near_i]) * (step / d)
        if not segment_free(free, nodes[near_i], x_new, res):
            trace.append(best)
            continue
        m = max(n, 2)
        radius = min(gamma * (math.log(m) / m) ** (1.0 / 3.0), 2.0 * step)
        dist_new = np.sqrt(np.sum((nodes[:n] - x_new) ** 2, axis=1))
        near = np.flatnonzero(dist_new <= radius)
        # best parent among neighbours; the nearest node is already validated
        p_best, c_best = near_i, cost[near_i] + float(dist_new[near_i])
        for j in near[np.argsort(cost[near] + dist_new[near], kind="stable")]:
            c = cost[j] + dist_new[j]
            if c >= c_best:
                break
            if segment_free(free, nodes[j], x_new, res):
                p_best, c_best = int(j), float(c)
                break
        k = n
        nodes[k] = x_new
        parent[k] = p_best
        cost[k] = c_best
        children[p_best].append(k)
        n += 1
        cand = near[(near != p_best) & (c_best + dist_new[near] < cost[near])]
        rewired = False
        if cand.size:
            ok = segments_free(free, np.broadcast_to(x_new, (len(cand), 3)), nodes[cand], res)
            for j in cand[ok]:
                j = int(j)
                c = c_best + dist_new[j]
                children[parent[j]].remove(j)
                parent[j] = k
                children[k].append(j)
                delta = cost[j] - c
                stack = [j]
                while stack:
                    q = stack.pop()
                    cost[q] -= delta
                    stack.extend(children[q])
                rewired = True
        connect_goal(k)
        if rewired and goal_set:
            refresh_best()
        trace.append(best)
        if target_cost is not None and best <= target_cost:
            break
    if best_node < 0:
        raise NoPathFound(max_iters)
    chain = [goal]
    k = best_node
    while k >= 0:
        chain.append(nodes[k].copy())
        k = parent[k]
    path = np.array(chain[::-1])
    return PlanResult(path, path_length(path), trace, it, n)
