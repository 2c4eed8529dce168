"""Diversity metrics over distribution graphs and the normal-variation image metric.

Path statistics are computed by dynamic programming over sampler bodies (each
shared definition is evaluated once); ``enumerate_*`` helpers provide
brute-force references for small samplers.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import EvenWindow, UnboundedParam
from .tracer import CallNode, ChoiceNode, DistributionGraph, ParamNode

BITS_PER_CONTINUOUS = 3


@dataclass(frozen=True)
class DiversityReport:
    cont_params_mean: float
    disc_params_mean: float
    cyclomatic: int
    entropy_bits: float
    paths: int

    def to_json(self) -> dict:
        return asdict(self)


def _fold(g: DistributionGraph, on_param, on_choice, combine, empty):
    """Generic memoized fold: body value = combine over items."""
    memo: dict = {}

    def body(items, prefix):
        acc = empty
        for item in items:
            acc = combine(acc, node(item, prefix))
        return acc

    def node(item, prefix):
        if isinstance(item, ParamNode):
            return on_param(item, prefix)
        if isinstance(item, ChoiceNode):
            return on_choice(item, [body(b, prefix) for b in item.branches])
        if isinstance(item, CallNode):
            key = item.target
            if key not in memo:
                memo[key] = body(g.defs[key].body, prefix + item.label + "/")
            return memo[key]
        return empty

    return body(g.defs[g.root].body, "")


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def count_params(g: DistributionGraph) -> tuple[float, float]:
    """Expected continuous and discrete draws per instance, weighted by branch probability."""

    def on_choice(item, branches):
        cont = sum(p * b[0] for p, b in zip(item.probabilities, branches))
        disc = 1.0 + sum(p * b[1] for p, b in zip(item.probabilities, branches))
        return (cont, disc)

    return _fold(g, lambda item, prefix: (1.0, 0.0), on_choice, _add, (0.0, 0.0))


def cyclomatic(g: DistributionGraph) -> int:
    """1 + sum over choices (inlined per call site) of (k - 1)."""

    def on_choice(item, branches):
        return (len(item.branches) - 1 + sum(b[0] for b in branches),)

    return 1 + _fold(g, lambda item, prefix: (0,), on_choice, _add, (0,))[0]


def cyclomatic_cfg(g: DistributionGraph) -> int:
    """Reference value from an explicit control-flow multigraph, M = E - N + 2."""
    counter = {"nodes": 0, "edges": 0}

    def new_node():
        counter["nodes"] += 1
        return counter["nodes"] - 1

    def edge():
        counter["edges"] += 1

    def body(items, entry):
        cur = entry
        for item in items:
            if isinstance(item, ChoiceNode):
                split = new_node()
                edge()  # cur -> split
                merge = new_node()
                for b in item.branches:
                    start = new_node()
                    edge()  # split -> start
                    end = body(b, start)
                    edge()  # end -> merge
                    del end
                cur = merge
            elif isinstance(item, CallNode):
                cur = body(g.defs[item.target].body, cur)
            else:
                nxt = new_node()
                edge()
                cur = nxt
        return cur

    entry = new_node()
    last = body(g.defs[g.root].body, entry)
    exit_node = new_node()
    edge()
    del last, exit_node
    return counter["edges"] - counter["nodes"] + 2


def _entropy_bits(probs) -> float:
    return -sum(p * math.log2(p) for p in probs if p > 0)


def entropy(g: DistributionGraph) -> float:
    """Joint entropy in bits, each continuous draw discretized to 8 equiprobable bins."""

    def on_param(item, prefix):
        if not item.spec.bounded:
            raise UnboundedParam(prefix + item.name)
        return (float(BITS_PER_CONTINUOUS),)

    def on_choice(item, branches):
        probs = item.probabilities
        return (_entropy_bits(probs) + sum(p * b[0] for p, b in zip(probs, branches)),)

    return _fold(g, on_param, on_choice, _add, (0.0,))[0]


def diversity(g: DistributionGraph) -> DiversityReport:
    cont, disc = count_params(g)
    return DiversityReport(cont, disc, cyclomatic(g), entropy(g), g.path_count())


# brute-force references


def enumerate_counts(g: DistributionGraph, limit: int = 100_000) -> tuple[float, float]:
    paths = g.paths(limit)
    return (
        math.fsum(p.probability * p.n_continuous for p in paths),
        math.fsum(p.probability * p.n_discrete for p in paths),
    )


def enumerate_entropy(g: DistributionGraph, limit: int = 100_000) -> float:
    """Entropy of the joint discretized outcome, expanding every 3-bit symbol."""
    total = 0.0
    bins = 2**BITS_PER_CONTINUOUS
    for path in g.paths(limit):
        # each path splits into bins**n equiprobable outcomes
        n_outcomes = bins**path.n_continuous
        q = path.probability / n_outcomes
        if q > 0:
            total -= n_outcomes * q * math.log2(q)
    return total


# ---------------------------------------------------------------------------
# normal variation


def normal_variation(normals, window: int = 15):
    """Per-pixel sum of angles to every valid neighbour in a clipped window.

    ``normals`` is (H, W, 3). Pixels whose normal is zero are invalid: they get
    V = 0, contribute no angles, and are left out of the mean. Returns
    ``(V, mean, (counts, bin_edges))``.
    """
    if window < 1 or window % 2 == 0:
        raise EvenWindow(f"window must be a positive odd integer, got {window}")
    n = np.asarray(normals, dtype=np.float64)
    h, w, _ = n.shape
    valid = np.linalg.norm(n, axis=2) > 0.5
    r = window // 2
    v = np.zeros((h, w))
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            y0, y1 = max(0, -dy), min(h, h - dy)
            x0, x1 = max(0, -dx), min(w, w - dx)
            if y0 >= y1 or x0 >= x1:
                continue
            a = n[y0:y1, x0:x1]
            b = n[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
            both = valid[y0:y1, x0:x1] & valid[y0 + dy:y1 + dy, x0 + dx:x1 + dx]
            cross = np.linalg.norm(np.cross(a, b), axis=2)
            dot = np.sum(a * b, axis=2)
            v[y0:y1, x0:x1] += np.where(both, np.arctan2(cross, dot), 0.0)
    mean = float(v[valid].mean()) if valid.any() else 0.0
    hist = np.histogram(v[valid], bins=32)
    return v, mean, hist
