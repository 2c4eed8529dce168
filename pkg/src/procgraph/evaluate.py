"""Batch interpreter for graphs.

A graph is evaluated over a :class:`SampleBatch` of points in topological
order, each needed node exactly once. Every kernel is elementwise over
points, so evaluating a batch in chunks concatenates to the same buffer.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import noise, patterns
from .color import hsv_to_rgb, rgb_to_hsv
from .errors import DegenerateRange, EvalDomainError, MissingAuxField
from .graph import Graph, Ref
from .kinds import ValueKind, literal_kind

DEFAULT_CHUNK = 4096


class EvalStats:
    """Instrumentation counters; tests assert on these."""

    def __init__(self):
        self._lock = threading.Lock()
        self.node_evals = 0
        self.batches = 0

    def count(self, nodes=0, batches=0):
        with self._lock:
            self.node_evals += nodes
            self.batches += batches

    def reset(self):
        with self._lock:
            self.node_evals = 0
            self.batches = 0


STATS = EvalStats()


@dataclass
class SampleBatch:
    points: np.ndarray
    aux: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=np.float64).reshape(-1, 3)
        n = len(self.points)
        if n < 1:
            raise ValueError("sample batch must hold at least one point")
        aux = {}
        for name, arr in self.aux.items():
            arr = np.asarray(arr)
            if arr.shape[0] != n:
                raise ValueError(f"aux field {name!r} has {arr.shape[0]} rows, expected {n}")
            aux[name] = arr
        self.aux = aux

    def __len__(self):
        return len(self.points)

    def __getitem__(self, sl: slice) -> "SampleBatch":
        return SampleBatch(self.points[sl], {k: v[sl] for k, v in self.aux.items()})


@dataclass
class FieldBuffer:
    kind: ValueKind
    data: np.ndarray  # (n,) for scalar kinds, (n, arity) otherwise

    @property
    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)

    def __len__(self):
        return self.data.shape[0]

    def nan_count(self) -> int:
        if self.data.dtype.kind != "f":
            return 0
        return int(np.isnan(self.data).sum())


# ---------------------------------------------------------------------------
# kernels


def _materialize(value, n):
    kind = literal_kind(value)
    if kind is ValueKind.Bool:
        return np.full(n, bool(value))
    if kind is ValueKind.Int:
        return np.full(n, int(value), dtype=np.int64)
    if kind is ValueKind.Float:
        return np.full(n, float(value))
    return np.tile(np.asarray(value, dtype=np.float64), (n, 1))


def _align(a, b):
    if a.ndim == 1 and b.ndim == 2:
        a = a[:, None]
    elif b.ndim == 1 and a.ndim == 2:
        b = b[:, None]
    return a, b


def _arith(fn, float_result=False):
    def kernel(node, ins, batch, kinds):
        a, b = _align(ins["a"], ins["b"])
        if float_result:
            a = a.astype(np.float64)
            b = b.astype(np.float64)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return {"out": fn(a, b)}

    return kernel


def _unary(fn):
    def kernel(node, ins, batch, kinds):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return {"out": fn(ins["x"])}

    return kernel


def _float(x):
    return x.astype(np.float64) if x.dtype != np.float64 else x


def _k_value(node, ins, batch, kinds):
    return {"out": _materialize(node.params["v"], len(batch))}


def _k_position(node, ins, batch, kinds):
    return {"out": batch.points}


def _k_attribute(node, ins, batch, kinds):
    name = node.params["name"]
    if name not in batch.aux:
        raise MissingAuxField(name)
    kind = ValueKind(node.params["kind"])
    arr = np.asarray(batch.aux[name])
    if kind.arity > 1:
        arr = arr.reshape(len(batch), kind.arity).astype(np.float64)
    elif kind is ValueKind.Int:
        arr = arr.reshape(-1).astype(np.int64)
    elif kind is ValueKind.Bool:
        arr = arr.reshape(-1).astype(bool)
    else:
        arr = arr.reshape(-1).astype(np.float64)
    return {"out": arr}


def _k_cast(node, ins, batch, kinds):
    x = ins["x"]
    source = kinds["x"]
    target = ValueKind(node.params["target"])
    if source is target:
        return {"out": x}
    if target is ValueKind.Int:
        with np.errstate(invalid="ignore"):
            return {"out": np.trunc(_float(x)).astype(np.int64)}
    if target is ValueKind.Float:
        if source in (ValueKind.Vec3, ValueKind.Color):
            return {"out": (x[:, 0] + x[:, 1] + x[:, 2]) / 3.0}
        return {"out": _float(x)}
    if target in (ValueKind.Vec3, ValueKind.Color):
        if x.ndim == 1:
            xf = _float(x)
            return {"out": np.stack([xf, xf, xf], axis=1)}
        if source is ValueKind.Vec2:
            return {"out": np.concatenate([x, np.zeros((len(x), 1))], axis=1)}
        return {"out": x}
    if target is ValueKind.Vec2:
        return {"out": x[:, :2]}
    raise EvalDomainError(node.id, f"cast {source} -> {target}")


def _k_mix(node, ins, batch, kinds):
    return {"out": patterns.mix(ins["a"], ins["b"], ins["t"])}


def _k_map_range(node, ins, batch, kinds):
    try:
        out = patterns.map_range(
            _float(ins["x"]), ins["from_lo"], ins["from_hi"], ins["to_lo"], ins["to_hi"], node.params["clamp"]
        )
    except DegenerateRange:
        raise DegenerateRange(node.id) from None
    return {"out": out}


def _k_separate(names):
    def kernel(node, ins, batch, kinds):
        v = ins["v"]
        return {n: v[:, i] for i, n in enumerate(names)}

    return kernel


def _k_combine(names):
    def kernel(node, ins, batch, kinds):
        return {"out": np.stack([_float(ins[n]) for n in names], axis=1)}

    return kernel


def _k_normalize(node, ins, batch, kinds):
    v = ins["v"]
    length = np.sqrt(np.sum(v * v, axis=1))
    safe = np.where(length > 0, length, 1.0)
    return {"out": np.where(length[:, None] > 0, v / safe[:, None], 0.0)}


def _k_shape(fn, *names):
    def kernel(node, ins, batch, kinds):
        mask, cell_id, cell_uv = fn(ins["uv"], *(node.params[n] for n in names))
        return {"mask": mask, "cell_id": cell_id, "cell_uv": cell_uv}

    return kernel


def _k_voronoi(node, ins, batch, kinds):
    d, cid, center = noise.voronoi(ins["p"], node.params["frequency"])
    return {"distance": d, "cell_id": cid, "cell_center": center}


def _p(fn, *names):
    def kernel(node, ins, batch, kinds):
        return {"out": fn(ins["p"], *(node.params[n] for n in names))}

    return kernel


KERNELS = {
    "value": _k_value,
    "position": _k_position,
    "attribute": _k_attribute,
    "cast": _k_cast,
    "add": _arith(np.add),
    "sub": _arith(np.subtract),
    "mul": _arith(np.multiply),
    "div": _arith(np.divide, float_result=True),
    "floordiv": _arith(np.floor_divide),
    "mod": _arith(np.mod),
    "pow": _arith(np.power, float_result=True),
    "minimum": _arith(np.minimum),
    "maximum": _arith(np.maximum),
    "neg": _unary(np.negative),
    "absolute": _unary(np.abs),
    "floor": _unary(np.floor),
    "fract": _unary(lambda x: x - np.floor(x)),
    "sqrt": _unary(lambda x: np.sqrt(_float(x))),
    "sin": _unary(lambda x: np.sin(_float(x))),
    "cos": _unary(lambda x: np.cos(_float(x))),
    "step": lambda node, ins, b, k: {"out": (ins["x"] >= ins["edge"]).astype(np.float64)},
    "mix": _k_mix,
    "clamp": lambda node, ins, b, k: {"out": patterns.clamp(_float(ins["x"]), ins["lo"], ins["hi"])},
    "smoothstep": lambda node, ins, b, k: {"out": patterns.smoothstep(ins["lo"], ins["hi"], ins["x"])},
    "map_range": _k_map_range,
    "combine_xyz": _k_combine(("x", "y", "z")),
    "separate_xyz": _k_separate(("x", "y", "z")),
    "combine_xy": _k_combine(("x", "y")),
    "separate_xy": _k_separate(("x", "y")),
    "dot": lambda node, ins, b, k: {"out": np.sum(ins["a"] * ins["b"], axis=1)},
    "length": lambda node, ins, b, k: {"out": np.sqrt(np.sum(ins["v"] * ins["v"], axis=1))},
    "normalize": _k_normalize,
    "rotate90": lambda node, ins, b, k: {"out": patterns.rotate90(ins["uv"], ins["turns"])},
    "hsv_to_rgb": lambda node, ins, b, k: {"out": hsv_to_rgb(ins["h"], ins["s"], ins["v"])},
    "rgb_to_hsv": lambda node, ins, b, k: {"out": rgb_to_hsv(ins["c"])},
    "perlin_noise": _p(noise.perlin_noise, "frequency"),
    "fbm": _p(noise.fbm, "frequency", "octaves", "lacunarity", "gain"),
    "voronoi": _k_voronoi,
    "white_noise": _p(noise.white_noise),
    "brick_grid": _k_shape(patterns.brick_grid, "rows", "cols", "mortar_width", "row_offset"),
    "tile_grid": _k_shape(patterns.tile_grid, "nx", "ny", "grout"),
    "plank_grid": _k_shape(patterns.plank_grid, "plank_width", "length_mean", "gap"),
    "scratches": _p(patterns.scratches, "density", "length", "width", "seed_offset"),
    "cracks": _p(patterns.cracks, "scale", "width"),
    "smudges": _p(patterns.smudges, "scale", "coverage"),
    "edge_wear": lambda node, ins, b, k: {
        "out": patterns.edge_wear(ins["p"], _float(ins["curvature"]), node.params["intensity"],
                                  node.params["noise_scale"])
    },
}


# ---------------------------------------------------------------------------
# interpreter


def _evaluate_refs(graph: Graph, refs: list, batch: SampleBatch) -> list:
    needed = graph.ancestors([r.node for r in refs])
    kinds = graph.kinds
    n = len(batch)
    memo: dict = {}
    count = 0
    for node in graph.nodes:
        if node.id not in needed:
            continue
        ins = {}
        in_kinds = {}
        for socket, src in node.inputs.items():
            if isinstance(src, Ref):
                ins[socket] = memo[(src.node, src.output)]
                in_kinds[socket] = kinds[(src.node, src.output)]
            else:
                ins[socket] = _materialize(src.value, n)
                in_kinds[socket] = literal_kind(src.value)
        try:
            outs = KERNELS[node.op](node, ins, batch, in_kinds)
        except (EvalDomainError, MissingAuxField):
            raise
        except (ValueError, FloatingPointError) as exc:
            raise EvalDomainError(node.id, str(exc)) from exc
        count += 1
        for socket, arr in outs.items():
            kind = kinds[(node.id, socket)]
            if kind is ValueKind.Float and arr.dtype != np.float64:
                arr = arr.astype(np.float64)
            memo[(node.id, socket)] = arr
    STATS.count(nodes=count, batches=1)
    return [FieldBuffer(kinds[(r.node, r.output)], memo[(r.node, r.output)]) for r in refs]


def evaluate_many(graph: Graph, outputs, batch: SampleBatch, chunk_size=None, threads=1) -> dict:
    """Evaluate several named outputs, sharing intermediate results."""
    outputs = list(outputs)
    refs = [graph.outputs[name] for name in outputs]
    if chunk_size is None or chunk_size >= len(batch):
        bufs = _evaluate_refs(graph, refs, batch)
    else:
        chunks = [batch[i : i + chunk_size] for i in range(0, len(batch), chunk_size)]
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                parts = list(pool.map(lambda c: _evaluate_refs(graph, refs, c), chunks))
        else:
            parts = [_evaluate_refs(graph, refs, c) for c in chunks]
        bufs = [
            FieldBuffer(parts[0][i].kind, np.concatenate([p[i].data for p in parts], axis=0))
            for i in range(len(refs))
        ]
    return dict(zip(outputs, bufs))


def evaluate(graph: Graph, output: str, batch: SampleBatch, chunk_size=None, threads=1) -> FieldBuffer:
    if output not in graph.outputs:
        raise KeyError(f"graph has no output {output!r}")
    return evaluate_many(graph, [output], batch, chunk_size, threads)[output]


def uv_grid_batch(resolution: int) -> SampleBatch:
    """Pixel-center samples: row i, column j -> uv ((j + 0.5)/R, (i + 0.5)/R), z = 0.

    The sample plane is flat, so the batch also carries ``curvature`` = 0.
    """
    centers = (np.arange(resolution, dtype=np.float64) + 0.5) / resolution
    v, u = np.meshgrid(centers, centers, indexing="ij")
    uv = np.stack([u.reshape(-1), v.reshape(-1)], axis=1)
    points = np.concatenate([uv, np.zeros((len(uv), 1))], axis=1)
    return SampleBatch(points, {"uv": uv, "curvature": np.zeros(len(uv))})


def bake_texture(material: Graph, channel: str, resolution: int, chunk_size=None, threads=1) -> np.ndarray:
    """Evaluate one channel on an R x R pixel grid; returns (R, R, 3) linear float64."""
    if not 1 <= int(resolution) <= 16384:
        raise ValueError(f"resolution {resolution} outside [1, 16384]")
    kind = material.output_kind(channel)
    if kind not in (ValueKind.Color, ValueKind.Float):
        raise ValueError(f"channel {channel!r} is {kind}, expected Color or Float")
    batch = uv_grid_batch(resolution)
    buf = evaluate(material, channel, batch, chunk_size, threads)
    data = buf.data
    if data.ndim == 1:
        data = np.repeat(data[:, None], 3, axis=1)
    return data.reshape(resolution, resolution, 3)


def bake_channels(material: Graph, channels, resolution: int) -> dict:
    batch = uv_grid_batch(resolution)
    bufs = evaluate_many(material, channels, batch)
    out = {}
    for name, buf in bufs.items():
        data = buf.data
        if data.ndim == 1:
            data = np.repeat(data[:, None], 3, axis=1)
        out[name] = data.reshape(resolution, resolution, 3)
    return out
