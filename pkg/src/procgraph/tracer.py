"""Static tracing of samplers.

``trace_instance`` re-runs a sampler for one seed while recording every draw,
choice and node creation. ``trace_distribution`` runs each sampler body once
with placeholder values: every branch of every ``choose`` is traced, shared
sub-samplers are memoized by ``(sampler id, structural hash of arguments)``,
and no field is ever evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import OutOfRange, PathExplosion, ProcGraphError, UnknownParam
from .graph import Const, Graph, GraphBuilder, Ref, graph_from_json, graph_to_json
from .kinds import tag, untag
from .rng import RandomStream
from .sampler import (
    SAMPLERS,
    Call,
    Choice,
    Draw,
    ParamSpec,
    RecordingContext,
    ReplayContext,
    SamplerContext,
    SamplerFn,
    TracedIndex,
    _check_purity,
    args_hash,
    discrete_spec,
    normal_spec,
    result_to_graph,
    uniform_spec,
)

DEFAULT_PATH_BOUND = 10**6


# ---------------------------------------------------------------------------
# instance traces


@dataclass
class InstanceTrace:
    sampler_id: str
    seed: int
    events: list
    graph: Graph

    def choice_path(self) -> tuple:
        return tuple((e.name, int(e.index)) for e in self.events if isinstance(e, Choice))

    def values(self) -> dict:
        out = {}
        for e in self.events:
            if isinstance(e, Draw):
                out[e.name] = e.value
            elif isinstance(e, Choice):
                out[e.name] = int(e.index)
        return out

    def specs(self) -> dict:
        return {e.name: e.spec for e in self.events if isinstance(e, (Draw, Choice))}

    def to_json(self) -> dict:
        events = []
        for e in self.events:
            if isinstance(e, Draw):
                events.append({"type": "draw", "name": e.name, "spec": e.spec.to_json(), "value": e.value})
            elif isinstance(e, Choice):
                events.append(
                    {"type": "choice", "name": e.name, "spec": e.spec.to_json(), "index": int(e.index),
                     "branching": e.branching}
                )
            else:
                events.append(
                    {
                        "type": "call",
                        "op": e.op,
                        "node": e.node,
                        "params": {k: tag(v) for k, v in e.params.items()},
                        "inputs": {
                            k: ({"node": v.node, "output": v.output} if isinstance(v, Ref) else {"const": tag(v.value)})
                            for k, v in e.inputs.items()
                        },
                    }
                )
        return {"sampler": self.sampler_id, "seed": self.seed, "events": events, "graph": graph_to_json(self.graph)}

    @classmethod
    def from_json(cls, doc) -> "InstanceTrace":
        events = []
        for e in doc["events"]:
            if e["type"] == "draw":
                events.append(Draw(e["name"], ParamSpec.from_json(e["spec"]), e["value"]))
            elif e["type"] == "choice":
                events.append(Choice(e["name"], ParamSpec.from_json(e["spec"]), e["index"], e["branching"]))
            else:
                inputs = {
                    k: (Const(untag(v["const"])) if "const" in v else Ref(v["node"], v["output"]))
                    for k, v in e["inputs"].items()
                }
                params = {k: untag(v) for k, v in e["params"].items()}
                events.append(Call(e["op"], e["node"], params, inputs))
        return cls(doc["sampler"], doc["seed"], events, graph_from_json(doc["graph"]))


def trace_instance(f: SamplerFn, seed: int, *args) -> InstanceTrace:
    g = GraphBuilder()
    ctx = RecordingContext(RandomStream(seed), g)
    if not args:
        args = f.default_args(g)
    result = f(ctx, *args)
    graph = result_to_graph(g, result)
    return InstanceTrace(f.id, seed, ctx.events, graph)


def replay(trace: InstanceTrace, overrides: dict | None = None, f: SamplerFn | None = None) -> Graph:
    """Rebuild a traced asset, substituting ``overrides`` for recorded values."""
    overrides = dict(overrides or {})
    specs = trace.specs()
    for name, value in overrides.items():
        if name not in specs:
            raise UnknownParam(name)
        if not specs[name].contains(value):
            raise OutOfRange(f"{name}={value!r} outside its parameter spec")
    f = f or SAMPLERS[trace.sampler_id]
    values = trace.values()
    values.update(overrides)
    g = GraphBuilder()
    ctx = ReplayContext(RandomStream(trace.seed), g, values)
    result = f(ctx, *f.default_args(g))
    return result_to_graph(g, result)


# ---------------------------------------------------------------------------
# distribution graphs


@dataclass(frozen=True)
class ParamNode:
    name: str
    spec: ParamSpec


@dataclass(frozen=True)
class ChoiceNode:
    name: str
    spec: ParamSpec
    branches: tuple  # one body (tuple of nodes) per option
    branching: bool

    @property
    def probabilities(self):
        total = sum(self.spec.weights)
        return tuple(w / total for w in self.spec.weights)


@dataclass(frozen=True)
class CallNode:
    label: str
    target: str


@dataclass(frozen=True)
class OpNode:
    op: str


@dataclass(frozen=True)
class SamplerDef:
    key: str
    sampler_id: str
    body: tuple


@dataclass(frozen=True)
class PathInfo:
    probability: float
    choices: tuple
    n_continuous: int
    n_discrete: int


@dataclass
class DistributionGraph:
    root: str
    defs: dict = field(default_factory=dict)

    def path_count(self) -> int:
        memo: dict = {}

        def body_count(body):
            n = 1
            for item in body:
                n *= item_count(item)
            return n

        def item_count(item):
            if isinstance(item, ChoiceNode):
                return sum(body_count(b) for b in item.branches)
            if isinstance(item, CallNode):
                if item.target not in memo:
                    memo[item.target] = body_count(self.defs[item.target].body)
                return memo[item.target]
            return 1

        return body_count(self.defs[self.root].body)

    def paths(self, limit: int = DEFAULT_PATH_BOUND) -> list:
        """Enumerate every control path (brute force; for oracles and small samplers)."""
        count = self.path_count()
        if count > limit:
            raise PathExplosion(limit, count)

        def enum_body(body, prefix):
            acc = [(1.0, (), 0, 0)]
            for item in body:
                opts = enum_item(item, prefix)
                if len(opts) == 1 and opts[0] == (1.0, (), 0, 0):
                    continue
                acc = [
                    (p1 * p2, c1 + c2, a1 + a2, d1 + d2)
                    for (p1, c1, a1, d1) in acc
                    for (p2, c2, a2, d2) in opts
                ]
            return acc

        def enum_item(item, prefix):
            if isinstance(item, ParamNode):
                return [(1.0, (), 1, 0)]
            if isinstance(item, ChoiceNode):
                q = prefix + item.name
                out = []
                for i, (prob, branch) in enumerate(zip(item.probabilities, item.branches)):
                    for p, c, a, d in enum_body(branch, prefix):
                        out.append((prob * p, ((q, i),) + c, a, d + 1))
                return out
            if isinstance(item, CallNode):
                return enum_body(self.defs[item.target].body, prefix + item.label + "/")
            return [(1.0, (), 0, 0)]

        return [PathInfo(*t) for t in enum_body(self.defs[self.root].body, "")]

    def to_json(self) -> dict:
        nodes = []

        def emit_body(body):
            ids = []
            for item in body:
                ids.append(emit(item))
            return ids

        def emit(item):
            entry: dict = {"id": None}
            if isinstance(item, ParamNode):
                entry.update(op="Param", ctrl=True, name=item.name, spec=item.spec.to_json())
            elif isinstance(item, ChoiceNode):
                branches = [emit_body(b) for b in item.branches]
                entry.update(op="Choice", ctrl=True, name=item.name, spec=item.spec.to_json(),
                             branching=item.branching, branches=branches)
            elif isinstance(item, CallNode):
                entry.update(op="Call", ctrl=True, label=item.label, target=item.target)
            else:
                entry.update(op=item.op)
            entry["id"] = len(nodes)
            nodes.append(entry)
            return entry["id"]

        defs = {}
        for key in sorted(self.defs):
            d = self.defs[key]
            defs[key] = {"sampler": d.sampler_id, "body": emit_body(d.body)}
        return {"version": 1, "kind": "distribution", "root": self.root, "nodes": nodes, "defs": defs}

    @classmethod
    def from_json(cls, doc) -> "DistributionGraph":
        if doc.get("version") != 1 or doc.get("kind") != "distribution":
            raise ValueError("not a distribution graph document")
        by_id = {n["id"]: n for n in doc["nodes"]}
        built: dict = {}

        def build(i):
            if i in built:
                return built[i]
            n = by_id[i]
            op = n["op"]
            if op == "Param":
                item = ParamNode(n["name"], ParamSpec.from_json(n["spec"]))
            elif op == "Choice":
                item = ChoiceNode(
                    n["name"], ParamSpec.from_json(n["spec"]),
                    tuple(tuple(build(j) for j in b) for b in n["branches"]), n["branching"],
                )
            elif op == "Call":
                item = CallNode(n["label"], n["target"])
            else:
                item = OpNode(op)
            built[i] = item
            return item

        defs = {
            key: SamplerDef(key, d["sampler"], tuple(build(i) for i in d["body"]))
            for key, d in doc["defs"].items()
        }
        return cls(doc["root"], defs)


class _DistState:
    def __init__(self, g):
        self.g = g
        self.defs: dict = {}
        self.results: dict = {}
        self.in_progress: set = set()
        self.stack: list = []
        g.hooks.append(self._on_node)

    def _on_node(self, node):
        if self.stack:
            self.stack[-1].append(OpNode(node.op))


class DistributionContext(SamplerContext):
    """Explores every branch once; draws return placeholders."""

    trace_mode = True

    def __init__(self, state: _DistState):
        super().__init__(RandomStream(0), state.g)
        self.state = state
        self.body: list = []

    def uniform(self, name, lo, hi):
        _check_purity(name)
        spec = uniform_spec(lo, hi)
        self.body.append(ParamNode(self._claim(name), spec))
        return spec.placeholder()

    def normal(self, name, mu, sigma, lo=None, hi=None):
        _check_purity(name)
        spec = normal_spec(mu, sigma, lo, hi)
        self.body.append(ParamNode(self._claim(name), spec))
        return spec.placeholder()

    def choice(self, name, weights):
        _check_purity(name)
        spec = discrete_spec(weights)
        self.body.append(ChoiceNode(self._claim(name), spec, ((),) * len(spec.weights), False))
        return TracedIndex(0)

    def choose(self, name, weights, options, *args):
        _check_purity(name)
        spec = discrete_spec(weights)
        if len(options) != len(spec.weights):
            raise ProcGraphError(f"choose {name!r}: {len(options)} options for {len(spec.weights)} weights")
        q = self._claim(name)
        branches = []
        keys = []
        for option in options:
            key = self._trace_def(option, args)
            keys.append(key)
            branches.append((CallNode(f"{name}:{option.id}", key),))
        self.body.append(ChoiceNode(q, spec, tuple(branches), True))
        return self.state.results[keys[0]]

    def call(self, f, *args, label=None):
        label = label or f.id
        self._claim(label)
        key = self._trace_def(f, args)
        self.body.append(CallNode(label, key))
        return self.state.results[key]

    def _trace_def(self, f: SamplerFn, args) -> str:
        st = self.state
        key = f"{f.id}@{args_hash(args)}"
        if key in st.defs:
            return key
        if key in st.in_progress:
            raise ProcGraphError(f"sampler {f.id} is recursive; recursion cannot be traced")
        st.in_progress.add(key)
        ctx = DistributionContext(st)
        st.stack.append(ctx.body)
        try:
            result = f(ctx, *args)
        finally:
            st.stack.pop()
            st.in_progress.discard(key)
        st.defs[key] = SamplerDef(key, f.id, tuple(ctx.body))
        st.results[key] = result
        return key


def trace_distribution(f: SamplerFn, *args, bound: int = DEFAULT_PATH_BOUND) -> DistributionGraph:
    g = GraphBuilder()
    if not args:
        args = f.default_args(g)
    state = _DistState(g)
    root_ctx = DistributionContext(state)
    root = root_ctx._trace_def(f, args)
    dg = DistributionGraph(root, dict(state.defs))
    count = dg.path_count()
    if count > bound:
        raise PathExplosion(bound, count)
    return dg


# ---------------------------------------------------------------------------
# parameter manifests


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    spec: ParamSpec
    value: float | int | None = None


def list_params(source) -> list:
    if isinstance(source, InstanceTrace):
        return [
            ManifestEntry(e.name, e.spec, e.value if isinstance(e, Draw) else int(e.index))
            for e in source.events
            if isinstance(e, (Draw, Choice))
        ]
    entries = []

    def walk(body, prefix):
        for item in body:
            if isinstance(item, ParamNode):
                entries.append(ManifestEntry(prefix + item.name, item.spec))
            elif isinstance(item, ChoiceNode):
                entries.append(ManifestEntry(prefix + item.name, item.spec))
                for branch in item.branches:
                    walk(branch, prefix)
            elif isinstance(item, CallNode):
                walk(source.defs[item.target].body, prefix + item.label + "/")

    walk(source.defs[source.root].body, "")
    return entries
