"""Typed compute-graph IR.

Graphs are built one node per call through :class:`GraphBuilder` and frozen
into an immutable :class:`Graph`. Node ids are dense integers assigned in
creation order, and every edge points to an earlier node, so id order is a
topological order.
"""

from __future__ import annotations

import json
import operator
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, NamedTuple

from . import catalog
from .errors import (
    AmbiguousKind,
    CycleDetected,
    InvalidMortar,
    InvalidParam,
    KindMismatch,
    MissingInput,
    UnknownOp,
)
from .kinds import (
    ValueKind,
    check_cast,
    coerce_literal,
    infer_binary,
    infer_kind,
    literal_kind,
    tag,
    untag,
)

GRAPH_VERSION = 1


class Ref(NamedTuple):
    """Edge source: a named output socket of an existing node."""

    node: int
    output: str = "out"


class Const(NamedTuple):
    """Inline literal bound directly to an input socket."""

    value: Any


@dataclass(frozen=True)
class Node:
    id: int
    op: str
    params: dict
    inputs: dict  # socket -> Ref | Const


@dataclass(frozen=True, eq=False)
class Graph:
    nodes: tuple
    outputs: dict  # name -> Ref
    meta: dict = field(default_factory=dict)

    def node(self, node_id: int) -> Node:
        node = self.nodes[node_id] if 0 <= node_id < len(self.nodes) else None
        if node is None or node.id != node_id:
            node = self._by_id.get(node_id)
        if node is None:
            raise KeyError(node_id)
        return node

    @cached_property
    def _by_id(self):
        return {n.id: n for n in self.nodes}

    @cached_property
    def kinds(self) -> dict:
        """(node id, output socket) -> ValueKind, recomputed by inference."""
        kinds: dict = {}
        for node in self.nodes:
            sig = catalog.CATALOG[node.op]
            in_kinds = {}
            for socket, src in node.inputs.items():
                if isinstance(src, Ref):
                    in_kinds[socket] = kinds[(src.node, src.output)]
                else:
                    in_kinds[socket] = literal_kind(src.value)
            for out, kind in resolve_kinds(sig, node.params, in_kinds).items():
                kinds[(node.id, out)] = kind
        return kinds

    def output_kind(self, name: str) -> ValueKind:
        ref = self.outputs[name]
        return self.kinds[(ref.node, ref.output)]

    def consumers(self) -> dict:
        """node id -> number of uses (edges plus graph outputs)."""
        uses = {n.id: 0 for n in self.nodes}
        for node in self.nodes:
            for src in node.inputs.values():
                if isinstance(src, Ref):
                    uses[src.node] += 1
        for ref in self.outputs.values():
            uses[ref.node] += 1
        return uses

    def ancestors(self, roots) -> set:
        seen: set = set()
        stack = list(roots)
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            for src in self.node(nid).inputs.values():
                if isinstance(src, Ref):
                    stack.append(src.node)
        return seen

    def to_json(self) -> dict:
        return graph_to_json(self)

    def serialize(self) -> str:
        return json.dumps(self.to_json(), sort_keys=False, separators=(",", ":"))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.serialize())

    def __len__(self):
        return len(self.nodes)


# ---------------------------------------------------------------------------
# kind resolution shared by the builder and by parsed graphs


def resolve_kinds(sig: catalog.OpSignature, params: dict, in_kinds: dict) -> dict:
    generic = []
    for socket, expected in sig.inputs:
        got = in_kinds[socket]
        if expected == "T":
            generic.append(got)
        elif expected == "any":
            continue
        elif got is not expected and not (expected is ValueKind.Float and got is ValueKind.Int):
            raise KindMismatch(socket, expected, got)
    t_kind = infer_kind(sig.name, generic) if generic else None
    if sig.name == "cast":
        check_cast(in_kinds["x"], ValueKind(params["target"]))
    result = {}
    for out, kind in sig.outputs:
        if kind == "T":
            result[out] = t_kind
        elif isinstance(kind, str) and kind.startswith("param:"):
            pname = kind.split(":", 1)[1]
            pval = params[pname]
            result[out] = ValueKind(pval) if isinstance(pval, str) else literal_kind(pval)
        else:
            result[out] = kind
    return result


def _check_params(sig: catalog.OpSignature, params: dict) -> dict:
    known = {p.name for p in sig.params}
    unknown = set(params) - known
    if unknown:
        raise InvalidParam(f"{sig.name}: unknown params {sorted(unknown)}")
    out = {}
    for spec in sig.params:
        if spec.name in params:
            value = params[spec.name]
        elif spec.required:
            raise InvalidParam(f"{sig.name}: param {spec.name!r} is required")
        else:
            value = spec.default
        if spec.kind == "Float" and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if spec.kind == "any":
            value = coerce_literal(value, literal_kind(value))
        if not spec.accepts(value):
            raise InvalidParam(f"{sig.name}: param {spec.name}={value!r} outside {spec.describe_range()}")
        out[spec.name] = value
    _EXTRA_CHECKS.get(sig.name, lambda p: None)(out)
    return out


def _check_brick(p):
    extent = min(1.0 / p["rows"], 1.0 / p["cols"])
    if not p["mortar_width"] < extent:
        raise InvalidMortar(f"mortar_width {p['mortar_width']} must be below cell extent {extent}")


def _check_tile(p):
    extent = min(1.0 / p["nx"], 1.0 / p["ny"])
    if not p["grout"] < extent:
        raise InvalidMortar(f"grout {p['grout']} must be below cell extent {extent}")


def _check_plank(p):
    if not p["gap"] < min(p["plank_width"], p["length_mean"]) / 2:
        raise InvalidMortar(f"gap {p['gap']} too wide for planks")


_EXTRA_CHECKS = {"brick_grid": _check_brick, "tile_grid": _check_tile, "plank_grid": _check_plank}


# ---------------------------------------------------------------------------
# building


class GraphBuilder:
    """Single-owner mutable graph under construction."""

    def __init__(self):
        self.nodes: list[Node] = []
        self.kinds: dict = {}
        self.hooks: list = []

    def add_node(self, op: str, params: dict | None = None, inputs: dict | None = None) -> int:
        sig = catalog.CATALOG.get(op)
        if sig is None:
            raise UnknownOp(op)
        params = _check_params(sig, dict(params or {}))
        inputs = dict(inputs or {})
        new_id = len(self.nodes)
        bound = {}
        in_kinds = {}
        for socket in sig.input_names:
            if socket not in inputs:
                raise MissingInput(socket)
            src = _as_source(inputs.pop(socket), self)
            if isinstance(src, Ref):
                if src.node >= new_id or src.node < 0:
                    raise CycleDetected(f"{op}.{socket} references node {src.node}, not yet built")
                key = (src.node, src.output)
                if key not in self.kinds:
                    raise InvalidParam(f"node {src.node} has no output {src.output!r}")
                in_kinds[socket] = self.kinds[key]
            else:
                in_kinds[socket] = literal_kind(src.value)
            bound[socket] = src
        if inputs:
            raise InvalidParam(f"{op}: unknown input sockets {sorted(inputs)}")
        out_kinds = resolve_kinds(sig, params, in_kinds)
        node = Node(new_id, op, params, bound)
        self.nodes.append(node)
        for out, kind in out_kinds.items():
            self.kinds[(new_id, out)] = kind
        for hook in self.hooks:
            hook(node)
        return new_id

    def out(self, node_id: int, socket: str = "out") -> "Out":
        return Out(self, node_id, socket, self.kinds[(node_id, socket)])

    def node_outputs(self, node_id: int):
        sig = catalog.CATALOG[self.nodes[node_id].op]
        outs = [self.out(node_id, name) for name in sig.output_names]
        return outs[0] if len(outs) == 1 else tuple(outs)

    # convenience constructors used by generated code and materials
    def value(self, v) -> "Out":
        return self.out(self.add_node("value", {"v": v}))

    def position(self) -> "Out":
        return self.out(self.add_node("position"))

    def attribute(self, name: str, kind="Float") -> "Out":
        return self.out(self.add_node("attribute", {"name": name, "kind": str(ValueKind(kind))}))

    def finalize(self, outputs: dict, meta: dict | None = None) -> Graph:
        refs = {}
        for name, handle in outputs.items():
            if isinstance(handle, Out):
                if handle.builder is not self:
                    raise InvalidParam(f"output {name!r} belongs to another builder")
                refs[name] = Ref(handle.node, handle.socket)
            elif isinstance(handle, Ref):
                refs[name] = handle
            else:
                refs[name] = Ref(self.value(handle).node)
        return Graph(tuple(self.nodes), refs, dict(meta or {}))


def _as_source(value, builder):
    if isinstance(value, Out):
        if value.builder is not builder:
            raise InvalidParam("input handle belongs to another builder")
        return Ref(value.node, value.socket)
    if isinstance(value, (Ref, Const)):
        return value
    kind = literal_kind(value)
    return Const(coerce_literal(value, kind))


def add_node(builder: GraphBuilder, op: str, params=None, inputs=None) -> int:
    return builder.add_node(op, params, inputs)


# ---------------------------------------------------------------------------
# handles with operator overloads

_FOLD = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
    "floordiv": operator.floordiv,
    "mod": operator.mod,
    "pow": operator.pow,
}


class Out:
    """Handle to one output socket of a node under construction."""

    __slots__ = ("builder", "node", "socket", "kind")

    def __init__(self, builder, node, socket, kind):
        self.builder = builder
        self.node = node
        self.socket = socket
        self.kind = kind

    def __repr__(self):
        return f"Out(node={self.node}, socket={self.socket!r}, kind={self.kind})"

    def __bool__(self):
        raise TypeError("graph values have no truth value at build time")

    def astype(self, kind) -> "Out":
        return cast(self, kind)

    def _const_value(self):
        node = self.builder.nodes[self.node]
        if node.op == "value" and self.kind in (ValueKind.Int, ValueKind.Float, ValueKind.Bool):
            return node.params["v"]
        return None

    def _binary(self, op, other, reflected=False):
        if isinstance(other, Out):
            if other.builder is not self.builder:
                return NotImplemented
        else:
            try:
                literal_kind(other)
            except TypeError:
                return NotImplemented
        a, b = (other, self) if reflected else (self, other)
        return overload_binary(op, a, b)

    def __add__(self, o): return self._binary("add", o)
    def __radd__(self, o): return self._binary("add", o, True)
    def __sub__(self, o): return self._binary("sub", o)
    def __rsub__(self, o): return self._binary("sub", o, True)
    def __mul__(self, o): return self._binary("mul", o)
    def __rmul__(self, o): return self._binary("mul", o, True)
    def __truediv__(self, o): return self._binary("div", o)
    def __rtruediv__(self, o): return self._binary("div", o, True)
    def __floordiv__(self, o): return self._binary("floordiv", o)
    def __rfloordiv__(self, o): return self._binary("floordiv", o, True)
    def __mod__(self, o): return self._binary("mod", o)
    def __rmod__(self, o): return self._binary("mod", o, True)
    def __pow__(self, o): return self._binary("pow", o)
    def __rpow__(self, o): return self._binary("pow", o, True)

    def __neg__(self):
        return self.builder.out(self.builder.add_node("neg", {}, {"x": self}))


SYMBOL_OPS = {"+": "add", "-": "sub", "*": "mul", "/": "div", "//": "floordiv", "%": "mod", "**": "pow"}


def overload_binary(op, a, b) -> Out:
    """Build the node behind an infix operator; folds pairs of scalar constants."""
    op = SYMBOL_OPS.get(op, op)
    builder = a.builder if isinstance(a, Out) else b.builder
    ka = a.kind if isinstance(a, Out) else literal_kind(a)
    kb = b.kind if isinstance(b, Out) else literal_kind(b)
    result_kind = infer_binary(op, ka, kb)
    va = a._const_value() if isinstance(a, Out) else None
    vb = b._const_value() if isinstance(b, Out) else None
    if va is not None and vb is not None and op in _FOLD:
        try:
            folded = _FOLD[op](va, vb)
        except (ZeroDivisionError, OverflowError):
            folded = None
        if folded is not None and not isinstance(folded, complex):
            return builder.value(coerce_literal(folded, result_kind))
    return builder.out(builder.add_node(op, {}, {"a": a, "b": b}))


def cast(value: Out, target) -> Out:
    target = ValueKind(target)
    check_cast(value.kind, target)
    b = value.builder
    return b.out(b.add_node("cast", {"target": target.value}, {"x": value}))


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Issue:
    code: str
    node: int | None
    socket: str | None
    message: str
    severity: str = "error"


@dataclass
class ValidationReport:
    issues: list

    @property
    def errors(self):
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self):
        return [i for i in self.issues if i.severity == "warning"]

    @property
    def ok(self):
        return not self.errors

    def codes(self):
        return [i.code for i in self.issues]

    def __len__(self):
        return len(self.issues)


def validate(graph: Graph) -> ValidationReport:
    """Check every Node/Graph invariant; never raises for malformed graphs."""
    issues: list[Issue] = []
    seen_ids = {}
    order = {}
    for pos, node in enumerate(graph.nodes):
        if node.id in seen_ids:
            issues.append(Issue("DuplicateId", node.id, None, f"node id {node.id} repeated"))
        seen_ids[node.id] = node
        order[node.id] = pos

    out_sockets = {}
    for node in graph.nodes:
        sig = catalog.CATALOG.get(node.op)
        if sig is None:
            issues.append(Issue("UnknownOp", node.id, None, f"unknown op {node.op!r}"))
            continue
        out_sockets[node.id] = set(sig.output_names)

    kinds: dict = {}
    adjacency = {n.id: [] for n in graph.nodes}
    for node in graph.nodes:
        sig = catalog.CATALOG.get(node.op)
        if sig is None:
            continue
        try:
            params = _check_params(sig, node.params)
        except InvalidParam as exc:
            issues.append(Issue("InvalidParam", node.id, None, str(exc)))
            params = None
        in_kinds = {}
        broken = params is None
        for socket in sig.input_names:
            if socket not in node.inputs:
                issues.append(Issue("MissingInput", node.id, socket, f"socket {socket!r} unbound"))
                broken = True
        for socket, src in node.inputs.items():
            if socket not in sig.input_names:
                issues.append(Issue("UnknownSocket", node.id, socket, f"{node.op} has no input {socket!r}"))
                broken = True
                continue
            if isinstance(src, Ref):
                if src.node not in seen_ids or src.output not in out_sockets.get(src.node, ()):
                    issues.append(Issue("DanglingEdge", node.id, socket, f"edge to {src.node}.{src.output}"))
                    broken = True
                    continue
                adjacency[node.id].append(src.node)
                if (src.node, src.output) in kinds:
                    in_kinds[socket] = kinds[(src.node, src.output)]
                else:
                    broken = True
            else:
                try:
                    in_kinds[socket] = literal_kind(src.value)
                except TypeError:
                    issues.append(Issue("BadConst", node.id, socket, f"bad literal {src.value!r}"))
                    broken = True
        if broken:
            continue
        try:
            for out, kind in resolve_kinds(sig, params, in_kinds).items():
                kinds[(node.id, out)] = kind
        except (KindMismatch, AmbiguousKind) as exc:
            issues.append(Issue(type(exc).__name__, node.id, getattr(exc, "socket", None), str(exc)))
        except Exception as exc:  # cast table violations
            issues.append(Issue(type(exc).__name__, node.id, None, str(exc)))

    if _has_cycle(adjacency):
        issues.append(Issue("CycleDetected", None, None, "graph contains a cycle"))
    for node in graph.nodes:
        for socket, src in node.inputs.items():
            if isinstance(src, Ref) and src.node in order and order[src.node] >= order[node.id]:
                issues.append(Issue("OrderViolation", node.id, socket, "edge to a later node"))

    for name, ref in graph.outputs.items():
        if ref.node not in seen_ids or ref.output not in out_sockets.get(ref.node, ()):
            issues.append(Issue("DanglingOutput", ref.node, ref.output, f"output {name!r} dangles"))

    live = set()
    stack = [r.node for r in graph.outputs.values() if r.node in seen_ids]
    while stack:
        nid = stack.pop()
        if nid in live:
            continue
        live.add(nid)
        stack.extend(s for s in adjacency.get(nid, ()) if s in seen_ids)
    for node in graph.nodes:
        if node.id not in live:
            issues.append(Issue("DeadNode", node.id, None, "node does not reach any output", "warning"))
    return ValidationReport(issues)


def _has_cycle(adjacency) -> bool:
    state = {}
    for start in adjacency:
        if state.get(start):
            continue
        stack = [(start, iter(adjacency[start]))]
        state[start] = 1
        while stack:
            nid, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[nid] = 2
                stack.pop()
                continue
            if nxt not in adjacency:
                continue
            s = state.get(nxt, 0)
            if s == 1:
                return True
            if s == 0:
                state[nxt] = 1
                stack.append((nxt, iter(adjacency[nxt])))
    return False


# ---------------------------------------------------------------------------
# JSON


def graph_to_json(graph: Graph) -> dict:
    nodes = []
    for node in graph.nodes:
        inputs = {}
        for socket, src in node.inputs.items():
            if isinstance(src, Ref):
                inputs[socket] = {"node": src.node, "output": src.output}
            else:
                inputs[socket] = {"const": tag(src.value)}
        nodes.append(
            {
                "id": node.id,
                "op": node.op,
                "params": {k: tag(v) for k, v in node.params.items()},
                "inputs": inputs,
            }
        )
    doc = {
        "version": GRAPH_VERSION,
        "nodes": nodes,
        "outputs": {k: {"node": r.node, "output": r.output} for k, r in graph.outputs.items()},
    }
    if graph.meta:
        doc["meta"] = graph.meta
    return doc


def _expect_keys(obj, required, optional=(), where="object"):
    if not isinstance(obj, dict):
        raise ValueError(f"{where}: expected an object")
    keys = set(obj)
    missing = set(required) - keys
    extra = keys - set(required) - set(optional)
    if missing:
        raise ValueError(f"{where}: missing fields {sorted(missing)}")
    if extra:
        raise ValueError(f"{where}: unknown fields {sorted(extra)}")


def graph_from_json(doc: dict) -> Graph:
    _expect_keys(doc, ("version", "nodes", "outputs"), ("meta",), "graph")
    if doc["version"] != GRAPH_VERSION:
        raise ValueError(f"unsupported graph version {doc['version']!r}")
    nodes = []
    for i, nd in enumerate(doc["nodes"]):
        where = f"nodes[{i}]"
        _expect_keys(nd, ("id", "op", "params", "inputs"), (), where)
        if not isinstance(nd["id"], int) or isinstance(nd["id"], bool):
            raise ValueError(f"{where}: id must be an integer")
        inputs = {}
        for socket, src in nd["inputs"].items():
            if isinstance(src, dict) and "const" in src:
                _expect_keys(src, ("const",), (), f"{where}.inputs.{socket}")
                inputs[socket] = Const(untag(src["const"]))
            else:
                _expect_keys(src, ("node", "output"), (), f"{where}.inputs.{socket}")
                inputs[socket] = Ref(int(src["node"]), str(src["output"]))
        params = {k: untag(v) for k, v in nd["params"].items()}
        nodes.append(Node(nd["id"], nd["op"], params, inputs))
    outputs = {}
    for name, ref in doc["outputs"].items():
        _expect_keys(ref, ("node", "output"), (), f"outputs.{name}")
        outputs[name] = Ref(int(ref["node"]), str(ref["output"]))
    return Graph(tuple(nodes), outputs, dict(doc.get("meta", {})))


def dumps(graph: Graph) -> str:
    return json.dumps(graph_to_json(graph), indent=1)


def loads(text: str) -> Graph:
    return graph_from_json(json.loads(text))
