"""Graph -> builder-API source text, plus the round-trip helpers.

Emitted code is a single ``def build(g):`` using :mod:`procgraph.ops`; running
it through :func:`execute_source` rebuilds an isomorphic graph.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

from . import catalog, ops
from .color import hsv_literal, rgb_to_hsv_literal
from .errors import StructureMismatch
from .graph import Const, Graph, GraphBuilder, Node, Ref
from .kinds import Color, ValueKind, Vec2, Vec3, literal_kind, tag

_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/", "floordiv": "//", "mod": "%", "pow": "**"}
_SCALAR_KINDS = (ValueKind.Int, ValueKind.Float, ValueKind.Bool)


@dataclass(frozen=True)
class EmitOptions:
    inline_max_uses: int = 1
    use_operators: bool = True
    hsv_colors: bool = False
    indent: int = 4

    def __post_init__(self):
        if self.inline_max_uses < 0:
            raise ValueError("inline_max_uses must be >= 0")


def _float(x: float) -> str:
    if math.isnan(x):
        return 'float("nan")'
    if math.isinf(x):
        return 'float("inf")' if x > 0 else '-float("inf")'
    return repr(float(x))


def _literal(value, hsv: bool) -> str:
    if isinstance(value, bool):
        return repr(value)
    if isinstance(value, int):
        return repr(value)
    if isinstance(value, float):
        return _float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, Color):
        if hsv:
            h, s, v = rgb_to_hsv_literal(value)
            if tuple(hsv_literal(h, s, v)) == tuple(value):
                return f"hsv_literal({_float(h)}, {_float(s)}, {_float(v)})"
        return "Color(" + ", ".join(_float(c) for c in value) + ")"
    if isinstance(value, (Vec2, Vec3)):
        return f"{type(value).__name__}(" + ", ".join(_float(c) for c in value) + ")"
    raise TypeError(f"cannot render literal {value!r}")


def emit(graph: Graph, opts: EmitOptions | None = None) -> str:
    opts = opts or EmitOptions()
    uses = graph.consumers()
    kinds = graph.kinds
    by_id = {n.id: n for n in graph.nodes}
    inlined = {
        n.id
        for n in graph.nodes
        if catalog.CATALOG[n.op].inlinable
        and 0 < uses[n.id] <= opts.inline_max_uses
        and len(catalog.CATALOG[n.op].output_names) == 1
    }
    names: dict = {}
    counters: dict = {}
    for n in graph.nodes:
        if n.id not in inlined:
            k = counters.get(n.op, 0)
            counters[n.op] = k + 1
            names[n.id] = f"{n.op}_{k}"

    def is_scalar_value_node(src) -> bool:
        if not isinstance(src, Ref):
            return False
        node = by_id[src.node]
        return node.op == "value" and kinds[(src.node, src.output)] in _SCALAR_KINDS

    def ref_text(ref: Ref):
        """(text, atomic) for an edge source."""
        if ref.node in inlined:
            return render(by_id[ref.node])
        name = names[ref.node]
        if len(catalog.CATALOG[by_id[ref.node].op].output_names) > 1:
            return f"{name}.{ref.output}", True
        return name, True

    def source_text(src):
        if isinstance(src, Ref):
            return ref_text(src)
        text = _literal(src.value, opts.hsv_colors)
        return text, not text.startswith("-")

    def operand(src):
        text, atomic = source_text(src)
        return text if atomic else f"({text})"

    def render(node: Node):
        sig = catalog.CATALOG[node.op]
        ins = [node.inputs[s] for s in sig.input_names]
        if opts.use_operators and node.op in _INFIX:
            a, b = ins
            left_handle = isinstance(a, Ref)
            right_ok = isinstance(b, Ref) and isinstance(a, Const) and literal_kind(a.value) in _SCALAR_KINDS
            folds = is_scalar_value_node(a) and is_scalar_value_node(b)
            if (left_handle or right_ok) and not folds:
                return f"{operand(a)} {_INFIX[node.op]} {operand(b)}", False
        if opts.use_operators and node.op == "neg" and isinstance(ins[0], Ref):
            return f"-{operand(ins[0])}", False
        if node.op == "value":
            return f"g.value({_literal(node.params['v'], opts.hsv_colors)})", True
        if node.op == "position":
            return "g.position()", True
        if node.op == "attribute":
            return f"g.attribute({_literal(node.params['name'], False)}, {_literal(node.params['kind'], False)})", True
        if node.op == "cast":
            x = source_text(ins[0])[0]
            if isinstance(ins[0], Ref):
                return f"ops.cast({x}, {_literal(node.params['target'], False)})", True
            return f"g.out(g.add_node(\"cast\", {{\"target\": {_literal(node.params['target'], False)}}}, {{\"x\": {x}}}))", True
        args = [source_text(s)[0] for s in ins]
        args += [f"{k}={_literal(v, opts.hsv_colors)}" for k, v in node.params.items()]
        if not any(isinstance(s, Ref) for s in ins):
            args.append("g=g")
        return f"ops.{node.op}({', '.join(args)})", True

    pad = " " * opts.indent
    lines = ["def build(g):"]
    for n in graph.nodes:
        if n.id in inlined:
            continue
        lines.append(f"{pad}{names[n.id]} = {render(n)[0]}")
    outs = ", ".join(f"{json.dumps(k)}: {ref_text(r)[0]}" for k, r in graph.outputs.items())
    if graph.meta:
        lines.append(f"{pad}return g.finalize({{{outs}}}, {graph.meta!r})")
    else:
        lines.append(f"{pad}return g.finalize({{{outs}}})")
    return "\n".join(lines) + "\n"


def execute_source(src: str) -> Graph:
    """Run emitted text against a fresh builder (the round-trip harness)."""
    namespace = {
        "ops": ops,
        "Color": Color,
        "Vec2": Vec2,
        "Vec3": Vec3,
        "hsv_literal": hsv_literal,
    }
    exec(compile(src, "<emitted>", "exec"), namespace)
    return namespace["build"](GraphBuilder())


# ---------------------------------------------------------------------------
# isomorphism


def canonical_form(graph: Graph) -> tuple:
    """Kahn order with ties broken by (op, params, canonical input signature)."""
    by_id = {n.id: n for n in graph.nodes}
    pending = {n.id: sum(isinstance(s, Ref) for s in n.inputs.values()) for n in graph.nodes}
    users: dict = {n.id: [] for n in graph.nodes}
    for n in graph.nodes:
        for s in n.inputs.values():
            if isinstance(s, Ref):
                users[s.node].append(n.id)
    canon: dict = {}
    order = []

    def key(n: Node) -> str:
        ins = {}
        for sock, s in sorted(n.inputs.items()):
            ins[sock] = ["ref", canon[s.node], s.output] if isinstance(s, Ref) else ["const", tag(s.value)]
        return json.dumps([n.op, {k: tag(v) for k, v in sorted(n.params.items())}, ins])

    heap = []
    for nid, count in pending.items():
        if count == 0:
            heapq.heappush(heap, (key(by_id[nid]), nid))
    while heap:
        k, nid = heapq.heappop(heap)
        canon[nid] = len(order)
        order.append(k)
        for u in users[nid]:
            pending[u] -= 1
            if pending[u] == 0:
                heapq.heappush(heap, (key(by_id[u]), u))
    outputs = tuple(sorted((name, canon[r.node], r.output) for name, r in graph.outputs.items()))
    return tuple(order), outputs, json.dumps(graph.meta, sort_keys=True)


def graph_isomorphic(a: Graph, b: Graph) -> bool:
    if len(a.nodes) != len(b.nodes):
        return False
    return canonical_form(a) == canonical_form(b)


# ---------------------------------------------------------------------------
# parameter interpolation


def _lerp(x, y, t):
    if t == 0:
        return x
    if t == 1:
        return y
    return x + (y - x) * t


def _blend(x, y, t, where):
    if type(x) is not type(y):
        raise StructureMismatch(f"{where}: {type(x).__name__} vs {type(y).__name__}")
    if isinstance(x, float):
        return _lerp(x, y, t)
    if isinstance(x, (Vec2, Vec3, Color)):
        return type(x)(*(_lerp(p, q, t) for p, q in zip(x, y)))
    if x != y:
        raise StructureMismatch(f"{where}: non-interpolable values differ ({x!r} vs {y!r})")
    return x


def interpolate_params(a: Graph, b: Graph, t: float) -> Graph:
    """Lerp Float/Vec/Color params and constants of two same-structure graphs."""
    if len(a.nodes) != len(b.nodes) or a.outputs != b.outputs:
        raise StructureMismatch("graphs differ in node count or outputs")
    nodes = []
    for na, nb in zip(a.nodes, b.nodes):
        where = f"node {na.id}"
        if na.id != nb.id or na.op != nb.op or set(na.params) != set(nb.params) or set(na.inputs) != set(nb.inputs):
            raise StructureMismatch(f"{where}: structure differs")
        params = {k: _blend(na.params[k], nb.params[k], t, f"{where}.{k}") for k in na.params}
        inputs = {}
        for sock, sa in na.inputs.items():
            sb = nb.inputs[sock]
            if isinstance(sa, Ref) or isinstance(sb, Ref):
                if sa != sb:
                    raise StructureMismatch(f"{where}.{sock}: edges differ")
                inputs[sock] = sa
            else:
                inputs[sock] = Const(_blend(sa.value, sb.value, t, f"{where}.{sock}"))
        nodes.append(Node(na.id, na.op, params, inputs))
    return Graph(tuple(nodes), dict(a.outputs), dict(a.meta))
