"""One Python function per catalog op.

Each function takes the op's input sockets positionally (or by name) and its
params as keywords, adds exactly one node, and returns the output handle(s).
The builder is taken from any handle argument; pass ``g=`` when every input
is a literal.

>>> from procgraph.graph import GraphBuilder
>>> g = GraphBuilder()
>>> p = g.position()
>>> n = perlin_noise(p, frequency=2.0)
>>> n.kind
<ValueKind.Float: 'Float'>
"""

from __future__ import annotations

from collections import namedtuple

from . import catalog
from .graph import GraphBuilder, Out, cast  # noqa: F401  (cast re-exported)
from .color import hsv_literal  # noqa: F401
from .kinds import Color, Vec2, Vec3  # noqa: F401

_RESULT_TYPES = {}


def _builder_from(args, g):
    if g is not None:
        return g
    for a in args:
        if isinstance(a, Out):
            return a.builder
    raise TypeError("no graph handle among the inputs; pass g=<GraphBuilder>")


def _make(sig: catalog.OpSignature):
    names = sig.input_names
    outs = sig.output_names
    if len(outs) > 1:
        result_type = namedtuple(f"{sig.name}_result", outs)
        _RESULT_TYPES[sig.name] = result_type

    def fn(*args, g: GraphBuilder | None = None, **kwargs):
        if len(args) > len(names):
            raise TypeError(f"{sig.name}() takes {len(names)} inputs, got {len(args)}")
        inputs = dict(zip(names, args))
        params = {}
        for key, val in kwargs.items():
            if key in names:
                if key in inputs:
                    raise TypeError(f"{sig.name}(): input {key!r} given twice")
                inputs[key] = val
            else:
                params[key] = val
        builder = _builder_from(inputs.values(), g)
        node = builder.add_node(sig.name, params, inputs)
        handles = [builder.out(node, o) for o in outs]
        if len(handles) == 1:
            return handles[0]
        return result_type(*handles)

    fn.__name__ = sig.name
    fn.__qualname__ = sig.name
    ins = ", ".join(f"{n}: {k}" for n, k in sig.inputs)
    fn.__doc__ = f"{sig.name}({ins}) -> {', '.join(outs)}: {sig.doc}"
    return fn


for _sig in catalog.CATALOG.values():
    if _sig.name != "cast":
        globals()[_sig.name] = _make(_sig)

__all__ = [name for name in catalog.CATALOG] + ["Color", "Vec2", "Vec3", "hsv_literal"]
