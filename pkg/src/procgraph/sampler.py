"""Sampler functions: randomness only through an explicit context.

A sampler is a plain function ``f(ctx, *args)`` decorated with
:func:`sampler`. It draws named parameters from ``ctx`` (``uniform``,
``normal``, ``choice``, ``randint``), selects sub-samplers with
``ctx.choose`` and delegates with ``ctx.call``. Every draw is keyed by its
path-qualified name, so values depend only on ``(seed, name)`` and never on
draw order.

Deterministic generators are wrapped with :func:`deterministic`; any draw made
while one is running raises :class:`PurityViolation`.
"""

from __future__ import annotations

import contextvars
import functools
import hashlib
import inspect
import math
from dataclasses import dataclass, fields, is_dataclass

from .errors import (
    DuplicateParam,
    EmptyWeights,
    InvalidRange,
    NonPositiveWeight,
    PurityViolation,
    UntraceableControlFlow,
)
from .graph import Graph, GraphBuilder, Out
from .rng import RandomStream

_in_deterministic = contextvars.ContextVar("in_deterministic", default=0)


# ---------------------------------------------------------------------------
# parameter specs


@dataclass(frozen=True)
class ParamSpec:
    """Distribution of one named draw.

    ``kind`` is ``"uniform"`` (lo, hi), ``"normal"`` (mu, sigma, optionally
    clipped to lo..hi) or ``"discrete"`` (weights).
    """

    kind: str
    lo: float | None = None
    hi: float | None = None
    mu: float | None = None
    sigma: float | None = None
    weights: tuple = ()

    @property
    def continuous(self) -> bool:
        return self.kind != "discrete"

    @property
    def bounded(self) -> bool:
        return self.kind == "discrete" or (self.lo is not None and self.hi is not None)

    def contains(self, value) -> bool:
        if self.kind == "discrete":
            return isinstance(value, int) and 0 <= value < len(self.weights)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            return False
        if self.lo is not None and value < self.lo:
            return False
        if self.hi is not None and value > self.hi:
            return False
        return True

    def placeholder(self):
        if self.kind == "discrete":
            return 0
        if self.kind == "normal":
            return float(self.mu)
        return 0.5 * (self.lo + self.hi)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for key in ("lo", "hi", "mu", "sigma"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.weights:
            out["weights"] = list(self.weights)
        return out

    @classmethod
    def from_json(cls, doc) -> "ParamSpec":
        doc = dict(doc)
        doc["weights"] = tuple(doc.get("weights", ()))
        return cls(**doc)


def uniform_spec(lo, hi) -> ParamSpec:
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise InvalidRange(f"uniform range [{lo}, {hi}] is invalid")
    return ParamSpec("uniform", lo=lo, hi=hi)


def normal_spec(mu, sigma, lo=None, hi=None) -> ParamSpec:
    if not sigma >= 0:
        raise InvalidRange(f"sigma must be >= 0, got {sigma}")
    return ParamSpec(
        "normal", lo=None if lo is None else float(lo), hi=None if hi is None else float(hi),
        mu=float(mu), sigma=float(sigma),
    )


def discrete_spec(weights) -> ParamSpec:
    weights = tuple(float(w) for w in weights)
    if not weights:
        raise EmptyWeights("discrete choice needs at least one weight")
    if any(not (w > 0) or not math.isfinite(w) for w in weights):
        raise NonPositiveWeight(f"weights must be positive and finite: {weights}")
    return ParamSpec("discrete", weights=weights)


# ---------------------------------------------------------------------------
# sampler functions


class SamplerFn:
    """A registered sampler; call through ``ctx.call`` or :func:`run_sampler`."""

    def __init__(self, fn, id=None, interface=None):
        self.fn = fn
        self.id = id or fn.__name__
        self.interface = interface
        functools.update_wrapper(self, fn)

    def __repr__(self):
        return f"<sampler {self.id}>"

    def __call__(self, ctx, *args):
        return self.fn(ctx, *args)

    def default_args(self, g: GraphBuilder) -> tuple:
        if self.interface in ("material", "mask", "shape"):
            return (g.position(),)
        return ()


SAMPLERS: dict[str, SamplerFn] = {}


def sampler(fn=None, *, id=None, interface=None):
    def wrap(f):
        s = SamplerFn(f, id, interface)
        SAMPLERS[s.id] = s
        return s

    return wrap(fn) if fn is not None else wrap


def deterministic(fn):
    """Mark a generator as deterministic: it may not draw random numbers."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        token = _in_deterministic.set(_in_deterministic.get() + 1)
        try:
            return fn(*args, **kwargs)
        finally:
            _in_deterministic.reset(token)

    wrapper.deterministic = True
    return wrapper


def _check_purity(name):
    if _in_deterministic.get():
        raise PurityViolation(f"draw {name!r} requested inside a deterministic generator")


class TracedIndex(int):
    """Choice result handed out while tracing.

    It can index sequences and take part in arithmetic, but comparing it or
    testing its truth value raises, because branching on it would escape the
    tracer.
    """

    def _refuse(self, *_):
        frame = inspect.currentframe().f_back
        location = f"{frame.f_code.co_filename}:{frame.f_lineno}" if frame else "<unknown>"
        raise UntraceableControlFlow(location)

    __eq__ = __ne__ = __lt__ = __le__ = __gt__ = __ge__ = __bool__ = _refuse
    __hash__ = int.__hash__


# ---------------------------------------------------------------------------
# events and records


@dataclass(frozen=True)
class Draw:
    name: str
    spec: ParamSpec
    value: float


@dataclass(frozen=True)
class Choice:
    name: str
    spec: ParamSpec
    index: int
    branching: bool = False


@dataclass(frozen=True)
class Call:
    op: str
    node: int
    params: dict
    inputs: dict


# ---------------------------------------------------------------------------
# contexts


def structural_key(arg) -> str:
    """Stable structural description of a sampler argument (for memoization)."""
    if isinstance(arg, Out):
        return f"Out[{arg.kind}]"
    if isinstance(arg, (bool, int, float, str)) or arg is None:
        return repr(arg)
    if isinstance(arg, (tuple, list)):
        return "(" + ",".join(structural_key(a) for a in arg) + ")"
    if isinstance(arg, dict):
        return "{" + ",".join(f"{k!r}:{structural_key(v)}" for k, v in sorted(arg.items())) + "}"
    if is_dataclass(arg):
        inner = ",".join(f"{f.name}={structural_key(getattr(arg, f.name))}" for f in fields(arg))
        return f"{type(arg).__name__}({inner})"
    return type(arg).__name__


def args_hash(args) -> str:
    return hashlib.sha1(structural_key(tuple(args)).encode()).hexdigest()[:10]


class SamplerContext:
    """Base context: keyed draws from a root stream, recorded in order.

    Subclasses change where values come from (replay) or how choices are
    explored (distribution tracing).
    """

    trace_mode = False

    def __init__(self, stream: RandomStream, g: GraphBuilder, path=()):
        self.root = stream
        self.g = g
        self.path = tuple(path)
        self.events: list = []
        self._names: set = set()

    # naming

    def qualify(self, name: str) -> str:
        return "/".join(self.path + (name,))

    def _claim(self, name: str) -> str:
        if "/" in name:
            raise DuplicateParam(f"parameter names may not contain '/': {name!r}")
        q = self.qualify(name)
        if q in self._names:
            raise DuplicateParam(f"parameter {q!r} drawn twice in one run")
        self._names.add(q)
        return q

    def _stream_for(self, qname: str) -> RandomStream:
        s = self.root
        for label in qname.split("/"):
            s = s.split(label)
        return s

    def _child(self, label: str) -> "SamplerContext":
        child = object.__new__(type(self))
        child.__dict__.update(self.__dict__)
        child.path = self.path + (label,)
        return child

    # value sources (overridden by replay)

    def _continuous(self, qname, spec: ParamSpec) -> float:
        s = self._stream_for(qname)
        if spec.kind == "uniform":
            return s.uniform(spec.lo, spec.hi)
        x = s.normal(spec.mu, spec.sigma)
        if spec.lo is not None:
            x = max(x, spec.lo)
        if spec.hi is not None:
            x = min(x, spec.hi)
        return x

    def _discrete(self, qname, spec: ParamSpec) -> int:
        return self._stream_for(qname).choice(spec.weights)

    def _wrap_index(self, index: int):
        return TracedIndex(index) if self.trace_mode else index

    # public API for sampler bodies

    def uniform(self, name: str, lo: float, hi: float) -> float:
        _check_purity(name)
        spec = uniform_spec(lo, hi)
        q = self._claim(name)
        value = self._continuous(q, spec)
        self.events.append(Draw(q, spec, value))
        return value

    def normal(self, name: str, mu: float, sigma: float, lo=None, hi=None) -> float:
        _check_purity(name)
        spec = normal_spec(mu, sigma, lo, hi)
        q = self._claim(name)
        value = self._continuous(q, spec)
        self.events.append(Draw(q, spec, value))
        return value

    def choice(self, name: str, weights):
        """Discrete parameter; returns the drawn index (data only, no branching)."""
        _check_purity(name)
        spec = discrete_spec(weights)
        q = self._claim(name)
        index = self._discrete(q, spec)
        self.events.append(Choice(q, spec, index, branching=False))
        return self._wrap_index(index)

    def randint(self, name: str, n: int):
        if n < 1:
            raise InvalidRange(f"randint needs n >= 1, got {n}")
        return self.choice(name, [1.0] * int(n))

    def pick(self, name: str, options, weights=None):
        """Pick one literal from ``options`` (uniform unless weighted)."""
        options = list(options)
        index = self.choice(name, weights or [1.0] * len(options))
        return options[index]

    def choose(self, name: str, weights, options, *args):
        """Branch: draw an index with constant weights, then run that sub-sampler."""
        _check_purity(name)
        spec = discrete_spec(weights)
        if len(options) != len(spec.weights):
            raise InvalidRange(f"choose {name!r}: {len(options)} options for {len(spec.weights)} weights")
        q = self._claim(name)
        index = self._discrete(q, spec)
        self.events.append(Choice(q, spec, index, branching=True))
        option = options[index]
        return self.call(option, *args, label=f"{name}:{option.id}")

    def call(self, f: SamplerFn, *args, label: str | None = None):
        label = label or f.id
        self._claim(label)
        return f(self._child(label), *args)


class RecordingContext(SamplerContext):
    """Instance tracing: also records every node creation and refuses branching
    on choice results."""

    trace_mode = True

    def __init__(self, stream, g, path=()):
        super().__init__(stream, g, path)
        g.hooks.append(self._on_node)

    def _on_node(self, node):
        self.events.append(Call(node.op, node.id, dict(node.params), dict(node.inputs)))


class ReplayContext(RecordingContext):
    """Re-runs a sampler with recorded or overridden values."""

    def __init__(self, stream, g, values: dict):
        super().__init__(stream, g)
        self.values = values

    def _continuous(self, qname, spec):
        if qname in self.values:
            return float(self.values[qname])
        return super()._continuous(qname, spec)

    def _discrete(self, qname, spec):
        if qname in self.values:
            return int(self.values[qname])
        return super()._discrete(qname, spec)


# ---------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class RecordEntry:
    name: str
    spec: ParamSpec
    value: float | int


def result_to_graph(g: GraphBuilder, result) -> Graph:
    if result is None:
        return g.finalize({})
    if hasattr(result, "graph_outputs"):
        meta = result.graph_meta() if hasattr(result, "graph_meta") else {}
        return g.finalize(result.graph_outputs(), meta)
    if isinstance(result, dict):
        return g.finalize(result)
    if isinstance(result, Out):
        return g.finalize({"out": result})
    raise TypeError(f"sampler returned {type(result).__name__}, expected a graph-producing value")


def parameter_record(events) -> list:
    out = []
    for e in events:
        if isinstance(e, Draw):
            out.append(RecordEntry(e.name, e.spec, e.value))
        elif isinstance(e, Choice):
            out.append(RecordEntry(e.name, e.spec, int(e.index)))
    return out


def run_sampler(f: SamplerFn, s: RandomStream, *args):
    """Run ``f`` against stream ``s``; returns ``(graph, parameter record)``."""
    g = GraphBuilder()
    ctx = SamplerContext(s.copy(), g)
    if not args:
        args = f.default_args(g)
    result = f(ctx, *args)
    return result_to_graph(g, result), parameter_record(ctx.events)


def sample(f: SamplerFn, seed: int, *args) -> Graph:
    return run_sampler(f, RandomStream(seed), *args)[0]
