"""Exception types raised across procgraph."""


class ProcGraphError(Exception):
    """Base class for every error raised by this package."""


# graph construction


class UnknownOp(ProcGraphError):
    pass


class MissingInput(ProcGraphError):
    def __init__(self, socket):
        super().__init__(f"missing input socket {socket!r}")
        self.socket = socket


class KindMismatch(ProcGraphError):
    def __init__(self, socket, expected, got):
        super().__init__(f"socket {socket!r}: expected {expected}, got {got}")
        self.socket = socket
        self.expected = expected
        self.got = got


class AmbiguousKind(ProcGraphError):
    def __init__(self, op, kinds):
        names = ", ".join(str(k) for k in kinds)
        super().__init__(f"{op}: cannot infer result kind from ({names}); use an explicit cast")
        self.op = op
        self.kinds = tuple(kinds)


class CycleDetected(ProcGraphError):
    pass


class UnsupportedCast(ProcGraphError):
    pass


class InvalidParam(ProcGraphError):
    pass


class InvalidMortar(InvalidParam):
    pass


# evaluation


class EvalDomainError(ProcGraphError):
    def __init__(self, node, message=""):
        super().__init__(f"node {node}: {message}" if message else f"node {node}")
        self.node = node


class DegenerateRange(EvalDomainError):
    def __init__(self, node=None):
        super().__init__(node, "map_range with from_hi == from_lo")


class MissingAuxField(ProcGraphError):
    def __init__(self, name):
        super().__init__(f"sample batch has no auxiliary field {name!r}")
        self.name = name


# mesh


class DegenerateFace(ProcGraphError):
    def __init__(self, face):
        super().__init__(f"face {face} has zero area")
        self.face = face


# randomness and sampling


class InvalidRange(ProcGraphError):
    pass


class EmptyWeights(ProcGraphError):
    pass


class NonPositiveWeight(ProcGraphError):
    pass


class PurityViolation(ProcGraphError):
    """A deterministic generator attempted to draw random numbers."""


class DuplicateParam(ProcGraphError):
    pass


# tracing and analysis


class UntraceableControlFlow(ProcGraphError):
    def __init__(self, location):
        super().__init__(f"control flow depends on a random choice outside choose(): {location}")
        self.location = location


class PathExplosion(ProcGraphError):
    def __init__(self, bound, count=None):
        super().__init__(f"sampler has {count} control paths, above the bound {bound}")
        self.bound = bound
        self.count = count


class UnknownParam(ProcGraphError):
    pass


class OutOfRange(ProcGraphError):
    pass


class UnboundedParam(ProcGraphError):
    def __init__(self, name):
        super().__init__(f"continuous parameter {name!r} has no bounded range")
        self.name = name


class EvenWindow(ProcGraphError):
    pass


# composition


class StructureMismatch(ProcGraphError):
    pass


class InterfaceMismatch(ProcGraphError):
    pass


class OutOfRangeParam(ProcGraphError):
    pass


# scene


class OverlappingWindows(ProcGraphError):
    pass


class WindowOutOfBounds(ProcGraphError):
    pass


class NoFeasiblePlacement(ProcGraphError):
    pass


class NoPathFound(ProcGraphError):
    def __init__(self, max_iters):
        super().__init__(f"no path found within {max_iters} iterations")
        self.max_iters = max_iters


class PlacementExhausted(ProcGraphError):
    pass


# io


class MalformedFile(ProcGraphError):
    def __init__(self, message, offset=None):
        super().__init__(f"{message} (at byte {offset})" if offset is not None else message)
        self.offset = offset
