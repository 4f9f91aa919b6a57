"""Exception hierarchy shared by all ctxrank modules."""


class CtxRankError(Exception):
    """Base class for every error raised by ctxrank."""


class StructuralError(CtxRankError):
    """Malformed hypergraph or behavior (missing tables, bad indices, ...)."""


class ConsistencyError(CtxRankError):
    """An operation needed marginal consistency that the behavior lacks."""


class UnsupportedStructureError(CtxRankError):
    """The behavior lacks structure an operation requires (factorization, graph shape)."""


class DimensionError(CtxRankError):
    """Alphabet or input sizes of two behaviors do not match."""


class CapExceededError(CtxRankError):
    """A resource cap (assignment count, edge count, ...) was exceeded."""


class InfeasibleError(CtxRankError):
    """A requested object does not exist (e.g. a forest partition with too few parts)."""
