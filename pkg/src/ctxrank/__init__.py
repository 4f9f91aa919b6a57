"""Exact rank of contextuality for measurement behaviors on hypergraphs."""
from .automaton import (
    Automaton,
    StreamReport,
    build_automaton,
    emissions_match_target,
    simulate_stream,
    step,
)
from .behavior import (
    Behavior,
    Hypergraph,
    ValidationReport,
    mix,
    partial_measure,
    partial_trace,
    point_behavior,
    remove_observable,
    tensor,
    validate_behavior,
    wire,
)
from .constructions import (
    build_color_behavior,
    build_cycle_behavior,
    build_pm_behavior,
    build_pr_behavior,
    color_permutation,
    pm_row_column_cover,
)
from .errors import (
    CapExceededError,
    ConsistencyError,
    CtxRankError,
    DimensionError,
    InfeasibleError,
    StructuralError,
    UnsupportedStructureError,
)
from .graphs import Graph, arboricity, forest_decomposition, nash_williams_bound
from .measures import (
    MeasureValue,
    contextual_fraction,
    contradiction_number,
    relative_entropy_uniform,
    robustness,
)
from .oracle import NCWitness, is_extendable, is_noncontextual, support_extendable
from .rank import RankResult, cover_is_valid, log_rank, rank_of_contextuality

__all__ = [name for name in dir() if not name.startswith("_")]
