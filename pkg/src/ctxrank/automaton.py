"""Finite automaton that answers context queries using NC memory states.

Each memory state is an NC model.  Querying a context moves to a state whose
table at that context equals the target's (staying put when the current state
already matches), then emits one outcome sampled from the new state's table.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import stats

from .behavior import Behavior, Outcome, Table, tables_equal
from .errors import StructuralError
from .oracle import NCWitness
from .rank import RankResult

INITIAL = "q0"
FINAL = "F"
END = "omega"


@dataclass(frozen=True)
class Automaton:
    """Memory states ``0..n-1`` plus the artificial ``INITIAL`` and ``FINAL``."""

    target: Behavior
    states: tuple[NCWitness, ...]
    state_tables: tuple[tuple[Table, ...], ...]
    matches: tuple[frozenset[int], ...]
    transition: dict

    @property
    def memory_states(self) -> int:
        return len(self.states)

    @property
    def memory_bits(self) -> float:
        return float(np.log2(len(self.states)))

    @property
    def alphabet(self) -> tuple:
        return tuple(range(self.target.n_contexts)) + (END,)

    def next_state(self, state, context):
        try:
            return self.transition[(state, context)]
        except KeyError:
            raise StructuralError(f"no transition for state {state!r} on {context!r}") from None


def build_automaton(target: Behavior, cover: RankResult | Sequence[NCWitness]) -> Automaton:
    """Automaton whose memory states are the NC models of a cover of ``target``.

    A state "contains" a context when its table there equals the target's.
    Jumps go to the first (lowest-index) state containing the queried context.
    """
    witnesses = (
        tuple(w for _, w in cover.cover) if isinstance(cover, RankResult) else tuple(cover)
    )
    H = target.hypergraph
    tables = tuple(tuple(w.table(ctx) for ctx in H.contexts) for w in witnesses)
    matches = tuple(
        frozenset(i for i in range(len(H.contexts)) if tables_equal(t[i], target.tables[i]))
        for t in tables
    )
    transition: dict = {}
    for i in range(len(H.contexts)):
        owners = [k for k, m in enumerate(matches) if i in m]
        if not owners:
            raise StructuralError(f"no memory state reproduces context {H.context_label(i)}")
        transition[(INITIAL, i)] = owners[0]
        for k, m in enumerate(matches):
            transition[(k, i)] = k if i in m else owners[0]
    for k in range(len(witnesses)):
        transition[(k, END)] = FINAL
    transition[(INITIAL, END)] = FINAL
    return Automaton(target, witnesses, tables, matches, transition)


def emission_table(A: Automaton, state, context: int) -> Table:
    """Table the automaton samples from after reading ``context`` in ``state``."""
    nxt = A.next_state(state, context)
    return A.state_tables[nxt][context]


def emissions_match_target(A: Automaton) -> bool:
    """Symbolic check: every (state, context) emits exactly the target's table."""
    for state in (INITIAL,) + tuple(range(A.memory_states)):
        for i in range(A.target.n_contexts):
            if not tables_equal(emission_table(A, state, i), A.target.tables[i]):
                return False
    return True


def _sample(table: Table, u: float) -> Outcome:
    """Inverse-CDF draw over the outcomes in lexicographic order."""
    acc = Fraction(0)
    items = sorted(table.items())
    for outcome, p in items:
        acc += p
        if u < acc:
            return outcome
    return items[-1][0]


def step(A: Automaton, state, context, rng: np.random.Generator):
    """One transition followed by one emission; ``END`` leads to ``FINAL`` silently."""
    if context == END:
        return A.next_state(state, END), None
    if not isinstance(context, int):
        context = A.target.hypergraph.context_index(context)
    nxt = A.next_state(state, context)
    return nxt, _sample(A.state_tables[nxt][context], rng.random())


@dataclass(frozen=True)
class StreamReport:
    queries: dict[int, int]
    counts: dict[int, dict[Outcome, int]]
    chi2: dict[int, float]
    p_values: dict[int, float]
    states: tuple


def simulate_stream(A: Automaton, queries: Sequence, seed: int) -> tuple[list[Outcome], StreamReport]:
    """Run a query sequence from the initial state; deterministic given ``seed``.

    A trailing ``END`` moves to the final state and emits ``None``.
    """
    if not queries:
        raise ValueError("queries must be non-empty")
    rng = np.random.default_rng(seed)
    state = INITIAL
    outputs: list[Outcome] = []
    visited = []
    counts: dict[int, dict[Outcome, int]] = {}
    for pos, q in enumerate(queries):
        if q == END:
            if pos != len(queries) - 1:
                raise StructuralError("queries continue after the end symbol")
            state, _ = step(A, state, END, rng)
            visited.append(state)
            outputs.append(None)
            break
        ctx = q if isinstance(q, int) else A.target.hypergraph.context_index(q)
        state, outcome = step(A, state, ctx, rng)
        visited.append(state)
        outputs.append(outcome)
        bucket = counts.setdefault(ctx, {})
        bucket[outcome] = bucket.get(outcome, 0) + 1
    chi2, pvals, sizes = {}, {}, {}
    for ctx, bucket in sorted(counts.items()):
        n = sum(bucket.values())
        sizes[ctx] = n
        table = A.target.tables[ctx]
        if any(o not in table for o in bucket):
            chi2[ctx], pvals[ctx] = float("inf"), 0.0
            continue
        keys = sorted(table)
        if len(keys) == 1:
            chi2[ctx], pvals[ctx] = 0.0, 1.0
            continue
        observed = np.array([bucket.get(k, 0) for k in keys], dtype=float)
        expected = np.array([float(table[k]) * n for k in keys])
        res = stats.chisquare(observed, expected)
        chi2[ctx], pvals[ctx] = float(res.statistic), float(res.pvalue)
    report = StreamReport(sizes, counts, chi2, pvals, tuple(visited))
    return outputs, report
