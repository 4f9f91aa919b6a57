"""Hypergraph scenarios, behaviors and the free operations acting on them.

A behavior assigns to every context (hyperedge) of a hypergraph an exact
probability table over outcome tuples.  Outcome tuples are stored as tuples of
alphabet *indices* ordered like the context's observables; symbols are only
used for display and serialization.  Tables are sparse: zero entries are
omitted.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    ConsistencyError,
    DimensionError,
    StructuralError,
    UnsupportedStructureError,
)

Rational = Fraction
Outcome = tuple[int, ...]
Table = dict[Outcome, Fraction]


def as_rational(value) -> Fraction:
    """Parse ``value`` (int, Fraction or "p/q" string) into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class Hypergraph:
    """Observables, their outcome alphabets and the contexts over them.

    Contexts are stored as sorted tuples of observable indices.
    """

    observables: tuple[str, ...]
    alphabets: tuple[tuple[str, ...], ...]
    contexts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "observables", tuple(str(o) for o in self.observables))
        object.__setattr__(
            self, "alphabets", tuple(tuple(str(s) for s in a) for a in self.alphabets)
        )
        object.__setattr__(
            self, "contexts", tuple(tuple(sorted(int(v) for v in c)) for c in self.contexts)
        )
        n = len(self.observables)
        if len(set(self.observables)) != n:
            raise StructuralError("observable names must be unique")
        if len(self.alphabets) != n:
            raise StructuralError("one alphabet per observable is required")
        for name, alphabet in zip(self.observables, self.alphabets):
            if len(alphabet) < 2:
                raise StructuralError(f"alphabet of {name!r} needs at least 2 symbols")
            if len(set(alphabet)) != len(alphabet):
                raise StructuralError(f"alphabet of {name!r} repeats a symbol")
        seen = set()
        for ctx in self.contexts:
            if not ctx:
                raise StructuralError("contexts must be non-empty")
            if len(set(ctx)) != len(ctx):
                raise StructuralError(f"context {ctx} repeats an observable")
            if ctx[0] < 0 or ctx[-1] >= n:
                raise StructuralError(f"context {ctx} references an unknown observable")
            if ctx in seen:
                raise StructuralError(f"duplicate context {ctx}")
            seen.add(ctx)
        covered = {v for ctx in self.contexts for v in ctx}
        missing = [self.observables[v] for v in range(n) if v not in covered]
        if missing:
            raise StructuralError(f"observables {missing} belong to no context")

    @property
    def is_graph(self) -> bool:
        return all(len(ctx) == 2 for ctx in self.contexts)

    def index(self, observable: str | int) -> int:
        if isinstance(observable, int):
            if not 0 <= observable < len(self.observables):
                raise StructuralError(f"no observable with index {observable}")
            return observable
        try:
            return self.observables.index(observable)
        except ValueError:
            raise StructuralError(f"unknown observable {observable!r}") from None

    def context_label(self, i: int) -> str:
        return "+".join(self.observables[v] for v in self.contexts[i])

    def context_index(self, context: Sequence[str | int] | str | int) -> int:
        """Locate a context given its index, label or its observables."""
        if isinstance(context, int):
            if not 0 <= context < len(self.contexts):
                raise StructuralError(f"no context with index {context}")
            return context
        if isinstance(context, str):
            for i in range(len(self.contexts)):
                if self.context_label(i) == context:
                    return i
            context = context.split("+")
        key = tuple(sorted(self.index(v) for v in context))
        try:
            return self.contexts.index(key)
        except ValueError:
            raise StructuralError(f"no context over {key}") from None

    def outcomes(self, i: int) -> Iterable[Outcome]:
        """All outcome tuples of context ``i`` in lexicographic order."""
        return itertools.product(*(range(len(self.alphabets[v])) for v in self.contexts[i]))

    def symbols(self, i: int, outcome: Outcome) -> tuple[str, ...]:
        return tuple(self.alphabets[v][a] for v, a in zip(self.contexts[i], outcome))


@dataclass(frozen=True)
class Behavior:
    """Per-context probability tables on a hypergraph.

    ``factorization`` (optional) partitions the observables into parts such
    that the contexts are exactly the cross products of per-part contexts;
    composite behaviors built by :func:`tensor` carry it.
    """

    hypergraph: Hypergraph
    tables: tuple[Table, ...]
    factorization: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        H = self.hypergraph
        if len(self.tables) != len(H.contexts):
            raise StructuralError(
                f"{len(H.contexts)} contexts but {len(self.tables)} tables"
            )
        clean = []
        for i, (ctx, table) in enumerate(zip(H.contexts, self.tables)):
            if table is None:
                raise StructuralError(f"missing table for context {H.context_label(i)}")
            sizes = [len(H.alphabets[v]) for v in ctx]
            entries = {}
            for outcome, p in table.items():
                outcome = tuple(int(a) for a in outcome)
                if len(outcome) != len(ctx) or any(
                    not 0 <= a < s for a, s in zip(outcome, sizes)
                ):
                    raise StructuralError(
                        f"outcome {outcome} invalid for context {H.context_label(i)}"
                    )
                p = as_rational(p)
                if p < 0 or p > 1:
                    raise StructuralError(f"probability {p} outside [0, 1]")
                if p:
                    entries[outcome] = entries.get(outcome, Fraction(0)) + p
            clean.append(dict(sorted(entries.items())))
        object.__setattr__(self, "tables", tuple(clean))
        if self.factorization is not None:
            parts = tuple(tuple(sorted(p)) for p in self.factorization)
            object.__setattr__(self, "factorization", parts if len(parts) > 1 else None)
            if len(parts) > 1:
                _check_factorization(H, parts)

    @property
    def n_contexts(self) -> int:
        return len(self.hypergraph.contexts)

    def table(self, context) -> Table:
        return self.tables[self.hypergraph.context_index(context)]

    def prob(self, context, outcome: Outcome) -> Fraction:
        return self.table(context).get(tuple(outcome), Fraction(0))

    def marginal(self, i: int, observables: Sequence[int]) -> Table:
        """Marginal of context ``i``'s table onto a subset of its observables."""
        return marginal(self.tables[i], self.hypergraph.contexts[i], observables)


def _check_factorization(H: Hypergraph, parts) -> None:
    flat = sorted(v for p in parts for v in p)
    if flat != list(range(len(H.observables))):
        raise StructuralError("factorization must partition the observables")
    projections = [sorted({_project(ctx, p) for ctx in H.contexts}) for p in parts]
    if any(() in proj for proj in projections):
        raise StructuralError("every context must meet every part of the factorization")
    expected = {
        tuple(sorted(v for piece in combo for v in piece))
        for combo in itertools.product(*projections)
    }
    if expected != set(H.contexts):
        raise StructuralError("contexts are not the cross product of per-part contexts")


def _project(ctx: tuple[int, ...], part) -> tuple[int, ...]:
    part = set(part)
    return tuple(v for v in ctx if v in part)


def marginal(table: Mapping[Outcome, Fraction], ctx: Sequence[int], observables) -> Table:
    pos = [list(ctx).index(v) for v in observables]
    out: Table = defaultdict(Fraction)
    for outcome, p in table.items():
        out[tuple(outcome[k] for k in pos)] += p
    return dict(out)


def tables_equal(t1: Mapping[Outcome, Fraction], t2: Mapping[Outcome, Fraction]) -> bool:
    keys = set(t1) | set(t2)
    return all(t1.get(k, 0) == t2.get(k, 0) for k in keys)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    contexts: tuple[int, int]
    shared: tuple[int, ...]
    outcome: Outcome
    left: Fraction
    right: Fraction


@dataclass(frozen=True)
class ValidationReport:
    normalized: tuple[bool, ...]
    consistent: dict[tuple[int, int], bool]
    violations: tuple[Violation, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(self.normalized) and all(self.consistent.values())


def validate_behavior(B: Behavior) -> ValidationReport:
    """Check exact normalization of every table and pairwise marginal agreement.

    Every context pair is reported; for inconsistent pairs the first violating
    marginal entry (in lexicographic order of the shared outcome) is kept.
    """
    H = B.hypergraph
    if len(B.tables) != len(H.contexts):
        raise StructuralError("tables do not cover every context")
    normalized = tuple(sum(t.values(), Fraction(0)) == 1 for t in B.tables)
    consistent = {}
    violations = []
    for i, j in itertools.combinations(range(len(H.contexts)), 2):
        shared = tuple(sorted(set(H.contexts[i]) & set(H.contexts[j])))
        if not shared:
            consistent[(i, j)] = True
            continue
        mi = B.marginal(i, shared)
        mj = B.marginal(j, shared)
        bad = [k for k in sorted(set(mi) | set(mj)) if mi.get(k, 0) != mj.get(k, 0)]
        consistent[(i, j)] = not bad
        if bad:
            k = bad[0]
            violations.append(
                Violation((i, j), shared, k, mi.get(k, Fraction(0)), mj.get(k, Fraction(0)))
            )
    return ValidationReport(normalized, consistent, tuple(violations))


# -- construction helpers ----------------------------------------------------


def _restrict(B: Behavior, keep: Sequence[int]) -> Behavior:
    """Keep only the listed contexts, dropping orphaned observables."""
    H = B.hypergraph
    used = sorted({v for i in keep for v in H.contexts[i]})
    remap = {v: k for k, v in enumerate(used)}
    graph = Hypergraph(
        tuple(H.observables[v] for v in used),
        tuple(H.alphabets[v] for v in used),
        tuple(tuple(remap[v] for v in H.contexts[i]) for i in keep),
    )
    fact = None
    if B.factorization is not None:
        fact = tuple(
            tuple(remap[v] for v in part if v in remap) for part in B.factorization
        )
        fact = tuple(p for p in fact if p)
    return Behavior(graph, tuple(B.tables[i] for i in keep), fact)


def point_behavior(name: str = "w", alphabet: Sequence[str] = ("0", "1"), value: int = 0) -> Behavior:
    """Single observable, single context, fixed output with probability 1."""
    return Behavior(
        Hypergraph((name,), (tuple(alphabet),), ((0,),)), ({(value,): Fraction(1)},)
    )


# -- free operations ---------------------------------------------------------


def tensor(P1: Behavior, P2: Behavior) -> Behavior:
    """Independent composition: contexts are all pairs, entries are products."""
    H1, H2 = P1.hypergraph, P2.hypergraph
    names1, names2 = list(H1.observables), list(H2.observables)
    if set(names1) & set(names2):
        names1 = [f"{n}@1" for n in names1]
        names2 = [f"{n}@2" for n in names2]
    off = len(names1)
    contexts = []
    tables = []
    for c1, t1 in zip(H1.contexts, P1.tables):
        for c2, t2 in zip(H2.contexts, P2.tables):
            contexts.append(c1 + tuple(v + off for v in c2))
            tables.append(
                {a + b: p * q for a, p in t1.items() for b, q in t2.items()}
            )
    parts1 = P1.factorization or (tuple(range(off)),)
    parts2 = P2.factorization or (tuple(range(len(names2))),)
    fact = tuple(parts1) + tuple(tuple(v + off for v in p) for p in parts2)
    graph = Hypergraph(
        tuple(names1 + names2), H1.alphabets + H2.alphabets, tuple(contexts)
    )
    return Behavior(graph, tuple(tables), fact)


def _require_factorization(P: Behavior, part: int) -> tuple[tuple[int, ...], ...]:
    if P.factorization is None:
        raise UnsupportedStructureError("operation needs a factorized (composite) behavior")
    if not 0 <= part < len(P.factorization):
        raise StructuralError(f"no part {part}; behavior has {len(P.factorization)} parts")
    return P.factorization


def part_contexts(P: Behavior, part: int) -> list[tuple[int, ...]]:
    """The distinct contexts of one part (projections of the composite contexts)."""
    parts = _require_factorization(P, part)
    seen: list[tuple[int, ...]] = []
    for ctx in P.hypergraph.contexts:
        proj = _project(ctx, parts[part])
        if proj not in seen:
            seen.append(proj)
    return seen


def partial_measure(P: Behavior, part: int, fixed_input) -> Behavior:
    """Pin the input of one part, keeping its outcomes as extra coordinates.

    ``fixed_input`` names a context of the part, either by observable names or
    indices.  Pinning every part leaves a single-context behavior.
    """
    parts = _require_factorization(P, part)
    H = P.hypergraph
    target = tuple(sorted(H.index(v) for v in fixed_input))
    if target not in part_contexts(P, part):
        raise StructuralError(f"{target} is not a context of part {part}")
    keep = [i for i, ctx in enumerate(H.contexts) if _project(ctx, parts[part]) == target]
    return _restrict(P, keep)


def partial_trace(P: Behavior, part: int) -> Behavior:
    """Sum out one part; the marginal must not depend on that part's input."""
    parts = _require_factorization(P, part)
    H = P.hypergraph
    traced = set(parts[part])
    rest = [v for v in range(len(H.observables)) if v not in traced]
    remap = {v: k for k, v in enumerate(rest)}
    groups: dict[tuple[int, ...], Table] = {}
    order: list[tuple[int, ...]] = []
    for i, ctx in enumerate(H.contexts):
        kept = tuple(v for v in ctx if v not in traced)
        m = P.marginal(i, kept)
        if kept in groups:
            if not tables_equal(groups[kept], m):
                raise ConsistencyError(
                    f"marginal on {kept} depends on the input of part {part}"
                )
        else:
            groups[kept] = m
            order.append(kept)
    graph = Hypergraph(
        tuple(H.observables[v] for v in rest),
        tuple(H.alphabets[v] for v in rest),
        tuple(tuple(remap[v] for v in kept) for kept in order),
    )
    fact = tuple(
        tuple(remap[v] for v in p) for k, p in enumerate(parts) if k != part
    )
    return Behavior(graph, tuple(groups[k] for k in order), fact)


def _single_observable_inputs(P: Behavior, which: str) -> None:
    if any(len(ctx) != 1 for ctx in P.hypergraph.contexts):
        raise DimensionError(f"{which} must have single-observable contexts only")


def wire(P1: Behavior, P2: Behavior) -> Behavior:
    """Simple wiring W(a|y) = sum_b P1(a|b) P2(b|y).

    The outcomes of ``P2`` are interpreted as input labels of ``P1`` (its
    observable names).
    """
    _single_observable_inputs(P1, "P1")
    _single_observable_inputs(P2, "P2")
    H1, H2 = P1.hypergraph, P2.hypergraph
    alphabet = H1.alphabets[0]
    if any(a != alphabet for a in H1.alphabets):
        raise DimensionError("P1 must use one outcome alphabet for all inputs")
    labels = set(H1.observables)
    for y, alph in zip(H2.observables, H2.alphabets):
        if set(alph) != labels:
            raise DimensionError(
                f"outcomes of P2 at {y!r} must be exactly the inputs of P1 {sorted(labels)}"
            )
    col = {H1.observables[ctx[0]]: t for ctx, t in zip(H1.contexts, P1.tables)}
    contexts, tables = [], []
    for k, (ctx, t2) in enumerate(zip(H2.contexts, P2.tables)):
        y = ctx[0]
        out: Table = defaultdict(Fraction)
        for (b,), q in t2.items():
            for a, p in col[H2.alphabets[y][b]].items():
                out[a] += p * q
        contexts.append((k,))
        tables.append(dict(out))
    names = tuple(H2.observables[ctx[0]] for ctx in H2.contexts)
    graph = Hypergraph(names, tuple(alphabet for _ in names), tuple(contexts))
    return Behavior(graph, tuple(tables))


def mix(P1: Behavior, P2: Behavior, lam) -> Behavior:
    """Convex combination ``lam * P1 + (1 - lam) * P2``."""
    lam = as_rational(lam)
    if not 0 <= lam <= 1:
        raise ValueError(f"mixing weight {lam} outside [0, 1]")
    if P1.hypergraph != P2.hypergraph:
        raise StructuralError("mixtures need identical hypergraphs")
    tables = []
    for t1, t2 in zip(P1.tables, P2.tables):
        keys = sorted(set(t1) | set(t2))
        tables.append(
            {k: lam * t1.get(k, 0) + (1 - lam) * t2.get(k, 0) for k in keys}
        )
    fact = P1.factorization if P1.factorization == P2.factorization else None
    return Behavior(P1.hypergraph, tuple(tables), fact)


def remove_observable(P: Behavior, v: str | int) -> Behavior:
    """Delete an observable, marginalizing it out of every context that holds it.

    Contexts that become empty are dropped; contexts that become equal as sets
    are merged, which requires their tables to agree.
    """
    H = P.hypergraph
    v = H.index(v)
    rest = [u for u in range(len(H.observables)) if u != v]
    remap = {u: k for k, u in enumerate(rest)}
    merged: dict[tuple[int, ...], Table] = {}
    order = []
    for i, ctx in enumerate(H.contexts):
        kept = tuple(u for u in ctx if u != v)
        if not kept:
            continue
        t = P.marginal(i, kept) if len(kept) < len(ctx) else P.tables[i]
        if kept in merged:
            if not tables_equal(merged[kept], t):
                raise ConsistencyError(
                    f"contexts merged on {[H.observables[u] for u in kept]} disagree"
                )
        else:
            merged[kept] = t
            order.append(kept)
    if not order:
        raise StructuralError("cannot remove the last observable")
    graph = Hypergraph(
        tuple(H.observables[u] for u in rest),
        tuple(H.alphabets[u] for u in rest),
        tuple(tuple(remap[u] for u in kept) for kept in order),
    )
    return Behavior(graph, tuple(merged[k] for k in order))
