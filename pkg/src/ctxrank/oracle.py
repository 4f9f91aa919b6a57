"""Exact non-contextuality and extendability oracles.

A behavior restricted to a set of contexts is *extendable* when some mixture
of global deterministic assignments reproduces its tables on that set.  The
general route solves that as an exact LP whose variables are the weights of
the assignments; assignments that would put mass on a zero-probability entry
are pruned before the LP is built.  Graph scenarios whose tables are
supported on permutations admit a much cheaper exact test that propagates
values along spanning trees (``support_extendable``).

Context sets are passed around as integer bitmasks over the behavior's
context list.
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .behavior import Behavior, Hypergraph, Outcome, Table, tables_equal
from .errors import CapExceededError, StructuralError, UnsupportedStructureError
from .simplex import FeasibilityResult, lp_feasible

DEFAULT_MAX_ASSIGNMENTS = 2**24

Assignment = tuple[int, ...]


# -- masks -------------------------------------------------------------------


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def mask_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# -- deterministic assignments -----------------------------------------------


def _check_cap(sizes: Sequence[int], cap: int) -> None:
    total = math.prod(sizes)
    if total > cap:
        raise CapExceededError(
            f"{total} deterministic assignments ({' x '.join(map(str, sizes))}) exceed the cap of {cap}"
        )


def enumerate_deterministic(H: Hypergraph, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> list[Assignment]:
    """All global value assignments of ``H`` in lexicographic order."""
    sizes = [len(a) for a in H.alphabets]
    _check_cap(sizes, cap)
    return list(itertools.product(*(range(s) for s in sizes)))


def project(assignment: Assignment, ctx: Sequence[int]) -> Outcome:
    return tuple(assignment[v] for v in ctx)


@dataclass(frozen=True)
class NCWitness:
    """Convex weights over global deterministic assignments."""

    weights: dict[Assignment, Fraction]

    def table(self, ctx: Sequence[int]) -> Table:
        out: Table = defaultdict(Fraction)
        for a, w in self.weights.items():
            out[project(a, ctx)] += w
        return dict(sorted(out.items()))

    def behavior(self, H: Hypergraph) -> Behavior:
        return Behavior(H, tuple(self.table(ctx) for ctx in H.contexts))

    def agreement(self, P: Behavior) -> int:
        """Mask of the contexts on which this model reproduces ``P`` exactly."""
        m = 0
        for i, ctx in enumerate(P.hypergraph.contexts):
            if tables_equal(self.table(ctx), P.tables[i]):
                m |= 1 << i
        return m

    def is_valid(self) -> bool:
        return all(w >= 0 for w in self.weights.values()) and sum(self.weights.values()) == 1


@dataclass(frozen=True)
class Certificate:
    """Linear functional separating a behavior from the NC models on a mask.

    ``f(Q) = sum over contexts X in mask, outcomes A of c(X, A) Q(A|X)`` where
    ``c`` is read from ``coefficients`` and defaults to ``default`` for the
    entries not listed.  Every deterministic assignment scores ``>= 0`` and
    the certified behavior scores ``< 0``.
    """

    mask: int
    coefficients: dict[tuple[int, Outcome], Fraction]
    default: Fraction

    def coefficient(self, ctx: int, outcome: Outcome) -> Fraction:
        return self.coefficients.get((ctx, outcome), self.default)

    def evaluate(self, P: Behavior) -> Fraction:
        total = Fraction(0)
        for i in mask_indices(self.mask):
            for outcome, p in P.tables[i].items():
                total += self.coefficient(i, outcome) * p
        return total

    def score(self, H: Hypergraph, assignment: Assignment) -> Fraction:
        return sum(
            (self.coefficient(i, project(assignment, H.contexts[i])) for i in mask_indices(self.mask)),
            Fraction(0),
        )


def _support_assignments(P: Behavior, ctx_ids: Sequence[int], cap: int):
    """Assignments to the covered observables putting mass only on positive entries."""
    H = P.hypergraph
    covered = sorted({v for i in ctx_ids for v in H.contexts[i]})
    sizes = [len(H.alphabets[v]) for v in covered]
    _check_cap(sizes, cap)
    pos = {v: k for k, v in enumerate(covered)}
    checks: dict[int, list] = defaultdict(list)
    for i in ctx_ids:
        ctx = H.contexts[i]
        checks[pos[ctx[-1]]].append(([pos[v] for v in ctx], P.tables[i]))
    found: list[Assignment] = []
    cur = [0] * len(covered)

    def extend(k: int) -> None:
        if k == len(covered):
            found.append(tuple(cur))
            return
        for a in range(sizes[k]):
            cur[k] = a
            if all(tuple(cur[p] for p in ps) in t for ps, t in checks[k]):
                extend(k + 1)

    extend(0)
    return covered, found


def is_extendable(P: Behavior, S: int, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> FeasibilityResult:
    """Decide whether one NC model reproduces ``P`` on every context of mask ``S``.

    On success the witness is an :class:`NCWitness` over global assignments
    (observables outside ``S`` are fixed to their first symbol); otherwise the
    certificate is a :class:`Certificate`.
    """
    H = P.hypergraph
    ctx_ids = mask_indices(S)
    if not ctx_ids or ctx_ids[-1] >= len(H.contexts):
        raise StructuralError(f"mask {S:#b} is not a non-empty subset of the contexts")
    covered, columns = _support_assignments(P, ctx_ids, cap)

    rows: dict[tuple[int, Outcome], int] = {}
    rhs: list[Fraction] = []
    for k, i in enumerate(ctx_ids):
        entries = list(P.tables[i].items())
        if k > 0:
            # rows of each context sum to the total weight, fixed by the first context
            entries = entries[:-1]
        for outcome, p in entries:
            rows[(i, outcome)] = len(rhs)
            rhs.append(p)
    pos = {v: k for k, v in enumerate(covered)}
    A = [[0] * len(columns) for _ in rhs]
    for j, col in enumerate(columns):
        for i in ctx_ids:
            r = rows.get((i, tuple(col[pos[v]] for v in H.contexts[i])))
            if r is not None:
                A[r][j] = 1

    if columns:
        res = lp_feasible(A, rhs)
    else:
        first = len(P.tables[ctx_ids[0]])
        res = FeasibilityResult(False, certificate=(Fraction(-1),) * first + (Fraction(0),) * (len(rhs) - first))

    if res.feasible:
        weights = {}
        for col, w in zip(columns, res.witness):
            if w:
                full = [0] * len(H.observables)
                for v, a in zip(covered, col):
                    full[v] = a
                weights[tuple(full)] = w
        witness = NCWitness(dict(sorted(weights.items())))
        assert witness.is_valid() and (witness.agreement(P) & S) == S
        return FeasibilityResult(True, witness=witness)

    y = res.certificate
    coefficients = {key: y[r] for key, r in rows.items()}
    for i in ctx_ids:
        for outcome in P.tables[i]:
            coefficients.setdefault((i, outcome), Fraction(0))
    # zero-probability entries get a penalty large enough to dominate any deficit
    penalty = sum(
        (max((max(Fraction(0), -coefficients[(i, o)]) for o in P.tables[i]), default=Fraction(0)) for i in ctx_ids),
        Fraction(0),
    )
    return FeasibilityResult(False, certificate=Certificate(S, coefficients, penalty))


def is_noncontextual(P: Behavior, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> FeasibilityResult:
    return is_extendable(P, full_mask(P.n_contexts), cap)


# -- permutation-supported graph scenarios -------------------------------------


def _edge_permutation(P: Behavior, i: int) -> dict[int, int]:
    table = P.tables[i]
    fwd: dict[int, int] = {}
    back: dict[int, int] = {}
    for a, b in table:
        if a in fwd or b in back:
            raise UnsupportedStructureError(
                f"context {P.hypergraph.context_label(i)} is not supported on a permutation"
            )
        fwd[a] = b
        back[b] = a
    return fwd


def is_permutation_supported(P: Behavior) -> bool:
    if not P.hypergraph.is_graph:
        return False
    try:
        for i in range(P.n_contexts):
            _edge_permutation(P, i)
    except UnsupportedStructureError:
        return False
    return True


def _propagate(P: Behavior, S: int):
    """Spanning-tree propagation of root values over the edges in ``S``.

    Returns ``(ok, components)`` where each component is a tuple
    ``(vertices, values, weights)``: ``values[v][k]`` is the value of ``v`` in
    the k-th root-indexed assignment and ``weights[k]`` its probability.
    """
    H = P.hypergraph
    if any(len(H.contexts[i]) != 2 for i in mask_indices(S)):
        raise UnsupportedStructureError("support oracle needs every context to hold two observables")
    adj: dict[int, list[tuple[int, dict[int, int]]]] = defaultdict(list)
    first_edge: dict[int, int] = {}
    for i in mask_indices(S):
        u, v = H.contexts[i]
        fwd = _edge_permutation(P, i)
        adj[u].append((v, fwd))
        adj[v].append((u, {b: a for a, b in fwd.items()}))
        first_edge.setdefault(u, i)
        first_edge.setdefault(v, i)
    values: dict[int, list[int]] = {}
    components = []
    ok = True
    for root in sorted(adj):
        if root in values:
            continue
        i = first_edge[root]
        m = P.marginal(i, (root,))
        support = sorted(k[0] for k in m)
        weights = [m[(r,)] for r in support]
        values[root] = support
        order = [root]
        stack = [root]
        while stack:
            u = stack.pop()
            for v, perm in adj[u]:
                if any(x not in perm for x in values[u]):
                    ok = False
                    continue
                image = [perm[x] for x in values[u]]
                if v in values:
                    if values[v] != image:
                        ok = False
                else:
                    values[v] = image
                    order.append(v)
                    stack.append(v)
        components.append((sorted(order), values, weights))
    return ok, components


def support_extendable(P: Behavior, S: int) -> bool:
    """Exact extendability test for permutation-supported graph scenarios.

    Each connected component of the edge set ``S`` is rooted; the value of
    every vertex becomes a function of the root value along a spanning tree,
    and every other edge must map the propagated values onto each other for
    all root values in the support.  For distinct bit-flip colors this holds
    exactly when ``S`` is acyclic.
    """
    ok, _ = _propagate(P, S)
    return ok


def _couple(parts: list[list[tuple[dict[int, int], Fraction]]]) -> list[tuple[dict[int, int], Fraction]]:
    """Comonotone coupling of independent distributions over partial assignments."""
    idx = [0] * len(parts)
    rem = [p[0][1] for p in parts]
    out = []
    while True:
        w = min(rem)
        merged: dict[int, int] = {}
        for p, k in zip(parts, idx):
            merged.update(p[k][0])
        out.append((merged, w))
        done = True
        for j, p in enumerate(parts):
            rem[j] -= w
            if rem[j] == 0:
                idx[j] += 1
                if idx[j] < len(p):
                    rem[j] = p[idx[j]][1]
                    done = False
            else:
                done = False
        if done:
            return out


def support_witness(P: Behavior, S: int) -> NCWitness:
    """NC model for an extendable edge set of a permutation-supported behavior."""
    ok, components = _propagate(P, S)
    if not ok:
        raise StructuralError("edge set is not extendable")
    parts = []
    for vertices, values, weights in components:
        parts.append(
            [({v: values[v][k] for v in vertices}, w) for k, w in enumerate(weights)]
        )
    n = len(P.hypergraph.observables)
    weights: dict[Assignment, Fraction] = defaultdict(Fraction)
    for partial, w in _couple(parts):
        full = [0] * n
        for v, a in partial.items():
            full[v] = a
        weights[tuple(full)] += w
    witness = NCWitness(dict(sorted(weights.items())))
    assert witness.is_valid() and (witness.agreement(P) & S) == S
    return witness


# -- dispatching decision --------------------------------------------------------


def _components(H: Hypergraph, ctx_ids: Sequence[int]) -> list[list[int]]:
    parent = {i: i for i in ctx_ids}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[int, int] = {}
    for i in ctx_ids:
        for v in H.contexts[i]:
            if v in owner:
                parent[find(i)] = find(owner[v])
            else:
                owner[v] = i
    groups: dict[int, list[int]] = defaultdict(list)
    for i in ctx_ids:
        groups[find(i)].append(i)
    return sorted(groups.values())


def noncontextual(P: Behavior, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> bool:
    """Fast NC decision for a consistent behavior.

    Contexts contained in other contexts are implied by consistency and are
    dropped; independent components are decided separately, each with the
    support oracle when it applies and the LP otherwise.
    """
    H = P.hypergraph
    sets = [set(c) for c in H.contexts]
    keep = [
        i for i in range(len(sets))
        if not any(j != i and sets[i] < sets[j] for j in range(len(sets)))
    ]
    for comp in _components(H, keep):
        if len(comp) == 1:
            continue
        mask = mask_of(comp)
        if all(len(H.contexts[i]) == 2 for i in comp) and _permutation_supported_on(P, comp):
            if not support_extendable(P, mask):
                return False
        elif not is_extendable(P, mask, cap).feasible:
            return False
    return True


def _permutation_supported_on(P: Behavior, ctx_ids: Sequence[int]) -> bool:
    try:
        for i in ctx_ids:
            _edge_permutation(P, i)
    except UnsupportedStructureError:
        return False
    return True
