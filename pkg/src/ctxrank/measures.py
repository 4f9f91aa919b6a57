"""Other contextuality measures, for comparison with the rank.

Contextual fraction and robustness are exact LPs over the weights of the
deterministic assignments.  The uniform relative entropy is a smooth convex
problem over the same simplex and is minimized numerically with an away-step
conditional-gradient method.  The contradiction number is a subset search
over observables.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .behavior import Behavior, remove_observable, validate_behavior
from .errors import ConsistencyError
from .oracle import (
    DEFAULT_MAX_ASSIGNMENTS,
    NCWitness,
    enumerate_deterministic,
    noncontextual,
)
from .simplex import lp_solve


@dataclass(frozen=True)
class MeasureValue:
    kind: str
    value: Any
    witness: Any = None
    gap: float | None = None
    converged: bool = True


def _require_valid(P: Behavior) -> None:
    report = validate_behavior(P)
    if not report.ok:
        raise ConsistencyError("measure needs a normalized, consistent behavior")


def _entries(P: Behavior):
    """Row index for every (context, outcome) of every table, zeros included."""
    H = P.hypergraph
    keys = []
    for i in range(len(H.contexts)):
        for outcome in H.outcomes(i):
            keys.append((i, outcome))
    return keys


def _incidence(P: Behavior, assignments):
    """For each assignment, the row indices it hits (one per context)."""
    H = P.hypergraph
    offsets = []
    off = 0
    for i, ctx in enumerate(H.contexts):
        offsets.append(off)
        off += math.prod(len(H.alphabets[v]) for v in ctx)
    strides = []
    for ctx in H.contexts:
        s, acc = [], 1
        for v in reversed(ctx):
            s.append(acc)
            acc *= len(H.alphabets[v])
        strides.append(list(reversed(s)))
    hits = []
    for a in assignments:
        row = []
        for i, ctx in enumerate(H.contexts):
            row.append(offsets[i] + sum(a[v] * s for v, s in zip(ctx, strides[i])))
        hits.append(row)
    return hits, off


def contextual_fraction(P: Behavior, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> MeasureValue:
    """Smallest weight of a contextual part in ``P = lam P' + (1 - lam) N``.

    Solves ``max sum w`` subject to ``sum_i w_i D_i <= P`` entrywise with
    slack variables; the witness holds the NC part ``N`` (normalized) and its
    weight.
    """
    _require_valid(P)
    assignments = enumerate_deterministic(P.hypergraph, cap)
    hits, n_rows = _incidence(P, assignments)
    keys = _entries(P)
    rhs = [P.tables[i].get(o, Fraction(0)) for i, o in keys]
    n = len(assignments)
    # columns: weights w_i, then one slack per entry
    A = [[0] * (n + n_rows) for _ in range(n_rows)]
    for j, row in enumerate(hits):
        for r in row:
            A[r][j] = 1
    for r in range(n_rows):
        A[r][n + r] = 1
    c = [1] * n + [0] * n_rows
    sol = lp_solve(c, A, rhs, maximize=True)
    mass = sol.value
    cf = 1 - mass
    witness = None
    if mass > 0:
        witness = {
            "nc_weight": mass,
            "nc_model": NCWitness(
                {a: w / mass for a, w in zip(assignments, sol.x[:n]) if w}
            ),
        }
    return MeasureValue("CF", cf, witness)


def robustness(P: Behavior, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> MeasureValue:
    """Smallest ``lam`` such that ``(1 - lam) P + lam N`` is NC for some NC ``N``.

    Variables ``n_i`` (noise, summing to ``lam``) and ``m_j`` (resulting NC
    mixture) satisfy ``P (1 - sum n) + sum n_i D_i = sum m_j D_j``.
    """
    _require_valid(P)
    assignments = enumerate_deterministic(P.hypergraph, cap)
    hits, n_rows = _incidence(P, assignments)
    keys = _entries(P)
    p = [P.tables[i].get(o, Fraction(0)) for i, o in keys]
    n = len(assignments)
    # m_j D_j - n_i (D_i - P) = P
    A = [[Fraction(0)] * (2 * n) for _ in range(n_rows)]
    for j, row in enumerate(hits):
        for r in row:
            A[r][j] = Fraction(1)
    for r in range(n_rows):
        if p[r]:
            for i in range(n):
                A[r][n + i] = p[r]
    for i, row in enumerate(hits):
        for r in row:
            A[r][n + i] -= 1
    c = [0] * n + [1] * n
    sol = lp_solve(c, A, p)
    lam = sol.value
    witness = {
        "mixture": NCWitness({a: w for a, w in zip(assignments, sol.x[:n]) if w}),
    }
    if lam > 0:
        witness["noise"] = NCWitness(
            {a: w / lam for a, w in zip(assignments, sol.x[n:]) if w}
        )
    return MeasureValue("Robustness", lam, witness)


# -- uniform relative entropy ---------------------------------------------------------


def _kl_objective(p, hits, n_ctx):
    """f(w) = (1/|E|) sum_X D(P(.|X) || N_w(.|X)) in bits, and its pieces."""
    support = p > 0
    logp = np.zeros_like(p)
    logp[support] = np.log2(p[support])

    def model(w):
        q = np.zeros_like(p)
        np.add.at(q, hits.ravel(), np.repeat(w, hits.shape[1]))
        return q

    def value(q):
        if np.any(q[support] <= 0):
            return math.inf
        return float(np.sum(p[support] * (logp[support] - np.log2(q[support])))) / n_ctx

    def gradient(q):
        ratio = np.zeros_like(p)
        ratio[support] = p[support] / q[support]
        return -ratio[hits].sum(axis=1) / (n_ctx * math.log(2))

    return model, value, gradient


def _line_search(fun, hi: float, iters: int = 80) -> float:
    """Minimize a convex function of one variable on [0, hi] by golden sections."""
    lo = 0.0
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fun(d)
    best = min((fun(x), x) for x in (lo, (a + b) / 2, hi))
    return best[1]


def relative_entropy_uniform(
    P: Behavior,
    tol: float = 1e-4,
    max_iter: int = 20000,
    cap: int = DEFAULT_MAX_ASSIGNMENTS,
) -> MeasureValue:
    """Uniform relative entropy of contextuality (bits) by away-step Frank-Wolfe.

    Starts from the uniform mixture of all deterministic assignments so the
    objective is finite, and stops once the Frank-Wolfe duality gap is at most
    ``tol``; ``gap`` bounds the suboptimality of the returned value.
    """
    _require_valid(P)
    if tol <= 0:
        raise ValueError("tol must be positive")
    assignments = enumerate_deterministic(P.hypergraph, cap)
    hits_list, n_rows = _incidence(P, assignments)
    hits = np.array(hits_list, dtype=np.int64)
    p = np.zeros(n_rows)
    for r, (i, o) in enumerate(_entries(P)):
        p[r] = float(P.tables[i].get(o, 0))
    model, value, gradient = _kl_objective(p, hits, P.n_contexts)

    n = len(assignments)
    w = np.full(n, 1.0 / n)
    q = model(w)
    f = value(q)
    history = [f]
    gap = math.inf
    for _ in range(max_iter):
        grad = gradient(q)
        s = int(np.argmin(grad))
        active = np.flatnonzero(w > 0)
        v = int(active[np.argmax(grad[active])])
        gap = float(grad @ w - grad[s])
        if gap <= tol:
            break
        away_gap = float(grad[v] - grad @ w)
        if gap >= away_gap:
            direction = -w.copy()
            direction[s] += 1.0
            hi = 1.0
        else:
            direction = w.copy()
            direction[v] -= 1.0
            hi = w[v] / (1.0 - w[v]) if w[v] < 1.0 else 1e12
        d_q = model(direction)
        step = _line_search(lambda t: value(q + t * d_q), hi)
        if step <= 0:
            if gap >= away_gap:
                break
            step = hi  # drop the vertex outright
        w = w + step * direction
        w[w < 1e-15] = 0.0
        w /= w.sum()
        q = model(w)
        f_new = value(q)
        if f_new > f:
            # numerical noise only; keep monotonicity of the reported sequence
            f_new = f
        f = f_new
        history.append(f)
    converged = gap <= tol
    witness = {
        "weights": {assignments[i]: float(w[i]) for i in np.flatnonzero(w > 1e-12)},
        "history": history,
    }
    return MeasureValue("Xu", f, witness, gap=gap, converged=converged)


# -- contradiction number ---------------------------------------------------------------


def contradiction_number(P: Behavior, cap: int = DEFAULT_MAX_ASSIGNMENTS) -> MeasureValue:
    """Fewest observables whose removal leaves an NC behavior.

    Subsets are tried by increasing size in lexicographic order; the witness
    is the first removal set that works, as observable names.
    """
    _require_valid(P)
    H = P.hypergraph
    n = len(H.observables)
    for k in range(n):
        for removed in itertools.combinations(range(n), k):
            Q = P
            for v in sorted(removed, reverse=True):
                Q = remove_observable(Q, v)
            if noncontextual(Q, cap):
                return MeasureValue(
                    "ContradictionNumber", k, tuple(H.observables[v] for v in removed)
                )
    raise AssertionError("a single observable is always non-contextual")
