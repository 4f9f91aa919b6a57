"""Exact rational simplex for equality-form linear programs.

Problems have the shape ``A x = b, x >= 0`` with an optional linear
objective.  All arithmetic runs on ``gmpy2.mpq``; results are handed back as
:class:`fractions.Fraction`.  Pivoting follows Bland's smallest-index rule, so
every solve terminates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from gmpy2 import mpq

_ZERO = mpq(0)
_ONE = mpq(1)


def _q(value) -> mpq:
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def _frac(value: mpq) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of a feasibility query.

    Exactly one of ``witness`` and ``certificate`` is set.  For raw LPs the
    witness is the solution vector and the certificate a Farkas vector ``y``
    with ``y^T A >= 0`` and ``y^T b < 0``.
    """

    feasible: bool
    witness: Any = None
    certificate: Any = None


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None
    certificate: tuple[Fraction, ...] | None = None


class _Tableau:
    """Dense tableau with one artificial column per row."""

    def __init__(self, A: Sequence[Sequence], b: Sequence):
        self.m = len(A)
        self.n = len(A[0]) if self.m else 0
        self.sign = []
        self.rows = []
        self.rhs = []
        for i, (row, bi) in enumerate(zip(A, b)):
            bi = _q(bi)
            s = -1 if bi < 0 else 1
            r = [_q(v) * s for v in row]
            art = [_ZERO] * self.m
            art[i] = _ONE
            self.rows.append(r + art)
            self.rhs.append(bi * s)
            self.sign.append(s)
        self.basis = [self.n + i for i in range(self.m)]
        self.active = list(range(self.m))
        self.pivots = 0

    def reduced_costs(self, cost: Sequence[mpq]):
        width = self.n + self.m
        red = list(cost) + [_ZERO] * (width - len(cost))
        obj = _ZERO
        for i in self.active:
            cb = cost[self.basis[i]] if self.basis[i] < len(cost) else _ZERO
            if cb:
                row = self.rows[i]
                for j in range(width):
                    if row[j]:
                        red[j] -= cb * row[j]
                obj += cb * self.rhs[i]
        # basic columns have zero reduced cost by construction
        return red, obj

    def pivot(self, r: int, col: int, red: list, obj: mpq) -> mpq:
        row = self.rows[r]
        piv = row[col]
        if piv != _ONE:
            inv = _ONE / piv
            for j in range(len(row)):
                if row[j]:
                    row[j] *= inv
            self.rhs[r] *= inv
        nz = [j for j in range(len(row)) if row[j]]
        for i in self.active:
            if i == r:
                continue
            f = self.rows[i][col]
            if f:
                other = self.rows[i]
                for j in nz:
                    other[j] -= f * row[j]
                self.rhs[i] -= f * self.rhs[r]
        f = red[col]
        if f:
            for j in nz:
                red[j] -= f * row[j]
            obj += f * self.rhs[r]
        self.basis[r] = col
        self.pivots += 1
        return obj

    def run(self, red: list, obj: mpq, allowed: int) -> tuple[str, mpq]:
        """Minimize with Bland's rule over columns ``< allowed``."""
        while True:
            col = next((j for j in range(allowed) if red[j] < 0), None)
            if col is None:
                return "optimal", obj
            best = None
            for i in self.active:
                a = self.rows[i][col]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded", obj
            obj = self.pivot(best[1], col, red, obj)

    def solution(self) -> list[mpq]:
        x = [_ZERO] * self.n
        for i in self.active:
            if self.basis[i] < self.n:
                x[self.basis[i]] = self.rhs[i]
        return x

    def phase_one(self) -> tuple[bool, list[mpq] | None]:
        """Minimize the artificial sum; on failure return a Farkas vector."""
        cost = [_ZERO] * self.n + [_ONE] * self.m
        red, obj = self.reduced_costs(cost)
        _, obj = self.run(red, obj, self.n + self.m)
        if obj > 0:
            # y = c_B B^-1 = 1 - reduced cost of the artificial columns
            y = [_ONE - red[self.n + i] for i in range(self.m)]
            return False, [-yi * s for yi, s in zip(y, self.sign)]
        return True, None

    def drive_out_artificials(self) -> None:
        for i in list(self.active):
            if self.basis[i] >= self.n:
                col = next((j for j in range(self.n) if self.rows[i][j]), None)
                if col is None:
                    self.active.remove(i)  # redundant row
                else:
                    dummy = [_ZERO] * (self.n + self.m)
                    self.pivot(i, col, dummy, _ZERO)


def _check_certificate(A, b, y) -> bool:
    if all(v == 0 for v in y):
        return False
    yb = sum((yi * _q(bi) for yi, bi in zip(y, b)), _ZERO)
    if yb >= 0:
        return False
    n = len(A[0]) if A else 0
    for j in range(n):
        if sum((yi * _q(A[i][j]) for i, yi in enumerate(y) if A[i][j]), _ZERO) < 0:
            return False
    return True


def lp_feasible(A: Sequence[Sequence], b: Sequence) -> FeasibilityResult:
    """Decide whether ``A x = b`` has a solution with ``x >= 0``.

    Returns a basic feasible solution, or a Farkas certificate ``y`` with
    ``y^T A >= 0`` and ``y^T b < 0``.
    """
    if not A:
        return FeasibilityResult(True, witness=())
    T = _Tableau(A, b)
    ok, y = T.phase_one()
    if ok:
        return FeasibilityResult(True, witness=tuple(_frac(v) for v in T.solution()))
    assert _check_certificate(A, b, y), "phase one produced an invalid certificate"
    return FeasibilityResult(False, certificate=tuple(_frac(v) for v in y))


def lp_solve(c: Sequence, A: Sequence[Sequence], b: Sequence, maximize: bool = False) -> LPSolution:
    """Optimize ``c^T x`` subject to ``A x = b, x >= 0`` exactly (two-phase simplex)."""
    T = _Tableau(A, b)
    ok, y = T.phase_one()
    if not ok:
        return LPSolution("infeasible", certificate=tuple(_frac(v) for v in y))
    T.drive_out_artificials()
    sign = -1 if maximize else 1
    cost = [_q(v) * sign for v in c]
    red, obj = T.reduced_costs(cost)
    status, _ = T.run(red, obj, T.n)
    if status == "unbounded":
        return LPSolution("unbounded")
    x = T.solution()
    value = sum((_q(ci) * xi for ci, xi in zip(c, x)), _ZERO)
    return LPSolution("optimal", tuple(_frac(v) for v in x), _frac(value))

