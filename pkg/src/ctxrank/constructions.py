"""Generators for the standard behavior families."""
from __future__ import annotations

import itertools
import string
from fractions import Fraction

from .behavior import Behavior, Hypergraph, as_rational
from .errors import CapExceededError, StructuralError
from .graphs import Graph
from .oracle import NCWitness

MAX_COLORS = 20
BIT = ("0", "1")


def color_permutation(i: int, m: int) -> tuple[int, ...]:
    """Bit flip at position ``i`` (1-based) on ``{0, ..., 2**m - 1}``."""
    if not 1 <= i <= m <= MAX_COLORS:
        raise ValueError(f"need 1 <= i <= m <= {MAX_COLORS}, got i={i}, m={m}")
    step = 1 << (i - 1)
    return tuple(v + (-1) ** ((v // step) % 2) * step for v in range(1 << m))


def _cycle_names(n: int) -> tuple[str, ...]:
    if n <= 26:
        return tuple(string.ascii_uppercase[:n])
    return tuple(f"v{k}" for k in range(n))


def build_cycle_behavior(n: int, corrected: bool | None = None) -> Behavior:
    """Anticorrelations on every edge of an ``n``-cycle.

    With ``corrected`` (the default for even ``n``) the first edge carries a
    perfect correlation instead, which keeps even cycles contextual.
    """
    if n < 3:
        raise ValueError("cycles need at least 3 observables")
    if corrected is None:
        corrected = n % 2 == 0
    half = Fraction(1, 2)
    contexts, tables = [], []
    for k in range(n):
        contexts.append((k, (k + 1) % n))
        if corrected and k == 0:
            tables.append({(0, 0): half, (1, 1): half})
        else:
            tables.append({(0, 1): half, (1, 0): half})
    H = Hypergraph(_cycle_names(n), (BIT,) * n, contexts)
    return Behavior(H, tuple(tables))


def _parity_table(parity: int) -> dict[tuple[int, ...], Fraction]:
    quarter = Fraction(1, 4)
    return {t: quarter for t in itertools.product((0, 1), repeat=3) if sum(t) % 2 == parity}


def pm_hypergraph() -> Hypergraph:
    names = tuple(f"m{r}{c}" for r in range(1, 4) for c in range(1, 4))
    rows = [tuple(3 * r + c for c in range(3)) for r in range(3)]
    cols = [tuple(3 * r + c for r in range(3)) for c in range(3)]
    return Hypergraph(names, (BIT,) * 9, rows + cols)


def build_pm_behavior() -> Behavior:
    """Uniform Peres-Mermin behavior: contexts R1, R2, R3, C1, C2, C3.

    Every context is uniform over its even-parity triples except column C3,
    which is uniform over the odd-parity triples.
    """
    H = pm_hypergraph()
    tables = [_parity_table(0)] * 5 + [_parity_table(1)]
    return Behavior(H, tuple(tables))


def _product_witness(groups, tables) -> NCWitness:
    """Independent product of per-group distributions over disjoint observables."""
    weights = {}
    for combo in itertools.product(*(t.items() for t in tables)):
        full = [0] * 9
        w = Fraction(1)
        for group, (outcome, p) in zip(groups, combo):
            for v, a in zip(group, outcome):
                full[v] = a
            w *= p
        weights[tuple(full)] = w
    return NCWitness(dict(sorted(weights.items())))


def pm_row_column_cover() -> tuple[NCWitness, NCWitness]:
    """The two NC memory states of the uniform PM automaton.

    The first reproduces every row (columns come out as products of uniform
    bits); the second reproduces every column (rows come out uniform).
    """
    H = pm_hypergraph()
    rows, cols = H.contexts[:3], H.contexts[3:]
    first = _product_witness(rows, [_parity_table(0)] * 3)
    second = _product_witness(cols, [_parity_table(0), _parity_table(0), _parity_table(1)])
    return first, second


def build_pr_behavior(alpha) -> Behavior:
    """Isotropic PR box: P(ab|xy) = alpha/2 if a xor b = x*y, else (1-alpha)/2."""
    alpha = as_rational(alpha)
    if not Fraction(1, 2) <= alpha <= 1:
        raise ValueError(f"alpha={alpha} outside [1/2, 1]")
    H = Hypergraph(
        ("A0", "A1", "B0", "B1"),
        (BIT,) * 4,
        [(x, 2 + y) for x in range(2) for y in range(2)],
    )
    tables = []
    for x, y in itertools.product(range(2), repeat=2):
        tables.append(
            {
                (a, b): alpha / 2 if (a ^ b) == x * y else (1 - alpha) / 2
                for a, b in itertools.product(range(2), repeat=2)
            }
        )
    return Behavior(H, tuple(tables), factorization=((0, 1), (2, 3)))


def build_color_behavior(G: Graph) -> Behavior:
    """Edge ``i`` (canonical order, 1-based) gets color ``i``; tables are uniform on the color's graph.

    Each vertex takes values in ``{0, ..., 2**m - 1}`` where ``m`` is the number
    of edges.
    """
    m = len(G.edges)
    if m == 0:
        raise StructuralError("graph has no edges")
    if m > MAX_COLORS:
        raise CapExceededError(f"{m} edges exceed the color cap of {MAX_COLORS}")
    verts = G.vertices
    pos = {v: k for k, v in enumerate(verts)}
    alphabet = tuple(str(v) for v in range(1 << m))
    p = Fraction(1, 1 << m)
    tables = []
    for i, _ in enumerate(G.edges, 1):
        tau = color_permutation(i, m)
        tables.append({(o, tau[o]): p for o in range(1 << m)})
    H = Hypergraph(
        tuple(f"v{v}" for v in verts),
        (alphabet,) * len(verts),
        [(pos[u], pos[v]) for u, v in G.edges],
    )
    return Behavior(H, tuple(tables))
