"""Rank of contextuality: the fewest NC models that jointly reproduce every context.

The search has two stages.  First all inclusion-maximal extendable context
sets are enumerated level by level (extendability is closed under taking
subsets, so only sets whose every one-smaller subset is extendable are
queried).  Then covers of the context list by ``k`` maximal sets are tried
for ``k = 1, 2, ...``; the first ``k`` that admits a cover is the rank.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .behavior import Behavior
from .errors import StructuralError
from .oracle import (
    DEFAULT_MAX_ASSIGNMENTS,
    NCWitness,
    full_mask,
    is_extendable,
    is_permutation_supported,
    mask_indices,
    support_extendable,
    support_witness,
)

MAX_CONTEXTS = 63


@dataclass(frozen=True)
class RankResult:
    rc: int
    cover: tuple[tuple[int, NCWitness], ...]
    maximal_sets: tuple[int, ...] = ()
    # number of k-subsets of maximal sets examined for each k that was tried
    search_record: tuple[tuple[int, int], ...] = field(default=())

    @property
    def rc2(self) -> float:
        return math.log2(self.rc)


class _Oracle:
    """Memoized extendability queries, by LP or by support propagation."""

    def __init__(self, P: Behavior, method: str, cap: int):
        if method == "auto":
            method = "support" if is_permutation_supported(P) else "lp"
        if method not in ("lp", "support"):
            raise ValueError(f"unknown oracle method {method!r}")
        self.P, self.method, self.cap = P, method, cap
        self.closures: list[int] = []
        self.calls = 0

    def known_feasible(self, mask: int) -> bool:
        return any(mask & c == mask for c in self.closures)

    def query(self, mask: int) -> tuple[bool, int]:
        """Feasibility of ``mask`` plus the mask on which the found model agrees."""
        self.calls += 1
        if self.method == "support":
            ok = support_extendable(self.P, mask)
            return ok, mask
        res = is_extendable(self.P, mask, self.cap)
        return res.feasible, res.witness.agreement(self.P) if res.feasible else 0

    def witness(self, mask: int) -> NCWitness:
        if self.method == "support":
            return support_witness(self.P, mask)
        return is_extendable(self.P, mask, self.cap).witness


def _check_size(P: Behavior) -> None:
    if P.n_contexts > MAX_CONTEXTS:
        raise StructuralError(f"{P.n_contexts} contexts exceed the mask limit of {MAX_CONTEXTS}")


def maximal_extendable_sets(
    P: Behavior,
    method: str = "auto",
    cap: int = DEFAULT_MAX_ASSIGNMENTS,
    threads: int = 1,
) -> list[int]:
    """All inclusion-maximal extendable context masks, in increasing numeric order."""
    _check_size(P)
    return _maximal_sets(_Oracle(P, method, cap), P.n_contexts, threads)


def _maximal_sets(oracle: _Oracle, n: int, threads: int) -> list[int]:
    full = full_mask(n)
    ok, agree = oracle.query(full)
    if ok:
        return [full]
    level = {1 << i for i in range(n)}
    maximal: list[int] = []
    pool = ThreadPoolExecutor(threads) if threads > 1 else None
    try:
        while level:
            candidates = []
            for mask in sorted(level):
                top = mask.bit_length()
                for j in range(top, n):
                    cand = mask | (1 << j)
                    if all(cand & ~(1 << i) in level for i in mask_indices(mask)):
                        candidates.append(cand)
            unknown = [c for c in candidates if not oracle.known_feasible(c)]
            results = pool.map(oracle.query, unknown) if pool else map(oracle.query, unknown)
            verdict = {}
            for cand, (ok, agree) in zip(unknown, results):
                verdict[cand] = ok
                if ok:
                    oracle.closures.append(agree)
            nxt = {c for c in candidates if verdict.get(c, True)}
            covered = set()
            for c in nxt:
                for i in mask_indices(c):
                    covered.add(c & ~(1 << i))
            maximal.extend(m for m in level if m not in covered)
            level = nxt
    finally:
        if pool:
            pool.shutdown()
    return sorted(maximal)


def _min_cover(maximal: list[int], full: int) -> tuple[tuple[int, ...], list[tuple[int, int]]]:
    """Lexicographically least index tuple of minimum size whose union is ``full``."""
    record = []
    for k in range(1, len(maximal) + 1):
        tried = 0
        for combo in itertools.combinations(range(len(maximal)), k):
            tried += 1
            union = 0
            for i in combo:
                union |= maximal[i]
            if union == full:
                record.append((k, tried))
                return combo, record
        record.append((k, tried))
    raise AssertionError("maximal sets do not cover the contexts")


def rank_of_contextuality(
    P: Behavior,
    method: str = "auto",
    cap: int = DEFAULT_MAX_ASSIGNMENTS,
    threads: int = 1,
) -> RankResult:
    """Exact rank of contextuality with a witness cover of NC models."""
    _check_size(P)
    oracle = _Oracle(P, method, cap)
    maximal = _maximal_sets(oracle, P.n_contexts, threads)
    combo, record = _min_cover(maximal, full_mask(P.n_contexts))
    cover = tuple((maximal[i], oracle.witness(maximal[i])) for i in combo)
    return RankResult(len(combo), cover, tuple(maximal), tuple(record))


def log_rank(P: Behavior, **kwargs) -> int | float:
    """log2 of the rank; an ``int`` whenever the rank is a power of two."""
    rc = rank_of_contextuality(P, **kwargs).rc
    if rc & (rc - 1) == 0:
        return rc.bit_length() - 1
    return math.log2(rc)


def cover_is_valid(P: Behavior, cover) -> bool:
    """Every witness reproduces ``P`` on its mask and the masks cover all contexts."""
    union = 0
    for mask, witness in cover:
        if not witness.is_valid() or witness.agreement(P) & mask != mask:
            return False
        union |= mask
    return union == full_mask(P.n_contexts)
