from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest

from corpus import brute_force_rank, corpus
from ctxrank import (
    Behavior,
    Hypergraph,
    build_color_behavior,
    build_cycle_behavior,
    build_pm_behavior,
    build_pr_behavior,
    cover_is_valid,
    is_extendable,
    is_noncontextual,
    log_rank,
    rank_of_contextuality,
    tensor,
)
from ctxrank.errors import StructuralError
from ctxrank.graphs import cycle_graph, is_forest, wheel_graph
from ctxrank.oracle import NCWitness, full_mask, mask_of
from ctxrank.rank import maximal_extendable_sets


def test_three_cycle_maximal_sets():
    assert maximal_extendable_sets(build_cycle_behavior(3)) == [0b011, 0b101, 0b110]


def test_nc_behavior_has_one_maximal_set():
    P = build_pr_behavior("3/4")
    assert maximal_extendable_sets(P) == [0b1111]
    result = rank_of_contextuality(P)
    assert result.rc == 1 and result.rc2 == 0 and log_rank(P) == 0


def test_color_behavior_maximal_sets_are_spanning_trees():
    G = wheel_graph(5)
    P = build_color_behavior(G)
    got = set(maximal_extendable_sets(P, method="support"))
    trees = {
        mask_of(combo)
        for combo in itertools.combinations(range(len(G.edges)), 4)
        if is_forest([G.edges[i] for i in combo])
    }
    assert got == trees and len(trees) == 45


def test_rank_examples_and_covers():
    for P, rc in [
        (build_cycle_behavior(3), 2),
        (build_pm_behavior(), 2),
        (build_pr_behavior("4/5"), 2),
        (build_pr_behavior(1), 2),
    ]:
        result = rank_of_contextuality(P)
        assert result.rc == rc
        assert cover_is_valid(P, result.cover)
        assert log_rank(P) == 1 and isinstance(log_rank(P), int)


def test_three_cycle_cover_is_lexicographically_first():
    result = rank_of_contextuality(build_cycle_behavior(3))
    assert [m for m, _ in result.cover] == [0b011, 0b101]
    assert result.search_record == ((1, 3), (2, 1))


def test_rank_bounded_by_context_count():
    for P in corpus().values():
        result = rank_of_contextuality(P)
        assert 1 <= result.rc <= P.n_contexts
        assert (result.rc == 1) == is_noncontextual(P).feasible


def test_lp_and_support_methods_agree():
    P = build_color_behavior(cycle_graph(3))
    assert maximal_extendable_sets(P, method="lp") == maximal_extendable_sets(P, method="support")
    with pytest.raises(ValueError):
        rank_of_contextuality(P, method="guess")


def test_threaded_search_is_deterministic():
    P = build_pm_behavior()
    one = rank_of_contextuality(P, threads=1)
    many = rank_of_contextuality(P, threads=4)
    assert one.maximal_sets == many.maximal_sets
    assert [m for m, _ in one.cover] == [m for m, _ in many.cover]


def test_too_many_contexts():
    n = 64
    H = Hypergraph(tuple(f"x{k}" for k in range(n)), (("0", "1"),) * n, [(k,) for k in range(n)])
    P = Behavior(H, tuple({(0,): Fraction(1)} for _ in range(n)))
    with pytest.raises(StructuralError):
        rank_of_contextuality(P)


# -- composites ---------------------------------------------------------------------


def product_witness(w1: NCWitness, w2: NCWitness) -> NCWitness:
    return NCWitness({a + b: p * q for a, p in w1.weights.items() for b, q in w2.weights.items()})


def rectangle_cover(P1, P2, left_masks, right_masks):
    """Cover of the composite by products of extendable sets of the two factors."""
    n2 = P2.n_contexts
    cover = []
    for m1, m2 in zip(left_masks, right_masks):
        w = product_witness(is_extendable(P1, m1).witness, is_extendable(P2, m2).witness)
        mask = mask_of(
            i * n2 + j for i in range(P1.n_contexts) for j in range(n2) if m1 >> i & 1 and m2 >> j & 1
        )
        cover.append((mask, w))
    return cover


def drop_one(n: int, k: int) -> int:
    return full_mask(n) & ~(1 << k)


def test_three_cycle_times_pr_box_needs_only_three_models():
    c3, pr = build_cycle_behavior(3), build_pr_behavior(1)
    P = tensor(c3, pr)
    # {C1,C2}x{00,01,10}, {C1,C3}x{00,01,11}, {C2,C3}x{00,10,11}
    cover = rectangle_cover(
        c3, pr, [drop_one(3, 2), drop_one(3, 1), drop_one(3, 0)], [drop_one(4, 3), drop_one(4, 2), drop_one(4, 1)]
    )
    assert cover_is_valid(P, cover)
    result = rank_of_contextuality(P)
    assert result.rc == 3 < rank_of_contextuality(c3).rc * rank_of_contextuality(pr).rc
    assert cover_is_valid(P, result.cover)


def test_three_cycle_times_pr_box_reference_search():
    P = tensor(build_cycle_behavior(3), build_pr_behavior(1))
    assert brute_force_rank(P) == 3


def test_pm_square_tensor_has_three_model_cover():
    pm = build_pm_behavior()
    P = tensor(pm, pm)
    cover = rectangle_cover(pm, pm, [drop_one(6, k) for k in range(3)], [drop_one(6, k) for k in range(3, 6)])
    assert P.n_contexts == 36 and cover_is_valid(P, cover)


@pytest.mark.parametrize(
    "P1,P2",
    [
        (build_cycle_behavior(3), build_cycle_behavior(3)),
        (build_pr_behavior(1), build_pr_behavior("3/4")),
        (build_cycle_behavior(4), build_pr_behavior("9/10")),
    ],
)
def test_composite_rank_between_max_and_product(P1, P2):
    r1, r2 = rank_of_contextuality(P1).rc, rank_of_contextuality(P2).rc
    r = rank_of_contextuality(tensor(P1, P2)).rc
    assert max(r1, r2) <= r <= r1 * r2


def test_rank_two_composites_of_rank_two_factors_drop_to_three():
    r = rank_of_contextuality(tensor(build_cycle_behavior(3), build_cycle_behavior(3))).rc
    assert r == 3 and math.log2(r) < 2
