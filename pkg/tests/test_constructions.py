from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ctxrank import (
    build_color_behavior,
    build_cycle_behavior,
    build_pm_behavior,
    build_pr_behavior,
    color_permutation,
    is_noncontextual,
    pm_row_column_cover,
    rank_of_contextuality,
    validate_behavior,
)
from ctxrank.errors import CapExceededError, InfeasibleError, StructuralError
from ctxrank.graphs import (
    Graph,
    arboricity,
    complete_bipartite_graph,
    complete_graph,
    cycle_graph,
    forest_decomposition,
    is_forest,
    nash_williams_bound,
    parse_edge_list,
    read_edge_list,
    wheel_graph,
)
from ctxrank.oracle import mask_of


def test_color_permutation_examples():
    assert color_permutation(1, 3) == (1, 0, 3, 2, 5, 4, 7, 6)
    assert color_permutation(3, 3) == (4, 5, 6, 7, 0, 1, 2, 3)
    for i in range(1, 6):
        tau = color_permutation(i, 5)
        assert all(tau[tau[v]] == v and tau[v] != v for v in range(32))
    with pytest.raises(ValueError):
        color_permutation(4, 3)
    with pytest.raises(ValueError):
        color_permutation(1, 21)


def test_color_pairs_are_disjoint_and_exhaustive():
    m = 4
    pairs = [
        frozenset((v, color_permutation(i, m)[v])) for i in range(1, m + 1) for v in range(1 << m)
    ]
    distinct = set(pairs)
    # every unordered pair appears exactly twice (once from each end) within one color
    assert len(distinct) == m * (1 << m) // 2
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            a = {frozenset((v, color_permutation(i, m)[v])) for v in range(1 << m)}
            b = {frozenset((v, color_permutation(j, m)[v])) for v in range(1 << m)}
            assert not a & b


def test_compositions_of_distinct_colors_have_no_fixed_points():
    for m in range(1, 11):
        values = np.arange(1 << m)
        perms = [np.array(color_permutation(i, m)) for i in range(1, m + 1)]
        for r in range(1, m + 1):
            for subset in itertools.combinations(range(m), r):
                image = values
                for i in subset:
                    image = perms[i][image]
                assert not np.any(image == values)


def test_three_color_composition():
    t1, t2, t3 = (color_permutation(i, 3) for i in (1, 2, 3))
    assert all(t1[t2[t3[v]]] != v for v in range(8))


def test_generated_behaviors_validate():
    behaviors = [
        build_cycle_behavior(3),
        build_cycle_behavior(4),
        build_cycle_behavior(7),
        build_pm_behavior(),
        build_pr_behavior("1/2"),
        build_pr_behavior("9/10"),
        build_color_behavior(complete_graph(4)),
        build_color_behavior(Graph(((0, 1),))),
    ]
    assert all(validate_behavior(P).ok for P in behaviors)


def test_cycle_behaviors():
    P = build_cycle_behavior(4)
    assert P.tables[0] == {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    assert P.hypergraph.contexts == ((0, 1), (1, 2), (2, 3), (0, 3))
    assert rank_of_contextuality(P).rc == 2
    assert rank_of_contextuality(build_cycle_behavior(4, corrected=False)).rc == 1
    assert rank_of_contextuality(build_cycle_behavior(5, corrected=True)).rc == 1
    with pytest.raises(ValueError):
        build_cycle_behavior(2)


def test_pm_behavior_shape():
    P = build_pm_behavior()
    H = P.hypergraph
    assert H.observables[0] == "m11" and len(H.contexts) == 6
    assert [H.context_label(i) for i in (0, 3)] == ["m11+m12+m13", "m11+m21+m31"]
    parity = [{sum(k) % 2 for k in t} for t in P.tables]
    assert parity == [{0}] * 5 + [{1}]


def test_pm_two_state_cover():
    P = build_pm_behavior()
    rows_state, cols_state = pm_row_column_cover()
    assert rows_state.agreement(P) == mask_of([0, 1, 2])
    assert cols_state.agreement(P) == mask_of([3, 4, 5])
    # the row state yields independent uniform bits on every column
    uniform = {k: Fraction(1, 8) for k in itertools.product((0, 1), repeat=3)}
    for ctx in P.hypergraph.contexts[3:]:
        assert rows_state.table(ctx) == uniform
    for ctx in P.hypergraph.contexts[:3]:
        assert cols_state.table(ctx) == uniform


def test_pr_boxes():
    P = build_pr_behavior("1/2")
    assert all(set(t.values()) == {Fraction(1, 4)} for t in P.tables)
    assert P.factorization == ((0, 1), (2, 3))
    assert is_noncontextual(build_pr_behavior("3/4")).feasible
    with pytest.raises(ValueError):
        build_pr_behavior("2/5")


def test_color_behavior_single_edge_and_caps():
    P = build_color_behavior(Graph(((0, 1),)))
    assert P.tables[0] == {(0, 1): Fraction(1, 2), (1, 0): Fraction(1, 2)}
    assert is_noncontextual(P).feasible
    with pytest.raises(StructuralError):
        build_color_behavior(Graph(()))
    with pytest.raises(CapExceededError):
        build_color_behavior(complete_graph(7))


@pytest.mark.parametrize(
    "G,value",
    [
        (complete_graph(5), 3),
        (complete_graph(4), 2),
        (complete_graph(6), 3),
        (complete_bipartite_graph(3, 3), 2),
        (complete_bipartite_graph(2, 5), 2),
        (wheel_graph(5), 2),
        (cycle_graph(5), 2),
        (Graph(((0, 1), (1, 2), (2, 3))), 1),
        (Graph(()), 0),
    ],
)
def test_arboricity_values(G, value):
    assert arboricity(G) == value


def test_arboricity_matches_bipartite_formula():
    for m, n in [(2, 2), (2, 3), (3, 4), (4, 4)]:
        assert arboricity(complete_bipartite_graph(m, n)) == -(-m * n // (m + n - 1))


def test_nash_williams_bound():
    assert nash_williams_bound(complete_graph(5)) == 3
    assert nash_williams_bound(cycle_graph(6)) == 2


def test_forest_decompositions():
    d = forest_decomposition(cycle_graph(5), 2)
    assert sorted(len(f) for f in d.forests) == [1, 4] and d.is_valid_for(cycle_graph(5))
    d = forest_decomposition(wheel_graph(5), 2)
    assert d.is_valid_for(wheel_graph(5)) and all(len(f) == 4 for f in d.forests)
    d = forest_decomposition(complete_graph(5), 4)
    assert len(d.forests) == 4 and d.is_valid_for(complete_graph(5))
    with pytest.raises(InfeasibleError):
        forest_decomposition(complete_graph(5), 2)
    assert forest_decomposition(complete_graph(4), 2) == forest_decomposition(complete_graph(4), 2)


def test_edge_size_cap():
    with pytest.raises(CapExceededError):
        arboricity(complete_graph(8))


def test_edge_list_parsing(tmp_path):
    text = "# K3\n0 1\n1 2\n\n2 0  # closing edge\n1 0\n"
    G = parse_edge_list(text)
    assert G.edges == ((0, 1), (0, 2), (1, 2))
    path = tmp_path / "g.edges"
    path.write_text(text)
    assert read_edge_list(path) == G
    with pytest.raises(StructuralError):
        parse_edge_list("0 1 2\n")
    with pytest.raises(StructuralError):
        parse_edge_list("3 3\n")
    assert is_forest([(0, 1), (1, 2)]) and not is_forest([(0, 1), (1, 2), (0, 2)])
