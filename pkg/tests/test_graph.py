from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indtrans.errors import InvalidGraph, NotRegular
from indtrans.graph import (Blocker, BlowUp, Constellation, PartitionedGraph,
                            SolverParams, Transversal, as_fraction, dominates,
                            fmt_rational, is_it, is_pit, max_degree, regular_blocksize,
                            validate_blocker, validate_graph, weight_total, wmax_block)
from instances import G_A, G_B, G_C, W_A


def test_valid_graph_has_no_violations():
    g = PartitionedGraph(4, [(0, 2)], [(0, 1), (2, 3)])
    assert validate_graph(g) == []


def test_overlapping_blocks_reported():
    g = PartitionedGraph(4, [], [(0, 1), (1, 2)])
    assert any("blocks not disjoint" in p for p in validate_graph(g))


def test_self_loop_reported():
    g = PartitionedGraph(2, [(0, 0)], [(0,), (1,)])
    assert any("self-loop" in p for p in validate_graph(g))


def test_uncovered_vertex_and_empty_block_reported():
    assert validate_graph(PartitionedGraph(3, [], [(0,), (1,)]))
    assert validate_graph(PartitionedGraph(2, [], [(0, 1), ()]))
    with pytest.raises(InvalidGraph):
        PartitionedGraph(2, [], [(0, 1), ()]).require_valid()


def test_it_examples():
    assert is_it(G_C, {0, 2})
    assert not is_it(G_A, {0, 3})
    assert is_pit(G_A, {2}) and not is_it(G_A, {2})


def test_dominates_examples():
    assert dominates(G_A, {0}, {3})
    assert not dominates(G_A, {3}, {3})
    assert dominates(G_A, set(), set())


def test_numeric_summaries():
    assert max_degree(G_A) == 1
    assert weight_total(G_A, W_A) == 10
    assert wmax_block(G_A, W_A, G_A.blocks[1]) == 4
    assert regular_blocksize(G_A) == 3
    with pytest.raises(NotRegular):
        regular_blocksize(PartitionedGraph(3, [], [(0, 1), (2,)]))


def test_rationals_are_exact():
    assert as_fraction("7/3") == Fraction(7, 3)
    assert fmt_rational(5) == "5/1"
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        as_fraction(True)


def test_solver_params_ranges():
    SolverParams()
    with pytest.raises(Exception):
        SolverParams(delta=Fraction(1, 2))
    with pytest.raises(Exception):
        SolverParams(C=100)


def gb_blocker(**kw) -> Blocker:
    args = dict(blocks=frozenset({0, 1}), blocks0=frozenset({0, 1}), dominator=frozenset({0, 1}),
                constellation=Constellation(frozenset({0}), frozenset({1})),
                epsilon=Fraction(1, 8))
    args.update(kw)
    return Blocker(**args)


def test_blocker_fixture_validates():
    assert validate_blocker(G_B, gb_blocker()) == []


def test_blocker_missing_dominator_vertex():
    problems = validate_blocker(G_B, gb_blocker(dominator=frozenset({0})))
    assert any("D does not dominate V_B" in p for p in problems)


def test_blocker_without_leaves():
    blk = gb_blocker(constellation=Constellation(frozenset({0}), frozenset()))
    assert any("|leaves|" in p for p in validate_blocker(G_B, blk))


def test_blocker_with_leaf_edge_rejected():
    # K_{2,2} across two blocks plus a third block, leaves made adjacent
    g = PartitionedGraph(5, [(0, 2), (0, 3), (1, 2), (1, 3), (3, 4)], [(0, 1), (2, 3), (4,)])
    blk = Blocker(frozenset({0, 1, 2}), frozenset({0, 1, 2}), frozenset({0, 1, 3, 4}),
                  Constellation(frozenset({1}), frozenset({3, 4})), Fraction(1, 8))
    assert validate_blocker(g, blk)


def test_blowup_materializes_consistently():
    bu = BlowUp(G_A, (2, 1, 0, 1, 1, 1))
    g, origin = bu.materialize()
    assert g.n == bu.n == 6
    assert bu.block_sizes == (3, 3)
    assert max(g.degree(v) for v in range(g.n)) == bu.max_degree() == 2
    assert [origin[v] for v in range(g.n)] == [0, 0, 1, 3, 4, 5]


def test_transversal_normalises():
    M = Transversal((4, 0, 4))
    assert tuple(M) == (0, 4) and 4 in M and len(M) == 2
    assert M.weight(W_A) == 5


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 12))
    k = draw(st.integers(1, n))
    labels = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
    blocks = [[v for v in range(n) if labels[v] == i] for i in range(k)]
    blocks = [U for U in blocks if U]
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), max_size=20)) if pairs else []
    return PartitionedGraph(n, edges, blocks)


@settings(max_examples=200, deadline=None)
@given(small_graphs(), st.data())
def test_it_implies_pit_and_size(g, data):
    S = data.draw(st.sets(st.integers(0, g.n - 1)))
    if is_it(g, S):
        assert is_pit(g, S)
        assert len(S) == len(g.blocks)
    if is_pit(g, S):
        assert all(len(S & set(U)) <= 1 for U in g.blocks)


@settings(max_examples=200, deadline=None)
@given(small_graphs(), st.data())
def test_dominates_matches_definition(g, data):
    D = data.draw(st.sets(st.integers(0, g.n - 1)))
    W = data.draw(st.sets(st.integers(0, g.n - 1)))
    brute = all(any((min(u, x), max(u, x)) in g.edges for u in D) for x in W)
    assert dominates(g, D, W) == brute
