"""Kiểm thử chọn X_i^-, phân rã chu trình, mạng định tuyến lại và lưu thông nguyên."""

import pytest

from conftest import A, B, C, D, E, G
from errors import InternalInconsistencyError
from rerouting import (HALF, Piece, Rerouting, backtrack_terminals, boundary_in, build_rerouted, cycle_decompose,
                       derive_exit_set, integral_circulation, node_caps, reroute, select_incoming_half,
                       verify_integral)
from split_graph import AUX, DEBT, FREE, ArcKind, SplitGraph, SplitNode, build_split

TRIANGLES = [frozenset({A, B, C}), frozenset({D, E, G})]


@pytest.fixture
def fig1_split(fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    return split


@pytest.fixture
def unit_cycle_split(directed_cycle):
    graph = directed_cycle(4)
    split = SplitGraph(graph=graph, terminals=frozenset())
    for edge in graph.edges:
        split.add_arc(SplitNode(edge.tail, FREE), SplitNode(edge.head, FREE), ArcKind.FREE_CHEAP,
                      edge.edge_id, graph.w0, 1.0)
    return split


def test_exit_set_and_connector_on_unit_cycle(unit_cycle_split):
    split = unit_cycle_split
    rerouting = select_incoming_half(split, frozenset({1, 2}), 0, target=1.0, allow_debt=False)
    assert rerouting.incoming == {0: 1.0}
    cycles = cycle_decompose(split)
    assert [c.arcs for c in cycles] == [(0, 1, 2, 3)]
    derive_exit_set(cycles, rerouting, split)
    assert rerouting.outgoing == pytest.approx({2: 1.0})
    assert rerouting.connector == pytest.approx({1: 1.0})

    network = build_rerouted(split, cycles, [rerouting])
    aux = rerouting.aux_node
    assert network.pieces == pytest.approx({
        Piece(0, SplitNode(0, FREE), aux): 1.0,
        Piece(2, aux, SplitNode(3, FREE)): 1.0,
        Piece(3, SplitNode(3, FREE), SplitNode(0, FREE)): 1.0,
    })
    y = integral_circulation(network, node_caps(split, 1.0))
    assert sorted(y.values()) == [1, 1, 1]


def test_boundary_in_is_expensive_images(fig1_split):
    arcs = boundary_in(fig1_split, TRIANGLES[0])
    assert len(arcs) == 3
    assert all(a.head.level == DEBT for a in arcs)


def test_select_incoming_half_prefers_heavier_level(fig1_split):
    working = fig1_split.copy()
    before = len(working.arcs)
    rerouting = select_incoming_half(working, TRIANGLES[0], 0)
    assert rerouting.level == DEBT
    assert rerouting.is_debt
    assert sum(rerouting.incoming.values()) == pytest.approx(HALF)
    assert len(working.arcs) == before + 1
    assert len(fig1_split.arcs) == before


def test_select_incoming_half_without_debt_fails(fig1_split):
    with pytest.raises(InternalInconsistencyError):
        select_incoming_half(fig1_split.copy(), TRIANGLES[0], 0, allow_debt=False)


def test_cycle_decomposition_covers_split(fig1_split):
    cycles = cycle_decompose(fig1_split)
    carried = {}
    for cycle in cycles:
        assert cycle.mass > 0
        arcs = [fig1_split.arcs[a] for a in cycle.arcs]
        for previous, current in zip(arcs, arcs[1:] + arcs[:1]):
            assert previous.head == current.tail
        for arc_id in cycle.arcs:
            carried[arc_id] = carried.get(arc_id, 0.0) + cycle.mass
    for arc in fig1_split.arcs:
        assert carried.get(arc.arc_id, 0.0) == pytest.approx(arc.value, abs=1e-6)


def test_reroute_produces_exact_circulation(fig1_split):
    working, reroutings, cycles, network = reroute(fig1_split, TRIANGLES)
    assert [r.class_index for r in reroutings] == [0, 1]
    assert max(abs(v) for v in network.imbalance().values()) < 1e-6
    for rerouting in reroutings:
        assert sum(rerouting.outgoing.values()) == pytest.approx(HALF, abs=1e-6)
        assert network.in_value(rerouting.aux_node) == pytest.approx(HALF, abs=1e-6)
        assert not any(p.tail == rerouting.aux_node and p.head == rerouting.aux_node for p in network.pieces)


def test_integral_circulation_respects_caps(fig1_split):
    working, reroutings, _, network = reroute(fig1_split, TRIANGLES)
    caps = node_caps(working, 2.0)
    assert caps[SplitNode(C, FREE)] == 2
    y = integral_circulation(network, caps)
    indegree = {}
    for piece, amount in y.items():
        assert amount > 0
        indegree[piece.head] = indegree.get(piece.head, 0) + amount
    for rerouting in reroutings:
        assert indegree[rerouting.aux_node] == 1
    for node, degree in indegree.items():
        if node.level != AUX:
            assert degree <= caps[node]


def test_verify_integral_rejects_unbalanced(fig1_split):
    working, reroutings, _, network = reroute(fig1_split, TRIANGLES)
    caps = node_caps(working, 2.0)
    y = integral_circulation(network, caps)
    piece = next(iter(y))
    broken = dict(y)
    broken[piece] += 1
    with pytest.raises(InternalInconsistencyError):
        verify_integral(network, broken, caps)
    bogus = dict(y)
    bogus[Piece(piece.arc_id, piece.tail, SplitNode(0, AUX))] = 1
    with pytest.raises(InternalInconsistencyError):
        verify_integral(network, bogus, caps)


def test_backtrack_reaches_terminal(fig1_split):
    rerouting = Rerouting(class_index=0, sink_vertices=TRIANGLES[0], level=DEBT)
    found = backtrack_terminals(fig1_split, rerouting, SplitNode(A, FREE))
    assert list(found) == [C]
    (arc_id,) = found[C]
    arc = fig1_split.arcs[arc_id]
    assert (arc.tail, arc.head) == (SplitNode(C, FREE), SplitNode(A, FREE))
    assert backtrack_terminals(fig1_split, rerouting, SplitNode(C, FREE)) == {C: []}
