"""Kiểm thử đồ thị tách G_sp, cận dưới lbs / lb và các file dump."""

import numpy as np
import pytest

from conftest import A, B, C, D, G, seeds
from errors import InvalidInputError
from flow_routing import find_sink_flow
from graph_core import sample_subsets, vector_cut_value
from held_karp import solve_held_karp
from instances import figure1_fractional_solution, figure1_graph
from split_graph import (DEBT, FREE, KIND_UNWEIGHTED, KIND_WEIGHTED, ArcKind, SplitNode, build_split,
                         compute_lower_bound, contract_split, debt_path_check, image_cut_value,
                         read_lower_bound, split_imbalance, unweighted_lower_bound, write_lower_bound,
                         write_split)


def _arcs(split, tail, head):
    return [a for a in split.arcs if a.tail == tail and a.head == head]


def test_figure1_split_values(fig1, fig1_x, fig1_flow):
    split, circulation = build_split(fig1, fig1_x, fig1_flow)
    (discharge,) = _arcs(split, SplitNode(C, DEBT), SplitNode(C, FREE))
    assert discharge.kind == ArcKind.DISCHARGE
    assert discharge.value == pytest.approx(1.0, abs=1e-9)
    assert _arcs(split, SplitNode(A, FREE), SplitNode(B, FREE))[0].value == pytest.approx(1 / 3, abs=1e-9)
    assert _arcs(split, SplitNode(A, DEBT), SplitNode(B, DEBT))[0].value == pytest.approx(1 / 3, abs=1e-9)
    assert _arcs(split, SplitNode(B, DEBT), SplitNode(C, DEBT))[0].value == pytest.approx(2 / 3, abs=1e-9)
    assert _arcs(split, SplitNode(C, FREE), SplitNode(A, FREE))[0].value == pytest.approx(2 / 3, abs=1e-9)
    assert _arcs(split, SplitNode(B, FREE), SplitNode(C, FREE)) == []
    expensive = [a for a in split.arcs if a.kind == ArcKind.EXPENSIVE]
    assert len(expensive) == 6
    assert all(a.value == pytest.approx(1 / 3) and a.tail.level == FREE and a.head.level == DEBT for a in expensive)
    assert circulation.value == split.x_sp()


def test_split_is_balanced_and_preserves_cuts(fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    assert max(abs(d) for d in split_imbalance(split).values()) < 1e-7
    rng = np.random.Generator(np.random.PCG64(11))
    for subset in sample_subsets(fig1.vertex_count, 100, rng):
        assert image_cut_value(split, subset) == pytest.approx(vector_cut_value(fig1, fig1_x.value, subset), abs=1e-7)
    contracted = contract_split(split)
    for edge_id, value in fig1_x.value.items():
        assert contracted.get(edge_id, 0.0) == pytest.approx(value, abs=1e-9)


def test_only_discharge_leaves_debt_level(fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    for arc in split.arcs:
        if arc.tail.level == DEBT and arc.head.level == FREE:
            assert arc.kind == ArcKind.DISCHARGE
            assert arc.tail.vertex in fig1_flow.terminals


def test_debt_path_check(fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    (into_c,) = _arcs(split, SplitNode(G, FREE), SplitNode(C, DEBT))
    (discharge,) = _arcs(split, SplitNode(C, DEBT), SplitNode(C, FREE))
    assert debt_path_check(split, [into_c.arc_id, discharge.arc_id])
    assert not debt_path_check(split, [into_c.arc_id])
    (a_to_d,) = _arcs(split, SplitNode(A, FREE), SplitNode(D, DEBT))
    with pytest.raises(InvalidInputError):
        debt_path_check(split, [a_to_d.arc_id, discharge.arc_id])
    with pytest.raises(InvalidInputError):
        debt_path_check(split, [])


def test_figure1_lower_bound(fig1, fig1_x, fig1_flow):
    lower_bound = compute_lower_bound(fig1, fig1_x, fig1_flow)
    assert lower_bound.kind == KIND_WEIGHTED
    assert lower_bound.lbs[C] == pytest.approx(3.0)
    assert lower_bound.lbs[G] == pytest.approx(3.0)
    assert lower_bound.lbs[A] == pytest.approx(1.0)
    assert lower_bound.total_lbs == pytest.approx(10.0)
    assert lower_bound.lb[C] == pytest.approx(0.3)
    assert lower_bound.unrounded_total <= 2 * fig1_x.objective + 1e-9


def test_lower_bound_scales_with_weights():
    graph = figure1_graph(w0=1.0, w1=10.0)
    x_star = figure1_fractional_solution(graph)
    lower_bound = compute_lower_bound(graph, x_star, find_sink_flow(graph, x_star))
    assert lower_bound.lbs[C] == pytest.approx(11.0)
    assert lower_bound.total_lbs <= 10 * x_star.objective


def test_unweighted_lower_bound(directed_cycle):
    graph = directed_cycle(4, w0=2.0, w1=5.0)
    lower_bound = unweighted_lower_bound(graph, {e: 1.0 for e in range(4)})
    assert lower_bound.kind == KIND_UNWEIGHTED
    assert lower_bound.lb == pytest.approx({v: 1.0 for v in range(4)})
    assert lower_bound.lbs[0] == pytest.approx(10.0)


def test_lower_bound_file(tmp_path, fig1, fig1_x, fig1_flow):
    lower_bound = compute_lower_bound(fig1, fig1_x, fig1_flow)
    path = tmp_path / "lb.txt"
    write_lower_bound(path, lower_bound)
    restored = read_lower_bound(path)
    assert restored.kind == KIND_WEIGHTED
    assert restored.lbs == pytest.approx(lower_bound.lbs)
    assert restored.lb == pytest.approx(lower_bound.lb)


def test_lower_bound_file_rejects_negative(tmp_path):
    path = tmp_path / "lb.txt"
    path.write_text("vertex lbs lb\n0 -1 -0.1\n")
    with pytest.raises(InvalidInputError):
        read_lower_bound(path)


def test_split_dump(tmp_path, fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    path = tmp_path / "split.txt"
    write_split(path, split)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#")
    assert len(lines) == len(split.arcs) + 1
    assert any(" discharge t2 " in line for line in lines)


def test_split_arc_keeps_origin(fig1, fig1_x, fig1_flow):
    split, _ = build_split(fig1, fig1_x, fig1_flow)
    (arc,) = _arcs(split, SplitNode(C, FREE), SplitNode(A, FREE))
    twin = split.split_arc(arc.arc_id, 0.25)
    assert split.arcs[arc.arc_id].value == pytest.approx(0.25)
    assert split.arcs[twin].value == pytest.approx(2 / 3 - 0.25)
    assert split.arcs[twin].origin == arc.origin
    with pytest.raises(InvalidInputError):
        split.split_arc(arc.arc_id, 1.0)


@pytest.mark.parametrize("seed", seeds(4, 500))
def test_lower_bound_budget_on_random_instances(random_instance, seed):
    graph = random_instance(seed, n=8, family="expensive-heavy")
    x_star = solve_held_karp(graph)
    if x_star.expensive_mass(graph) < 1.0:
        pytest.skip("x*(E1) < 1")
    sink_flow = find_sink_flow(graph, x_star)
    lower_bound = compute_lower_bound(graph, x_star, sink_flow)
    assert lower_bound.total_lbs <= 10 * x_star.objective + 1e-6
    assert lower_bound.total_lb <= x_star.objective + 1e-6
    split, _ = build_split(graph, x_star, sink_flow)
    assert max(abs(d) for d in split_imbalance(split).values()) < 1e-7
    rng = np.random.Generator(np.random.PCG64(seed))
    for subset in sample_subsets(graph.vertex_count, 50, rng):
        assert image_cut_value(split, subset) == pytest.approx(vector_cut_value(graph, x_star.value, subset), abs=1e-7)
