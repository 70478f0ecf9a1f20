"""Kiểm thử LP Held-Karp: mặt phẳng cắt, oracle liệt kê, tách lát cắt và file nghiệm."""

import numpy as np
import pytest

import held_karp
from conftest import A, B, C, seeds
from errors import GraphNotStronglyConnectedError, InternalInconsistencyError, InvalidInputError
from graph_core import CutSpec, TwoWeightDigraph, vector_cut_value, vertex_imbalance
from held_karp import (INFEASIBLE, OPTIMAL, FractionalCirculation, LpModel, SeparationResult, build_initial_model,
                       enumerate_held_karp, lp_solve, read_lp_solution, separate, solve_held_karp,
                       validate_fractional, write_lp_solution)


def test_directed_cycle_objective(directed_cycle):
    graph = directed_cycle(4)
    result = solve_held_karp(graph)
    assert result.objective == pytest.approx(4.0)
    assert all(result.get(e) == pytest.approx(1.0) for e in range(4))


def test_single_vertex_is_zero():
    graph = TwoWeightDigraph.from_triples(1, [], 1.0, 2.0)
    assert solve_held_karp(graph).objective == 0.0


def test_figure1_lp_value(fig1):
    result = solve_held_karp(fig1)
    assert result.objective == pytest.approx(8.0, abs=1e-6)
    assert vector_cut_value(fig1, result.value, {A, B, C}) >= 1.0 - 1e-7
    assert max(abs(d) for d in vertex_imbalance(fig1, result.value)) < 1e-7
    assert result.iterations >= 1


def test_not_strongly_connected_rejected():
    graph = TwoWeightDigraph.from_triples(3, [(0, 1, 0), (1, 2, 0)], 1.0, 2.0)
    with pytest.raises(GraphNotStronglyConnectedError):
        solve_held_karp(graph)


def test_separation_finds_disconnected_triangles(fig1):
    x = {e: (1.0 if not fig1.edges[e].is_expensive else 0.0) for e in range(fig1.edge_count)}
    violated = separate(fig1, x)
    assert violated is not None
    assert violated.cut == CutSpec(frozenset({A, B, C}))
    assert violated.value == pytest.approx(0.0)
    assert separate(fig1, x, workers=3) == violated


def test_separation_accepts_feasible(fig1, fig1_x):
    assert separate(fig1, fig1_x.value) is None
    validate_fractional(fig1, fig1_x)


def test_validate_rejects_unbalanced(fig1, fig1_x):
    broken = dict(fig1_x.value)
    broken[0] += 0.5
    with pytest.raises(InvalidInputError):
        validate_fractional(fig1, FractionalCirculation(value=broken, objective=fig1_x.objective))


def test_initial_model_has_singleton_cuts(fig1):
    model = build_initial_model(fig1)
    assert len(model.cuts) == fig1.vertex_count
    assert model.eq_matrix.shape[1] == fig1.edge_count


def test_lp_solve_reports_infeasible():
    model = LpModel(objective=np.array([1.0]), eq_matrix=np.array([[1.0]]), eq_rhs=np.array([-1.0]))
    assert lp_solve(model).status == INFEASIBLE


def test_lp_solution_file(tmp_path, fig1, fig1_x, data_dir):
    path = tmp_path / "lp.sol"
    write_lp_solution(path, fig1_x, fig1.edge_count)
    restored = read_lp_solution(path, fig1)
    assert restored.value == pytest.approx(fig1_x.value)
    assert restored.objective == pytest.approx(8.0)
    bundled = read_lp_solution(data_dir / "figure1.lp", fig1)
    assert bundled.value == pytest.approx(fig1_x.value)


def test_lp_solution_file_rejects_unknown_edge(tmp_path, fig1):
    path = tmp_path / "bad.sol"
    path.write_text("99 0.5\n")
    with pytest.raises(InvalidInputError):
        read_lp_solution(path, fig1)


@pytest.mark.parametrize("seed", seeds(4, 200))
def test_cutting_plane_matches_enumeration(random_instance, seed):
    graph = random_instance(seed, n=6)
    assert solve_held_karp(graph).objective == pytest.approx(enumerate_held_karp(graph).objective, abs=1e-6)


def test_enumeration_size_cap(random_instance):
    with pytest.raises(InvalidInputError):
        enumerate_held_karp(random_instance(0, n=11))


def test_lp_solve_optimal_status():
    model = LpModel(objective=np.array([1.0, 2.0]), eq_matrix=np.zeros((0, 2)), eq_rhs=np.zeros(0),
                    ge_rows=[np.array([1.0, 1.0])], ge_rhs=[1.0])
    result = lp_solve(model)
    assert result.status == OPTIMAL
    assert result.objective == pytest.approx(1.0)


def test_repeated_violated_cut_is_internal_error(fig1, monkeypatch):
    stuck = SeparationResult(cut=CutSpec(frozenset({A, B, C})), value=0.5)
    monkeypatch.setattr(held_karp, "separate", lambda graph, x, workers=1: stuck)
    with pytest.raises(InternalInconsistencyError) as info:
        solve_held_karp(fig1)
    assert info.value.diagnostics["cut"] == [A, B, C]
