"""Kiểm thử Local-Connectivity ATSP: đồ thị phụ trợ, các nhánh và định dạng file."""

import pytest

from conftest import A, B, C, D, seeds
from errors import InvalidInputError
from graph_core import EdgeMultiset, TwoWeightDigraph, WeightClass, delta, is_eulerian, weakly_connected_components
from held_karp import FractionalCirculation, solve_held_karp
from instances import figure1_partition, partition_rng, random_partition
from local_connectivity import (BRANCH_SIX_LIGHT, BRANCH_THREE_LIGHT, BRANCH_WEIGHTED, CHEAP, POSTPAID, AuxEdge,
                                AuxGraph, Partition, aux_shortest_path, build_aux_graph, map_back_and_patch,
                                parse_partition, pick_sink_component, read_partition, read_solution,
                                shortest_cheap_path, sink_has_no_cheap_exit, six_light_via_unweighted,
                                solve_local_connectivity, three_light_unweighted, walk_vertices, write_partition,
                                write_solution)
from rerouting import integral_circulation, node_caps, reroute
from split_graph import DEBT, FREE, KIND_UNWEIGHTED, KIND_WEIGHTED, ArcKind, SplitGraph, SplitNode


def _assert_light(graph, solution, factor):
    assert is_eulerian(graph, solution.multiset)
    for component in weakly_connected_components(graph, solution.multiset):
        weight = component.multiset.weight(graph)
        assert weight <= factor * solution.lower_bound.lb_of(component.vertices) * (1 + 1e-6) + 1e-9


def _assert_crossed(graph, solution, partition):
    for members in partition.classes:
        if len(members) < graph.vertex_count:
            assert any(solution.multiset.get(e) for e in delta(graph, members))


@pytest.fixture
def small_class_graph():
    # 0 → 1 rẻ, 1 → 2 đắt, 2 → 0 rẻ
    return TwoWeightDigraph.from_triples(3, [(0, 1, 0), (1, 2, 1), (2, 0, 0)], 1.0, 5.0)


def test_aux_graph_edge_kinds(small_class_graph):
    aux = build_aux_graph(small_class_graph, {0, 1, 2}, frozenset({2}))
    kinds = {(e.tail, e.head, e.kind): e.preimage for e in aux.edges}
    assert kinds[(0, 1, CHEAP)] == (0,)
    assert kinds[(2, 0, CHEAP)] == (2,)
    assert kinds[(1, 2, POSTPAID)] == (1,)
    assert pick_sink_component(aux) == frozenset({0, 1, 2})
    path = aux_shortest_path(aux, 0, 2)
    assert [edge_id for edge in path for edge_id in edge.preimage] == [0, 1]


def test_aux_graph_without_terminals_drops_expensive(small_class_graph):
    aux = build_aux_graph(small_class_graph, {0, 1, 2}, frozenset())
    assert all(e.kind == CHEAP for e in aux.edges)
    assert pick_sink_component(aux) == frozenset({1})
    assert aux_shortest_path(aux, 1, 0) is None


def test_sink_component_picks_smallest_sink():
    aux = AuxGraph(vertices=frozenset({0, 1, 2}), edges=[AuxEdge(0, 1, CHEAP, (0,))])
    assert pick_sink_component(aux) == frozenset({1})


def test_cheap_paths_and_exits(fig1):
    assert shortest_cheap_path(fig1, A, C) == [0, 1]
    assert shortest_cheap_path(fig1, A, D) is None
    assert sink_has_no_cheap_exit(fig1, frozenset({A, B, C}), frozenset({A, B, C}))
    assert not sink_has_no_cheap_exit(fig1, frozenset({A, B, C}), frozenset({A}))
    assert walk_vertices(fig1, [0, 1, 2], A) == [A, B, C, A]


def test_figure1_two_classes(fig1, fig1_x, fig1_flow):
    partition = figure1_partition()
    solution = solve_local_connectivity(fig1, fig1_x, None, partition, sink_flow=fig1_flow)
    assert solution.branch == BRANCH_WEIGHTED
    assert solution.lower_bound_kind == KIND_WEIGHTED
    assert not solution.vacuous_crossing
    assert len(solution.patches) == 2
    _assert_light(fig1, solution, 100)
    _assert_crossed(fig1, solution, partition)
    for patch in solution.patches:
        assert patch.case in ("A", "B", "trivial")
        assert patch.bad in (0, 1)
        if patch.walk:
            assert walk_vertices(fig1, patch.walk, patch.u)[-1] == patch.v


def test_figure1_singletons(fig1, fig1_x):
    partition = Partition.singletons(fig1.vertex_count)
    solution = solve_local_connectivity(fig1, fig1_x, None, partition)
    _assert_light(fig1, solution, 100)
    _assert_crossed(fig1, solution, partition)


def test_single_class_is_vacuous(fig1, fig1_x):
    partition = Partition.of([range(6)])
    solution = solve_local_connectivity(fig1, fig1_x, None, partition)
    assert solution.vacuous_crossing
    assert solution.partition.k == 6
    _assert_light(fig1, solution, 100)


def test_six_light_branch():
    graph = TwoWeightDigraph.from_triples(4, [(0, 1, 0), (1, 2, 0), (2, 3, 0), (3, 0, 0), (0, 2, 1)], 1.0, 2.0)
    x_star = FractionalCirculation(value={0: 0.5, 1: 0.5, 2: 1.0, 3: 1.0, 4: 0.5}, objective=4.0)
    partition = Partition.singletons(4)
    solution = solve_local_connectivity(graph, x_star, None, partition)
    assert solution.branch == BRANCH_SIX_LIGHT
    assert solution.lower_bound_kind == KIND_UNWEIGHTED
    assert solution.x_prime == pytest.approx({0: 1.0, 1: 1.0, 2: 1.0, 3: 1.0})
    assert solution.multiset == EdgeMultiset({0: 1, 1: 1, 2: 1, 3: 1})
    _assert_light(graph, solution, 6)
    _assert_crossed(graph, solution, partition)


def test_three_light_branch_when_no_expensive_mass(directed_cycle):
    graph = directed_cycle(5)
    x_star = solve_held_karp(graph)
    partition = Partition.of([{0, 1}, {2, 3, 4}])
    solution = solve_local_connectivity(graph, x_star, None, partition)
    assert solution.branch == BRANCH_THREE_LIGHT
    _assert_light(graph, solution, 6)
    _assert_crossed(graph, solution, partition)


def test_map_back_on_unit_cycle(directed_cycle):
    graph = directed_cycle(4)
    split = SplitGraph(graph=graph, terminals=frozenset())
    for edge in graph.edges:
        split.add_arc(SplitNode(edge.tail, FREE), SplitNode(edge.head, FREE), ArcKind.FREE_CHEAP,
                      edge.edge_id, graph.w0, 1.0)
    sink = frozenset({1, 2})
    working, reroutings, _, network = reroute(split, [sink], target=1.0, allow_debt=False)
    y_pieces = integral_circulation(network, node_caps(working, 1.0))
    multiset, y, y_sp, patches = map_back_and_patch(y_pieces, reroutings, working, graph,
                                                    [build_aux_graph(graph, sink, frozenset())])
    (patch,) = patches
    assert (patch.u, patch.v, patch.case, patch.bad) == (1, 2, "A", 0)
    assert patch.walk == [1]
    assert y == EdgeMultiset({0: 1, 2: 1, 3: 1})
    assert y_sp == {0: 1, 2: 1, 3: 1}
    assert multiset == EdgeMultiset.from_edges(range(4))


def test_debt_in_debt_out_is_not_bad(directed_cycle):
    graph = directed_cycle(4)
    split = SplitGraph(graph=graph, terminals=frozenset())
    for edge in graph.edges:
        split.add_arc(SplitNode(edge.tail, DEBT), SplitNode(edge.head, DEBT), ArcKind.DEBT_CHEAP,
                      edge.edge_id, graph.w0, 1.0)
    sink = frozenset({1, 2})
    working, reroutings, _, network = reroute(split, [sink], target=1.0)
    assert reroutings[0].is_debt
    y_pieces = integral_circulation(network, node_caps(working, 1.0))
    _, _, _, patches = map_back_and_patch(y_pieces, reroutings, working, graph,
                                          [build_aux_graph(graph, sink, frozenset())])
    (patch,) = patches
    assert patch.entering_debt and patch.leaving_debt
    assert (patch.case, patch.bad) == ("A", 0)


def test_three_light_unweighted_direct(directed_cycle, fig1):
    graph = directed_cycle(4)
    x = {e: 1.0 for e in range(4)}
    solution = three_light_unweighted(graph, x, Partition.of([{0, 1}, {2, 3}]))
    assert solution.branch == BRANCH_THREE_LIGHT
    assert solution.lower_bound.lb == pytest.approx({v: 0.5 for v in range(4)})
    assert solution.multiset == EdgeMultiset.from_edges(range(4))
    assert all(p.case == "trivial" for p in solution.patches)
    # w(F) <= 3·Σ w0·x(δ⁻(v))
    assert solution.multiset.weight(graph) <= 3 * 4.0
    with pytest.raises(InvalidInputError):
        three_light_unweighted(fig1, {6: 1.0}, figure1_partition())


def test_six_light_rejects_heavy_expensive_mass(fig1, fig1_x):
    with pytest.raises(InvalidInputError):
        six_light_via_unweighted(fig1, fig1_x, figure1_partition())


def test_partition_validation():
    with pytest.raises(InvalidInputError):
        Partition.of([{0, 1}, {1, 2}]).validate(3)
    with pytest.raises(InvalidInputError):
        Partition.of([{0}, {1}]).validate(3)
    with pytest.raises(InvalidInputError):
        Partition.of([{0, 1, 2}, set()]).validate(3)
    with pytest.raises(InvalidInputError):
        parse_partition("2: 0 1\n1: 2\n", 3)


def test_partition_and_solution_files(tmp_path, fig1, data_dir):
    partition = figure1_partition()
    path = tmp_path / "p.partition"
    write_partition(path, partition)
    assert path.read_text() == (data_dir / "figure1.partition").read_text()
    assert read_partition(path, 6) == partition

    multiset = EdgeMultiset({0: 2, 6: 1})
    solution_path = tmp_path / "solution.txt"
    write_solution(solution_path, multiset)
    assert solution_path.read_text() == "0 2\n6 1\n"
    assert read_solution(solution_path, fig1) == multiset
    solution_path.write_text("42 1\n")
    with pytest.raises(InvalidInputError):
        read_solution(solution_path, fig1)


@pytest.mark.parametrize("seed", seeds(6, 500))
def test_lightness_and_crossing_on_random_pairs(random_instance, seed):
    family = ["random-strong", "expensive-heavy", "cheap-heavy"][seed % 3]
    graph = random_instance(seed, n=7, family=family, w1=[2.0, 10.0, 1000.0][seed % 3])
    partition = random_partition(graph, ["singletons", "blocks", "scc-aligned"][seed % 3], partition_rng(seed))
    x_star = solve_held_karp(graph)
    solution = solve_local_connectivity(graph, x_star, None, partition)
    _assert_light(graph, solution, 100 if solution.branch == BRANCH_WEIGHTED else 6)
    if partition.k > 1:
        _assert_crossed(graph, solution, partition)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(20))
def test_lightness_at_larger_scale(random_instance, seed):
    graph = random_instance(seed, n=30, family=["random-strong", "expensive-heavy"][seed % 2], density=0.15)
    partition = random_partition(graph, "blocks", partition_rng(seed))
    solution = solve_local_connectivity(graph, solve_held_karp(graph), None, partition)
    _assert_light(graph, solution, 100 if solution.branch == BRANCH_WEIGHTED else 6)
    _assert_crossed(graph, solution, partition)
