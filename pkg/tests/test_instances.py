"""Kiểm thử bộ sinh instance và phân hoạch ngẫu nhiên."""

import pytest

from errors import InvalidInputError
from graph_core import is_strongly_connected, render_graph
from instances import (FAMILIES, figure1_fractional_solution, figure1_graph, figure1_partition, generate,
                       partition_rng, random_partition)


def test_single_gadget_is_figure1():
    assert generate("figure1-gadgets", 6, 0.0, 1.0, 2.0, seed=0) == figure1_graph()


def test_gadgets_are_strongly_connected():
    graph = generate("figure1-gadgets", 18, 0.0, 1.0, 2.0, seed=0)
    assert graph.vertex_count == 18
    assert graph.edge_count == 3 * 12 + 3
    assert is_strongly_connected(graph)


@pytest.mark.parametrize("family", [f for f in FAMILIES if f != "figure1-gadgets"])
def test_generated_graphs_are_strongly_connected(family):
    for seed in range(5):
        graph = generate(family, 9, 0.25, 1.0, 10.0, seed)
        assert is_strongly_connected(graph)


def test_generation_is_deterministic():
    first = generate("random-strong", 5, 0.5, 1.0, 2.0, seed=7)
    second = generate("random-strong", 5, 0.5, 1.0, 2.0, seed=7)
    assert render_graph(first) == render_graph(second)
    assert render_graph(first) != render_graph(generate("random-strong", 5, 0.5, 1.0, 2.0, seed=8))


def test_cheap_heavy_without_expensive_share():
    graph = generate("cheap-heavy", 8, 0.5, 1.0, 2.0, seed=3, expensive_share=0.0)
    assert graph.expensive_edges() == []


def test_expensive_heavy_plants_expensive_cycle():
    graph = generate("expensive-heavy", 6, 0.0, 1.0, 2.0, seed=1)
    assert graph.edge_count == 6
    assert graph.cheap_edges() == []


@pytest.mark.parametrize("kwargs", [
    dict(family="unknown", n=4, density=0.1, w0=1.0, w1=2.0, seed=0),
    dict(family="random-strong", n=1, density=0.1, w0=1.0, w1=2.0, seed=0),
    dict(family="random-strong", n=4, density=1.5, w0=1.0, w1=2.0, seed=0),
    dict(family="random-strong", n=4, density=0.1, w0=2.0, w1=2.0, seed=0),
    dict(family="figure1-gadgets", n=7, density=0.0, w0=1.0, w1=2.0, seed=0),
])
def test_invalid_parameters(kwargs):
    with pytest.raises(InvalidInputError):
        generate(**kwargs)


def test_figure1_fixtures():
    graph = figure1_graph()
    x_star = figure1_fractional_solution(graph)
    assert x_star.objective == pytest.approx(8.0)
    assert x_star.expensive_mass(graph) == pytest.approx(2.0)
    assert figure1_partition().k == 2


@pytest.mark.parametrize("kind", ["singletons", "blocks", "scc-aligned"])
def test_random_partitions_are_valid(kind):
    graph = generate("random-strong", 10, 0.2, 1.0, 10.0, seed=4)
    partition = random_partition(graph, kind, partition_rng(4))
    partition.validate(graph.vertex_count)
    if kind == "singletons":
        assert partition.k == 10
    else:
        assert 1 <= partition.k <= 5


def test_scc_aligned_respects_cheap_components():
    graph = generate("figure1-gadgets", 12, 0.0, 1.0, 2.0, seed=0)
    partition = random_partition(graph, "scc-aligned", partition_rng(2))
    for members in partition.classes:
        for offset in (0, 3, 6, 9):
            triangle = {offset, offset + 1, offset + 2}
            assert triangle <= members or not triangle & members


def test_unknown_partition_kind():
    with pytest.raises(InvalidInputError):
        random_partition(figure1_graph(), "stripes", partition_rng(0))
