# Lõi Đồ Thị Có Hướng Hai Trọng Số
"""
🧱 Biểu diễn đa đồ thị có hướng với hai lớp cạnh (rẻ w0 / đắt w1),
các lát cắt δ⁺/δ⁻, thành phần liên thông mạnh/yếu và đọc/ghi định dạng văn bản.

Định dạng file đồ thị:
    # dòng chú thích được bỏ qua
    n m w0 w1
    tail head class      (m dòng, class ∈ {0, 1})
"""

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np

from errors import InvalidInputError

logger = logging.getLogger(__name__)

OUT = "out"
IN = "in"


class WeightClass(IntEnum):
    CHEAP = 0
    EXPENSIVE = 1


@dataclass(frozen=True)
class Edge:
    edge_id: int
    tail: int
    head: int
    weight_class: WeightClass

    @property
    def is_expensive(self) -> bool:
        return self.weight_class == WeightClass.EXPENSIVE


@dataclass(frozen=True)
class TwoWeightDigraph:
    """
    Đa đồ thị có hướng bất biến; trọng số chỉ lưu một lần ở mức đồ thị (w0, w1).

    Edge id là số nguyên liên tiếp theo thứ tự nhập. Tính liên thông mạnh
    không bị ép ở đây (dùng `is_strongly_connected`), vì các phép thử SCC cần
    cả đồ thị không liên thông; LP kiểm tra nó trước khi giải.
    """

    vertex_count: int
    edges: Tuple[Edge, ...]
    w0: float
    w1: float

    def __post_init__(self):
        if self.vertex_count < 1:
            raise InvalidInputError(f"vertex_count phải dương, nhận được {self.vertex_count}")
        if not (0 <= self.w0 < self.w1):
            raise InvalidInputError(f"cần 0 <= w0 < w1, nhận được w0={self.w0}, w1={self.w1}")
        for index, edge in enumerate(self.edges):
            if edge.edge_id != index:
                raise InvalidInputError(f"edge id phải liên tiếp từ 0: vị trí {index} có id {edge.edge_id}")
            for endpoint in (edge.tail, edge.head):
                if not 0 <= endpoint < self.vertex_count:
                    raise InvalidInputError(f"cạnh {edge.edge_id}: đỉnh {endpoint} ngoài [0, {self.vertex_count})")
            if edge.tail == edge.head:
                raise InvalidInputError(f"cạnh {edge.edge_id} là khuyên tại đỉnh {edge.tail}")

    @classmethod
    def from_triples(cls, vertex_count: int, triples: Iterable[Tuple[int, int, int]],
                     w0: float, w1: float) -> "TwoWeightDigraph":
        """Tạo đồ thị từ các bộ (tail, head, class) theo thứ tự nhập."""
        edges = tuple(
            Edge(edge_id=i, tail=int(t), head=int(h), weight_class=WeightClass(int(c)))
            for i, (t, h, c) in enumerate(triples)
        )
        return cls(vertex_count=vertex_count, edges=edges, w0=float(w0), w1=float(w1))

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def weight(self, edge_id: int) -> float:
        return self.w1 if self.edges[edge_id].is_expensive else self.w0

    @cached_property
    def _out_lists(self) -> Tuple[Tuple[int, ...], ...]:
        lists: List[List[int]] = [[] for _ in self.vertices]
        for edge in self.edges:
            lists[edge.tail].append(edge.edge_id)
        return tuple(tuple(ids) for ids in lists)

    @cached_property
    def _in_lists(self) -> Tuple[Tuple[int, ...], ...]:
        lists: List[List[int]] = [[] for _ in self.vertices]
        for edge in self.edges:
            lists[edge.head].append(edge.edge_id)
        return tuple(tuple(ids) for ids in lists)

    def out_edges(self, vertex: int) -> Tuple[int, ...]:
        return self._out_lists[vertex]

    def in_edges(self, vertex: int) -> Tuple[int, ...]:
        return self._in_lists[vertex]

    def cheap_edges(self) -> List[int]:
        return [e.edge_id for e in self.edges if not e.is_expensive]

    def expensive_edges(self) -> List[int]:
        return [e.edge_id for e in self.edges if e.is_expensive]

    def with_extra_edge(self, tail: int, head: int, weight_class: WeightClass) -> "TwoWeightDigraph":
        extra = Edge(edge_id=len(self.edges), tail=tail, head=head, weight_class=weight_class)
        return TwoWeightDigraph(self.vertex_count, self.edges + (extra,), self.w0, self.w1)

    def to_networkx(self) -> nx.MultiDiGraph:
        """MultiDiGraph có key = edge id, thuộc tính weight và weight_class."""
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            graph.add_edge(edge.tail, edge.head, key=edge.edge_id,
                           weight=self.weight(edge.edge_id), weight_class=int(edge.weight_class))
        return graph


@dataclass
class EdgeMultiset:
    """Đa tập cạnh F: edge id → bội số nguyên không âm (bội 0 không được lưu)."""

    multiplicity: Dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        for edge_id, count in list(self.multiplicity.items()):
            if count < 0:
                raise InvalidInputError(f"bội số âm cho cạnh {edge_id}: {count}")
            if count == 0:
                del self.multiplicity[edge_id]

    @classmethod
    def from_edges(cls, edge_ids: Iterable[int]) -> "EdgeMultiset":
        result = cls()
        for edge_id in edge_ids:
            result.add_edge(edge_id)
        return result

    def add_edge(self, edge_id: int, count: int = 1) -> None:
        if count < 0:
            raise InvalidInputError(f"bội số âm cho cạnh {edge_id}: {count}")
        if count:
            self.multiplicity[edge_id] = self.multiplicity.get(edge_id, 0) + count

    def add(self, other: "EdgeMultiset") -> "EdgeMultiset":
        merged = EdgeMultiset(dict(self.multiplicity))
        for edge_id, count in other.multiplicity.items():
            merged.add_edge(edge_id, count)
        return merged

    def get(self, edge_id: int) -> int:
        return self.multiplicity.get(edge_id, 0)

    def support(self) -> List[int]:
        return sorted(self.multiplicity)

    def total(self) -> int:
        return sum(self.multiplicity.values())

    def weight(self, graph: TwoWeightDigraph) -> float:
        return sum(count * graph.weight(edge_id) for edge_id, count in self.multiplicity.items())

    def items(self) -> List[Tuple[int, int]]:
        return sorted(self.multiplicity.items())


@dataclass(frozen=True)
class CutSpec:
    member_set: FrozenSet[int]

    @classmethod
    def of(cls, members: Iterable[int], vertex_count: int) -> "CutSpec":
        cut = cls(frozenset(int(v) for v in members))
        cut.validate(vertex_count)
        return cut

    def validate(self, vertex_count: int) -> None:
        if not self.member_set:
            raise InvalidInputError("lát cắt rỗng: cần ∅ ≠ S")
        if any(not 0 <= v < vertex_count for v in self.member_set):
            raise InvalidInputError(f"lát cắt chứa đỉnh ngoài [0, {vertex_count})")
        if len(self.member_set) >= vertex_count:
            raise InvalidInputError("lát cắt bằng toàn bộ V: cần S ⊊ V")

    def complement(self, vertex_count: int) -> "CutSpec":
        return CutSpec(frozenset(range(vertex_count)) - self.member_set)


@dataclass
class SccDecomposition:
    """Phân hoạch thành SCC cùng DAG ngưng tụ; component i được sắp theo đỉnh nhỏ nhất."""

    components: List[FrozenSet[int]]
    component_of: Dict[int, int]
    condensation_edges: Set[Tuple[int, int]]

    @property
    def sinks(self) -> List[int]:
        has_out = {i for i, _ in self.condensation_edges}
        return [i for i in range(len(self.components)) if i not in has_out]


@dataclass
class WeakComponent:
    vertices: FrozenSet[int]
    multiset: EdgeMultiset


# ========================================
# ✂️ LÁT CẮT VÀ CÂN BẰNG
# ========================================

def delta(graph: TwoWeightDigraph, cut: Union[CutSpec, Iterable[int]], direction: str = OUT) -> FrozenSet[int]:
    """
    δ⁺(S) (direction="out") hoặc δ⁻(S) (direction="in") dưới dạng tập edge id.

    Raises:
        InvalidInputError: nếu S rỗng hoặc bằng V, hoặc direction không hợp lệ
    """
    if not isinstance(cut, CutSpec):
        cut = CutSpec(frozenset(cut))
    cut.validate(graph.vertex_count)
    members = cut.member_set
    if direction == OUT:
        return frozenset(e.edge_id for e in graph.edges if e.tail in members and e.head not in members)
    if direction == IN:
        return frozenset(e.edge_id for e in graph.edges if e.head in members and e.tail not in members)
    raise InvalidInputError(f"direction phải là 'out' hoặc 'in', nhận được {direction!r}")


def vector_cut_value(graph: TwoWeightDigraph, x: Mapping[int, float],
                     cut: Union[CutSpec, Iterable[int]], direction: str = OUT) -> float:
    """x(δ^±(S)) cho một vector cạnh x (thiếu khóa = 0)."""
    return sum(x.get(edge_id, 0.0) for edge_id in delta(graph, cut, direction))


def vertex_imbalance(graph: TwoWeightDigraph, x: Mapping[int, float]) -> List[float]:
    """x(δ⁻(v)) − x(δ⁺(v)) cho mọi đỉnh v."""
    imbalance = [0.0] * graph.vertex_count
    for edge in graph.edges:
        value = x.get(edge.edge_id, 0.0)
        imbalance[edge.head] += value
        imbalance[edge.tail] -= value
    return imbalance


def in_value(graph: TwoWeightDigraph, x: Mapping[int, float], vertex: int) -> float:
    return sum(x.get(edge_id, 0.0) for edge_id in graph.in_edges(vertex))


def balance_by_vertex(graph: TwoWeightDigraph, multiset: EdgeMultiset) -> Dict[int, bool]:
    """Với mỗi đỉnh: True nếu bậc vào bằng bậc ra trong F."""
    degree = [0] * graph.vertex_count
    for edge_id, count in multiset.multiplicity.items():
        edge = graph.edges[edge_id]
        degree[edge.head] += count
        degree[edge.tail] -= count
    return {v: degree[v] == 0 for v in graph.vertices}


def is_eulerian(graph: TwoWeightDigraph, multiset: EdgeMultiset) -> bool:
    return all(balance_by_vertex(graph, multiset).values())


def sample_subsets(vertex_count: int, count: int, rng: np.random.Generator,
                   proper: bool = True) -> List[FrozenSet[int]]:
    """
    Lấy mẫu các tập đỉnh khác rỗng (mỗi đỉnh vào với xác suất 1/2).

    Args:
        proper: True thì loại cả S = V (chỉ lấy lát cắt hợp lệ)
    """
    if proper and vertex_count < 2:
        return []
    subsets = []
    while len(subsets) < count:
        mask = rng.random(vertex_count) < 0.5
        size = int(mask.sum())
        if size == 0 or (proper and size == vertex_count):
            continue
        subsets.append(frozenset(int(v) for v in np.flatnonzero(mask)))
    return subsets


# ========================================
# 🔗 THÀNH PHẦN LIÊN THÔNG
# ========================================

def scc_decomposition(vertices: Iterable[int], arcs: Iterable[Tuple[int, int]]) -> SccDecomposition:
    """SCC của đồ thị (vertices, arcs) bất kỳ; dùng chung cho G và đồ thị phụ trợ."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(sorted(vertices))
    digraph.add_edges_from(arcs)
    components = sorted((frozenset(c) for c in nx.strongly_connected_components(digraph)), key=min)
    component_of = {v: i for i, comp in enumerate(components) for v in comp}
    condensation_edges = {
        (component_of[u], component_of[v]) for u, v in digraph.edges()
        if component_of[u] != component_of[v]
    }
    return SccDecomposition(components, component_of, condensation_edges)


def strongly_connected_components(graph: TwoWeightDigraph, vertex_subset: Optional[Iterable[int]] = None,
                                  edge_subset: Optional[Iterable[int]] = None) -> SccDecomposition:
    """
    SCC của (vertex_subset, edge_subset); mặc định là toàn bộ G.

    Raises:
        InvalidInputError: nếu một cạnh của edge_subset có đầu mút ngoài vertex_subset
    """
    vertices = set(graph.vertices if vertex_subset is None else vertex_subset)
    edge_ids = [e.edge_id for e in graph.edges] if edge_subset is None else list(edge_subset)
    arcs = []
    for edge_id in edge_ids:
        edge = graph.edges[edge_id]
        if edge.tail not in vertices or edge.head not in vertices:
            if edge_subset is None:
                continue
            raise InvalidInputError(f"cạnh {edge_id} có đầu mút ngoài tập đỉnh đã cho")
        arcs.append((edge.tail, edge.head))
    return scc_decomposition(vertices, arcs)


def is_strongly_connected(graph: TwoWeightDigraph) -> bool:
    return len(strongly_connected_components(graph).components) == 1


def weakly_connected_components(graph: TwoWeightDigraph, multiset: EdgeMultiset) -> List[WeakComponent]:
    """Thành phần liên thông yếu của (V, F); đỉnh không có cạnh là thành phần đơn."""
    undirected = nx.Graph()
    undirected.add_nodes_from(graph.vertices)
    for edge_id in multiset.support():
        edge = graph.edges[edge_id]
        undirected.add_edge(edge.tail, edge.head)
    result = []
    for vertices in sorted((frozenset(c) for c in nx.connected_components(undirected)), key=min):
        restricted = EdgeMultiset({
            edge_id: count for edge_id, count in multiset.multiplicity.items()
            if graph.edges[edge_id].tail in vertices
        })
        result.append(WeakComponent(vertices=vertices, multiset=restricted))
    return result


# ========================================
# 📄 ĐỌC / GHI FILE
# ========================================

def format_value(value: float) -> str:
    """Định dạng số ổn định từng byte: số nguyên in không có phần thập phân."""
    value = float(value)
    if value == 0:
        return "0"
    return f"{value:.17g}"


def _content_lines(text: str) -> List[Tuple[int, List[str]]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((number, stripped.split()))
    return lines


def parse_graph(text: str) -> TwoWeightDigraph:
    """
    Đọc đồ thị từ văn bản định dạng `n m w0 w1` + m dòng `tail head class`.

    Raises:
        InvalidInputError: kèm số dòng khi định dạng sai
    """
    lines = _content_lines(text)
    if not lines:
        raise InvalidInputError("file đồ thị rỗng")
    number, header = lines[0]
    if len(header) != 4:
        raise InvalidInputError(f"dòng {number}: cần 'n m w0 w1'")
    try:
        n, m = int(header[0]), int(header[1])
        w0, w1 = float(header[2]), float(header[3])
    except ValueError:
        raise InvalidInputError(f"dòng {number}: tiêu đề không phải số")
    body = lines[1:]
    if len(body) != m:
        raise InvalidInputError(f"tiêu đề khai báo {m} cạnh nhưng có {len(body)} dòng cạnh")
    triples = []
    for number, parts in body:
        if len(parts) != 3:
            raise InvalidInputError(f"dòng {number}: cần 'tail head class'")
        try:
            tail, head, klass = (int(p) for p in parts)
        except ValueError:
            raise InvalidInputError(f"dòng {number}: giá trị không phải số nguyên")
        if klass not in (0, 1):
            raise InvalidInputError(f"dòng {number}: class phải là 0 hoặc 1")
        triples.append((tail, head, klass))
    return TwoWeightDigraph.from_triples(n, triples, w0, w1)


def render_graph(graph: TwoWeightDigraph) -> str:
    lines = [f"{graph.vertex_count} {graph.edge_count} {format_value(graph.w0)} {format_value(graph.w1)}"]
    lines += [f"{e.tail} {e.head} {int(e.weight_class)}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def read_graph(path: Union[str, Path]) -> TwoWeightDigraph:
    graph = parse_graph(Path(path).read_text())
    logger.debug(f"📄 Đã đọc đồ thị {path}: n={graph.vertex_count}, m={graph.edge_count}")
    return graph


def write_graph(graph: TwoWeightDigraph, path: Union[str, Path]) -> None:
    Path(path).write_text(render_graph(graph))


def edge_values_sorted(values: Mapping[int, float]) -> Sequence[Tuple[int, float]]:
    return sorted(values.items())
