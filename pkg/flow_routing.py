# Định Tuyến Luồng Tới Tập Terminal
"""
🚰 Mạng nguồn: chuyển đuôi của mọi cạnh đắt về một nguồn s, tìm tập terminal T
tối thiểu mà vẫn nhận đủ c(δ⁺(s)) = x*(E1), rồi rút luồng f bão hòa mọi cạnh đắt.

Max-flow chạy trên dung lượng nguyên dấu phẩy tĩnh (FLOW_SCALE) nên phân rã
đường/chu trình là chính xác; chỉ khi ánh xạ ngược về G mới chia lại cho FLOW_SCALE.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import networkx as nx

from config import EPS_FEAS, EPS_OBJ, FLOW_SCALE, TERMINAL_FACTOR, ZERO_CLAMP, clamp
from errors import ExpensiveMassTooSmallError, InternalInconsistencyError, InvalidInputError, SinkFlowViolationError
from graph_core import TwoWeightDigraph, format_value, in_value, sample_subsets
from held_karp import FractionalCirculation

logger = logging.getLogger(__name__)

_SUPER_SINK = "super-sink"
_SCALED_TOL = int(EPS_FEAS * FLOW_SCALE)

__all__ = [
    "NetworkArc", "SourcedCapacityNetwork", "MaxFlowResult", "SinkFlow",
    "build_sourced_network", "max_flow", "find_minimal_terminal_set", "extract_sink_flow",
    "find_sink_flow", "check_degree_condition", "sample_subsets",
    "write_terminals", "read_terminals",
]


# ========================================
# 📋 KIỂU DỮ LIỆU
# ========================================

@dataclass(frozen=True)
class NetworkArc:
    arc_id: int
    tail: int
    head: int
    capacity: float
    edge_id: Optional[int] = None   # cạnh gốc trong G

    @property
    def scaled_capacity(self) -> int:
        return int(round(max(self.capacity, 0.0) * FLOW_SCALE))


@dataclass(frozen=True)
class SourcedCapacityNetwork:
    """
    Mạng trên V ∪ {s}; nút s có chỉ số `source`. Với mạng dựng từ G,
    arc i là bản sao của cạnh i (ánh xạ ngược toàn ánh và đơn ánh).
    """

    node_count: int
    source: int
    arcs: Tuple[NetworkArc, ...]

    @property
    def vertex_nodes(self) -> List[int]:
        return [v for v in range(self.node_count) if v != self.source]

    @property
    def source_capacity(self) -> float:
        """c(δ⁺(s))."""
        return sum(a.capacity for a in self.arcs if a.tail == self.source)

    @property
    def scaled_source_capacity(self) -> int:
        return sum(a.scaled_capacity for a in self.arcs if a.tail == self.source)


@dataclass
class MaxFlowResult:
    value: float
    scaled_value: int
    scaled_flow: Dict[int, int] = field(default_factory=dict)

    @property
    def arc_flow(self) -> Dict[int, float]:
        return {arc_id: amount / FLOW_SCALE for arc_id, amount in self.scaled_flow.items()}


@dataclass(frozen=True)
class SinkFlow:
    """Luồng f trên G cùng tập terminal T và lượng vào f(δ⁻(t)) của từng terminal."""

    flow: Dict[int, float]
    terminals: FrozenSet[int]
    inflow: Dict[int, float]
    expensive_mass: float

    @classmethod
    def from_flow(cls, graph: TwoWeightDigraph, flow: Dict[int, float],
                  terminals: Iterable[int], expensive_mass: float) -> "SinkFlow":
        terminals = frozenset(terminals)
        inflow = {t: in_value(graph, flow, t) for t in sorted(terminals)}
        return cls(flow=flow, terminals=terminals, inflow=inflow, expensive_mass=expensive_mass)

    def get(self, edge_id: int) -> float:
        return self.flow.get(edge_id, 0.0)

    def check(self, graph: TwoWeightDigraph, x_star: FractionalCirculation) -> None:
        """
        Kiểm tra lại mọi bất biến của SinkFlow.

        Raises:
            SinkFlowViolationError: với tên bất biến đầu tiên bị vi phạm
        """
        for edge_id, amount in self.flow.items():
            if amount < 0:
                raise SinkFlowViolationError("nonnegative", f"f({edge_id}) = {amount} < 0")
            if amount > x_star.get(edge_id) + ZERO_CLAMP:
                raise SinkFlowViolationError("f_le_x", f"f({edge_id}) = {amount} > x*({edge_id}) = {x_star.get(edge_id)}",
                                             {"edge_id": edge_id})
        for edge_id in graph.expensive_edges():
            if abs(self.get(edge_id) - x_star.get(edge_id)) > ZERO_CLAMP:
                raise SinkFlowViolationError("saturates_expensive", f"f({edge_id}) ≠ x*({edge_id})",
                                             {"edge_id": edge_id})
        for t in sorted(self.terminals):
            cheap_out = sum(self.get(e) for e in graph.out_edges(t) if not graph.edges[e].is_expensive)
            if cheap_out > 0:
                raise SinkFlowViolationError("no_cheap_outflow", f"terminal {t} có luồng rẻ đi ra {cheap_out}",
                                             {"terminal": t})
            if not in_value(graph, self.flow, t) > 0:
                raise SinkFlowViolationError("positive_inflow", f"terminal {t} không nhận luồng", {"terminal": t})
        if len(self.terminals) > TERMINAL_FACTOR * self.expensive_mass + EPS_FEAS:
            raise SinkFlowViolationError("terminal_bound", f"|T| = {len(self.terminals)} > 8·x*(E1) = "
                                                           f"{TERMINAL_FACTOR * self.expensive_mass:.9g}")
        total = sum(in_value(graph, self.flow, t) for t in self.terminals)
        if abs(total - self.expensive_mass) > EPS_OBJ:
            raise SinkFlowViolationError("inflow_total", f"Σ f(δ⁻(t)) = {total:.12g} ≠ x*(E1) = {self.expensive_mass:.12g}")


# ========================================
# 🏗️ MẠNG NGUỒN
# ========================================

def build_sourced_network(graph: TwoWeightDigraph, x_star: FractionalCirculation) -> SourcedCapacityNetwork:
    """
    Dựng mạng nguồn: cạnh đắt (u, v) trở thành arc (s, v), dung lượng = x*.

    Raises:
        ExpensiveMassTooSmallError: nếu x*(E1) < 1 (nhánh 6-light xử lý trường hợp này)
    """
    mass = x_star.expensive_mass(graph)
    if mass < 1.0 - EPS_FEAS:
        raise ExpensiveMassTooSmallError(mass)
    source = graph.vertex_count
    arcs = tuple(
        NetworkArc(arc_id=e.edge_id, tail=source if e.is_expensive else e.tail, head=e.head,
                   capacity=x_star.get(e.edge_id), edge_id=e.edge_id)
        for e in graph.edges
    )
    logger.debug(f"🏗️ Mạng nguồn: {len(arcs)} arc, c(δ⁺(s)) = {mass:.9g}")
    return SourcedCapacityNetwork(node_count=graph.vertex_count + 1, source=source, arcs=arcs)


def check_degree_condition(network: SourcedCapacityNetwork, subset: Iterable[int]) -> Tuple[float, float, bool]:
    """
    Điều kiện c(δ⁻(S)) ≥ max{1, c(δ⁺(S))} cho một S ⊆ V khác rỗng.

    Returns:
        (c(δ⁻(S)), c(δ⁺(S)), thỏa hay không trong dung sai)
    """
    members = frozenset(subset)
    if not members or network.source in members:
        raise InvalidInputError("S phải là tập con khác rỗng của V (không chứa s)")
    incoming = sum(a.capacity for a in network.arcs if a.head in members and a.tail not in members)
    outgoing = sum(a.capacity for a in network.arcs if a.tail in members and a.head not in members)
    return incoming, outgoing, incoming >= max(1.0, outgoing) - EPS_FEAS


# ========================================
# 🌊 MAX-FLOW
# ========================================

def max_flow(network: SourcedCapacityNetwork, source: int, sink_set: Iterable[int]) -> MaxFlowResult:
    """
    Max-flow từ `source` tới tập đích (qua một siêu đích), dung lượng nguyên hóa.

    Luồng trên các arc song song được chia lại theo thứ tự arc id.
    """
    sinks = sorted(set(sink_set))
    if not sinks:
        raise InvalidInputError("tập đích rỗng")
    if source in sinks:
        raise InvalidInputError("nguồn không được nằm trong tập đích")
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(network.node_count))
    digraph.add_node(_SUPER_SINK)
    parallel: Dict[Tuple[int, int], List[NetworkArc]] = {}
    for arc in network.arcs:
        parallel.setdefault((arc.tail, arc.head), []).append(arc)
    for (tail, head), group in parallel.items():
        digraph.add_edge(tail, head, capacity=sum(a.scaled_capacity for a in group))
    for t in sinks:
        digraph.add_edge(t, _SUPER_SINK)     # không có thuộc tính capacity = vô hạn

    scaled_value, flow_dict = nx.maximum_flow(digraph, source, _SUPER_SINK)
    scaled_flow: Dict[int, int] = {}
    for (tail, head), group in parallel.items():
        remaining = flow_dict[tail][head]
        for arc in sorted(group, key=lambda a: a.arc_id):
            amount = min(remaining, arc.scaled_capacity)
            if amount:
                scaled_flow[arc.arc_id] = amount
            remaining -= amount
    return MaxFlowResult(value=scaled_value / FLOW_SCALE, scaled_value=scaled_value, scaled_flow=scaled_flow)


def find_minimal_terminal_set(network: SourcedCapacityNetwork, order: str = "ascending") -> FrozenSet[int]:
    """
    Bắt đầu từ T = V, thử bỏ từng đỉnh (tăng dần theo id, hoặc giảm dần) và giữ lại
    việc bỏ nếu max-flow s→T vẫn đạt c(δ⁺(s)) trong dung sai 1e-7. Mỗi lần thử
    tính lại max-flow từ đầu.

    Raises:
        InternalInconsistencyError: nếu ngay cả T = V cũng không nhận đủ luồng,
            hoặc |T| > 8·c(δ⁺(s))
    """
    if order not in ("ascending", "descending"):
        raise InvalidInputError(f"order phải là 'ascending' hoặc 'descending', nhận được {order!r}")
    target = network.scaled_source_capacity
    terminals = set(network.vertex_nodes)
    full = max_flow(network, network.source, terminals)
    if full.scaled_value < target - _SCALED_TOL:
        raise InternalInconsistencyError(
            f"max_flow(s→V) = {full.value:.12g} < c(δ⁺(s)) = {network.source_capacity:.12g}",
            {"max_flow": full.value, "source_capacity": network.source_capacity},
        )

    candidates = sorted(terminals, reverse=(order == "descending"))
    for v in candidates:
        reduced = terminals - {v}
        if not reduced:
            continue
        if max_flow(network, network.source, reduced).scaled_value >= target - _SCALED_TOL:
            terminals = reduced

    bound = TERMINAL_FACTOR * network.source_capacity
    if len(terminals) > bound + EPS_FEAS:
        raise InternalInconsistencyError(
            f"|T| = {len(terminals)} vượt 8·c(δ⁺(s)) = {bound:.9g}",
            {"terminals": sorted(terminals), "source_capacity": network.source_capacity},
        )
    logger.info(f"✅ Tập terminal tối thiểu: {sorted(terminals)} (|T|={len(terminals)}, giới hạn {bound:.6g})")
    return frozenset(terminals)


# ========================================
# 🧵 RÚT LUỒNG f
# ========================================

def _decompose_truncated(network: SourcedCapacityNetwork, residual: Dict[int, int],
                         terminals: FrozenSet[int]) -> Dict[int, int]:
    """
    Phân rã luồng nguyên: đi từ s theo arc có phần dư lớn nhất (hòa → id nhỏ),
    dừng ở terminal đầu tiên; chu trình gặp trên đường bị cắt bỏ.
    """
    out_arcs: Dict[int, List[NetworkArc]] = {}
    for arc in network.arcs:
        out_arcs.setdefault(arc.tail, []).append(arc)

    def next_arc(node: int) -> Optional[NetworkArc]:
        best = None
        for arc in out_arcs.get(node, []):
            amount = residual.get(arc.arc_id, 0)
            if amount > 0 and (best is None or amount > residual[best.arc_id]):
                best = arc
        return best

    kept: Dict[int, int] = {}
    guard = 0
    while next_arc(network.source) is not None:
        guard += 1
        if guard > 4 * len(network.arcs) + 4:
            raise InternalInconsistencyError("phân rã luồng không hội tụ")
        nodes = [network.source]
        path: List[NetworkArc] = []
        while True:
            arc = next_arc(nodes[-1])
            if arc is None:
                raise InternalInconsistencyError(f"phân rã luồng kẹt tại nút {nodes[-1]}",
                                                 {"node": nodes[-1]})
            if arc.head in nodes:
                # chu trình: trừ nút cổ chai rồi quay lui về đỉnh lặp
                start = nodes.index(arc.head)
                cycle = path[start:] + [arc]
                bottleneck = min(residual[a.arc_id] for a in cycle)
                for a in cycle:
                    residual[a.arc_id] -= bottleneck
                del path[start:]
                del nodes[start + 1:]
                continue
            path.append(arc)
            nodes.append(arc.head)
            if arc.head in terminals:
                break
        bottleneck = min(residual[a.arc_id] for a in path)
        for a in path:
            residual[a.arc_id] -= bottleneck
            kept[a.arc_id] = kept.get(a.arc_id, 0) + bottleneck
    return kept


def extract_sink_flow(network: SourcedCapacityNetwork, terminals: Iterable[int],
                      graph: TwoWeightDigraph, x_star: FractionalCirculation) -> SinkFlow:
    """
    Rút f: max-flow s→T, phân rã thành đường (bỏ chu trình, cắt ở terminal đầu tiên),
    ánh xạ ngược về G. Cạnh đắt được gán đúng f(e) = x*_e.

    Raises:
        InternalInconsistencyError: nếu phần dư của phân rã vượt 1e-6
        SinkFlowViolationError: nếu f vi phạm bất biến
    """
    terminals = frozenset(terminals)
    flow_result = max_flow(network, network.source, terminals)
    kept = _decompose_truncated(network, dict(flow_result.scaled_flow), terminals)

    shortfall = (network.scaled_source_capacity - sum(kept.get(a.arc_id, 0) for a in network.arcs
                                                     if a.tail == network.source)) / FLOW_SCALE
    if shortfall > EPS_OBJ:
        raise InternalInconsistencyError(f"phân rã luồng thiếu {shortfall:.3g} so với c(δ⁺(s))",
                                         {"shortfall": shortfall})

    flow: Dict[int, float] = {}
    for edge in graph.edges:
        if edge.is_expensive:
            amount = x_star.get(edge.edge_id)
        else:
            amount = min(kept.get(edge.edge_id, 0) / FLOW_SCALE, x_star.get(edge.edge_id))
        amount = clamp(amount)
        if amount > 0:
            flow[edge.edge_id] = amount

    sink_flow = SinkFlow.from_flow(graph, flow, terminals, x_star.expensive_mass(graph))
    sink_flow.check(graph, x_star)
    logger.info(f"📊 Luồng f: {len(flow)} cạnh dương, lượng vào terminal "
                f"{ {t: round(v, 9) for t, v in sink_flow.inflow.items()} }")
    return sink_flow


def find_sink_flow(graph: TwoWeightDigraph, x_star: FractionalCirculation, order: str = "ascending") -> SinkFlow:
    """Mạng nguồn → T tối thiểu → f, gói gọn một lời gọi."""
    network = build_sourced_network(graph, x_star)
    terminals = find_minimal_terminal_set(network, order=order)
    return extract_sink_flow(network, terminals, graph, x_star)


# ========================================
# 📄 FILE TERMINAL
# ========================================

def render_terminals(sink_flow: SinkFlow) -> str:
    lines = ["T " + " ".join(str(t) for t in sorted(sink_flow.terminals))]
    lines += [f"f {edge_id} {format_value(amount)}" for edge_id, amount in sorted(sink_flow.flow.items())]
    return "\n".join(lines) + "\n"


def write_terminals(path: Union[str, Path], sink_flow: SinkFlow) -> None:
    Path(path).write_text(render_terminals(sink_flow))


def read_terminals(path: Union[str, Path], graph: TwoWeightDigraph, x_star: FractionalCirculation) -> SinkFlow:
    terminals: Optional[List[int]] = None
    flow: Dict[int, float] = {}
    for number, raw in enumerate(Path(path).read_text().splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            if parts[0] == "T":
                terminals = [int(p) for p in parts[1:]]
            elif parts[0] == "f" and len(parts) == 3:
                flow[int(parts[1])] = float(parts[2])
            else:
                raise InvalidInputError(f"{path}:{number}: dòng không hợp lệ")
        except ValueError:
            raise InvalidInputError(f"{path}:{number}: giá trị không phải số")
    if terminals is None:
        raise InvalidInputError(f"{path}: thiếu dòng 'T ...'")
    if any(not 0 <= t < graph.vertex_count for t in terminals):
        raise InvalidInputError(f"{path}: terminal ngoài [0, {graph.vertex_count})")
    if any(not 0 <= e < graph.edge_count for e in flow):
        raise InvalidInputError(f"{path}: edge id ngoài đồ thị")
    return SinkFlow.from_flow(graph, flow, terminals, x_star.expensive_mass(graph))
