# Định Tuyến Lại Qua Đỉnh Phụ A_i
"""
🔁 Phần luồng của thuật toán phân hoạch:

    1. chọn X_i^- (nửa đơn vị đi vào U_i^sp, cùng mức nợ/tự do), tách tối đa một arc
    2. phân rã x_sp thành chu trình đơn
    3. suy ra X_i^+ và luồng nối g_i từ các chu trình đi vào qua X_i^-
    4. dựng mạng định tuyến lại: arc vào trỏ tới A_i, arc ra xuất phát từ A_i, bỏ g_i
    5. làm tròn thành lưu thông nguyên y_sp'' có cận dưới/trên và giới hạn bậc vào

Mạng định tuyến lại được biểu diễn bằng các "mảnh": (arc gốc, đuôi, đầu). Một arc
có thể bị chuyển hướng ở cả hai đầu (A_j → A_i), và x_sp'' là tổng các chu trình
đã sửa nên luôn là một lưu thông.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Tuple

import networkx as nx

from config import EPS_FEAS, EPS_OBJ, ZERO_CLAMP, ceil_nudged
from errors import InternalInconsistencyError
from split_graph import AUX, DEBT, FREE, SplitArc, SplitGraph, SplitNode

logger = logging.getLogger(__name__)

HALF = 0.5
_SUPER_SOURCE = "super-source"
_SUPER_SINK = "super-sink"


# ========================================
# 📋 KIỂU DỮ LIỆU
# ========================================

class Piece(NamedTuple):
    """Một arc của G_sp' : arc gốc trong G_sp cùng hai đầu mút (có thể là A_i)."""

    arc_id: int
    tail: SplitNode
    head: SplitNode


@dataclass(frozen=True)
class FlowCycle:
    arcs: Tuple[int, ...]
    mass: float


@dataclass(frozen=True)
class Crossing:
    """Một lần chu trình đi vào U_i^sp qua X_i^- (vị trí entry) và rời ra ở vị trí exit."""

    cycle_index: int
    entry_position: int
    exit_position: int
    mass: float

    def segment(self, cycle_length: int) -> List[int]:
        positions = []
        p = (self.entry_position + 1) % cycle_length
        while p != self.exit_position:
            positions.append(p)
            p = (p + 1) % cycle_length
        return positions


@dataclass
class Rerouting:
    class_index: int
    sink_vertices: FrozenSet[int]
    level: int
    incoming: Dict[int, float] = field(default_factory=dict)     # X_i^-
    outgoing: Dict[int, float] = field(default_factory=dict)     # X_i^+
    connector: Dict[int, float] = field(default_factory=dict)    # g_i
    crossings: List[Crossing] = field(default_factory=list)

    @property
    def aux_node(self) -> SplitNode:
        return SplitNode(self.class_index, AUX)

    @property
    def is_debt(self) -> bool:
        return self.level == DEBT

    def contains(self, node: SplitNode) -> bool:
        return node.level != AUX and node.vertex in self.sink_vertices


@dataclass
class ReroutedNetwork:
    pieces: Dict[Piece, float]
    aux_nodes: List[SplitNode]

    def imbalance(self) -> Dict[SplitNode, float]:
        balance: Dict[SplitNode, float] = {}
        for piece, value in self.pieces.items():
            balance[piece.head] = balance.get(piece.head, 0.0) + value
            balance[piece.tail] = balance.get(piece.tail, 0.0) - value
        return balance

    def in_value(self, node: SplitNode) -> float:
        return sum(v for p, v in self.pieces.items() if p.head == node)


# ========================================
# 1️⃣ CHỌN X_i^-
# ========================================

def boundary_in(split: SplitGraph, sink_vertices: FrozenSet[int]) -> List[SplitArc]:
    """δ⁻(U^sp): arc có đầu trong U và đuôi ngoài U (arc xả nợ nằm bên trong)."""
    return [a for a in split.arcs if a.head.vertex in sink_vertices and a.tail.vertex not in sink_vertices]


def select_incoming_half(split: SplitGraph, sink_vertices: FrozenSet[int], class_index: int,
                         target: float = HALF, allow_debt: bool = True) -> Rerouting:
    """
    Chọn X_i^- ⊆ δ⁻(U_i^sp) đồng nhất mức với khối lượng đúng `target`.

    Mức được chọn là mức có tổng x_sp đi vào lớn hơn (hòa → tự do). Các arc
    được lấy theo thứ tự id; arc cuối cùng bị tách trong `split` nếu cần.

    Raises:
        InternalInconsistencyError: nếu cả hai mức đều không đạt target − 1e-7
    """
    incoming = boundary_in(split, sink_vertices)
    mass = {FREE: 0.0, DEBT: 0.0}
    for arc in incoming:
        mass[arc.head.level] += arc.value
    level = DEBT if allow_debt and mass[DEBT] > mass[FREE] else FREE
    if mass[level] < target - EPS_FEAS:
        raise InternalInconsistencyError(
            f"lớp {class_index}: không mức nào đạt {target} (tự do {mass[FREE]:.9g}, nợ {mass[DEBT]:.9g})",
            {"class": class_index, "free_mass": mass[FREE], "debt_mass": mass[DEBT],
             "sink_vertices": sorted(sink_vertices)},
        )

    rerouting = Rerouting(class_index=class_index, sink_vertices=sink_vertices, level=level)
    need = target
    for arc in sorted((a for a in incoming if a.head.level == level), key=lambda a: a.arc_id):
        if need <= ZERO_CLAMP:
            break
        if arc.value <= need + ZERO_CLAMP:
            rerouting.incoming[arc.arc_id] = arc.value
            need -= arc.value
        else:
            split.split_arc(arc.arc_id, need)
            rerouting.incoming[arc.arc_id] = need
            need = 0.0
    logger.debug(f"1️⃣ Lớp {class_index}: X^- mức {'nợ' if level == DEBT else 'tự do'}, "
                 f"{len(rerouting.incoming)} arc, khối lượng {sum(rerouting.incoming.values()):.9g}")
    return rerouting


# ========================================
# 2️⃣ PHÂN RÃ CHU TRÌNH
# ========================================

def cycle_decompose(split: SplitGraph) -> List[FlowCycle]:
    """
    Phân rã x_sp thành chu trình đơn: xuất phát từ arc chưa bão hòa có id nhỏ nhất,
    luôn đi ra theo arc có phần dư lớn nhất (hòa → id nhỏ), dừng khi gặp lại một nút.

    Raises:
        InternalInconsistencyError: nếu phần dư còn lại vượt 1e-6
    """
    residual = {a.arc_id: a.value for a in split.arcs}
    out_arcs: Dict[SplitNode, List[SplitArc]] = {}
    for arc in split.arcs:
        out_arcs.setdefault(arc.tail, []).append(arc)
    dropped = 0.0

    def best_out(node: SplitNode) -> Optional[SplitArc]:
        best = None
        for arc in out_arcs.get(node, []):
            if residual[arc.arc_id] > ZERO_CLAMP and (best is None or residual[arc.arc_id] > residual[best.arc_id]):
                best = arc
        return best

    cycles: List[FlowCycle] = []
    for start in sorted(residual):
        while residual[start] > ZERO_CLAMP:
            first = split.arcs[start]
            nodes = [first.tail, first.head]
            path = [first]
            while True:
                arc = best_out(nodes[-1])
                if arc is None:
                    # lệch cân bằng số học: bỏ phần dư của arc vừa đi tới
                    stuck = path[-1]
                    dropped += residual[stuck.arc_id]
                    residual[stuck.arc_id] = 0.0
                    break
                if arc.head in nodes:
                    begin = nodes.index(arc.head)
                    cycle = path[begin:] + [arc]
                    mass = min(residual[a.arc_id] for a in cycle)
                    for a in cycle:
                        residual[a.arc_id] -= mass
                    cycles.append(FlowCycle(arcs=tuple(a.arc_id for a in cycle), mass=mass))
                    break
                path.append(arc)
                nodes.append(arc.head)

    leftover = dropped + sum(v for v in residual.values() if v > 0)
    if leftover > EPS_OBJ:
        raise InternalInconsistencyError(f"phân rã chu trình còn dư {leftover:.3g}", {"leftover": leftover})
    logger.debug(f"2️⃣ Phân rã thành {len(cycles)} chu trình, phần dư {leftover:.3g}")
    return cycles


# ========================================
# 3️⃣ SUY RA X_i^+ VÀ g_i
# ========================================

def derive_exit_set(cycles: List[FlowCycle], rerouting: Rerouting, split: SplitGraph) -> Rerouting:
    """
    Với mỗi chu trình đi vào U_i^sp qua một arc của X_i^-, arc đầu tiên sau đó rời
    U_i^sp thuộc X_i^+, các arc ở giữa thuộc g_i; cả hai nhận khối lượng của chu trình.

    Raises:
        InternalInconsistencyError: nếu chu trình vào U_i^sp mà không bao giờ rời ra
    """
    for index, cycle in enumerate(cycles):
        length = len(cycle.arcs)
        for position, arc_id in enumerate(cycle.arcs):
            if arc_id not in rerouting.incoming:
                continue
            q = (position + 1) % length
            while True:
                arc = split.arcs[cycle.arcs[q]]
                if rerouting.contains(arc.tail) and not rerouting.contains(arc.head):
                    break
                if q == position:
                    raise InternalInconsistencyError(
                        f"lớp {rerouting.class_index}: chu trình {index} vào U^sp nhưng không rời ra",
                        {"cycle": list(cycle.arcs)},
                    )
                q = (q + 1) % length
            crossing = Crossing(cycle_index=index, entry_position=position, exit_position=q, mass=cycle.mass)
            rerouting.crossings.append(crossing)
            exit_id = cycle.arcs[q]
            rerouting.outgoing[exit_id] = rerouting.outgoing.get(exit_id, 0.0) + cycle.mass
            for p in crossing.segment(length):
                inner = cycle.arcs[p]
                rerouting.connector[inner] = rerouting.connector.get(inner, 0.0) + cycle.mass

    total_in = sum(rerouting.incoming.values())
    total_out = sum(rerouting.outgoing.values())
    if abs(total_in - total_out) > EPS_OBJ:
        raise InternalInconsistencyError(
            f"lớp {rerouting.class_index}: x_sp(X^+) = {total_out:.9g} ≠ x_sp(X^-) = {total_in:.9g}",
            {"incoming": total_in, "outgoing": total_out},
        )
    return rerouting


def backtrack_terminals(split: SplitGraph, rerouting: Rerouting, node: SplitNode) -> Dict[int, List[int]]:
    """
    Tìm ngược từ `node` (mức tự do) theo arc rẻ tự do bên trong U_i^sp.

    Returns:
        terminal t → danh sách arc id của đường t⁰ → node (rỗng nếu t chính là node)
    """
    parent: Dict[SplitNode, Optional[SplitArc]] = {node: None}
    frontier = [node]
    while frontier:
        next_frontier = []
        for current in frontier:
            incoming = sorted((a for a in split.in_arcs(current)
                               if a.tail.level == FREE and a.head.level == FREE and a.origin is not None
                               and rerouting.contains(a.tail) and a.value > ZERO_CLAMP),
                              key=lambda a: (a.tail.vertex, a.arc_id))
            for arc in incoming:
                if arc.tail not in parent:
                    parent[arc.tail] = arc
                    next_frontier.append(arc.tail)
        frontier = next_frontier

    found: Dict[int, List[int]] = {}
    for reached in parent:
        if reached.vertex not in split.terminals:
            continue
        path, current = [], reached
        while parent[current] is not None:
            arc = parent[current]
            path.append(arc.arc_id)
            current = arc.head
        found[reached.vertex] = path
    return found


# ========================================
# 4️⃣ MẠNG ĐỊNH TUYẾN LẠI
# ========================================

def build_rerouted(split: SplitGraph, cycles: List[FlowCycle], reroutings: List[Rerouting]) -> ReroutedNetwork:
    """
    Dựng G_sp' và x_sp'': trong mỗi chu trình, arc vào của một lần cắt ngang trỏ tới A_i,
    arc ra xuất phát từ A_i, và đoạn g_i ở giữa bị bỏ.

    Raises:
        InternalInconsistencyError: nếu một arc gốc mang nhiều hơn x_sp, hoặc x_sp''
            không phải lưu thông trong dung sai
    """
    crossings_by_cycle: Dict[int, List[Tuple[Rerouting, Crossing]]] = {}
    for rerouting in reroutings:
        for crossing in rerouting.crossings:
            crossings_by_cycle.setdefault(crossing.cycle_index, []).append((rerouting, crossing))

    pieces: Dict[Piece, float] = {}
    for index, cycle in enumerate(cycles):
        ends = [[split.arcs[a].tail, split.arcs[a].head] for a in cycle.arcs]
        removed = set()
        for rerouting, crossing in crossings_by_cycle.get(index, []):
            ends[crossing.entry_position][1] = rerouting.aux_node
            ends[crossing.exit_position][0] = rerouting.aux_node
            removed.update(crossing.segment(len(cycle.arcs)))
        for position, arc_id in enumerate(cycle.arcs):
            if position in removed:
                continue
            piece = Piece(arc_id, ends[position][0], ends[position][1])
            pieces[piece] = pieces.get(piece, 0.0) + cycle.mass

    carried: Dict[int, float] = {}
    for piece, value in pieces.items():
        carried[piece.arc_id] = carried.get(piece.arc_id, 0.0) + value
    for arc_id, value in carried.items():
        if value > split.arcs[arc_id].value + EPS_FEAS:
            raise InternalInconsistencyError(f"arc {arc_id} mang {value:.9g} > x_sp = {split.arcs[arc_id].value:.9g}",
                                             {"arc_id": arc_id})

    network = ReroutedNetwork(pieces=pieces, aux_nodes=[r.aux_node for r in reroutings])
    worst = max((abs(v) for v in network.imbalance().values()), default=0.0)
    if worst > EPS_OBJ:
        raise InternalInconsistencyError(f"x_sp'' lệch cân bằng {worst:.3g}", {"imbalance": worst})
    logger.info(f"4️⃣ G_sp': {len(pieces)} mảnh, {len(reroutings)} đỉnh phụ, lệch cân bằng {worst:.3g}")
    return network


# ========================================
# 5️⃣ LƯU THÔNG NGUYÊN
# ========================================

def node_caps(split: SplitGraph, factor: float = 2.0) -> Dict[SplitNode, int]:
    """⌈factor · x_sp(δ⁻(v))⌉ (làm tròn có đẩy nhẹ) cho mọi nút không phụ."""
    incoming: Dict[SplitNode, float] = {}
    for arc in split.arcs:
        incoming[arc.head] = incoming.get(arc.head, 0.0) + arc.value
    return {node: ceil_nudged(factor * value) for node, value in incoming.items()}


def integral_circulation(network: ReroutedNetwork, caps: Dict[SplitNode, int]) -> Dict[Piece, int]:
    """
    Lưu thông nguyên trên G_sp' với bậc vào ≤ caps tại nút thường và đúng 1 tại A_i.

    Tách nút v_in → v_out; cận dưới 1 của A_i được khử bằng siêu nguồn/siêu đích,
    rồi giải một max-flow nguyên. Luồng của các mảnh song song được dồn vào mảnh
    có x_sp'' lớn nhất.

    Raises:
        InternalInconsistencyError: nếu không khả thi
    """
    aux = set(network.aux_nodes)

    def cap_of(node: SplitNode) -> int:
        return 1 if node in aux else caps.get(node, 0)

    digraph = nx.DiGraph()
    nodes = {p.tail for p in network.pieces} | {p.head for p in network.pieces} | aux
    for node in sorted(nodes):
        if node in aux:
            digraph.add_edge(_SUPER_SOURCE, ("out", node), capacity=1)
            digraph.add_edge(("in", node), _SUPER_SINK, capacity=1)
        else:
            digraph.add_edge(("in", node), ("out", node), capacity=cap_of(node))

    grouped: Dict[Tuple[SplitNode, SplitNode], List[Piece]] = {}
    for piece in sorted(network.pieces):
        grouped.setdefault((piece.tail, piece.head), []).append(piece)
    for (tail, head), group in grouped.items():
        digraph.add_edge(("out", tail), ("in", head), capacity=cap_of(head))

    if not aux:
        return {}
    value, flow_dict = nx.maximum_flow(digraph, _SUPER_SOURCE, _SUPER_SINK)
    if value != len(aux):
        raise InternalInconsistencyError(
            f"không có lưu thông nguyên: max-flow {value} < {len(aux)}",
            {"flow_value": value, "aux_nodes": [str(a) for a in sorted(aux)]},
        )

    result: Dict[Piece, int] = {}
    for (tail, head), group in grouped.items():
        amount = flow_dict[("out", tail)][("in", head)]
        if amount:
            chosen = max(group, key=lambda p: (network.pieces[p], -p.arc_id))
            result[chosen] = amount
    verify_integral(network, result, caps)
    return result


def verify_integral(network: ReroutedNetwork, y: Dict[Piece, int], caps: Dict[SplitNode, int]) -> None:
    """Kiểm tra độc lập: nguyên, cân bằng, bậc vào ≤ cap, bậc vào của A_i đúng 1."""
    balance: Dict[SplitNode, int] = {}
    indegree: Dict[SplitNode, int] = {}
    for piece, amount in y.items():
        if amount < 0 or int(amount) != amount:
            raise InternalInconsistencyError(f"y_sp'' không nguyên trên {piece}")
        balance[piece.head] = balance.get(piece.head, 0) + amount
        balance[piece.tail] = balance.get(piece.tail, 0) - amount
        indegree[piece.head] = indegree.get(piece.head, 0) + amount
    unbalanced = [str(n) for n, b in balance.items() if b != 0]
    if unbalanced:
        raise InternalInconsistencyError(f"y_sp'' không cân bằng tại {unbalanced}")
    for aux_node in network.aux_nodes:
        if indegree.get(aux_node, 0) != 1:
            raise InternalInconsistencyError(f"bậc vào của {aux_node} là {indegree.get(aux_node, 0)} ≠ 1")
    for node, degree in indegree.items():
        if node.level != AUX and degree > caps.get(node, 0):
            raise InternalInconsistencyError(f"bậc vào {degree} tại {node} vượt cap {caps.get(node, 0)}")


def reroute(split: SplitGraph, sink_sets: Iterable[FrozenSet[int]], target: float = HALF,
            allow_debt: bool = True) -> Tuple[SplitGraph, List[Rerouting], List[FlowCycle], ReroutedNetwork]:
    """
    Chạy bước 1–4 cho mọi lớp trên một bản sao của G_sp.

    Returns:
        (G_sp sau khi tách arc, các Rerouting, các chu trình, mạng định tuyến lại)
    """
    working = split.copy()
    reroutings = [select_incoming_half(working, sinks, index, target=target, allow_debt=allow_debt)
                  for index, sinks in enumerate(sink_sets)]
    cycles = cycle_decompose(working)
    for rerouting in reroutings:
        derive_exit_set(cycles, rerouting, working)
    network = build_rerouted(working, cycles, reroutings)
    return working, reroutings, cycles, network
