# Local-Connectivity ATSP
"""
🧩 Cho phân hoạch V = V_1 ∪ … ∪ V_k, dựng đa tập Euler F cắt ngang mọi lớp
và nhẹ theo lb:

    • nhánh có trọng số (x*(E1) ≥ 1): đồ thị phụ trợ → thành phần chìm U_i →
      định tuyến lại nửa đơn vị qua A_i → lưu thông nguyên → ánh xạ ngược + vá đường P_i
    • nhánh 6-light (x*(E1) < 1): thay mỗi cạnh đắt bằng đường rẻ rồi gọi thủ tục
      3-light không trọng số (định tuyến lại 1 đơn vị)
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from config import (EPS_FEAS, LIGHTNESS_TARGET, RELATIVE_SLACK, SIX_LIGHT_TARGET,
                    WALK_FACTOR, WALK_INDEGREE_CAP, ZERO_CLAMP)
from errors import InternalInconsistencyError, InvalidInputError, VerificationError
from flow_routing import SinkFlow, find_sink_flow
from graph_core import (EdgeMultiset, TwoWeightDigraph, delta, is_eulerian, scc_decomposition,
                        strongly_connected_components, weakly_connected_components)
from held_karp import FractionalCirculation
from rerouting import Rerouting, backtrack_terminals, integral_circulation, node_caps, reroute
from split_graph import (ArcKind, FREE, LowerBound, SplitGraph, SplitNode, build_split, compute_lower_bound,
                         unweighted_lower_bound)

logger = logging.getLogger(__name__)

CHEAP = "cheap"
POSTPAID = "postpaid"
PREPAID = "prepaid"
_KIND_ORDER = {CHEAP: 0, POSTPAID: 1, PREPAID: 2}

BRANCH_WEIGHTED = "weighted"
BRANCH_SIX_LIGHT = "six-light"
BRANCH_THREE_LIGHT = "three-light"


# ========================================
# 📋 KIỂU DỮ LIỆU
# ========================================

@dataclass(frozen=True)
class Partition:
    """Các lớp V_1..V_k; trong file và chứng chỉ, lớp ở vị trí i mang nhãn i + 1."""

    classes: Tuple[FrozenSet[int], ...]

    @classmethod
    def of(cls, classes: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(frozenset(c) for c in classes))

    @classmethod
    def singletons(cls, vertex_count: int) -> "Partition":
        return cls(tuple(frozenset({v}) for v in range(vertex_count)))

    @property
    def k(self) -> int:
        return len(self.classes)

    @property
    def class_of(self) -> Dict[int, int]:
        return {v: i for i, members in enumerate(self.classes) for v in members}

    def validate(self, vertex_count: int) -> None:
        """
        Raises:
            InvalidInputError: lớp rỗng, hai lớp giao nhau hoặc không phủ V
        """
        if not self.classes:
            raise InvalidInputError("phân hoạch cần ít nhất một lớp")
        seen = set()
        for index, members in enumerate(self.classes):
            if not members:
                raise InvalidInputError(f"lớp {index + 1} rỗng")
            if seen & members:
                raise InvalidInputError(f"lớp {index + 1} giao với lớp trước: {sorted(seen & members)}")
            seen |= members
        if seen != set(range(vertex_count)):
            raise InvalidInputError(f"phân hoạch không phủ đúng V = [0, {vertex_count})")


@dataclass(frozen=True)
class AuxEdge:
    tail: int
    head: int
    kind: str
    preimage: Tuple[int, ...]


@dataclass
class AuxGraph:
    vertices: FrozenSet[int]
    edges: List[AuxEdge] = field(default_factory=list)

    def out_edges(self, vertex: int) -> List[AuxEdge]:
        return sorted((e for e in self.edges if e.tail == vertex),
                      key=lambda e: (e.head, _KIND_ORDER[e.kind], e.preimage))


@dataclass
class ClassPatch:
    """Ghi nhận việc vá lớp i: U_i, u_i, v_i, trường hợp A/B, arc vào/ra A_i và bad(i)."""

    class_index: int
    sink_vertices: FrozenSet[int]
    u: int
    v: int
    case: str
    entering_arc: Optional[int] = None
    leaving_arc: Optional[int] = None
    entering_debt: bool = False
    leaving_debt: bool = False
    bad: int = 0
    terminal: Optional[int] = None
    walk: List[int] = field(default_factory=list)


@dataclass
class LcSolution:
    multiset: EdgeMultiset
    y: EdgeMultiset
    patches: List[ClassPatch]
    lower_bound: LowerBound
    partition: Partition
    branch: str
    vacuous_crossing: bool = False
    y_sp: Dict[int, int] = field(default_factory=dict)
    split: Optional[SplitGraph] = None
    x_prime: Optional[Dict[int, float]] = None
    # luồng phân số trên G mà y được làm tròn từ đó (x* hoặc x)
    x_base: Optional[Dict[int, float]] = None

    @property
    def walks(self) -> List[List[int]]:
        return [patch.walk for patch in self.patches]

    @property
    def lower_bound_kind(self) -> str:
        return self.lower_bound.kind


# ========================================
# 🔍 BFS TẤT ĐỊNH
# ========================================

def _cheap_bfs(graph: TwoWeightDigraph, root: int, allowed: FrozenSet[int], forward: bool = True) -> Dict[int, List[int]]:
    """
    BFS theo cạnh rẻ trong G[allowed] (xuôi hoặc ngược) từ root.

    Returns:
        đỉnh đạt được → đường đi (edge id theo chiều xuôi của G)
    """
    parent: Dict[int, Optional[int]] = {root: None}
    queue = deque([root])
    while queue:
        current = queue.popleft()
        candidates = []
        for edge_id in (graph.out_edges(current) if forward else graph.in_edges(current)):
            edge = graph.edges[edge_id]
            if edge.is_expensive:
                continue
            neighbour = edge.head if forward else edge.tail
            if neighbour in allowed:
                candidates.append((neighbour, edge_id))
        for neighbour, edge_id in sorted(candidates):
            if neighbour not in parent:
                parent[neighbour] = edge_id
                queue.append(neighbour)

    paths: Dict[int, List[int]] = {}
    for vertex in parent:
        path, current = [], vertex
        while parent[current] is not None:
            edge = graph.edges[parent[current]]
            path.append(edge.edge_id)
            current = edge.tail if forward else edge.head
        paths[vertex] = path[::-1] if forward else path
    return paths


def shortest_cheap_path(graph: TwoWeightDigraph, source: int, target: int,
                        allowed: Optional[FrozenSet[int]] = None) -> Optional[List[int]]:
    allowed = frozenset(graph.vertices) if allowed is None else allowed
    return _cheap_bfs(graph, source, allowed).get(target)


# ========================================
# 🗺️ ĐỒ THỊ PHỤ TRỢ
# ========================================

def build_aux_graph(graph: TwoWeightDigraph, vertices: Iterable[int], terminals: FrozenSet[int]) -> AuxGraph:
    """
    Đồ thị phụ trợ của lớp V_i:
        cheap:    mọi cạnh rẻ của G[V_i]
        postpaid: (u, t), t ∈ T: đường trong G[V_i] bắt đầu bằng cạnh đắt, còn lại rẻ
        prepaid:  (t, v), t ∈ T: đường kết thúc bằng cạnh đắt, còn lại rẻ

    Mỗi tiền ảnh là đường ít cạnh nhất; hòa thì chọn dãy edge id nhỏ nhất theo thứ tự từ điển.
    """
    members = frozenset(vertices)
    aux = AuxGraph(vertices=members)
    inside = [e for e in graph.edges if e.tail in members and e.head in members]
    for edge in inside:
        if not edge.is_expensive:
            aux.edges.append(AuxEdge(edge.tail, edge.head, CHEAP, (edge.edge_id,)))

    best: Dict[Tuple[int, int, str], Tuple[int, ...]] = {}

    def offer(key: Tuple[int, int, str], preimage: Tuple[int, ...]) -> None:
        current = best.get(key)
        if current is None or (len(preimage), preimage) < (len(current), current):
            best[key] = preimage

    for edge in inside:
        if not edge.is_expensive:
            continue
        for t, path in _cheap_bfs(graph, edge.head, members, forward=True).items():
            if t in terminals and t != edge.tail:
                offer((edge.tail, t, POSTPAID), (edge.edge_id, *path))
        for t, path in _cheap_bfs(graph, edge.tail, members, forward=False).items():
            if t in terminals and t != edge.head:
                offer((t, edge.head, PREPAID), (*path, edge.edge_id))

    for (tail, head, kind), preimage in sorted(best.items(), key=lambda item: (_KIND_ORDER[item[0][2]], item[0])):
        aux.edges.append(AuxEdge(tail, head, kind, preimage))
    return aux


def pick_sink_component(aux: AuxGraph) -> FrozenSet[int]:
    """Thành phần liên thông mạnh chìm của đồ thị phụ trợ chứa đỉnh nhỏ nhất."""
    decomposition = scc_decomposition(aux.vertices, [(e.tail, e.head) for e in aux.edges])
    sinks = decomposition.sinks
    return min((decomposition.components[i] for i in sinks), key=min)


def aux_shortest_path(aux: AuxGraph, source: int, target: int) -> Optional[List[AuxEdge]]:
    """Đường ít cạnh nhất trong đồ thị phụ trợ; None nếu không tới được."""
    parent: Dict[int, Optional[AuxEdge]] = {source: None}
    queue = deque([source])
    while queue and target not in parent:
        current = queue.popleft()
        for edge in aux.out_edges(current):
            if edge.head not in parent:
                parent[edge.head] = edge
                queue.append(edge.head)
    if target not in parent:
        return None
    path, current = [], target
    while parent[current] is not None:
        path.append(parent[current])
        current = parent[current].tail
    return path[::-1]


def sink_has_no_cheap_exit(graph: TwoWeightDigraph, vertices: FrozenSet[int], sink: FrozenSet[int]) -> bool:
    """Mọi cạnh của G từ U_i sang V_i ∖ U_i đều đắt."""
    return all(e.is_expensive for e in graph.edges
               if e.tail in sink and e.head in vertices and e.head not in sink)


# ========================================
# 🩹 ÁNH XẠ NGƯỢC VÀ VÁ ĐƯỜNG
# ========================================

def map_back_and_patch(y_pieces: Dict, reroutings: List[Rerouting], split: SplitGraph, graph: TwoWeightDigraph,
                       auxes: List[AuxGraph]) -> Tuple[EdgeMultiset, EdgeMultiset, Dict[int, int], List[ClassPatch]]:
    """
    Ba giai đoạn: (1) arc kề A_i trở về arc gốc → giả luồng y_sp; (2) gộp (v⁰, v¹),
    bỏ arc xả nợ → y trên G; (3) vá từng lớp bằng đường P_i từ u_i tới v_i.

    Returns:
        (F, y, y_sp, các ClassPatch)

    Raises:
        InternalInconsistencyError: không có đường phụ trợ u_i → v_i, hoặc không tìm thấy
            terminal quay lui trong trường hợp B
    """
    y_sp: Dict[int, int] = {}
    for piece, amount in y_pieces.items():
        y_sp[piece.arc_id] = y_sp.get(piece.arc_id, 0) + amount
    y = EdgeMultiset()
    for arc_id, amount in sorted(y_sp.items()):
        origin = split.arcs[arc_id].origin
        if origin is not None:
            y.add_edge(origin, amount)

    patches: List[ClassPatch] = []
    multiset = EdgeMultiset(dict(y.multiplicity))
    for rerouting, aux in zip(reroutings, auxes):
        entering = next(p for p in sorted(y_pieces) if p.head == rerouting.aux_node)
        leaving = next(p for p in sorted(y_pieces) if p.tail == rerouting.aux_node)
        arc_in, arc_out = split.arcs[entering.arc_id], split.arcs[leaving.arc_id]
        u, v = arc_in.head.vertex, arc_out.tail.vertex
        patch = ClassPatch(class_index=rerouting.class_index, sink_vertices=rerouting.sink_vertices, u=u, v=v,
                           case="A", entering_arc=arc_in.arc_id, leaving_arc=arc_out.arc_id,
                           entering_debt=arc_in.is_debt, leaving_debt=arc_out.is_debt,
                           bad=int(arc_in.is_debt and not arc_out.is_debt))
        if u == v:
            patch.case = "trivial"
        elif not rerouting.is_debt or arc_out.is_debt:
            patch.walk = _aux_walk(aux, u, v, rerouting.class_index)
        else:
            patch.case = "B"
            reachable = backtrack_terminals(split, rerouting, SplitNode(v, FREE))
            if not reachable:
                raise InternalInconsistencyError(
                    f"lớp {rerouting.class_index}: không có terminal quay lui tới {v}",
                    {"class": rerouting.class_index, "v": v, "sink": sorted(rerouting.sink_vertices)},
                )
            t = min(reachable)
            patch.terminal = t
            cheap_tail = [split.arcs[a].origin for a in reachable[t]]
            patch.walk = _aux_walk(aux, u, t, rerouting.class_index) + cheap_tail
        for edge_id in patch.walk:
            multiset.add_edge(edge_id)
        patches.append(patch)
        logger.debug(f"🩹 Lớp {rerouting.class_index}: u={u}, v={v}, trường hợp {patch.case}, "
                     f"|P|={len(patch.walk)}")
    return multiset, y, y_sp, patches


def _aux_walk(aux: AuxGraph, source: int, target: int, class_index: int) -> List[int]:
    path = aux_shortest_path(aux, source, target)
    if path is None:
        raise InternalInconsistencyError(
            f"lớp {class_index}: không có đường phụ trợ {source} → {target}",
            {"class": class_index, "source": source, "target": target,
             "aux_edges": [(e.tail, e.head, e.kind) for e in aux.edges]},
        )
    return [edge_id for edge in path for edge_id in edge.preimage]


def walk_vertices(graph: TwoWeightDigraph, walk: Sequence[int], start: int) -> List[int]:
    vertices = [start]
    for edge_id in walk:
        vertices.append(graph.edges[edge_id].head)
    return vertices


def _check_walk_bounds(graph: TwoWeightDigraph, patch: ClassPatch, lower_bound: LowerBound,
                       terminals: FrozenSet[int]) -> None:
    """w(P_i) ≤ 4·lbs(P_i), bậc vào trên P_i ≤ 4, số cạnh đắt ≤ 2·số terminal trên P_i."""
    if not patch.walk:
        return
    vertices = walk_vertices(graph, patch.walk, patch.u)
    if vertices[-1] != patch.v:
        raise InternalInconsistencyError(f"lớp {patch.class_index}: P_i không kết thúc tại v_i")
    weight = sum(graph.weight(e) for e in patch.walk)
    budget = WALK_FACTOR * lower_bound.lbs_of(set(vertices))
    if weight > budget * (1 + RELATIVE_SLACK) + ZERO_CLAMP:
        raise InternalInconsistencyError(f"lớp {patch.class_index}: w(P) = {weight:.9g} > 4·lbs(P) = {budget:.9g}",
                                         {"walk": patch.walk})
    indegree: Dict[int, int] = {}
    for vertex in vertices[1:]:
        indegree[vertex] = indegree.get(vertex, 0) + 1
    if max(indegree.values()) > WALK_INDEGREE_CAP:
        raise InternalInconsistencyError(f"lớp {patch.class_index}: bậc vào trên P_i vượt {WALK_INDEGREE_CAP}",
                                         {"walk": patch.walk, "indegree": indegree})
    expensive = sum(1 for e in patch.walk if graph.edges[e].is_expensive)
    on_walk = len(set(vertices) & terminals)
    if expensive > 2 * on_walk:
        raise InternalInconsistencyError(f"lớp {patch.class_index}: {expensive} cạnh đắt > 2·{on_walk} terminal",
                                         {"walk": patch.walk})


def _check_output(graph: TwoWeightDigraph, solution: LcSolution, factor: float) -> None:
    """
    Raises:
        VerificationError: F không Euler, một lớp không bị cắt, hoặc một thành phần
            nặng hơn factor·lb
    """
    multiset = solution.multiset
    if not is_eulerian(graph, multiset):
        raise VerificationError("F không phải đa tập Euler")
    if not solution.vacuous_crossing:
        for index, members in enumerate(solution.partition.classes):
            if len(members) < graph.vertex_count and not any(multiset.get(e) for e in delta(graph, members)):
                raise VerificationError(f"lớp {index + 1} không bị cắt", partition_class=index + 1)
    for index, component in enumerate(weakly_connected_components(graph, multiset)):
        weight = component.multiset.weight(graph)
        bound = factor * solution.lower_bound.lb_of(component.vertices)
        if weight > bound * (1 + RELATIVE_SLACK) + ZERO_CLAMP:
            raise VerificationError(f"thành phần {index}: w = {weight:.9g} > {factor:g}·lb = {bound:.9g}",
                                    component=index)


# ========================================
# 🚀 ĐIỀU PHỐI
# ========================================

def _effective_partition(graph: TwoWeightDigraph, partition: Partition) -> Tuple[Partition, bool]:
    partition.validate(graph.vertex_count)
    if partition.k == 1:
        logger.warning("⚠️ k = 1: ràng buộc cắt ngang là rỗng nghĩa, dùng phân hoạch đơn tử")
        return Partition.singletons(graph.vertex_count), True
    return partition, False


def solve_local_connectivity(graph: TwoWeightDigraph, x_star: FractionalCirculation,
                             lower_bound: Optional[LowerBound], partition: Partition,
                             sink_flow: Optional[SinkFlow] = None, split: Optional[SplitGraph] = None) -> LcSolution:
    """
    Điều phối toàn bộ: x*(E1) < 1 → six_light_via_unweighted; ngược lại chạy thuật
    toán phân hoạch trên G_sp rồi kiểm định (Euler, cắt mọi lớp, mọi thành phần ≤ 100·lb).

    Args:
        graph: đồ thị hai trọng số
        x_star: nghiệm tối ưu của LP(G)
        lower_bound: lb từ compute_lower_bound (tính lại nếu None)
        partition: phân hoạch V
        sink_flow: luồng f (tính lại nếu None)
        split: G_sp đã dựng từ đúng x* và f (dựng lại nếu None)

    Returns:
        LcSolution

    Raises:
        VerificationError: kết quả không qua kiểm định
    """
    if x_star.expensive_mass(graph) < 1.0 - EPS_FEAS:
        return six_light_via_unweighted(graph, x_star, partition)

    effective, vacuous = _effective_partition(graph, partition)
    if sink_flow is None:
        sink_flow = find_sink_flow(graph, x_star)
    if lower_bound is None:
        lower_bound = compute_lower_bound(graph, x_star, sink_flow)
    if split is None:
        split, _ = build_split(graph, x_star, sink_flow)

    auxes = [build_aux_graph(graph, members, sink_flow.terminals) for members in effective.classes]
    sinks = [pick_sink_component(aux) for aux in auxes]
    for members, sink in zip(effective.classes, sinks):
        if not sink_has_no_cheap_exit(graph, members, sink):
            raise InternalInconsistencyError(f"có cạnh rẻ rời thành phần chìm {sorted(sink)}")
    working, reroutings, _, network = reroute(split, sinks)
    y_pieces = integral_circulation(network, node_caps(working, 2.0))
    multiset, y, y_sp, patches = map_back_and_patch(y_pieces, reroutings, working, graph, auxes)

    solution = LcSolution(multiset=multiset, y=y, patches=patches, lower_bound=lower_bound, partition=effective,
                          branch=BRANCH_WEIGHTED, vacuous_crossing=vacuous, y_sp=y_sp, split=working,
                          x_base=dict(x_star.value))
    for patch in patches:
        _check_walk_bounds(graph, patch, lower_bound, sink_flow.terminals)
    _check_output(graph, solution, LIGHTNESS_TARGET)
    logger.info(f"✅ Local-connectivity: |F| = {multiset.total()}, w(F) = {multiset.weight(graph):.6g}, "
                f"k = {effective.k}")
    return solution


def six_light_via_unweighted(graph: TwoWeightDigraph, x_star: FractionalCirculation,
                             partition: Partition) -> LcSolution:
    """
    Nhánh x*(E1) < 1: x′ = x*|E0 + Σ_{e ∈ E1} x*_e · 1_{P(e)} với P(e) là đường rẻ ngắn nhất
    cùng hai đầu mút, rồi chạy thủ tục 3-light trên (V, E0).

    Raises:
        InvalidInputError: nếu x*(E1) ≥ 1
        InternalInconsistencyError: nếu (V, E0) không liên thông mạnh hoặc w(x′) > 2·w(x*)
    """
    mass = x_star.expensive_mass(graph)
    if mass >= 1.0 - EPS_FEAS:
        raise InvalidInputError(f"x*(E1) = {mass:.9g} >= 1: dùng nhánh có trọng số")

    x_prime = {e: x_star.get(e) for e in graph.cheap_edges() if x_star.get(e) > 0}
    if mass > ZERO_CLAMP:
        cheap = strongly_connected_components(graph, edge_subset=graph.cheap_edges())
        if len(cheap.components) != 1:
            raise InternalInconsistencyError("(V, E0) không liên thông mạnh trong khi 0 < x*(E1) < 1")
        for edge_id in graph.expensive_edges():
            amount = x_star.get(edge_id)
            if amount <= 0:
                continue
            edge = graph.edges[edge_id]
            for cheap_id in shortest_cheap_path(graph, edge.tail, edge.head):
                x_prime[cheap_id] = x_prime.get(cheap_id, 0.0) + amount

    cost = graph.w0 * sum(x_prime.values())
    if cost > 2 * x_star.objective * (1 + RELATIVE_SLACK) + ZERO_CLAMP:
        raise InternalInconsistencyError(f"w(x′) = {cost:.9g} > 2·w(x*) = {2 * x_star.objective:.9g}",
                                         {"x_prime_cost": cost, "objective": x_star.objective})
    logger.info(f"🔀 Nhánh 6-light: x*(E1) = {mass:.6g}, w(x′) = {cost:.6g} <= 2·w(x*) = {2 * x_star.objective:.6g}")

    solution = three_light_unweighted(graph, x_prime, partition)
    solution.branch = BRANCH_SIX_LIGHT if mass > ZERO_CLAMP else BRANCH_THREE_LIGHT
    solution.x_prime = x_prime
    return solution


def three_light_unweighted(graph: TwoWeightDigraph, x: Dict[int, float], partition: Partition) -> LcSolution:
    """
    Thủ tục không trọng số: U_i là SCC chìm của (V_i, cạnh rẻ), định tuyến lại 1 đơn vị
    qua A_i, lưu thông nguyên với cap ⌈x(δ⁻(v))⌉ và bậc A_i đúng 1, vá bằng đường rẻ
    ngắn nhất trong U_i. Mỗi thành phần thỏa w ≤ 3·Σ w0·x(δ⁻(v)).

    Raises:
        InvalidInputError: nếu x dương trên một cạnh đắt
    """
    if any(x.get(e, 0.0) > ZERO_CLAMP for e in graph.expensive_edges()):
        raise InvalidInputError("x phải nằm trên cạnh rẻ")
    effective, vacuous = _effective_partition(graph, partition)
    lower_bound = unweighted_lower_bound(graph, x)

    split = SplitGraph(graph=graph, terminals=frozenset())
    for edge_id in sorted(x):
        if x[edge_id] > ZERO_CLAMP:
            edge = graph.edges[edge_id]
            split.add_arc(SplitNode(edge.tail, FREE), SplitNode(edge.head, FREE), ArcKind.FREE_CHEAP,
                          edge_id, graph.w0, x[edge_id])

    auxes = [build_aux_graph(graph, members, frozenset()) for members in effective.classes]
    sinks = [pick_sink_component(aux) for aux in auxes]
    if graph.vertex_count == 1:
        multiset, y, y_sp, patches = EdgeMultiset(), EdgeMultiset(), {}, []
        working = split
    else:
        working, reroutings, _, network = reroute(split, sinks, target=1.0, allow_debt=False)
        y_pieces = integral_circulation(network, node_caps(working, 1.0))
        multiset, y, y_sp, patches = map_back_and_patch(y_pieces, reroutings, working, graph, auxes)

    solution = LcSolution(multiset=multiset, y=y, patches=patches, lower_bound=lower_bound, partition=effective,
                          branch=BRANCH_THREE_LIGHT, vacuous_crossing=vacuous, y_sp=y_sp, split=working,
                          x_base=dict(x))
    _check_output(graph, solution, SIX_LIGHT_TARGET)
    return solution


# ========================================
# 📄 FILE PHÂN HOẠCH VÀ NGHIỆM
# ========================================

def parse_partition(text: str, vertex_count: int) -> Partition:
    """Mỗi dòng `i: v1 v2 ...`; nhãn lớp phải là 1..k theo thứ tự."""
    classes: List[FrozenSet[int]] = []
    for number, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        label, sep, rest = stripped.partition(":")
        if not sep:
            raise InvalidInputError(f"dòng {number}: cần 'i: v1 v2 ...'")
        try:
            index = int(label)
            members = [int(v) for v in rest.split()]
        except ValueError:
            raise InvalidInputError(f"dòng {number}: giá trị không phải số nguyên")
        if index != len(classes) + 1:
            raise InvalidInputError(f"dòng {number}: nhãn lớp {index}, cần {len(classes) + 1}")
        classes.append(frozenset(members))
    partition = Partition(tuple(classes))
    partition.validate(vertex_count)
    return partition


def read_partition(path: Union[str, Path], vertex_count: int) -> Partition:
    return parse_partition(Path(path).read_text(), vertex_count)


def render_partition(partition: Partition) -> str:
    return "".join(f"{i + 1}: {' '.join(str(v) for v in sorted(members))}\n"
                   for i, members in enumerate(partition.classes))


def write_partition(path: Union[str, Path], partition: Partition) -> None:
    Path(path).write_text(render_partition(partition))


def render_solution(multiset: EdgeMultiset) -> str:
    return "".join(f"{edge_id} {count}\n" for edge_id, count in multiset.items())


def write_solution(path: Union[str, Path], multiset: EdgeMultiset) -> None:
    Path(path).write_text(render_solution(multiset))


def read_solution(path: Union[str, Path], graph: TwoWeightDigraph) -> EdgeMultiset:
    multiset = EdgeMultiset()
    for number, raw in enumerate(Path(path).read_text().splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        try:
            edge_id, count = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise InvalidInputError(f"{path}:{number}: cần 'edge_id multiplicity'")
        if not 0 <= edge_id < graph.edge_count or count < 0:
            raise InvalidInputError(f"{path}:{number}: edge id hoặc bội số không hợp lệ")
        multiset.add_edge(edge_id, count)
    return multiset
