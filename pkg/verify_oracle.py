# Kiểm Định Và Oracle
"""
🔎 Bộ kiểm định độc lập và các oracle:

    • verify_solution: tính lại Euler, cắt ngang, tỉ lệ từng thành phần (dạng 10·lbs và 100·lb)
    • debt_audit / degree_audit / walk_audit: kiểm tra phụ khi có dữ liệu nguồn gốc
    • brute_force_atsp: quy hoạch động trên bao đóng mêtric (n nhỏ)
    • assemble_tour: ghép tour heuristic bằng cách gọi lặp local-connectivity
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field

from config import (DP_HARD_MAX_N, DP_MAX_N, LBS_SCALE, LIGHTNESS_TARGET, RELATIVE_SLACK, REPORT_SCHEMA_VERSION,
                    WALK_FACTOR, WALK_INDEGREE_CAP, ZERO_CLAMP)
from errors import GraphNotStronglyConnectedError, InvalidInputError, IterationLimitError
from flow_routing import SinkFlow
from graph_core import EdgeMultiset, TwoWeightDigraph, delta, in_value, is_eulerian, weakly_connected_components
from held_karp import FractionalCirculation
from local_connectivity import LcSolution, Partition, solve_local_connectivity, walk_vertices
from split_graph import ArcKind, LowerBound

logger = logging.getLogger(__name__)


# ========================================
# 📋 CHỨNG CHỈ (pydantic)
# ========================================

class CrossingWitness(BaseModel):
    partition_class: int
    witness_edge: Optional[int] = None
    ok: bool


class ComponentReport(BaseModel):
    component: int
    vertices: List[int]
    weight: float
    lbs: float
    lb: float
    ratio_lbs: float
    ratio_lb: float


class DebtAudit(BaseModel):
    component: int
    debt: int
    bad_sum: int
    ok: bool


class WalkAudit(BaseModel):
    partition_class: int
    weight: float
    lbs: float
    max_indegree: int
    expensive_edges: int
    terminals_on_walk: int
    ok: bool


class DegreeViolation(BaseModel):
    vertex: int
    y_in: int
    x_in: float
    bound: float


class Certificate(BaseModel):
    schema_version: str = REPORT_SCHEMA_VERSION
    passed: bool
    eulerian_ok: bool
    vacuous_crossing: bool = False
    lower_bound_kind: str
    lightness_target: float = LIGHTNESS_TARGET
    crossings: List[CrossingWitness] = Field(default_factory=list)
    components: List[ComponentReport] = Field(default_factory=list)
    max_ratio: float
    max_ratio_lbs: float
    max_ratio_lb: float
    debt_audit: Optional[List[DebtAudit]] = None
    walk_audit: Optional[List[WalkAudit]] = None
    degree_violations: Optional[List[DegreeViolation]] = None
    walks: Optional[List[List[int]]] = None


def ratio(weight: float, bound: float) -> float:
    """weight / bound với quy ước: weight ≈ 0 → 0, bound = 0 < weight → vô cùng."""
    if weight <= ZERO_CLAMP:
        return 0.0
    if bound <= 0:
        return math.inf
    return weight / bound


# ========================================
# ✅ KIỂM ĐỊNH NGHIỆM
# ========================================

def verify_solution(graph: TwoWeightDigraph, lower_bound: LowerBound, partition: Partition, multiset: EdgeMultiset,
                    solution: Optional[LcSolution] = None) -> Certificate:
    """
    Tính lại toàn bộ chứng chỉ chỉ từ (graph, lb, partition, F). Lỗi được ghi trong
    chứng chỉ, không ném ra.

    Args:
        solution: nếu có, thêm kiểm tra nợ, đường vá và bậc vào của y từ dữ liệu nguồn gốc
    """
    eulerian_ok = is_eulerian(graph, multiset)
    vacuous = partition.k == 1

    crossings = []
    for index, members in enumerate(partition.classes):
        witness = None
        if len(members) < graph.vertex_count:
            witness = next((e for e in sorted(delta(graph, members)) if multiset.get(e) > 0), None)
        crossings.append(CrossingWitness(partition_class=index + 1, witness_edge=witness, ok=witness is not None))

    components = []
    for index, component in enumerate(weakly_connected_components(graph, multiset)):
        weight = component.multiset.weight(graph)
        lbs_sum = lower_bound.lbs_of(component.vertices)
        lb_sum = lower_bound.lb_of(component.vertices)
        components.append(ComponentReport(component=index, vertices=sorted(component.vertices), weight=weight,
                                          lbs=lbs_sum, lb=lb_sum, ratio_lbs=ratio(weight, lbs_sum),
                                          ratio_lb=ratio(weight, lb_sum)))
    max_lbs = max((c.ratio_lbs for c in components), default=0.0)
    max_lb = max((c.ratio_lb for c in components), default=0.0)
    scales_agree = (math.isinf(max_lb) and math.isinf(max_lbs)) or \
        abs(max_lb - LBS_SCALE * max_lbs) <= 1e-9 * max(1.0, max_lb)
    if not scales_agree:
        logger.error(f"❌ Hai dạng tỉ lệ không khớp: {max_lb} ≠ 10·{max_lbs}")

    crossed = vacuous or all(c.ok for c in crossings)
    light = max_lb <= LIGHTNESS_TARGET * (1 + RELATIVE_SLACK)
    certificate = Certificate(passed=eulerian_ok and crossed and light and scales_agree, eulerian_ok=eulerian_ok,
                              vacuous_crossing=vacuous, lower_bound_kind=lower_bound.kind, crossings=crossings,
                              components=components, max_ratio=max_lb, max_ratio_lbs=max_lbs, max_ratio_lb=max_lb)
    if solution is not None:
        terminals = solution.split.terminals if solution.split is not None else frozenset()
        certificate.walk_audit = walk_audit(graph, solution, lower_bound, terminals)
        certificate.walks = solution.walks
        if solution.x_base is not None:
            certificate.degree_violations = degree_audit(graph, solution)
        if solution.split is not None and solution.split.terminals:
            certificate.debt_audit = debt_audit(graph, solution)
        audits_ok = all(a.ok for a in certificate.walk_audit + (certificate.debt_audit or []))
        certificate.passed = certificate.passed and audits_ok and not certificate.degree_violations
    status = "✅" if certificate.passed else "❌"
    logger.info(f"{status} Chứng chỉ: Euler={eulerian_ok}, cắt ngang={crossed}, max ratio (lb) = {max_lb:.6g}")
    return certificate


def walk_audit(graph: TwoWeightDigraph, solution: LcSolution, lower_bound: LowerBound,
               terminals: frozenset) -> List[WalkAudit]:
    """w(P_i) ≤ 4·lbs(P_i), bậc vào trên P_i ≤ 4, cạnh đắt ≤ 2·terminal trên P_i."""
    audits = []
    for patch in solution.patches:
        vertices = walk_vertices(graph, patch.walk, patch.u)
        weight = sum(graph.weight(e) for e in patch.walk)
        lbs_sum = lower_bound.lbs_of(set(vertices))
        indegree: Dict[int, int] = {}
        for vertex in vertices[1:]:
            indegree[vertex] = indegree.get(vertex, 0) + 1
        expensive = sum(1 for e in patch.walk if graph.edges[e].is_expensive)
        on_walk = len(set(vertices) & set(terminals))
        max_in = max(indegree.values(), default=0)
        ok = (weight <= WALK_FACTOR * lbs_sum * (1 + RELATIVE_SLACK) + ZERO_CLAMP
              and max_in <= WALK_INDEGREE_CAP and expensive <= 2 * on_walk)
        audits.append(WalkAudit(partition_class=patch.class_index + 1, weight=weight, lbs=lbs_sum,
                                max_indegree=max_in, expensive_edges=expensive, terminals_on_walk=on_walk, ok=ok))
    return audits


def debt_audit(graph: TwoWeightDigraph, solution: LcSolution) -> List[DebtAudit]:
    """
    Với mỗi thành phần: debt = y_sp(ảnh cạnh đắt) − y_sp(arc xả nợ) ≤ Σ bad(i)
    của các đường vá nằm trong thành phần.
    """
    split = solution.split
    audits = []
    for index, component in enumerate(weakly_connected_components(graph, solution.multiset)):
        debt = 0
        for arc_id, amount in solution.y_sp.items():
            arc = split.arcs[arc_id]
            if arc.tail.vertex not in component.vertices:
                continue
            if arc.kind == ArcKind.EXPENSIVE:
                debt += amount
            elif arc.kind == ArcKind.DISCHARGE:
                debt -= amount
        bad_sum = sum(p.bad for p in solution.patches if p.u in component.vertices)
        audits.append(DebtAudit(component=index, debt=debt, bad_sum=bad_sum, ok=debt <= bad_sum))
    return audits


def degree_audit(graph: TwoWeightDigraph, solution: LcSolution) -> List[DegreeViolation]:
    """
    y(δ⁻(v)) ≤ 2·x(δ⁻(v)) + 3 ≤ 5·x(δ⁻(v)) tại mọi đỉnh, kể cả terminal; x là luồng
    phân số mà y được làm tròn từ đó (x* ở nhánh có trọng số, x′ ở nhánh không trọng số).

    Returns:
        danh sách vi phạm (rỗng nếu đạt)
    """
    y_in: Dict[int, int] = {}
    for edge_id, count in solution.y.multiplicity.items():
        head = graph.edges[edge_id].head
        y_in[head] = y_in.get(head, 0) + count
    violations = []
    for v in graph.vertices:
        x_in = in_value(graph, solution.x_base, v)
        bound = min(2 * x_in + 3, 5 * x_in)
        if y_in.get(v, 0) > bound * (1 + RELATIVE_SLACK) + ZERO_CLAMP:
            violations.append(DegreeViolation(vertex=v, y_in=y_in.get(v, 0), x_in=x_in, bound=bound))
    return violations


# ========================================
# 🧮 ORACLE ATSP CHÍNH XÁC
# ========================================

def metric_completion(graph: TwoWeightDigraph) -> np.ndarray:
    """Ma trận khoảng cách ngắn nhất giữa mọi cặp đỉnh theo (G, w)."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.vertices)
    for edge in graph.edges:
        weight = graph.weight(edge.edge_id)
        if not digraph.has_edge(edge.tail, edge.head) or digraph[edge.tail][edge.head]["weight"] > weight:
            digraph.add_edge(edge.tail, edge.head, weight=weight)
    return nx.floyd_warshall_numpy(digraph, nodelist=list(graph.vertices), weight="weight")


def brute_force_atsp(graph: TwoWeightDigraph, allow_large: bool = False) -> float:
    """
    Quy hoạch động Held-Karp trên tập con (mặt nạ bit) của bao đóng mêtric.

    Args:
        allow_large: nâng giới hạn từ LCATSP_DP_MAX_N (mặc định 12) lên 16

    Raises:
        InvalidInputError: nếu n vượt giới hạn
        GraphNotStronglyConnectedError: nếu không có tour
    """
    n = graph.vertex_count
    limit = DP_HARD_MAX_N if allow_large else min(DP_MAX_N, DP_HARD_MAX_N)
    if n > limit:
        raise InvalidInputError(f"brute_force_atsp chỉ hỗ trợ n <= {limit}")
    if n == 1:
        return 0.0
    dist = metric_completion(graph)
    if np.isinf(dist).any():
        raise GraphNotStronglyConnectedError("đồ thị không liên thông mạnh: không có tour")

    full = 1 << n
    dp = np.full((full, n), np.inf)
    dp[1, 0] = 0.0
    for mask in range(1, full):
        if not mask & 1:
            continue
        members = [i for i in range(n) if mask >> i & 1]
        for j in members:
            if j == 0:
                continue
            previous = mask ^ (1 << j)
            dp[mask, j] = np.min(dp[previous, :] + dist[:, j])
    best = float(np.min(dp[full - 1, 1:] + dist[1:, 0]))
    logger.debug(f"🧮 DP ATSP n={n}: OPT = {best:.9g}")
    return best


def eulerian_circuit(graph: TwoWeightDigraph, multiset: EdgeMultiset, source: Optional[int] = None) -> List[int]:
    """
    Chu trình Euler (Hierholzer qua networkx) của một F liên thông, dạng danh sách edge id.

    Raises:
        InvalidInputError: nếu F rỗng, không Euler hoặc không liên thông
    """
    if not multiset.total():
        raise InvalidInputError("F rỗng")
    multigraph = nx.MultiDiGraph()
    for edge_id, count in multiset.items():
        edge = graph.edges[edge_id]
        for copy in range(count):
            multigraph.add_edge(edge.tail, edge.head, key=(edge_id, copy))
    if not nx.is_eulerian(multigraph):
        raise InvalidInputError("F không liên thông hoặc không Euler")
    start = min(multigraph.nodes) if source is None else source
    return [key[0] for _, _, key in nx.eulerian_circuit(multigraph, source=start, keys=True)]


# ========================================
# 🧭 GHÉP TOUR
# ========================================

@dataclass
class TourResult:
    multiset: EdgeMultiset
    rounds: int
    ratio_vs_lp: float
    circuit: List[int]


def assemble_tour(graph: TwoWeightDigraph, x_star: FractionalCirculation, lower_bound: Optional[LowerBound] = None,
                  sink_flow: Optional[SinkFlow] = None) -> TourResult:
    """
    Ghép tour: phân hoạch = các thành phần yếu của F hiện tại (ban đầu là đơn tử),
    gọi local-connectivity, cộng kết quả vào F, dừng khi F liên thông.
    Không khẳng định hệ số xấp xỉ nào; chỉ ghi lại w(F) / OPT_LP.

    Raises:
        IterationLimitError: nếu vượt n vòng
    """
    multiset = EdgeMultiset()
    rounds = 0
    while True:
        components = weakly_connected_components(graph, multiset)
        if len(components) == 1:
            break
        rounds += 1
        if rounds > graph.vertex_count:
            raise IterationLimitError(f"ghép tour vượt {graph.vertex_count} vòng")
        partition = Partition.of(c.vertices for c in components)
        solution = solve_local_connectivity(graph, x_star, lower_bound, partition, sink_flow=sink_flow)
        multiset = multiset.add(solution.multiset)
        logger.info(f"🔄 Vòng ghép {rounds}: {len(components)} thành phần → "
                    f"{len(weakly_connected_components(graph, multiset))}")

    weight = multiset.weight(graph)
    circuit = eulerian_circuit(graph, multiset) if multiset.total() else []
    return TourResult(multiset=multiset, rounds=rounds, ratio_vs_lp=ratio(weight, x_star.objective), circuit=circuit)
