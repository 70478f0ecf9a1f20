# Nới Lỏng Held-Karp
"""
📐 Giải LP(G) bằng mặt phẳng cắt: mô hình ban đầu (cân bằng bậc + lát cắt đơn),
lặp lp_solve → separate cho tới khi không còn lát cắt vi phạm.

Kèm oracle liệt kê đầy đủ 2ⁿ−2 lát cắt cho n nhỏ và định dạng file nghiệm LP.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
from scipy.optimize import linprog

from config import BATCH_WORKERS, ENUMERATION_MAX_N, EPS_FEAS, EPS_OBJ, FLOW_SCALE, clamp
from errors import (GraphNotStronglyConnectedError, InternalInconsistencyError, InvalidInputError, IterationLimitError,
                    LpStatusError)
from graph_core import CutSpec, OUT, TwoWeightDigraph, delta, format_value, is_strongly_connected, vector_cut_value, vertex_imbalance

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

# scipy linprog status → trạng thái của chúng ta
_LINPROG_STATUS = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}
_HIGHS_OPTIONS = {"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9}


# ========================================
# 📋 KIỂU DỮ LIỆU
# ========================================

@dataclass(frozen=True)
class FractionalCirculation:
    """x*: edge id → giá trị không âm, cùng giá trị mục tiêu Σ w(e)·x_e."""

    value: Dict[int, float]
    objective: float

    def get(self, edge_id: int) -> float:
        return self.value.get(edge_id, 0.0)

    def expensive_mass(self, graph: TwoWeightDigraph) -> float:
        return sum(self.get(e) for e in graph.expensive_edges())

    def as_array(self, edge_count: int) -> np.ndarray:
        return np.array([self.get(e) for e in range(edge_count)], dtype=float)


@dataclass(frozen=True)
class HeldKarpResult(FractionalCirculation):
    iterations: int = 0
    cuts: Tuple[CutSpec, ...] = ()


@dataclass
class LpModel:
    """
    min c·x  với  A_eq·x = b_eq,  ge_rows·x ≥ ge_rhs,  x ≥ 0.

    Khi mô hình được dựng từ đồ thị, mỗi hàng ≥ là một lát cắt δ⁺(S) với vế phải 1
    và `cuts` giữ CutSpec tương ứng theo cùng thứ tự.
    """

    objective: np.ndarray
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray
    ge_rows: List[np.ndarray] = field(default_factory=list)
    ge_rhs: List[float] = field(default_factory=list)
    cuts: List[CutSpec] = field(default_factory=list)

    @property
    def variable_count(self) -> int:
        return len(self.objective)


@dataclass
class LpResult:
    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None


@dataclass(frozen=True)
class SeparationResult:
    cut: CutSpec
    value: float


# ========================================
# 🧮 MÔ HÌNH VÀ GIẢI LP
# ========================================

def lp_solve(model: LpModel) -> LpResult:
    """
    Giải mô hình bằng HiGHS (scipy.optimize.linprog).

    Returns:
        LpResult với status optimal/infeasible/unbounded; các trạng thái khác
        (giới hạn lặp, lỗi số) được ném ra dưới dạng LpStatusError.
    """
    kwargs = {}
    if model.eq_matrix.size:
        kwargs["A_eq"] = model.eq_matrix
        kwargs["b_eq"] = model.eq_rhs
    if model.ge_rows:
        kwargs["A_ub"] = -np.vstack(model.ge_rows)
        kwargs["b_ub"] = -np.asarray(model.ge_rhs, dtype=float)
    result = linprog(model.objective, bounds=(0, None), method="highs", options=_HIGHS_OPTIONS, **kwargs)
    status = _LINPROG_STATUS.get(result.status)
    if status is None:
        raise LpStatusError(f"scipy-{result.status}", f"LP thất bại: {result.message}")
    if status != OPTIMAL:
        logger.warning(f"⚠️ LP trả về {status}")
        return LpResult(status=status)
    return LpResult(status=OPTIMAL, x=np.asarray(result.x, dtype=float), objective=float(result.fun))


def _cut_row(graph: TwoWeightDigraph, cut: CutSpec) -> np.ndarray:
    row = np.zeros(graph.edge_count)
    for edge_id in delta(graph, cut, OUT):
        row[edge_id] += 1.0
    return row


def add_cut_row(model: LpModel, graph: TwoWeightDigraph, cut: CutSpec) -> None:
    model.ge_rows.append(_cut_row(graph, cut))
    model.ge_rhs.append(1.0)
    model.cuts.append(cut)


def _balance_model(graph: TwoWeightDigraph) -> LpModel:
    objective = np.array([graph.weight(e.edge_id) for e in graph.edges], dtype=float)
    eq_matrix = np.zeros((graph.vertex_count, graph.edge_count))
    for edge in graph.edges:
        eq_matrix[edge.head, edge.edge_id] += 1.0
        eq_matrix[edge.tail, edge.edge_id] -= 1.0
    return LpModel(objective=objective, eq_matrix=eq_matrix, eq_rhs=np.zeros(graph.vertex_count))


def build_initial_model(graph: TwoWeightDigraph) -> LpModel:
    """Cân bằng bậc tại mọi đỉnh + x(δ⁺({v})) ≥ 1 cho mọi v."""
    model = _balance_model(graph)
    if graph.vertex_count > 1:
        for v in graph.vertices:
            add_cut_row(model, graph, CutSpec(frozenset({v})))
    return model


# ========================================
# ✂️ TÁCH LÁT CẮT (SEPARATION)
# ========================================

def _capacity_digraph(graph: TwoWeightDigraph, x: Mapping[int, float]) -> nx.DiGraph:
    # Dấu phẩy tĩnh: max-flow của networkx chính xác trên số nguyên
    digraph = nx.DiGraph()
    digraph.add_nodes_from(graph.vertices)
    for edge in graph.edges:
        scaled = int(round(max(x.get(edge.edge_id, 0.0), 0.0) * FLOW_SCALE))
        if digraph.has_edge(edge.tail, edge.head):
            digraph[edge.tail][edge.head]["capacity"] += scaled
        else:
            digraph.add_edge(edge.tail, edge.head, capacity=scaled)
    return digraph


def _min_cuts_for_terminal(digraph: nx.DiGraph, terminal: int) -> List[Tuple[int, int, int, frozenset]]:
    results = []
    value, (reachable, _) = nx.minimum_cut(digraph, 0, terminal)
    results.append((value, terminal, 0, frozenset(reachable)))
    value, (reachable, _) = nx.minimum_cut(digraph, terminal, 0)
    results.append((value, terminal, 1, frozenset(reachable)))
    return results


def separate(graph: TwoWeightDigraph, x: Mapping[int, float], workers: int = 1) -> Optional[SeparationResult]:
    """
    Tìm lát cắt S với x(δ⁺(S)) < 1 − ε_feas, đạt cực tiểu toàn cục của x(δ⁺(S)).

    Cố định đỉnh 0, tính min-cut 0→t và t→0 cho mọi t; do x cân bằng nên cực tiểu
    toàn cục nằm trong các lát cắt này. Kết quả được rút gọn tất định:
    giá trị nhỏ nhất, rồi t nhỏ nhất, rồi chiều 0→t trước t→0.

    Args:
        graph: đồ thị
        x: vector cạnh (không âm, cân bằng)
        workers: số luồng cho các max-flow độc lập

    Returns:
        SeparationResult hoặc None nếu không có lát cắt vi phạm
    """
    if graph.vertex_count < 2:
        return None
    digraph = _capacity_digraph(graph, x)
    terminals = list(range(1, graph.vertex_count))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda t: _min_cuts_for_terminal(digraph, t), terminals))
    else:
        batches = [_min_cuts_for_terminal(digraph, t) for t in terminals]
    candidates = [item for batch in batches for item in batch]
    _, _, _, members = min(candidates, key=lambda item: item[:3])
    cut = CutSpec(members)
    value = vector_cut_value(graph, x, cut, OUT)
    if value < 1.0 - EPS_FEAS:
        logger.debug(f"✂️ Lát cắt vi phạm |S|={len(members)}, x(δ⁺(S))={value:.9g}")
        return SeparationResult(cut=cut, value=value)
    return None


# ========================================
# 🔄 VÒNG LẶP MẶT PHẲNG CẮT
# ========================================

def _to_circulation(graph: TwoWeightDigraph, x: np.ndarray) -> Dict[int, float]:
    return {e.edge_id: clamp(float(x[e.edge_id])) for e in graph.edges}


def _objective(graph: TwoWeightDigraph, value: Mapping[int, float]) -> float:
    return sum(graph.weight(edge_id) * v for edge_id, v in value.items())


def _require_strong(graph: TwoWeightDigraph) -> None:
    if not is_strongly_connected(graph):
        raise GraphNotStronglyConnectedError("đồ thị không liên thông mạnh: LP(G) không khả thi")


def solve_held_karp(graph: TwoWeightDigraph, workers: int = BATCH_WORKERS) -> HeldKarpResult:
    """
    Giải LP(G) bằng mặt phẳng cắt, giữ lại mọi hàng cắt đã thêm.

    Raises:
        GraphNotStronglyConnectedError: nếu G không liên thông mạnh
        IterationLimitError: nếu vượt 10·n·m vòng lặp
        InternalInconsistencyError: nếu một lát cắt đã thêm vẫn bị vi phạm
        LpStatusError: nếu một LP trung gian không tối ưu
    """
    _require_strong(graph)
    if graph.vertex_count == 1:
        return HeldKarpResult(value={}, objective=0.0)

    model = build_initial_model(graph)
    limit = 10 * graph.vertex_count * max(graph.edge_count, 1)
    iterations = 0
    while True:
        iterations += 1
        if iterations > limit:
            raise IterationLimitError(f"cắt mặt phẳng vượt {limit} vòng lặp")
        result = lp_solve(model)
        if result.status != OPTIMAL:
            raise LpStatusError(result.status)
        value = _to_circulation(graph, result.x)
        violated = separate(graph, value, workers=workers)
        if violated is None:
            break
        if violated.cut in model.cuts:
            logger.error(f"❌ Lát cắt đã có trong LP vẫn bị vi phạm: x(δ⁺(S)) = {violated.value:.12g}")
            raise InternalInconsistencyError(
                "lát cắt lặp lại: LP trả về nghiệm vi phạm một hàng cắt đã thêm",
                {"cut": sorted(violated.cut.member_set), "value": violated.value, "iteration": iterations},
            )
        add_cut_row(model, graph, violated.cut)
        logger.debug(f"🔄 Vòng {iterations}: thêm lát cắt, tổng {len(model.cuts)} hàng")

    objective = _objective(graph, value)
    logger.info(f"✅ LP(G) tối ưu sau {iterations} vòng: objective={objective:.9g}, {len(model.cuts)} lát cắt")
    return HeldKarpResult(value=value, objective=objective, iterations=iterations, cuts=tuple(model.cuts))


def enumerate_held_karp(graph: TwoWeightDigraph) -> FractionalCirculation:
    """Oracle: LP với toàn bộ 2ⁿ−2 hàng cắt, chỉ cho n ≤ 10."""
    if graph.vertex_count > ENUMERATION_MAX_N:
        raise InvalidInputError(f"enumerate_held_karp chỉ hỗ trợ n <= {ENUMERATION_MAX_N}")
    _require_strong(graph)
    model = _balance_model(graph)
    n = graph.vertex_count
    for mask in range(1, (1 << n) - 1):
        add_cut_row(model, graph, CutSpec(frozenset(v for v in range(n) if mask >> v & 1)))
    result = lp_solve(model)
    if result.status != OPTIMAL:
        raise LpStatusError(result.status)
    value = _to_circulation(graph, result.x)
    return FractionalCirculation(value=value, objective=_objective(graph, value))


def validate_fractional(graph: TwoWeightDigraph, solution: FractionalCirculation) -> None:
    """
    Kiểm tra một nghiệm đọc từ file: không âm, cân bằng và không có lát cắt vi phạm.

    Raises:
        InvalidInputError: nếu nghiệm không khả thi cho LP(G)
    """
    if any(v < 0 for v in solution.value.values()):
        raise InvalidInputError("nghiệm LP có giá trị âm")
    worst = max((abs(d) for d in vertex_imbalance(graph, solution.value)), default=0.0)
    if worst > EPS_FEAS:
        raise InvalidInputError(f"nghiệm LP không cân bằng (lệch {worst:.3g})")
    violated = separate(graph, solution.value)
    if violated is not None:
        raise InvalidInputError(f"nghiệm LP vi phạm lát cắt {sorted(violated.cut.member_set)} ({violated.value:.9g})")


# ========================================
# 📄 FILE NGHIỆM LP
# ========================================

def render_lp_solution(solution: FractionalCirculation, edge_count: int) -> str:
    lines = [f"{e} {format_value(solution.get(e))}" for e in range(edge_count)]
    lines.append(f"objective {format_value(solution.objective)}")
    return "\n".join(lines) + "\n"


def write_lp_solution(path: Union[str, Path], solution: FractionalCirculation, edge_count: int) -> None:
    Path(path).write_text(render_lp_solution(solution, edge_count))


def read_lp_solution(path: Union[str, Path], graph: TwoWeightDigraph) -> FractionalCirculation:
    """
    Đọc file nghiệm `edge_id value` ... `objective <value>`.

    Giá trị mục tiêu được tính lại từ vector; lệch so với file chỉ sinh cảnh báo.
    """
    value: Dict[int, float] = {}
    declared = None
    for number, raw in enumerate(Path(path).read_text().splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        if len(parts) != 2:
            raise InvalidInputError(f"{path}:{number}: cần 'edge_id value'")
        try:
            if parts[0] == "objective":
                declared = float(parts[1])
                continue
            edge_id, amount = int(parts[0]), float(parts[1])
        except ValueError:
            raise InvalidInputError(f"{path}:{number}: giá trị không phải số")
        if not 0 <= edge_id < graph.edge_count:
            raise InvalidInputError(f"{path}:{number}: edge id {edge_id} ngoài đồ thị")
        if edge_id in value:
            raise InvalidInputError(f"{path}:{number}: edge id {edge_id} lặp lại")
        value[edge_id] = clamp(amount)
    objective = _objective(graph, value)
    if declared is not None and abs(declared - objective) > EPS_OBJ * max(1.0, abs(objective)):
        logger.warning(f"⚠️ objective trong file ({declared}) khác giá trị tính lại ({objective})")
    return FractionalCirculation(value=value, objective=objective)
