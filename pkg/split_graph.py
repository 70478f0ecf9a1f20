# Đồ Thị Tách (Split Graph)
"""
🔀 Dựng G_sp với bản sao tự do v⁰ và bản sao nợ v¹ cho mỗi đỉnh, luồng x_sp,
và hàm cận dưới lbs / lb = lbs / 10.

Quy tắc arc:
    cạnh rẻ (u, v):   u⁰→v⁰ mang x* − f,  u¹→v¹ mang f
    cạnh đắt (u, v):  u⁰→v¹ mang f = x*
    terminal t:       t¹→t⁰ (xả nợ) mang f(δ⁻(t))
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import pandas as pd

from config import EPS_OBJ, LBS_SCALE, RELATIVE_SLACK, ZERO_CLAMP, ceil_nudged, clamp
from errors import InternalInconsistencyError, InvalidInputError
from flow_routing import SinkFlow
from graph_core import TwoWeightDigraph, format_value, in_value
from held_karp import FractionalCirculation

logger = logging.getLogger(__name__)

FREE = 0
DEBT = 1
AUX = 2

KIND_WEIGHTED = "lbs/10"
KIND_UNWEIGHTED = "unweighted"


class ArcKind(str, Enum):
    FREE_CHEAP = "free-cheap"
    DEBT_CHEAP = "debt-cheap"
    EXPENSIVE = "expensive"
    DISCHARGE = "discharge"


@dataclass(frozen=True, order=True)
class SplitNode:
    """Nút của G_sp: (đỉnh gốc, mức). Với mức AUX, `vertex` là chỉ số lớp A_i."""

    vertex: int
    level: int

    def __str__(self) -> str:
        return f"A{self.vertex}" if self.level == AUX else f"{self.vertex}.{self.level}"


@dataclass(frozen=True)
class SplitArc:
    arc_id: int
    tail: SplitNode
    head: SplitNode
    kind: ArcKind
    origin: Optional[int]       # edge id trong G; None với arc xả nợ
    weight: float
    value: float
    terminal: Optional[int] = None

    @property
    def is_debt(self) -> bool:
        """Arc nợ: đầu mút vào ở mức nợ (debt-cheap hoặc ảnh cạnh đắt)."""
        return self.head.level == DEBT


@dataclass
class SplitGraph:
    """
    G_sp kèm x_sp lưu trên từng arc. Việc tách arc (split_arc) thay đổi đồ thị
    tại chỗ, nên các bước về sau dùng `copy()` nếu cần giữ bản gốc.
    """

    graph: TwoWeightDigraph
    terminals: FrozenSet[int]
    arcs: List[SplitArc] = field(default_factory=list)

    def add_arc(self, tail: SplitNode, head: SplitNode, kind: ArcKind, origin: Optional[int],
                weight: float, value: float, terminal: Optional[int] = None) -> SplitArc:
        arc = SplitArc(len(self.arcs), tail, head, kind, origin, weight, value, terminal)
        self.arcs.append(arc)
        return arc

    def copy(self) -> "SplitGraph":
        return SplitGraph(self.graph, self.terminals, list(self.arcs))

    def nodes(self) -> List[SplitNode]:
        return [SplitNode(v, level) for v in self.graph.vertices for level in (FREE, DEBT)]

    def out_arcs(self, node: SplitNode) -> List[SplitArc]:
        return [a for a in self.arcs if a.tail == node]

    def in_arcs(self, node: SplitNode) -> List[SplitArc]:
        return [a for a in self.arcs if a.head == node]

    def x_sp(self) -> Dict[int, float]:
        return {a.arc_id: a.value for a in self.arcs}

    def split_arc(self, arc_id: int, amount: float) -> int:
        """
        Tách arc thành hai bản song song cùng gốc: bản cũ giữ `amount`,
        bản mới (id mới) giữ phần còn lại.

        Returns:
            id của bản mới
        """
        arc = self.arcs[arc_id]
        if not 0 < amount < arc.value:
            raise InvalidInputError(f"không thể tách arc {arc_id} (x_sp={arc.value}) tại {amount}")
        self.arcs[arc_id] = replace(arc, value=amount)
        twin = self.add_arc(arc.tail, arc.head, arc.kind, arc.origin, arc.weight, arc.value - amount, arc.terminal)
        logger.debug(f"✂️ Tách arc {arc_id}: {amount:.9g} + {twin.value:.9g} (bản mới {twin.arc_id})")
        return twin.arc_id


@dataclass(frozen=True)
class SplitCirculation:
    value: Dict[int, float]


@dataclass(frozen=True)
class LowerBound:
    """
    Cận dưới theo đỉnh. Với kind "lbs/10": lb = lbs / 10.
    Với kind "unweighted" (nhánh 6-light): lb(v) = w0·x′(δ⁻(v)) / 2 và lbs = 10·lb.
    """

    lbs: Dict[int, float]
    lb: Dict[int, float]
    kind: str = KIND_WEIGHTED
    unrounded_total: Optional[float] = None

    def lbs_of(self, vertices: Iterable[int]) -> float:
        return sum(self.lbs[v] for v in vertices)

    def lb_of(self, vertices: Iterable[int]) -> float:
        return sum(self.lb[v] for v in vertices)

    @property
    def total_lbs(self) -> float:
        return sum(self.lbs.values())

    @property
    def total_lb(self) -> float:
        return sum(self.lb.values())

    def to_frame(self) -> pd.DataFrame:
        vertices = sorted(self.lbs)
        return pd.DataFrame({
            "vertex": vertices,
            "lbs": [self.lbs[v] for v in vertices],
            "lb": [self.lb[v] for v in vertices],
        })


# ========================================
# 🏗️ DỰNG ĐỒ THỊ TÁCH
# ========================================

def build_split(graph: TwoWeightDigraph, x_star: FractionalCirculation,
                sink_flow: SinkFlow) -> Tuple[SplitGraph, SplitCirculation]:
    """
    Dựng G_sp và x_sp từ x* và luồng f.

    Arc có x_sp < 1e-9 bị bỏ, trừ arc xả nợ của terminal. Cạnh đắt có x* = 0
    vì thế không có ảnh.

    Raises:
        SinkFlowViolationError: nếu f vi phạm bất biến (tên bất biến trong lỗi)
    """
    sink_flow.check(graph, x_star)
    split = SplitGraph(graph=graph, terminals=sink_flow.terminals)
    for edge in graph.edges:
        u, v = edge.tail, edge.head
        if edge.is_expensive:
            value = sink_flow.get(edge.edge_id)
            if value > ZERO_CLAMP:
                split.add_arc(SplitNode(u, FREE), SplitNode(v, DEBT), ArcKind.EXPENSIVE, edge.edge_id, graph.w1, value)
            continue
        free_value = clamp(x_star.get(edge.edge_id) - sink_flow.get(edge.edge_id))
        debt_value = sink_flow.get(edge.edge_id)
        if free_value > ZERO_CLAMP:
            split.add_arc(SplitNode(u, FREE), SplitNode(v, FREE), ArcKind.FREE_CHEAP, edge.edge_id, graph.w0, free_value)
        if debt_value > ZERO_CLAMP:
            split.add_arc(SplitNode(u, DEBT), SplitNode(v, DEBT), ArcKind.DEBT_CHEAP, edge.edge_id, graph.w0, debt_value)
    for t in sorted(sink_flow.terminals):
        split.add_arc(SplitNode(t, DEBT), SplitNode(t, FREE), ArcKind.DISCHARGE, None, 0.0,
                      sink_flow.inflow[t], terminal=t)

    worst = max((abs(d) for d in split_imbalance(split).values()), default=0.0)
    logger.info(f"✅ G_sp: {len(split.arcs)} arc, lệch cân bằng lớn nhất {worst:.3g}")
    return split, SplitCirculation(split.x_sp())


def split_imbalance(split: SplitGraph) -> Dict[SplitNode, float]:
    """x_sp(δ⁻(v)) − x_sp(δ⁺(v)) tại mọi nút xuất hiện trong G_sp."""
    balance: Dict[SplitNode, float] = {node: 0.0 for node in split.nodes()}
    for arc in split.arcs:
        balance[arc.head] = balance.get(arc.head, 0.0) + arc.value
        balance[arc.tail] = balance.get(arc.tail, 0.0) - arc.value
    return balance


def image_cut_value(split: SplitGraph, subset: Iterable[int]) -> float:
    """x_sp trên ảnh của δ⁺(S): arc có đuôi thuộc ảnh của S và đầu ngoài ảnh."""
    members = frozenset(subset)
    return sum(a.value for a in split.arcs
               if a.tail.vertex in members and a.head.vertex not in members)


def contract_split(split: SplitGraph) -> Dict[int, float]:
    """Gộp (v⁰, v¹), bỏ arc xả nợ: khôi phục vector trên E."""
    contracted: Dict[int, float] = {}
    for arc in split.arcs:
        if arc.origin is not None:
            contracted[arc.origin] = contracted.get(arc.origin, 0.0) + arc.value
    return contracted


def debt_path_check(split: SplitGraph, walk: Sequence[int]) -> bool:
    """
    Walk (danh sách arc id) có đi qua một arc xả nợ hay không.

    Raises:
        InvalidInputError: nếu dãy arc không nối tiếp nhau
    """
    if not walk:
        raise InvalidInputError("walk rỗng")
    arcs = [split.arcs[arc_id] for arc_id in walk]
    for previous, current in zip(arcs, arcs[1:]):
        if previous.head != current.tail:
            raise InvalidInputError(f"arc {previous.arc_id} và {current.arc_id} không nối tiếp")
    return any(a.kind == ArcKind.DISCHARGE for a in arcs)


# ========================================
# 📏 CẬN DƯỚI lbs / lb
# ========================================

def compute_lower_bound(graph: TwoWeightDigraph, x_star: FractionalCirculation, sink_flow: SinkFlow) -> LowerBound:
    """
    lbs(v) = w0·x*(δ⁻(v)), cộng thêm w1·⌈f(δ⁻(t))⌉ nếu v là terminal; lb = lbs / 10.

    Đồng thời kiểm tra lbs(V) ≤ 10·w(x*) và phần chưa làm tròn
    w0·x*(E) + w1·x*(E1) ≤ 2·w(x*).

    Raises:
        InternalInconsistencyError: nếu một trong hai ngân sách bị vượt
    """
    lbs: Dict[int, float] = {}
    for v in graph.vertices:
        value = graph.w0 * in_value(graph, x_star.value, v)
        if v in sink_flow.terminals:
            value += graph.w1 * ceil_nudged(in_value(graph, sink_flow.flow, v))
        lbs[v] = value

    total = sum(lbs.values())
    budget = LBS_SCALE * x_star.objective
    if total > budget + EPS_OBJ + RELATIVE_SLACK * budget:
        raise InternalInconsistencyError(
            f"lbs(V) = {total:.9g} > 10·w(x*) = {budget:.9g}",
            {"lbs_total": total, "objective": x_star.objective, "terminals": sorted(sink_flow.terminals)},
        )
    unrounded = graph.w0 * sum(x_star.value.values()) + graph.w1 * x_star.expensive_mass(graph)
    if unrounded > 2 * x_star.objective + EPS_OBJ + RELATIVE_SLACK * x_star.objective:
        raise InternalInconsistencyError(f"lbs chưa làm tròn {unrounded:.9g} > 2·w(x*)",
                                         {"unrounded": unrounded, "objective": x_star.objective})

    logger.info(f"📊 lbs(V) = {total:.6g} <= 10·w(x*) = {budget:.6g}")
    return LowerBound(lbs=lbs, lb={v: s / LBS_SCALE for v, s in lbs.items()},
                      kind=KIND_WEIGHTED, unrounded_total=unrounded)


def unweighted_lower_bound(graph: TwoWeightDigraph, x_prime: Dict[int, float]) -> LowerBound:
    """lb(v) = w0·x′(δ⁻(v)) / 2, dùng cho nhánh x*(E1) < 1."""
    lb = {v: graph.w0 * in_value(graph, x_prime, v) / 2 for v in graph.vertices}
    return LowerBound(lbs={v: LBS_SCALE * value for v, value in lb.items()}, lb=lb, kind=KIND_UNWEIGHTED)


# ========================================
# 📄 FILE DUMP
# ========================================

def render_split(split: SplitGraph) -> str:
    lines = ["# arc_id tail head kind origin weight x_sp"]
    for arc in split.arcs:
        origin = f"t{arc.terminal}" if arc.origin is None else str(arc.origin)
        lines.append(f"{arc.arc_id} {arc.tail} {arc.head} {arc.kind.value} {origin} "
                     f"{format_value(arc.weight)} {format_value(arc.value)}")
    return "\n".join(lines) + "\n"


def write_split(path: Union[str, Path], split: SplitGraph) -> None:
    Path(path).write_text(render_split(split))


def render_lower_bound(lower_bound: LowerBound) -> str:
    """Bảng `vertex lbs lb` kèm dòng `# kind ...` ở đầu."""
    table = lower_bound.to_frame().to_csv(sep=" ", index=False, float_format="%.17g")
    return f"# kind {lower_bound.kind}\n" + table


def write_lower_bound(path: Union[str, Path], lower_bound: LowerBound) -> None:
    Path(path).write_text(render_lower_bound(lower_bound))


def read_lower_bound(path: Union[str, Path]) -> LowerBound:
    """
    Đọc bảng `vertex lbs lb` (kèm dòng `# kind ...`).

    Raises:
        InvalidInputError: nếu bảng thiếu cột hoặc giá trị âm
    """
    kind = KIND_WEIGHTED
    with open(path) as handle:
        first = handle.readline().split()
    if len(first) == 3 and first[:2] == ["#", "kind"]:
        kind = first[2]
    try:
        frame = pd.read_csv(path, sep=" ", comment="#")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InvalidInputError(f"{path}: bảng cận dưới hỏng ({exc})")
    if list(frame.columns) != ["vertex", "lbs", "lb"]:
        raise InvalidInputError(f"{path}: cần các cột 'vertex lbs lb'")
    if (frame[["lbs", "lb"]] < 0).any().any():
        raise InvalidInputError(f"{path}: cận dưới âm")
    vertices = [int(v) for v in frame["vertex"]]
    return LowerBound(lbs=dict(zip(vertices, (float(s) for s in frame["lbs"]))),
                      lb=dict(zip(vertices, (float(s) for s in frame["lb"]))), kind=kind)
