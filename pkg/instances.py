# Sinh Instance
"""
🎲 Bộ sinh instance tất định theo seed (numpy Generator + PCG64).

Các họ:
    • random-strong: chu trình Hamilton rẻ + cạnh ngẫu nhiên, rẻ/đắt chia đôi
    • cheap-heavy: như trên, đa số cạnh thêm vào là rẻ
    • expensive-heavy: chu trình Hamilton đắt, đa số cạnh thêm vào là đắt
    • figure1-gadgets: n/6 bản sao đồ thị 6 đỉnh hai tam giác, nối vòng bằng cạnh đắt
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from errors import InvalidInputError
from graph_core import TwoWeightDigraph, WeightClass, strongly_connected_components
from held_karp import FractionalCirculation
from local_connectivity import Partition

logger = logging.getLogger(__name__)

FAMILIES = ("random-strong", "figure1-gadgets", "cheap-heavy", "expensive-heavy")
PARTITION_KINDS = ("singletons", "blocks", "scc-aligned")
GADGET_SIZE = 6

_EXPENSIVE_SHARE = {"random-strong": 0.5, "cheap-heavy": 0.1, "expensive-heavy": 0.9}

# a=0, b=1, c=2, d=3, e=4, g=5
_FIGURE1_CHEAP = ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3))
_FIGURE1_EXPENSIVE = ((0, 3), (3, 0), (1, 4), (4, 1), (2, 5), (5, 2))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def partition_rng(seed: int) -> np.random.Generator:
    """Luồng ngẫu nhiên riêng cho phân hoạch, tách khỏi luồng sinh đồ thị cùng seed."""
    child = np.random.SeedSequence(seed).spawn(1)[0]
    return np.random.Generator(np.random.PCG64(child))


# ========================================
# 🧩 ĐỒ THỊ HÌNH MẪU
# ========================================

def figure1_graph(w0: float = 1.0, w1: float = 2.0) -> TwoWeightDigraph:
    """Hai tam giác rẻ a→b→c→a, d→e→g→d nối bởi ba cặp cạnh đắt hai chiều."""
    triples = [(u, v, WeightClass.CHEAP) for u, v in _FIGURE1_CHEAP]
    triples += [(u, v, WeightClass.EXPENSIVE) for u, v in _FIGURE1_EXPENSIVE]
    return TwoWeightDigraph.from_triples(6, triples, w0, w1)


def figure1_fractional_solution(graph: Optional[TwoWeightDigraph] = None) -> FractionalCirculation:
    """x* = 2/3 trên cạnh rẻ, 1/3 trên cạnh đắt."""
    graph = graph or figure1_graph()
    value = {e.edge_id: (1 / 3 if e.is_expensive else 2 / 3) for e in graph.edges}
    objective = sum(graph.weight(e) * x for e, x in value.items())
    return FractionalCirculation(value=value, objective=objective)


def figure1_partition() -> Partition:
    return Partition.of([{0, 1, 2}, {3, 4, 5}])


# ========================================
# 🎲 BỘ SINH
# ========================================

def _validate(family: str, n: int, density: float, w0: float, w1: float) -> None:
    if family not in FAMILIES:
        raise InvalidInputError(f"họ instance không hợp lệ: {family} (chọn trong {', '.join(FAMILIES)})")
    if n < 2:
        raise InvalidInputError("cần n >= 2")
    if not 0.0 <= density <= 1.0:
        raise InvalidInputError(f"density phải nằm trong [0, 1], nhận {density}")
    if not 0 <= w0 < w1:
        raise InvalidInputError(f"cần 0 <= w0 < w1, nhận w0={w0}, w1={w1}")
    if family == "figure1-gadgets" and n % GADGET_SIZE:
        raise InvalidInputError(f"figure1-gadgets cần n là bội của {GADGET_SIZE}")


def _gadgets(n: int) -> List[Tuple[int, int, WeightClass]]:
    count = n // GADGET_SIZE
    triples = []
    for j in range(count):
        offset = GADGET_SIZE * j
        triples += [(u + offset, v + offset, WeightClass.CHEAP) for u, v in _FIGURE1_CHEAP]
        triples += [(u + offset, v + offset, WeightClass.EXPENSIVE) for u, v in _FIGURE1_EXPENSIVE]
    if count > 1:
        # c_j → a_{j+1}, vòng qua mọi gadget
        triples += [(GADGET_SIZE * j + 2, GADGET_SIZE * ((j + 1) % count), WeightClass.EXPENSIVE)
                    for j in range(count)]
    return triples


def generate(family: str, n: int, density: float, w0: float, w1: float, seed: int,
             expensive_share: Optional[float] = None) -> TwoWeightDigraph:
    """
    Sinh đồ thị hai trọng số liên thông mạnh, tất định theo seed.

    Args:
        family: một trong FAMILIES
        n: số đỉnh (≥ 2)
        density: xác suất thêm mỗi cặp (u, v) ngoài chu trình Hamilton
        w0, w1: trọng số rẻ / đắt
        seed: seed của PCG64
        expensive_share: tỉ lệ cạnh đắt trong các cạnh thêm (mặc định theo họ)

    Raises:
        InvalidInputError: tham số không hợp lệ
    """
    _validate(family, n, density, w0, w1)
    if family == "figure1-gadgets":
        graph = TwoWeightDigraph.from_triples(n, _gadgets(n), w0, w1)
        logger.info(f"🎲 figure1-gadgets: {n // GADGET_SIZE} gadget, m={graph.edge_count}")
        return graph

    share = _EXPENSIVE_SHARE[family] if expensive_share is None else expensive_share
    if not 0.0 <= share <= 1.0:
        raise InvalidInputError(f"expensive_share phải nằm trong [0, 1], nhận {share}")
    rng = make_rng(seed)
    order = [int(v) for v in rng.permutation(n)]
    cycle_class = WeightClass.EXPENSIVE if family == "expensive-heavy" else WeightClass.CHEAP
    triples = [(order[i], order[(i + 1) % n], cycle_class) for i in range(n)]
    planted = {(u, v) for u, v, _ in triples}
    for u in range(n):
        for v in range(n):
            if u == v or (u, v) in planted:
                continue
            if rng.random() < density:
                klass = WeightClass.EXPENSIVE if rng.random() < share else WeightClass.CHEAP
                triples.append((u, v, klass))
    graph = TwoWeightDigraph.from_triples(n, triples, w0, w1)
    logger.info(f"🎲 {family}: n={n}, m={graph.edge_count}, |E1|={len(graph.expensive_edges())}, seed={seed}")
    return graph


# ========================================
# 🧱 PHÂN HOẠCH NGẪU NHIÊN
# ========================================

def _random_blocks(items: List, rng: np.random.Generator, max_blocks: int = 5) -> List[List]:
    upper = min(max_blocks, len(items))
    if upper < 2:
        return [list(items)]
    count = int(rng.integers(2, upper + 1))
    shuffled = [items[i] for i in rng.permutation(len(items))]
    cuts = sorted(int(c) for c in rng.choice(np.arange(1, len(items)), size=count - 1, replace=False))
    bounds = [0] + cuts + [len(items)]
    return [shuffled[bounds[i]:bounds[i + 1]] for i in range(count)]


def random_partition(graph: TwoWeightDigraph, kind: str, rng: np.random.Generator) -> Partition:
    """
    Phân hoạch ngẫu nhiên của V.

    Args:
        kind: "singletons", "blocks" (2–5 khối) hoặc "scc-aligned" (hợp của các SCC của (V, E0))
    """
    n = graph.vertex_count
    if kind == "singletons":
        return Partition.singletons(n)
    if kind == "blocks":
        return Partition.of(_random_blocks(list(range(n)), rng))
    if kind == "scc-aligned":
        components = [sorted(c) for c in strongly_connected_components(graph, edge_subset=graph.cheap_edges()).components]
        if len(components) < 2:
            logger.debug("🧱 (V, E0) chỉ có một SCC, dùng khối ngẫu nhiên")
            return Partition.of(_random_blocks(list(range(n)), rng))
        groups = _random_blocks(components, rng)
        return Partition.of([v for component in group for v in component] for group in groups)
    raise InvalidInputError(f"loại phân hoạch không hợp lệ: {kind} (chọn trong {', '.join(PARTITION_KINDS)})")
