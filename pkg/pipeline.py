# Pipeline Và Batch
"""
🚀 Chạy trọn chuỗi solve-lp → find-terminals → split → local-connectivity → verify,
ghi mọi file trung gian và báo cáo JSON; chạy batch nhiều seed và tổng hợp bằng pandas.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

import pandas as pd
from pydantic import BaseModel, Field

from config import (BATCH_WORKERS, EPS_FEAS, GAP_FACTOR, LIGHTNESS_TARGET, REPORT_SCHEMA_VERSION,
                    TERMINAL_FACTOR)
from errors import LcAtspError, StageError
from flow_routing import SinkFlow, find_sink_flow, write_terminals
from graph_core import TwoWeightDigraph, write_graph
from held_karp import solve_held_karp, write_lp_solution
from instances import generate, partition_rng, random_partition
from local_connectivity import LcSolution, Partition, solve_local_connectivity, write_partition, write_solution
from split_graph import SplitGraph, build_split, compute_lower_bound, write_lower_bound, write_split
from verify_oracle import Certificate, verify_solution

logger = logging.getLogger(__name__)

STAGES = ("solve-lp", "find-terminals", "split", "local-connectivity", "verify")


# ========================================
# 📋 BÁO CÁO (pydantic)
# ========================================

class InstanceDescriptor(BaseModel):
    n: int
    m: int
    w0: float
    w1: float
    seed: Optional[int] = None
    family: Optional[str] = None


class CertificateSummary(BaseModel):
    passed: bool
    eulerian_ok: bool
    classes_crossed: int
    classes_total: int
    vacuous_crossing: bool
    components: int
    max_ratio: float


class FrameworkConstants(BaseModel):
    lightness: float = LIGHTNESS_TARGET
    integrality_gap_factor: float = GAP_FACTOR * LIGHTNESS_TARGET


class RunReport(BaseModel):
    schema_version: str = REPORT_SCHEMA_VERSION
    instance: InstanceDescriptor
    branch: str
    lower_bound_kind: str
    lp_objective: float
    lp_iterations: int
    expensive_mass: float
    terminal_count: Optional[int] = None
    terminal_bound_slack: Optional[float] = None
    lb_over_opt: float
    solution_weight: float
    certificate: CertificateSummary
    constants: FrameworkConstants = Field(default_factory=FrameworkConstants)
    wall_times: Optional[Dict[str, float]] = None


class BatchRow(BaseModel):
    seed: int
    n: int
    m: int
    branch: Optional[str] = None
    passed: bool
    max_ratio: Optional[float] = None
    lp_objective: Optional[float] = None
    terminal_count: Optional[int] = None
    error: Optional[str] = None


@dataclass
class PipelineResult:
    report: RunReport
    certificate: Certificate
    solution: LcSolution


# ========================================
# ⏱️ GIAI ĐOẠN
# ========================================

@contextmanager
def _stage(name: str, timings: Dict[str, float]) -> Iterator[None]:
    started = time.perf_counter()
    logger.info(f"▶️ Giai đoạn {name}")
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        logger.error(f"❌ Giai đoạn {name} thất bại: {exc}")
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - started


def _summarize(certificate: Certificate) -> CertificateSummary:
    return CertificateSummary(
        passed=certificate.passed,
        eulerian_ok=certificate.eulerian_ok,
        classes_crossed=sum(1 for c in certificate.crossings if c.ok),
        classes_total=len(certificate.crossings),
        vacuous_crossing=certificate.vacuous_crossing,
        components=len(certificate.components),
        max_ratio=certificate.max_ratio,
    )


# ========================================
# 🚀 PIPELINE
# ========================================

def run_pipeline(graph: TwoWeightDigraph, partition: Optional[Partition], out_dir: Union[str, Path],
                 seed: Optional[int] = None, family: Optional[str] = None,
                 record_timings: bool = False) -> PipelineResult:
    """
    Chạy toàn bộ chuỗi trên một instance và ghi file vào out_dir.

    Args:
        partition: None nghĩa là phân hoạch đơn tử
        record_timings: ghi thời gian từng giai đoạn vào báo cáo (báo cáo khi đó
            không còn giống hệt từng byte giữa các lần chạy)

    Returns:
        PipelineResult với RunReport, Certificate và LcSolution

    Raises:
        StageError: giai đoạn nào lỗi thì mang tên giai đoạn đó
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    partition = partition or Partition.singletons(graph.vertex_count)
    timings: Dict[str, float] = {}
    write_graph(graph, out / "instance.graph")
    write_partition(out / "instance.partition", partition)

    with _stage("solve-lp", timings):
        x_star = solve_held_karp(graph)
        write_lp_solution(out / "lp.sol", x_star, graph.edge_count)
    mass = x_star.expensive_mass(graph)

    sink_flow: Optional[SinkFlow] = None
    split: Optional[SplitGraph] = None
    lower_bound = None
    if mass >= 1.0 - EPS_FEAS:
        with _stage("find-terminals", timings):
            sink_flow = find_sink_flow(graph, x_star)
            write_terminals(out / "terminals.txt", sink_flow)
        with _stage("split", timings):
            split, _ = build_split(graph, x_star, sink_flow)
            lower_bound = compute_lower_bound(graph, x_star, sink_flow)
            write_split(out / "split.txt", split)
    else:
        logger.info(f"🔀 x*(E1) = {mass:.6g} < 1: bỏ qua terminal, dùng nhánh 6-light")

    with _stage("local-connectivity", timings):
        solution = solve_local_connectivity(graph, x_star, lower_bound, partition, sink_flow=sink_flow, split=split)
        write_solution(out / "solution.txt", solution.multiset)
        write_lower_bound(out / "lb.txt", solution.lower_bound)
        if sink_flow is None and solution.split is not None:
            write_split(out / "split.txt", solution.split)

    with _stage("verify", timings):
        certificate = verify_solution(graph, solution.lower_bound, partition, solution.multiset, solution)
        (out / "certificate.json").write_text(certificate.model_dump_json(indent=2) + "\n")

    terminal_count = len(sink_flow.terminals) if sink_flow is not None else None
    report = RunReport(
        instance=InstanceDescriptor(n=graph.vertex_count, m=graph.edge_count, w0=graph.w0, w1=graph.w1,
                                    seed=seed, family=family),
        branch=solution.branch,
        lower_bound_kind=solution.lower_bound_kind,
        lp_objective=x_star.objective,
        lp_iterations=x_star.iterations,
        expensive_mass=mass,
        terminal_count=terminal_count,
        terminal_bound_slack=TERMINAL_FACTOR * mass - terminal_count if terminal_count is not None else None,
        lb_over_opt=solution.lower_bound.total_lb / x_star.objective if x_star.objective > 0 else 0.0,
        solution_weight=solution.multiset.weight(graph),
        certificate=_summarize(certificate),
        wall_times=timings if record_timings else None,
    )
    (out / "report.json").write_text(report.model_dump_json(indent=2) + "\n")
    status = "✅" if certificate.passed else "❌"
    logger.info(f"{status} Pipeline xong: nhánh {solution.branch}, max ratio {certificate.max_ratio:.6g}")
    return PipelineResult(report=report, certificate=certificate, solution=solution)


# ========================================
# 📦 BATCH
# ========================================

def _batch_one(seed: int, family: str, n: int, density: float, w0: float, w1: float,
               partition_kind: str, out_dir: Path) -> BatchRow:
    graph = generate(family, n, density, w0, w1, seed)
    partition = random_partition(graph, partition_kind, partition_rng(seed))
    try:
        result = run_pipeline(graph, partition, out_dir / f"seed_{seed}", seed=seed, family=family)
    except LcAtspError as exc:
        logger.warning(f"⚠️ Seed {seed}: {exc}")
        return BatchRow(seed=seed, n=graph.vertex_count, m=graph.edge_count, passed=False, error=str(exc))
    report = result.report
    return BatchRow(seed=seed, n=report.instance.n, m=report.instance.m, branch=report.branch,
                    passed=report.certificate.passed, max_ratio=report.certificate.max_ratio,
                    lp_objective=report.lp_objective, terminal_count=report.terminal_count)


def run_batch(family: str, count: int, seed: int, n: int, density: float, w0: float, w1: float,
              out_dir: Union[str, Path], partition_kind: str = "singletons",
              workers: int = BATCH_WORKERS) -> pd.DataFrame:
    """
    Chạy pipeline cho các seed [seed, seed + count), mỗi seed một thư mục con,
    rồi ghi `batch.csv`.

    Returns:
        DataFrame một dòng cho mỗi seed, sắp theo seed
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = list(range(seed, seed + count))
    logger.info(f"🔄 Batch {family}: {count} instance, {workers} luồng")

    def task(s: int) -> BatchRow:
        return _batch_one(s, family, n, density, w0, w1, partition_kind, out)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows: List[BatchRow] = list(pool.map(task, seeds))
    else:
        rows = [task(s) for s in seeds]

    frame = pd.DataFrame([row.model_dump() for row in rows]).sort_values("seed").reset_index(drop=True)
    frame.to_csv(out / "batch.csv", index=False, float_format="%.17g")
    passed = int(frame["passed"].sum())
    logger.info(f"📊 Batch xong: {passed}/{len(frame)} đạt, max ratio {aggregate_max_ratio(frame):.6g}")
    return frame


def aggregate_max_ratio(frame: pd.DataFrame) -> float:
    ratios = frame["max_ratio"].dropna()
    return float(ratios.max()) if len(ratios) else 0.0
