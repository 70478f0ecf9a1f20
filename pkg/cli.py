# Giao Diện Dòng Lệnh LC-ATSP
"""
Giao diện dòng lệnh cho từng giai đoạn của bộ công cụ và cho pipeline / batch.

Mã thoát: 0 đạt, 1 chứng chỉ không đạt, 2 lỗi dữ liệu vào hoặc cú pháp lệnh, 3 lỗi nội bộ.
Log luôn ghi ra stderr; stdout chỉ chứa kết quả để có thể so sánh từng byte.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config import EPS_FEAS, LOG_LEVEL
from errors import InvalidInputError, LcAtspError, StageError, VerificationError
from flow_routing import find_sink_flow, read_terminals, render_terminals
from graph_core import format_value, read_graph, render_graph
from held_karp import enumerate_held_karp, read_lp_solution, render_lp_solution, solve_held_karp
from instances import FAMILIES, PARTITION_KINDS, generate
from local_connectivity import Partition, read_partition, read_solution, render_solution, solve_local_connectivity
from pipeline import aggregate_max_ratio, run_batch, run_pipeline
from split_graph import (build_split, compute_lower_bound, read_lower_bound, render_lower_bound, render_split,
                         write_lower_bound)
from verify_oracle import assemble_tour, brute_force_atsp, verify_solution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _emit(text: str, out: Optional[str]) -> None:
    """Ghi ra file nếu có --out, ngược lại in ra stdout."""
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _partition_arg(args, vertex_count: int) -> Partition:
    if args.singletons or args.partition is None:
        return Partition.singletons(vertex_count)
    return read_partition(args.partition, vertex_count)


# ========================================
# 🧰 CÁC LỆNH CON
# ========================================

def cmd_gen(args) -> int:
    graph = generate(args.family, args.n, args.density, args.w0, args.w1, args.seed,
                     expensive_share=args.expensive_share)
    _emit(render_graph(graph), args.out)
    return EXIT_OK


def cmd_solve_lp(args) -> int:
    graph = read_graph(args.graph)
    solution = enumerate_held_karp(graph) if args.enumerate else solve_held_karp(graph)
    _emit(render_lp_solution(solution, graph.edge_count), args.out)
    return EXIT_OK


def cmd_find_terminals(args) -> int:
    graph = read_graph(args.graph)
    x_star = read_lp_solution(args.lp, graph)
    sink_flow = find_sink_flow(graph, x_star, order=args.order)
    _emit(render_terminals(sink_flow), args.out)
    return EXIT_OK


def cmd_split(args) -> int:
    graph = read_graph(args.graph)
    x_star = read_lp_solution(args.lp, graph)
    if args.terminals:
        sink_flow = read_terminals(args.terminals, graph, x_star)
    else:
        if x_star.expensive_mass(graph) < 1.0 - EPS_FEAS:
            raise InvalidInputError("x*(E1) < 1: không có G_sp, nhánh 6-light không cần terminal")
        sink_flow = find_sink_flow(graph, x_star)
    split, _ = build_split(graph, x_star, sink_flow)
    lower_bound = compute_lower_bound(graph, x_star, sink_flow)
    _emit(render_split(split) + render_lower_bound(lower_bound), args.out)
    if args.lb_out:
        write_lower_bound(args.lb_out, lower_bound)
    return EXIT_OK


def cmd_local_connectivity(args) -> int:
    graph = read_graph(args.graph)
    x_star = read_lp_solution(args.lp, graph)
    partition = _partition_arg(args, graph.vertex_count)
    sink_flow = read_terminals(args.terminals, graph, x_star) if args.terminals else None
    lower_bound = read_lower_bound(args.lb) if args.lb else None
    solution = solve_local_connectivity(graph, x_star, lower_bound, partition, sink_flow=sink_flow)
    certificate = verify_solution(graph, solution.lower_bound, partition, solution.multiset, solution)
    _emit(render_solution(solution.multiset), args.out)
    payload = certificate.model_dump_json(indent=2) + "\n"
    if args.certificate_out:
        Path(args.certificate_out).write_text(payload)
    else:
        sys.stdout.write(payload)
    if args.lb_out:
        write_lower_bound(args.lb_out, solution.lower_bound)
    return EXIT_OK if certificate.passed else EXIT_FAILED


def cmd_verify(args) -> int:
    graph = read_graph(args.graph)
    lower_bound = read_lower_bound(args.lb)
    if sorted(lower_bound.lbs) != list(graph.vertices):
        raise InvalidInputError(f"{args.lb}: bảng cận dưới không khớp tập đỉnh của đồ thị")
    partition = read_partition(args.partition, graph.vertex_count)
    multiset = read_solution(args.solution, graph)
    certificate = verify_solution(graph, lower_bound, partition, multiset)
    print(certificate.model_dump_json(indent=2))
    return EXIT_OK if certificate.passed else EXIT_FAILED


def cmd_bruteforce(args) -> int:
    graph = read_graph(args.graph)
    print(f"opt {format_value(brute_force_atsp(graph, allow_large=args.allow_large))}")
    return EXIT_OK


def cmd_tour(args) -> int:
    graph = read_graph(args.graph)
    x_star = read_lp_solution(args.lp, graph) if args.lp else solve_held_karp(graph)
    result = assemble_tour(graph, x_star)
    _emit(render_solution(result.multiset), args.out)
    if args.circuit_out:
        Path(args.circuit_out).write_text(" ".join(str(e) for e in result.circuit) + "\n")
    print(f"ratio {format_value(result.ratio_vs_lp)}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    graph = read_graph(args.graph)
    partition = _partition_arg(args, graph.vertex_count)
    result = run_pipeline(graph, partition, args.out_dir, seed=args.seed, record_timings=args.timings)
    print(result.report.model_dump_json(indent=2))
    return EXIT_OK if result.certificate.passed else EXIT_FAILED


def cmd_batch(args) -> int:
    frame = run_batch(args.family, args.count, args.seed, args.n, args.density, args.w0, args.w1,
                      args.out_dir, partition_kind=args.partition_kind, workers=args.workers)
    print(f"max_ratio {format_value(aggregate_max_ratio(frame))}")
    print(f"passed {int(frame['passed'].sum())}/{len(frame)}")
    return EXIT_OK if bool(frame["passed"].all()) else EXIT_FAILED


# ========================================
# 🔧 PARSER
# ========================================

def _add_generator_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", choices=FAMILIES, default="random-strong")
    parser.add_argument("--n", type=int, default=8)
    parser.add_argument("--density", type=float, default=0.3)
    parser.add_argument("--w0", type=float, default=1.0)
    parser.add_argument("--w1", type=float, default=10.0)
    parser.add_argument("--seed", type=int, default=0)


def _add_partition_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("partition", nargs="?", help="file phân hoạch `i: v1 v2 ...`")
    parser.add_argument("--singletons", action="store_true", help="dùng phân hoạch đơn tử")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcatsp", description="Bộ công cụ Local-Connectivity ATSP hai trọng số")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="mức log (mặc định từ LCATSP_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="sinh instance")
    _add_generator_args(p)
    p.add_argument("--expensive-share", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("solve-lp", help="giải LP Held-Karp")
    p.add_argument("graph")
    p.add_argument("--enumerate", action="store_true", help="liệt kê mọi lát cắt (n <= 10)")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_solve_lp)

    p = sub.add_parser("find-terminals", help="tìm T tối thiểu và luồng f")
    p.add_argument("graph")
    p.add_argument("lp")
    p.add_argument("--order", choices=("ascending", "descending"), default="ascending")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_find_terminals)

    p = sub.add_parser("split", help="dựng đồ thị tách và cận dưới")
    p.add_argument("graph")
    p.add_argument("lp")
    p.add_argument("--terminals", help="file terminal; mặc định tìm T tối thiểu từ x*")
    p.add_argument("--out")
    p.add_argument("--lb-out")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("local-connectivity", help="giải Local-Connectivity ATSP")
    p.add_argument("graph")
    p.add_argument("lp")
    _add_partition_args(p)
    p.add_argument("--terminals")
    p.add_argument("--lb")
    p.add_argument("--out")
    p.add_argument("--lb-out")
    p.add_argument("--certificate-out", help="ghi chứng chỉ JSON ra file thay vì stdout")
    p.set_defaults(handler=cmd_local_connectivity)

    p = sub.add_parser("verify", help="kiểm định nghiệm, in chứng chỉ JSON")
    p.add_argument("graph")
    p.add_argument("lb")
    p.add_argument("partition")
    p.add_argument("solution")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("bruteforce", help="ATSP chính xác bằng quy hoạch động")
    p.add_argument("graph")
    p.add_argument("--allow-large", action="store_true", help="cho phép n <= 16")
    p.set_defaults(handler=cmd_bruteforce)

    p = sub.add_parser("tour", help="ghép tour bằng local-connectivity lặp")
    p.add_argument("graph")
    p.add_argument("--lp")
    p.add_argument("--out")
    p.add_argument("--circuit-out")
    p.set_defaults(handler=cmd_tour)

    p = sub.add_parser("pipeline", help="chạy trọn chuỗi trên một instance")
    p.add_argument("graph")
    _add_partition_args(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timings", action="store_true", help="ghi thời gian từng giai đoạn vào báo cáo")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("batch", help="chạy pipeline trên nhiều seed")
    _add_generator_args(p)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--partition-kind", choices=PARTITION_KINDS, default="singletons")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_batch)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return args.handler(args)
    except VerificationError as exc:
        logger.error(f"❌ Kiểm định thất bại: {exc}")
        return EXIT_FAILED
    except InvalidInputError as exc:
        logger.error(f"❌ Dữ liệu vào không hợp lệ: {exc}")
        return EXIT_INPUT
    except StageError as exc:
        logger.error(f"❌ {exc}")
        if isinstance(exc.cause, InvalidInputError):
            return EXIT_INPUT
        return EXIT_FAILED if isinstance(exc.cause, VerificationError) else EXIT_INTERNAL
    except LcAtspError as exc:
        logger.error(f"❌ Lỗi nội bộ: {exc}")
        return EXIT_INTERNAL
    except OSError as exc:
        logger.error(f"❌ Không đọc/ghi được file: {exc}")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
