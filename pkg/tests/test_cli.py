"""Kiểm thử giao diện dòng lệnh: các lệnh con và mã thoát."""

import json

import pytest

from cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, main


def test_figure1_stage_by_stage(tmp_path, data_dir, capsys):
    graph = str(data_dir / "figure1.graph")
    lp = str(tmp_path / "lp.sol")
    terminals = str(tmp_path / "terminals.txt")
    lb = str(tmp_path / "lb.txt")
    solution = str(tmp_path / "solution.txt")
    partition = str(data_dir / "figure1.partition")

    assert main(["solve-lp", graph, "--out", lp]) == EXIT_OK
    assert main(["find-terminals", graph, str(data_dir / "figure1.lp"), "--out", terminals]) == EXIT_OK
    assert open(terminals).readline().strip() == "T 2 5"
    assert main(["split", graph, str(data_dir / "figure1.lp"), "--terminals", terminals,
                 "--out", str(tmp_path / "split.txt"), "--lb-out", lb]) == EXIT_OK
    assert main(["local-connectivity", graph, str(data_dir / "figure1.lp"), partition, "--terminals", terminals,
                 "--lb", lb, "--out", solution, "--certificate-out", str(tmp_path / "lc.json")]) == EXIT_OK
    assert json.loads((tmp_path / "lc.json").read_text())["passed"] is True
    capsys.readouterr()
    assert main(["verify", graph, lb, partition, solution]) == EXIT_OK
    certificate = json.loads(capsys.readouterr().out)
    assert certificate["passed"] is True


def test_verify_reports_failure(tmp_path, data_dir, capsys):
    lb = tmp_path / "lb.txt"
    lb.write_text("# kind lbs/10\nvertex lbs lb\n" + "".join(f"{v} 10 1\n" for v in range(6)))
    empty = tmp_path / "empty.txt"
    empty.write_text("")
    code = main(["verify", str(data_dir / "figure1.graph"), str(lb), str(data_dir / "figure1.partition"), str(empty)])
    assert code == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_split_derives_terminals_and_prints_lb_table(data_dir, capsys):
    assert main(["split", str(data_dir / "figure1.graph"), str(data_dir / "figure1.lp")]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# arc_id tail head kind origin weight x_sp\n")
    head, table = out.split("# kind ", 1)
    assert "discharge" in head
    rows = table.splitlines()
    assert rows[1] == "vertex lbs lb"
    assert len(rows) == 2 + 6


def test_local_connectivity_prints_solution_and_certificate(data_dir, capsys):
    code = main(["local-connectivity", str(data_dir / "figure1.graph"), str(data_dir / "figure1.lp"),
                 str(data_dir / "figure1.partition")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    split_at = out.index("{")
    lines = out[:split_at].splitlines()
    assert lines and all(len(line.split()) == 2 for line in lines)
    certificate = json.loads(out[split_at:])
    assert certificate["passed"] is True
    assert [c["ok"] for c in certificate["crossings"]] == [True, True]
    assert all({"weight", "lbs", "ratio_lb"} <= set(c) for c in certificate["components"])
    assert len(certificate["walks"]) == 2
    assert certificate["degree_violations"] == []


def test_gen_and_bruteforce(tmp_path, capsys):
    path = tmp_path / "cycle.graph"
    assert main(["gen", "--family", "expensive-heavy", "--n", "4", "--density", "0", "--w0", "1", "--w1", "3",
                 "--out", str(path)]) == EXIT_OK
    assert main(["bruteforce", str(path)]) == EXIT_OK
    assert capsys.readouterr().out == "opt 12\n"


def test_tour_prints_ratio(tmp_path, data_dir, capsys):
    out = tmp_path / "tour.txt"
    circuit = tmp_path / "circuit.txt"
    assert main(["tour", str(data_dir / "figure1.graph"), "--out", str(out), "--circuit-out", str(circuit)]) == EXIT_OK
    assert capsys.readouterr().out.startswith("ratio ")
    assert out.read_text()
    assert circuit.read_text().strip()


def test_pipeline_command(tmp_path, data_dir, capsys):
    code = main(["pipeline", str(data_dir / "figure1.graph"), str(data_dir / "figure1.partition"),
                 "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    assert json.loads(capsys.readouterr().out)["certificate"]["passed"] is True


def test_batch_command(tmp_path, capsys):
    code = main(["batch", "--family", "random-strong", "--n", "6", "--count", "2", "--out-dir", str(tmp_path)])
    assert code == EXIT_OK
    assert capsys.readouterr().out.startswith("max_ratio ")


def test_bad_input_exit_code(tmp_path):
    broken = tmp_path / "broken.graph"
    broken.write_text("3 1 1\n")
    assert main(["bruteforce", str(broken)]) == EXIT_INPUT
    assert main(["bruteforce", str(tmp_path / "missing.graph")]) == EXIT_INPUT


def test_disconnected_pipeline_is_input_error(tmp_path):
    graph = tmp_path / "path.graph"
    graph.write_text("3 2 1 2\n0 1 0\n1 2 0\n")
    assert main(["pipeline", str(graph), "--singletons", "--out-dir", str(tmp_path / "out")]) == EXIT_INPUT


def test_usage_error_exits():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2
