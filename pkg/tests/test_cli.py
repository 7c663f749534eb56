"""Tests for the command-line interface and its exit-code contract."""

import csv
import json

import numpy as np
import pytest

from mirrorbreak.circuit import Circuit, Gate, inverse_circuit, serialize_qasm
from mirrorbreak.cli import _build_parser, main

from .oracles import random_circuit


@pytest.fixture
def instance_files(tmp_path):
    code = main([
        "generate", "--qubits", "8", "--depth", "60", "--peak-weight", "0.2",
        "--obf-swaps", "10", "--seed", "7", "--out", str(tmp_path / "inst"),
    ])
    assert code == 0
    return tmp_path / "inst.qasm", tmp_path / "inst.json"


class TestDefaults:
    def test_run_defaults_match_reference_hyperparameters(self):
        parser = _build_parser()
        args = parser.parse_args(["run", "--circuit", "x.qasm"])
        assert args.epsilon == 2e-3
        assert args.chi_max == 8192
        assert args.tau == 1e6
        assert args.max_unswap_iters == 20
        assert args.acceptance == "strict"
        assert args.side == "adaptive"


class TestGenerate:
    def test_writes_qasm_and_sidecar(self, instance_files):
        qasm_path, json_path = instance_files
        assert qasm_path.exists() and json_path.exists()
        sidecar = json.loads(json_path.read_text())
        assert set(sidecar) == {"peak", "design_weight", "achieved_weight", "seed"}
        assert len(sidecar["peak"]) == 8

    def test_repeat_invocation_reproduces_bytes(self, tmp_path):
        args = ["generate", "--qubits", "6", "--depth", "30", "--peak-weight", "0.3",
                "--obf-swaps", "4", "--seed", "3"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a.qasm").read_bytes() == (tmp_path / "b.qasm").read_bytes()
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_invalid_qubit_count_exits_2(self, tmp_path):
        code = main(["generate", "--qubits", "1", "--depth", "10",
                     "--out", str(tmp_path / "x")])
        assert code == 2

    def test_missing_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--qubits", "4"])
        assert exc.value.code == 2


class TestRun:
    def test_mirror_circuit_histogram_is_all_zeros(self, tmp_path):
        rng = np.random.default_rng(0)
        c = random_circuit(5, 8, rng, adjacent_only=True)
        mirror = Circuit(5, c.gates + inverse_circuit(c).gates)
        path = tmp_path / "mirror.qasm"
        path.write_text(serialize_qasm(mirror))
        hist = tmp_path / "hist.csv"
        code = main(["run", "--circuit", str(path), "--shots", "100",
                     "--seed", "1", "--hist", str(hist)])
        assert code == 0
        rows = list(csv.reader(hist.open()))
        assert rows[0] == ["bitstring", "count"]
        assert rows[1] == ["00000", "100"]
        assert len(rows) == 2

    def test_histogram_counts_sum_to_shots(self, tmp_path, instance_files):
        qasm_path, _ = instance_files
        hist = tmp_path / "h.csv"
        code = main(["run", "--circuit", str(qasm_path), "--shots", "250",
                     "--seed", "2", "--hist", str(hist), "--epsilon", "1e-8"])
        assert code == 0
        rows = list(csv.reader(hist.open()))[1:]
        assert sum(int(r[1]) for r in rows) == 250

    def test_top_bitstring_matches_sidecar_peak(self, tmp_path, instance_files, capsys):
        qasm_path, json_path = instance_files
        code = main(["run", "--circuit", str(qasm_path), "--shots", "1000",
                     "--seed", "3", "--epsilon", "1e-8"])
        assert code == 0
        out = capsys.readouterr().out
        peak = json.loads(json_path.read_text())["peak"]
        assert f"top {peak} " in out

    def test_trace_file_is_nd_json(self, tmp_path, instance_files):
        qasm_path, _ = instance_files
        trace_path = tmp_path / "trace.ndjson"
        code = main(["run", "--circuit", str(qasm_path), "--shots", "10",
                     "--seed", "0", "--trace", str(trace_path), "--epsilon", "1e-8"])
        assert code == 0
        records = [json.loads(line) for line in trace_path.read_text().splitlines()]
        assert records
        for rec in records:
            assert set(rec) == {"phase", "unitaries_consumed", "elements", "wall_time_s"}

    def test_missing_circuit_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["run"])
        assert exc.value.code == 2

    def test_unreadable_circuit_exits_4(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["run", "--circuit", str(tmp_path / "missing.qasm")])
        assert exc.value.code == 4

    def test_qasm_error_reports_file_and_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.qasm"
        bad.write_text("OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1],q[1];\n")
        with pytest.raises(SystemExit) as exc:
            main(["run", "--circuit", str(bad)])
        assert exc.value.code == 2
        err = capsys.readouterr().err
        assert "bad.qasm" in err and "line 3" in err

    def test_stall_exits_3(self, tmp_path, capsys):
        rng = np.random.default_rng(31)
        c = random_circuit(8, 40, rng)
        path = tmp_path / "random.qasm"
        path.write_text(serialize_qasm(c))
        code = main(["run", "--circuit", str(path), "--tau", "200", "--shots", "10"])
        assert code == 3
        assert "no exploitable mirror structure" in capsys.readouterr().err

    def test_stall_still_emits_partial_trace(self, tmp_path):
        rng = np.random.default_rng(31)
        c = random_circuit(8, 40, rng)
        path = tmp_path / "random.qasm"
        path.write_text(serialize_qasm(c))
        trace_path = tmp_path / "partial.ndjson"
        code = main(["run", "--circuit", str(path), "--tau", "200", "--shots", "10",
                     "--trace", str(trace_path)])
        assert code == 3
        records = [json.loads(line) for line in trace_path.read_text().splitlines()]
        assert records  # the absorb/unswap history up to the diagnosis
        assert records[-1]["phase"] == "unswap"


class TestVerify:
    def test_generated_instance_verifies(self, instance_files, capsys):
        qasm_path, _ = instance_files
        code = main(["verify", "--circuit", str(qasm_path), "--shots", "2000",
                     "--seed", "5", "--epsilon", "1e-10"])
        assert code == 0
        out = capsys.readouterr().out
        assert "peak_match true" in out
        assert "fidelity 1.0000" in out

    def test_identity_circuit_fidelity_one(self, tmp_path, capsys):
        c = Circuit(3, (Gate("x", (0,)), Gate("x", (0,))))
        path = tmp_path / "ident.qasm"
        path.write_text(serialize_qasm(c))
        code = main(["verify", "--circuit", str(path), "--shots", "100", "--seed", "1"])
        assert code == 0
        assert "fidelity 1.0000" in capsys.readouterr().out

    def test_qubit_guard(self, tmp_path, capsys):
        c = Circuit(20, (Gate("h", (0,)),))
        path = tmp_path / "big.qasm"
        path.write_text(serialize_qasm(c))
        code = main(["verify", "--circuit", str(path)])
        assert code == 2
        assert "capped" in capsys.readouterr().err


class TestThreadsEnv:
    def test_invalid_threads_value_exits_2(self, monkeypatch, tmp_path):
        monkeypatch.setenv("MIRRORBREAK_THREADS", "zero")
        with pytest.raises(SystemExit) as exc:
            main(["generate", "--qubits", "4", "--depth", "8",
                  "--out", str(tmp_path / "x")])
        assert exc.value.code == 2

    def test_valid_threads_value_accepted(self, monkeypatch, tmp_path):
        monkeypatch.setenv("MIRRORBREAK_THREADS", "2")
        code = main(["generate", "--qubits", "4", "--depth", "8", "--seed", "1",
                     "--out", str(tmp_path / "y")])
        assert code == 0
