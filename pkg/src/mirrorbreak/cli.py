"""Command-line frontend: generate instances, run contractions, sample, and
emit traces and histograms for external plotting.

Exit codes are a stable contract: 0 success, 2 usage error, 3 stall
diagnosis, 4 I/O failure. Bitstrings print qubit 0 leftmost everywhere.
The MIRRORBREAK_THREADS environment variable caps internal parallelism; the
current implementation is single-threaded, so the value is validated and
recorded but has no further effect.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from .circuit import QasmError, parse_qasm
from .driver import ContractionConfig, StallError, dense_output, emit_trace, run, sample_output
from .oracle import bits_to_index, peak_of, simulate, tvd
from .peaked import generate, write_instance

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STALL = 3
EXIT_IO = 4

VERIFY_MAX_QUBITS = 12


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirrorbreak",
        description=(
            "Contract mirrored (peaked) quantum circuits by absorbing both halves "
            "into a central tensor chain and greedily extracting hidden "
            "permutations. Bitstrings are printed with qubit 0 leftmost."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a peaked test instance (QASM + JSON sidecar)")
    gen.add_argument("--qubits", type=int, required=True)
    gen.add_argument("--depth", type=int, required=True, help="two-qubit gate budget")
    gen.add_argument("--peak-weight", type=float, default=0.1)
    gen.add_argument("--obf-swaps", type=int, default=0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="output path prefix")

    runp = sub.add_parser("run", help="contract a circuit, sample it, and dump telemetry")
    runp.add_argument("--circuit", required=True, help="QASM 2.0 input file")
    runp.add_argument("--epsilon", type=float, default=2e-3)
    runp.add_argument("--chi-max", type=int, default=8192)
    runp.add_argument("--tau", type=float, default=1e6)
    runp.add_argument("--max-unswap-iters", type=int, default=20)
    runp.add_argument("--acceptance", choices=["strict", "relaxed"], default="strict")
    runp.add_argument("--side", default="adaptive", help="adaptive or fixed:<k>")
    runp.add_argument("--shots", type=int, default=1000)
    runp.add_argument("--seed", type=int, default=0)
    runp.add_argument("--trace", help="write the ND-JSON contraction trace here")
    runp.add_argument("--hist", help="write the sampled histogram CSV here")

    ver = sub.add_parser("verify", help="check a circuit against the statevector oracle")
    ver.add_argument("--circuit", required=True)
    ver.add_argument("--against", choices=["oracle"], default="oracle")
    ver.add_argument("--epsilon", type=float, default=1e-10)
    ver.add_argument("--shots", type=int, default=10000)
    ver.add_argument("--seed", type=int, default=0)
    return parser


def _read_threads_cap() -> int | None:
    raw = os.environ.get("MIRRORBREAK_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
        if cap < 1:
            raise ValueError
    except ValueError:
        raise SystemExit(EXIT_USAGE)
    return cap


def _load_circuit(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    try:
        return parse_qasm(text)
    except QasmError as exc:
        print(f"error: {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write_histogram(path: str, counts: Counter) -> None:
    rows = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bitstring", "count"])
            writer.writerows(rows)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_IO)


def _cmd_generate(args) -> int:
    try:
        inst = generate(args.qubits, args.depth, args.peak_weight, args.obf_swaps, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        qasm_path, json_path = write_instance(inst, args.out)
    except OSError as exc:
        print(f"error: cannot write instance: {exc}", file=sys.stderr)
        return EXIT_IO
    achieved = "n/a" if inst.achieved_weight is None else f"{inst.achieved_weight:.4f}"
    print(f"wrote {qasm_path} and {json_path}")
    print(f"peak {inst.peak} design_weight {inst.design_weight:.4f} achieved_weight {achieved}")
    return EXIT_OK


def _cmd_run(args) -> int:
    circuit = _load_circuit(args.circuit)
    try:
        cfg = ContractionConfig(
            epsilon=args.epsilon,
            chi_max=args.chi_max,
            tau=int(args.tau),
            max_unswap_iterations=args.max_unswap_iters,
            acceptance=args.acceptance,
            side_mode=args.side,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        result = run(circuit, cfg)
        trace = result.trace
    except StallError as exc:
        print(f"stall: {exc}", file=sys.stderr)
        if args.trace:
            try:
                with open(args.trace, "w") as fh:
                    emit_trace(exc.trace, fh)
            except OSError:
                pass  # the stall diagnosis is the primary outcome
        return EXIT_STALL

    if args.trace:
        try:
            with open(args.trace, "w") as fh:
                emit_trace(trace, fh)
        except OSError as exc:
            print(f"error: cannot write {args.trace}: {exc}", file=sys.stderr)
            return EXIT_IO

    samples = sample_output(result, args.shots, args.seed)
    counts = Counter(samples)
    if args.hist:
        _write_histogram(args.hist, counts)
    # deterministic top row: highest count, then lexicographically smallest
    top, top_count = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
    print(f"top {top} {top_count}/{args.shots} ({top_count / args.shots:.4f})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    circuit = _load_circuit(args.circuit)
    if circuit.num_qubits > VERIFY_MAX_QUBITS:
        print(
            f"error: oracle verification is capped at {VERIFY_MAX_QUBITS} qubits, "
            f"got {circuit.num_qubits}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    cfg = ContractionConfig(epsilon=args.epsilon)
    try:
        result = run(circuit, cfg)
    except StallError as exc:
        print(f"stall: {exc}", file=sys.stderr)
        return EXIT_STALL

    reference = simulate(circuit)
    produced = dense_output(result)
    fidelity = float(abs(np.vdot(reference, produced)) ** 2)

    samples = sample_output(result, args.shots, args.seed)
    counts = Counter(samples)
    n = circuit.num_qubits
    empirical = np.zeros(2**n)
    for bits, k in counts.items():
        empirical[bits_to_index(bits)] = k / args.shots
    sample_tvd = tvd(empirical, np.abs(reference) ** 2)

    oracle_peak, _ = peak_of(reference)
    produced_peak, _ = peak_of(produced)
    match = oracle_peak == produced_peak
    print(f"fidelity {fidelity:.10f}")
    print(f"tvd {sample_tvd:.6f} at {args.shots} shots")
    print(f"peak_match {str(match).lower()} (oracle {oracle_peak}, contracted {produced_peak})")
    return EXIT_OK if match else 1


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _read_threads_cap()
    if args.command == "generate":
        return _cmd_generate(args)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_verify(args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
