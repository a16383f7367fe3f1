"""Command-line interface: ``run``, ``chi-stats`` and ``verify``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from collections import Counter
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from .circuit import CircuitParseError, parse
from .engine import chi_experiment, run_circuit
from .exceptions import StabilizerTNError
from .mps import TruncationPolicy
from .verify import FIDELITY_TOL, verify_random

__all__ = ["main", "build_parser", "CHI_HEADER", "RUN_CSV_HEADER", "HIST_HEADER"]

CHI_HEADER = ("n", "circuit_index", "log2_chi")
HIST_HEADER = ("n", "log2_chi", "count")
RUN_CSV_HEADER = ("shot", "index", "observable", "outcome", "probability")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _tgate_qubit(text: str) -> int | None:
    if text == "random":
        return None
    if text.startswith("fixed:") and text[6:].isdigit():
        return int(text[6:])
    raise argparse.ArgumentTypeError("expected 'random' or 'fixed:<qubit>'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stabilizer-tn",
        description="Clifford+rotation circuits on a stabilizer basis with an MPS of amplitudes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a circuit file")
    run.add_argument("file", type=Path)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--trunc-eps", type=float, default=1e-12)
    run.add_argument("--max-bond", type=int, default=None)
    run.add_argument("--shots", type=int, default=1)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--dump-state", type=Path, default=None, help="write the final amplitude MPS as JSON")
    run.add_argument("--pseudo-rank", action="store_true", help="report nonzero amplitudes (n <= 20)")

    chi = sub.add_parser("chi-stats", help="bond growth after one T gate on random Clifford bases")
    chi.add_argument("--n", type=int, nargs="+", default=[8, 16, 24, 32, 40])
    chi.add_argument("--circuits", type=int, default=None, help="circuits per n (default n**2)")
    chi.add_argument("--seed", type=int, default=0)
    chi.add_argument("--tgate-qubit", type=_tgate_qubit, default=None, metavar="random|fixed:<q>")
    chi.add_argument("--trunc-eps", type=float, default=1e-12)
    chi.add_argument("--workers", type=int, default=1)
    chi.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    chi.add_argument("--hist", type=Path, default=None, help="histogram CSV (default <out>.hist.csv)")

    ver = sub.add_parser("verify", help="cross-check random circuits against the dense simulator")
    ver.add_argument("--n", type=int, nargs="+", default=list(range(2, 9)))
    ver.add_argument("--circuits", type=int, default=50)
    ver.add_argument("--depth", type=int, default=30)
    ver.add_argument("--seed", type=int, default=0)
    return parser


def _shot_seed(seed: int, shot: int) -> int:
    return int(np.random.SeedSequence([seed, shot]).generate_state(1, np.uint64)[0])


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    try:
        text = args.file.read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    try:
        circuit = parse(text)
    except CircuitParseError as exc:
        print(f"{args.file}:{exc.line}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    if args.shots < 1:
        print("error: --shots must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    tp = TruncationPolicy(args.trunc_eps, args.max_bond)
    seed = args.seed if args.seed is not None else int(np.random.SeedSequence().entropy % 2**63)
    reports = []
    try:
        for shot in range(args.shots):
            shot_seed = seed if args.shots == 1 else _shot_seed(seed, shot)
            keep = args.dump_state is not None and shot == args.shots - 1
            reports.append(run_circuit(circuit, shot_seed, tp, args.pseudo_rank, keep_state=keep))
    except StabilizerTNError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.dump_state is not None:
        args.dump_state.write_text(json.dumps(reports[-1].state.nu.to_json()))

    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(RUN_CSV_HEADER)
        for shot, rep in enumerate(reports):
            for i, rec in enumerate(rep.records):
                writer.writerow((shot, i, rec.observable.to_label(), rec.outcome, repr(rec.probability)))
        return EXIT_OK

    if args.shots == 1:
        payload = reports[0].to_json()
    else:
        counts = Counter(
            "".join("0" if r.outcome == 1 else "1" for r in rep.records) for rep in reports
        )
        payload = {
            "seed": seed,
            "shots": args.shots,
            "counts": dict(sorted(counts.items())),
            "runs": [rep.to_json() for rep in reports],
        }
    json.dump(payload, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_chi_stats(args: argparse.Namespace, out: TextIO) -> int:
    tp = TruncationPolicy(args.trunc_eps)
    results = []
    try:
        for n in args.n:
            circuits = args.circuits if args.circuits is not None else n * n
            results.append(chi_experiment(n, circuits, args.seed, args.tgate_qubit, tp, args.workers))
    except (StabilizerTNError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CHI_HEADER)
    for res in results:
        for i, s in enumerate(res.samples):
            writer.writerow((res.n, i, f"{s:.6f}"))
    for res in results:
        writer.writerow((res.n, "mean", f"{res.mean:.6f}"))
        writer.writerow((res.n, "max", f"{res.max:.6f}"))

    hist = io.StringIO()
    hwriter = csv.writer(hist, lineterminator="\n")
    hwriter.writerow(HIST_HEADER)
    for res in results:
        for value, count in res.histogram.items():
            hwriter.writerow((res.n, f"{value:.6f}", count))

    if args.out is None:
        out.write(buf.getvalue())
    else:
        args.out.write_text(buf.getvalue())
    hist_path = args.hist
    if hist_path is None and args.out is not None:
        hist_path = args.out.with_suffix(".hist.csv")
    if hist_path is not None:
        hist_path.write_text(hist.getvalue())
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    if any(n < 1 or n > 12 for n in args.n):
        print("error: --n values must lie in 1..12", file=sys.stderr)
        return EXIT_USAGE
    res = verify_random(args.n, args.circuits, args.depth, args.seed)
    out.write(
        f"circuits={args.circuits} steps={res.n_steps} measurements={res.n_measurements}\n"
        f"min_fidelity={res.min_fidelity:.15f}\n"
        f"max_norm_error={res.max_norm_error:.3e}\n"
        f"max_probability_error={res.max_probability_error:.3e}\n"
    )
    if not res.passed:
        out.write(f"FAIL: min fidelity below 1 - {FIDELITY_TOL:g}\n")
        return EXIT_FAIL
    out.write("OK\n")
    return EXIT_OK


COMMANDS = {"run": cmd_run, "chi-stats": cmd_chi_stats, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args, out or sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
