"""Command-line entry point.

Subcommands map one-to-one onto the library operations: generate instances,
solve them with a predictor, benchmark against a baseline, sweep the
neighbour count, or solve exactly. Exit codes: 0 success, 1 pipeline error,
2 usage error.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys
from pathlib import Path

from .benchmark import (
    HELD_KARP_BASELINE,
    REFERENCE_BASELINE,
    format_summary,
    run_benchmark,
    sweep_k,
    write_report_csv,
    write_sweep_csv,
)
from .decoding import decode
from .encoding import encode_inference
from .errors import NodeTourError
from .exact import held_karp
from .geometry import generate_instance, tour_length
from .instance_io import read_instances, write_instance
from .local_search import best_of_restarts, two_opt
from .predictors import PredictorSpec, predict


def _predictor_from_flag(value: str, model: str | None, timeout: float) -> PredictorSpec:
    if value == "oracle":
        return PredictorSpec.oracle()
    if value == "nearest":
        return PredictorSpec.nearest()
    if value.startswith("cmd:"):
        command = shlex.split(value[4:])
        return PredictorSpec.external(command, timeout=timeout, model_dir=model)
    raise NodeTourError(f"unknown predictor {value!r}; use oracle, nearest, or cmd:\"...\"")


def _parse_k_range(text: str) -> list[int]:
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1))
        elif part:
            values.append(int(part))
    if not values:
        raise NodeTourError(f"empty k range {text!r}")
    return values


def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instances", required=True, help="instance file or directory")
    p.add_argument("--format", default="auto", choices=["auto", "canonical", "coords"])
    p.add_argument("--predictor", default="nearest",
                   help='oracle | nearest | cmd:"<adapter command>"')
    p.add_argument("--model", default=None, help="model artifact dir for cmd predictors")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--m-spatial", type=int, default=10)
    p.add_argument("--two-opt", action="store_true")
    p.add_argument("--time-limit", type=float, default=None, help="2-opt seconds per tour")
    p.add_argument("--timeout", type=float, default=600.0, help="adapter call timeout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nodetour")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="emit random unit-square instances")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("solve", help="predict, decode, and optionally 2-opt tours")
    _add_solve_flags(p)
    p.add_argument("--restarts", type=int, default=0,
                   help="also try N seeded random-restart 2-opt tours, keep the best")
    p.add_argument("--out", default=None, help="directory for solved instance files")

    p = sub.add_parser("bench", help="benchmark a predictor against a baseline")
    _add_solve_flags(p)
    p.add_argument("--baseline", required=True, choices=["ref", "held-karp"])
    p.add_argument("--report", required=True, help="report CSV path")
    p.add_argument("--archive", default=None, help="directory for replayable prediction CSVs")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--adaptation-time", type=float, default=None,
                   help="seconds spent fitting, echoed into the report")
    p.add_argument("--data-used", type=int, default=None,
                   help="training sample count, echoed into the report")

    p = sub.add_parser("sweep-k", help="fit and evaluate across neighbour counts")
    p.add_argument("--train", required=True, help="canonical file with one instance + tour")
    p.add_argument("--eval", required=True, help="eval instance file or directory")
    p.add_argument("--format", default="auto", choices=["auto", "canonical", "coords"])
    p.add_argument("--k-range", required=True, help='e.g. "1-40" or "1,2,5,10"')
    p.add_argument("--predictor", default="nearest")
    p.add_argument("--model-root", default=None, help="where per-k model artifacts go")
    p.add_argument("--m-spatial", type=int, default=10)
    p.add_argument("--two-opt", action="store_true")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--timeout", type=float, default=600.0)
    p.add_argument("--baseline", default="ref", choices=["ref", "held-karp"])
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", required=True, help="sweep CSV path")

    p = sub.add_parser("exact", help="optimal tours for instances up to 16 nodes")
    p.add_argument("--instances", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "canonical", "coords"])
    p.add_argument("--out", default=None, help="directory for solved instance files")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (NodeTourError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "generate":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for i in range(args.count):
            inst = generate_instance(args.n, args.seed + i)
            write_instance(inst, None, out / f"{inst.id}.tsp")
        print(f"wrote {args.count} instance(s) to {out}")
        return 0

    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "bench":
        return _cmd_bench(args)
    if args.command == "sweep-k":
        return _cmd_sweep(args)
    if args.command == "exact":
        return _cmd_exact(args)
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_solve(args) -> int:
    pairs = read_instances(args.instances, args.format)
    spec = _predictor_from_flag(args.predictor, args.model, args.timeout)
    out = None
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    for inst, ref in pairs:
        table = encode_inference(inst, args.k)
        preds = predict(spec, table, reference=ref)
        tour = decode(inst, preds, args.m_spatial)
        if args.two_opt:
            tour = two_opt(inst, tour, time_limit=args.time_limit)
        if args.restarts > 0:
            rival = best_of_restarts(inst, args.restarts, seed=0, time_limit=args.time_limit)
            if tour_length(inst, rival) < tour_length(inst, tour):
                tour = rival
        length = tour_length(inst, tour)
        print(f"{inst.id} {inst.n} {length:.6f}")
        if out is not None:
            write_instance(inst, tour, out / f"{inst.id}.tsp")
    return 0


def _cmd_bench(args) -> int:
    pairs = read_instances(args.instances, args.format)
    spec = _predictor_from_flag(args.predictor, args.model, args.timeout)
    baseline = REFERENCE_BASELINE if args.baseline == "ref" else HELD_KARP_BASELINE
    report = run_benchmark(
        pairs, spec, k=args.k, m_spatial=args.m_spatial, use_two_opt=args.two_opt,
        baseline=baseline, time_limit=args.time_limit, workers=args.workers,
        archive_dir=args.archive, adaptation_time_s=args.adaptation_time,
        data_used=args.data_used,
    )
    write_report_csv(report, args.report)
    print(format_summary(report))
    if report.failures and not report.records:
        return 1
    return 0


def _cmd_sweep(args) -> int:
    train_pairs = read_instances(args.train, args.format)
    if len(train_pairs) != 1 or train_pairs[0][1] is None:
        raise NodeTourError("--train must hold exactly one instance with a tour")
    eval_pairs = read_instances(args.eval, args.format)
    spec = _predictor_from_flag(args.predictor, None, args.timeout)
    baseline = REFERENCE_BASELINE if args.baseline == "ref" else HELD_KARP_BASELINE
    rows = sweep_k(
        train_pairs[0], eval_pairs, spec, _parse_k_range(args.k_range),
        m_spatial=args.m_spatial, use_two_opt=args.two_opt, baseline=baseline,
        time_limit=args.time_limit, workers=args.workers, model_root=args.model_root,
    )
    write_sweep_csv(rows, args.out)
    for k, gap, count in rows:
        print(f"k={k} mean_gap={gap:+.2f}% over {count} instance(s)")
    return 0


def _cmd_exact(args) -> int:
    pairs = read_instances(args.instances, args.format)
    out = None
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
    for inst, _ in pairs:
        tour, length = held_karp(inst)
        print(f"{inst.id} {inst.n} {length:.6f}")
        if out is not None:
            write_instance(inst, tour, out / f"{inst.id}.tsp")
    return 0


if __name__ == "__main__":
    sys.exit(main())
