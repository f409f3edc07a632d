"""Evaluation harness: per-instance lengths, gaps against a baseline, k-sweeps,
and run bookkeeping.

Gaps are signed: 100 * (length - baseline) / baseline. The human-readable
summary also shows the display-style value clamped at zero, since published
tables never show a solver beating its baseline. Failed instances are
reported with an explicit count and excluded from aggregates, never imputed.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .decoding import decode
from .encoding import encode_inference, encode_training, write_prediction_csv
from .errors import InvalidBaselineError, NodeTourError
from .exact import MAX_NODES, held_karp
from .geometry import Tour, TspInstance, tour_length
from .local_search import two_opt
from .predictors import EXTERNAL, PredictorSpec, fit, predict

REFERENCE_BASELINE = "reference-tours"
HELD_KARP_BASELINE = "held-karp"


@dataclass(frozen=True)
class RunRecord:
    instance_id: str
    method: str
    n: int
    tour: Tour
    length: float
    baseline_length: float
    gap_percent: float
    wall_time_s: float
    k: int
    m_spatial: int
    two_opt: bool
    predictor: str


@dataclass(frozen=True)
class RunFailure:
    instance_id: str
    error: str


@dataclass(frozen=True)
class BenchmarkReport:
    records: tuple[RunRecord, ...]
    failures: tuple[RunFailure, ...] = ()
    adaptation_time_s: float | None = None
    data_used: int | None = None

    @property
    def count(self) -> int:
        return len(self.records)

    @property
    def mean_length(self) -> float:
        return math.fsum(r.length for r in self.records) / len(self.records)

    @property
    def mean_gap_percent(self) -> float:
        return math.fsum(r.gap_percent for r in self.records) / len(self.records)


def gap_percent(baseline: float, achieved: float) -> float:
    """Signed relative gap in percent against a positive baseline length."""
    if not baseline > 0:
        raise InvalidBaselineError(f"baseline length must be positive, got {baseline}")
    return 100.0 * (achieved - baseline) / baseline


def run_benchmark(
    instances: list[tuple[TspInstance, Tour | None]],
    predictor: PredictorSpec,
    k: int = 5,
    m_spatial: int = 10,
    use_two_opt: bool = False,
    baseline: str = REFERENCE_BASELINE,
    time_limit: float | None = None,
    workers: int = 1,
    archive_dir=None,
    adaptation_time_s: float | None = None,
    data_used: int | None = None,
) -> BenchmarkReport:
    """Encode, predict, decode, optionally 2-opt, and score every instance.

    baseline is "reference-tours" (each instance must come with a tour) or
    "held-karp" (every instance must have at most 16 nodes). The wall time of
    a record covers encode+predict+decode(+2-opt); baseline solving and any
    adapter fit happen outside it. With archive_dir set, the prediction CSV
    of every instance is written under it for later replay. Instances run
    concurrently up to `workers`; adapter processes stay serialized.
    """
    if baseline == REFERENCE_BASELINE:
        missing = [inst.id for inst, ref in instances if ref is None]
        if missing:
            raise ValueError(f"reference baseline needs a tour per instance; missing for {missing[:5]}")
    elif baseline == HELD_KARP_BASELINE:
        big = [inst.id for inst, _ in instances if inst.n > MAX_NODES]
        if big:
            raise ValueError(f"held-karp baseline capped at {MAX_NODES} nodes; too big: {big[:5]}")
    else:
        raise ValueError(f"unknown baseline {baseline!r}")

    method = predictor.kind + ("+2opt" if use_two_opt else "")
    archive_dir = None if archive_dir is None else Path(archive_dir)

    def run_one(inst: TspInstance, ref: Tour | None):
        if baseline == REFERENCE_BASELINE:
            baseline_len = tour_length(inst, ref)
        else:
            _, baseline_len = held_karp(inst)
        csv_dir = None if archive_dir is None else archive_dir / inst.id
        started = time.perf_counter()
        table = encode_inference(inst, k)
        preds = predict(predictor, table, reference=ref, csv_dir=csv_dir)
        tour = decode(inst, preds, m_spatial)
        if use_two_opt:
            tour = two_opt(inst, tour, time_limit=time_limit)
        elapsed = time.perf_counter() - started
        # External runs already archived the adapter's own CSV bytes via predict.
        if csv_dir is not None and predictor.kind != EXTERNAL:
            csv_dir.mkdir(parents=True, exist_ok=True)
            write_prediction_csv(preds, csv_dir / "predictions.csv")
        length = tour_length(inst, tour)
        return RunRecord(
            instance_id=inst.id,
            method=method,
            n=inst.n,
            tour=tour,
            length=length,
            baseline_length=baseline_len,
            gap_percent=gap_percent(baseline_len, length),
            wall_time_s=elapsed,
            k=k,
            m_spatial=m_spatial,
            two_opt=use_two_opt,
            predictor=predictor.label,
        )

    records: list[RunRecord] = []
    failures: list[RunFailure] = []
    if workers <= 1:
        outcomes = [_attempt(run_one, inst, ref) for inst, ref in instances]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_attempt, run_one, inst, ref) for inst, ref in instances]
            outcomes = [f.result() for f in futures]
    for outcome in outcomes:
        if isinstance(outcome, RunRecord):
            records.append(outcome)
        else:
            failures.append(outcome)
    return BenchmarkReport(
        records=tuple(records),
        failures=tuple(failures),
        adaptation_time_s=adaptation_time_s,
        data_used=data_used,
    )


def _attempt(run_one, inst, ref):
    try:
        return run_one(inst, ref)
    except NodeTourError as exc:
        return RunFailure(instance_id=inst.id, error=f"{type(exc).__name__}: {exc}")


def sweep_k(
    train: tuple[TspInstance, Tour],
    eval_set: list[tuple[TspInstance, Tour | None]],
    predictor: PredictorSpec,
    k_values: list[int],
    m_spatial: int = 10,
    use_two_opt: bool = False,
    baseline: str = REFERENCE_BASELINE,
    time_limit: float | None = None,
    workers: int = 1,
    model_root=None,
    exclude_target_from_neighbors: bool = False,
) -> list[tuple[int, float, int]]:
    """Fit at each neighbour count and benchmark the eval set at the same count.

    Returns (k, mean gap percent, evaluated instance count) per k. External
    predictors are fitted into model_root/k<k>.
    """
    train_inst, train_tour = train
    rows: list[tuple[int, float, int]] = []
    for k in k_values:
        table = encode_training(
            train_inst, train_tour, k,
            exclude_target_from_neighbors=exclude_target_from_neighbors,
        )
        model_out = None
        if predictor.kind == EXTERNAL:
            if model_root is None:
                raise ValueError("sweep with an external predictor needs model_root")
            model_out = Path(model_root) / f"k{k}"
        fitted = fit(predictor, table, model_out=model_out)
        report = run_benchmark(
            eval_set, fitted, k=k, m_spatial=m_spatial, use_two_opt=use_two_opt,
            baseline=baseline, time_limit=time_limit, workers=workers,
        )
        rows.append((k, report.mean_gap_percent, report.count))
    return rows


REPORT_COLUMNS = [
    "instance_id", "status", "method", "n", "length", "baseline_length",
    "gap_percent", "wall_time_s", "k", "m_spatial", "two_opt", "predictor", "error",
]


def write_report_csv(report: BenchmarkReport, path) -> None:
    """One row per instance, successes and failures alike; see REPORT_COLUMNS."""
    lines = [",".join(REPORT_COLUMNS)]
    for r in report.records:
        lines.append(",".join([
            r.instance_id, "ok", r.method, str(r.n), repr(r.length),
            repr(r.baseline_length), repr(r.gap_percent), repr(r.wall_time_s),
            str(r.k), str(r.m_spatial), str(int(r.two_opt)),
            _csv_safe(r.predictor), "",
        ]))
    for f in report.failures:
        lines.append(",".join([
            f.instance_id, "failed", "", "", "", "", "", "", "", "", "", "",
            _csv_safe(f.error),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_sweep_csv(rows: list[tuple[int, float, int]], path) -> None:
    lines = ["k,mean_gap_percent,instances"]
    for k, gap, count in rows:
        lines.append(f"{k},{gap!r},{count}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _csv_safe(text: str) -> str:
    return text.replace(",", ";").replace("\n", " ")


def format_summary(report: BenchmarkReport) -> str:
    """Human-readable aggregate block."""
    lines = [f"instances: {report.count} ok, {len(report.failures)} failed"]
    if report.records:
        mean_gap = report.mean_gap_percent
        display_gap = math.fsum(max(r.gap_percent, 0.0) for r in report.records) / report.count
        lines.append(f"mean length: {report.mean_length:.4f}")
        lines.append(f"mean gap:    {mean_gap:+.2f}% (display-clamped {display_gap:.2f}%)")
    if report.adaptation_time_s is not None:
        lines.append(f"adaptation time: {report.adaptation_time_s:.1f}s")
    if report.data_used is not None:
        lines.append(f"data used: {report.data_used} sample(s)")
    for f in report.failures:
        lines.append(f"  failed {f.instance_id}: {f.error}")
    return "\n".join(lines)
