"""The next-stop predictor boundary: built-in reference predictors and the
external adapter protocol.

A predictor maps each node to a predicted location for its next stop. Two
builtins exist for testing and baselines: "oracle" echoes the true successor's
coordinates from a reference tour, and "nearest" echoes the first (closest)
neighbour, the naive greedy choice. External predictors are separate
processes driven through a file-based batch exchange:

    <command> train   --features <train.csv> --model-out <dir>
    <command> predict --features <infer.csv> --model <dir> --out <pred.csv>

Exit code 0 means success; the feature and prediction CSV formats are defined
in the encoding module. Adapter processes are run serially under a module
lock; prediction CSVs can be kept for replay by passing a csv_dir.
"""

from __future__ import annotations

import subprocess
import tempfile
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from .encoding import INFERENCE, TRAINING, FeatureTable, read_prediction_csv, write_feature_csv
from .errors import AdapterError, MissingContextError
from .geometry import Point, Tour

ORACLE = "oracle"
NEAREST = "nearest"
EXTERNAL = "external"

PredictionSet = dict[int, Point]

_ADAPTER_LOCK = threading.Lock()


@dataclass(frozen=True)
class PredictorSpec:
    """How to obtain predictions: a builtin kind, or an external command."""

    kind: str
    command: tuple[str, ...] = ()
    workdir: Path | None = None
    timeout: float = 600.0
    model_dir: Path | None = None

    def __post_init__(self):
        if self.kind not in (ORACLE, NEAREST, EXTERNAL):
            raise ValueError(f"unknown predictor kind {self.kind!r}")
        if self.kind == EXTERNAL and not self.command:
            raise ValueError("external predictor needs a non-empty command")

    @classmethod
    def oracle(cls) -> "PredictorSpec":
        return cls(kind=ORACLE)

    @classmethod
    def nearest(cls) -> "PredictorSpec":
        return cls(kind=NEAREST)

    @classmethod
    def external(cls, command, workdir=None, timeout: float = 600.0,
                 model_dir=None) -> "PredictorSpec":
        return cls(
            kind=EXTERNAL,
            command=tuple(str(c) for c in command),
            workdir=None if workdir is None else Path(workdir),
            timeout=timeout,
            model_dir=None if model_dir is None else Path(model_dir),
        )

    @property
    def label(self) -> str:
        return self.kind if self.kind != EXTERNAL else "cmd:" + " ".join(self.command)


def fit(spec: PredictorSpec, training: FeatureTable, model_out=None) -> PredictorSpec:
    """Train the predictor on a training table; builtins are stateless no-ops.

    For an external predictor this invokes the adapter's train entry point and
    returns a spec pointing at the written model artifact.
    """
    if training.mode != TRAINING:
        raise ValueError(f"fit needs a training-mode table, got {training.mode!r}")
    if spec.kind != EXTERNAL:
        return spec
    if model_out is None:
        raise ValueError("external fit needs a model_out directory")
    model_out = Path(model_out)
    model_out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory(prefix="nodetour-fit-") as tmp:
        features = Path(tmp) / "train.csv"
        write_feature_csv(training, features)
        _run_adapter(
            spec,
            ["train", "--features", str(features), "--model-out", str(model_out)],
        )
    return replace(spec, model_dir=model_out)


def predict(
    spec: PredictorSpec,
    inference: FeatureTable,
    reference: Tour | None = None,
    csv_dir=None,
) -> PredictionSet:
    """Produce one predicted next-stop location per node.

    `reference` is required by the oracle builtin. If `csv_dir` is given, the
    feature and prediction CSVs of an external call are written there and kept
    (they are the replay record); otherwise a temporary directory is used.
    """
    if inference.mode != INFERENCE:
        raise ValueError(f"predict needs an inference-mode table, got {inference.mode!r}")
    if spec.kind == ORACLE:
        if reference is None:
            raise MissingContextError("oracle predictor needs a reference tour")
        if reference.n != inference.n:
            raise MissingContextError(
                f"reference tour has {reference.n} nodes, table has {inference.n}"
            )
        succ = reference.successors()
        return {row.row_id: inference.rows[succ[row.row_id]].cur for row in inference.rows}
    if spec.kind == NEAREST:
        return {
            row.row_id: (row.neighbors[0][0], row.neighbors[0][1]) for row in inference.rows
        }
    if csv_dir is not None:
        csv_dir = Path(csv_dir)
        csv_dir.mkdir(parents=True, exist_ok=True)
        return _predict_external(spec, inference, csv_dir)
    with tempfile.TemporaryDirectory(prefix="nodetour-predict-") as tmp:
        return _predict_external(spec, inference, Path(tmp))


def _predict_external(spec: PredictorSpec, inference: FeatureTable, csv_dir: Path) -> PredictionSet:
    if spec.model_dir is None:
        raise ValueError("external predict needs a model_dir (fit first)")
    features = csv_dir / "features.csv"
    out = csv_dir / "predictions.csv"
    write_feature_csv(inference, features)
    _run_adapter(
        spec,
        ["predict", "--features", str(features), "--model", str(spec.model_dir),
         "--out", str(out)],
    )
    rows = read_prediction_csv(out, [row.row_id for row in inference.rows])
    return {rid: (x, y) for rid, x, y in rows}


def _run_adapter(spec: PredictorSpec, args: list[str]) -> None:
    cmd = list(spec.command) + args
    with _ADAPTER_LOCK:
        try:
            proc = subprocess.run(
                cmd,
                cwd=spec.workdir,
                timeout=spec.timeout,
                capture_output=True,
                text=True,
            )
        except subprocess.TimeoutExpired:
            raise AdapterError(f"adapter timed out after {spec.timeout}s", command=cmd) from None
        except OSError as exc:
            raise AdapterError(f"adapter failed to start: {exc}", command=cmd) from None
    if proc.returncode != 0:
        raise AdapterError(
            "adapter exited nonzero",
            command=cmd,
            returncode=proc.returncode,
            stderr=proc.stderr,
        )
