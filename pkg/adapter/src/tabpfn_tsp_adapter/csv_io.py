"""Parsing and writing the batch-exchange CSV files.

Feature CSVs have columns row_id,cur_x,cur_y then nb{j}_x,nb{j}_y,nb{j}_d for
j=1..k; training files end with next_x,next_y. Prediction CSVs are
row_id,pred_x,pred_y. All floats use '.' decimals; we write them with repr so
values survive a round trip unchanged.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class FormatError(Exception):
    """The CSV does not match the exchange contract."""


@dataclass(frozen=True)
class FeatureBatch:
    row_ids: np.ndarray   # (n,) int
    features: np.ndarray  # (n, 2 + 3k) float: cur_x, cur_y, then per-neighbour x, y, d
    targets: np.ndarray | None  # (n, 2) float for training files
    k: int


def expected_columns(k: int, training: bool) -> list[str]:
    cols = ["row_id", "cur_x", "cur_y"]
    for j in range(1, k + 1):
        cols += [f"nb{j}_x", f"nb{j}_y", f"nb{j}_d"]
    if training:
        cols += ["next_x", "next_y"]
    return cols


def _infer_k(header: list[str]) -> tuple[int, bool]:
    training = header[-2:] == ["next_x", "next_y"]
    body = len(header) - 3 - (2 if training else 0)
    if body <= 0 or body % 3 != 0:
        raise FormatError(f"cannot infer neighbour count from header {header}")
    return body // 3, training


def read_feature_csv(path, require_targets: bool | None = None) -> FeatureBatch:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        k, training = _infer_k(header)
        if header != expected_columns(k, training):
            raise FormatError(f"{path}: unexpected column layout {header}")
        if require_targets and not training:
            raise FormatError(f"{path}: missing target columns next_x,next_y")
        if require_targets is False and training:
            raise FormatError(f"{path}: inference file should not carry targets")
        row_ids, feats, targets = [], [], []
        for ln, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}:{ln}: expected {len(header)} fields, got {len(row)}")
            try:
                row_ids.append(int(row[0]))
                values = [float(v) for v in row[1:]]
            except ValueError:
                raise FormatError(f"{path}:{ln}: malformed numeric field") from None
            if training:
                feats.append(values[:-2])
                targets.append(values[-2:])
            else:
                feats.append(values)
    if not row_ids:
        raise FormatError(f"{path}: no data rows")
    if len(set(row_ids)) != len(row_ids):
        raise FormatError(f"{path}: duplicate row_id")
    batch = FeatureBatch(
        row_ids=np.array(row_ids, dtype=np.int64),
        features=np.array(feats, dtype=np.float64),
        targets=np.array(targets, dtype=np.float64) if training else None,
        k=k,
    )
    if not np.all(np.isfinite(batch.features)):
        raise FormatError(f"{path}: non-finite feature value")
    return batch


def write_prediction_csv(row_ids, xs, ys, path) -> None:
    lines = ["row_id,pred_x,pred_y"]
    for rid, x, y in zip(row_ids, xs, ys):
        lines.append(f"{int(rid)},{float(x)!r},{float(y)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
