"""Per-node feature rows fed to next-stop predictors, and their CSV exchange files.

One row per node: the node's own coordinates plus its k nearest neighbours,
each neighbour contributing its coordinates and its distance to the current
node. Training rows additionally carry the coordinates of the node that
follows the current one in a reference tour, as the regression target.

Feature CSV layout (UTF-8, LF, '.' decimal, shortest round-trip floats)::

    row_id,cur_x,cur_y,nb1_x,nb1_y,nb1_d,...,nb{k}_x,nb{k}_y,nb{k}_d[,next_x,next_y]

Prediction CSV layout::

    row_id,pred_x,pred_y
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import InsufficientCandidatesError, InvalidTourError, ProtocolError
from .geometry import Point, Tour, TspInstance, distance, k_nearest, validate_tour

TRAINING = "training"
INFERENCE = "inference"


@dataclass(frozen=True)
class FeatureRow:
    row_id: int
    cur: Point
    neighbors: tuple[tuple[float, float, float], ...]  # (x, y, distance to cur)
    target: Point | None = None


@dataclass(frozen=True)
class FeatureTable:
    k: int
    mode: str
    rows: tuple[FeatureRow, ...]

    @property
    def n(self) -> int:
        return len(self.rows)


def encode_inference(inst: TspInstance, k: int) -> FeatureTable:
    """Build inference rows: neighbours ranked by their distance to the current node."""
    _check_k(inst, k)
    rows = []
    for i in range(inst.n):
        cur = inst.nodes[i]
        nbrs = tuple(
            (inst.nodes[j][0], inst.nodes[j][1], d)
            for j, d in k_nearest(inst, cur, k, exclude={i})
        )
        rows.append(FeatureRow(row_id=i, cur=cur, neighbors=nbrs))
    return FeatureTable(k=k, mode=INFERENCE, rows=tuple(rows))


def encode_training(
    inst: TspInstance,
    reference: Tour,
    k: int,
    exclude_target_from_neighbors: bool = False,
) -> FeatureTable:
    """Build training rows from a reference tour.

    Neighbour *selection* ranks every other node by its distance to the
    current node's successor in the reference cycle, while the *recorded*
    per-neighbour distance feature is still the distance to the current node,
    matching what inference-time rows carry. The target is the successor's
    coordinates.

    By construction the successor itself ranks first among the selected
    neighbours (it is at distance zero from itself), which leaks the target
    into the features; pass exclude_target_from_neighbors=True to drop it
    from the candidate pool instead.
    """
    verdict = validate_tour(inst, reference)
    if not verdict:
        raise InvalidTourError(verdict.reason)
    _check_k(inst, k)
    succ = reference.successors()
    rows = []
    for i in range(inst.n):
        cur = inst.nodes[i]
        nxt = succ[i]
        exclude = {i, nxt} if exclude_target_from_neighbors else {i}
        selected = k_nearest(inst, inst.nodes[nxt], k, exclude=exclude)
        nbrs = tuple(
            (inst.nodes[j][0], inst.nodes[j][1], distance(cur, inst.nodes[j]))
            for j, _ in selected
        )
        rows.append(FeatureRow(row_id=i, cur=cur, neighbors=nbrs, target=inst.nodes[nxt]))
    return FeatureTable(k=k, mode=TRAINING, rows=tuple(rows))


def _check_k(inst: TspInstance, k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if inst.n <= k:
        raise InsufficientCandidatesError(
            f"need more nodes than neighbours: n={inst.n}, k={k}"
        )


def feature_header(k: int, mode: str) -> list[str]:
    cols = ["row_id", "cur_x", "cur_y"]
    for j in range(1, k + 1):
        cols += [f"nb{j}_x", f"nb{j}_y", f"nb{j}_d"]
    if mode == TRAINING:
        cols += ["next_x", "next_y"]
    return cols


def write_feature_csv(table: FeatureTable, path) -> None:
    lines = [",".join(feature_header(table.k, table.mode))]
    for row in table.rows:
        vals = [str(row.row_id), repr(row.cur[0]), repr(row.cur[1])]
        for x, y, d in row.neighbors:
            vals += [repr(x), repr(y), repr(d)]
        if table.mode == TRAINING:
            vals += [repr(row.target[0]), repr(row.target[1])]
        lines.append(",".join(vals))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_prediction_csv(preds: dict[int, Point], path) -> None:
    lines = ["row_id,pred_x,pred_y"]
    for i in sorted(preds):
        x, y = preds[i]
        lines.append(f"{int(i)},{float(x)!r},{float(y)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_prediction_csv(path, expected_row_ids) -> list[tuple[int, float, float]]:
    """Parse a prediction CSV, checking each expected row_id appears exactly once."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].split(",") != ["row_id", "pred_x", "pred_y"]:
        raise ProtocolError(f"{path}: expected header 'row_id,pred_x,pred_y'")
    expected = set(int(i) for i in expected_row_ids)
    seen: set[int] = set()
    out = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ProtocolError(f"{path}:{ln}: expected 3 columns, got {len(parts)}")
        try:
            rid = int(parts[0])
            x, y = float(parts[1]), float(parts[2])
        except ValueError:
            raise ProtocolError(f"{path}:{ln}: malformed row {line!r}") from None
        if rid not in expected:
            raise ProtocolError(f"{path}:{ln}: unexpected row_id {rid}")
        if rid in seen:
            raise ProtocolError(f"{path}:{ln}: duplicate row_id {rid}")
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ProtocolError(f"{path}:{ln}: non-finite prediction for row_id {rid}")
        seen.add(rid)
        out.append((rid, x, y))
    missing = expected - seen
    if missing:
        raise ProtocolError(f"{path}: missing row_ids {sorted(missing)[:10]}")
    return out
