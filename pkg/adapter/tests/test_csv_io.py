import numpy as np
import pytest

from tabpfn_tsp_adapter.csv_io import (
    FormatError,
    expected_columns,
    read_feature_csv,
    write_prediction_csv,
)


def make_csv(path, k, rows, training):
    header = ",".join(expected_columns(k, training))
    lines = [header]
    for rid, values in rows:
        lines.append(",".join([str(rid)] + [repr(float(v)) for v in values]))
    path.write_text("\n".join(lines) + "\n")


def test_reads_training_file(tmp_path):
    path = tmp_path / "train.csv"
    width = 2 + 3 * 2 + 2  # cur, neighbours, targets
    make_csv(path, 2, [(0, range(width)), (1, range(width))], training=True)
    batch = read_feature_csv(path, require_targets=True)
    assert batch.k == 2
    assert batch.features.shape == (2, 8)
    assert batch.targets.shape == (2, 2)
    assert list(batch.row_ids) == [0, 1]


def test_reads_inference_file(tmp_path):
    path = tmp_path / "infer.csv"
    make_csv(path, 3, [(5, range(11))], training=False)
    batch = read_feature_csv(path, require_targets=False)
    assert batch.k == 3
    assert batch.targets is None
    assert list(batch.row_ids) == [5]


def test_missing_targets_rejected(tmp_path):
    path = tmp_path / "infer.csv"
    make_csv(path, 2, [(0, range(8))], training=False)
    with pytest.raises(FormatError, match="missing target columns"):
        read_feature_csv(path, require_targets=True)


def test_unexpected_targets_rejected(tmp_path):
    path = tmp_path / "train.csv"
    make_csv(path, 2, [(0, range(10))], training=True)
    with pytest.raises(FormatError):
        read_feature_csv(path, require_targets=False)


def test_bad_layout_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("row_id,cur_x,cur_y,nb1_x,nb1_y\n0,0,0,0,0\n")
    with pytest.raises(FormatError):
        read_feature_csv(path)


def test_duplicate_row_id_rejected(tmp_path):
    path = tmp_path / "dup.csv"
    make_csv(path, 1, [(0, range(5)), (0, range(5))], training=False)
    with pytest.raises(FormatError, match="duplicate"):
        read_feature_csv(path)


def test_non_finite_rejected(tmp_path):
    path = tmp_path / "nan.csv"
    path.write_text(
        ",".join(expected_columns(1, False)) + "\n0,0.1,0.2,nan,0.4,0.5\n"
    )
    with pytest.raises(FormatError, match="non-finite"):
        read_feature_csv(path)


def test_prediction_csv_shape(tmp_path):
    path = tmp_path / "pred.csv"
    write_prediction_csv([2, 0, 1], np.array([0.1, 0.2, 0.3]), np.array([0.9, 0.8, 0.7]), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "row_id,pred_x,pred_y"
    assert lines[1] == "2,0.1,0.9"
    assert len(lines) == 4
