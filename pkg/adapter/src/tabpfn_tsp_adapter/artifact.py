"""The trained model artifact: two coordinate models plus a metadata record.

Layout::

    <artifact>/
      model_x/    # regressor for the x coordinate
      model_y/    # regressor for the y coordinate
      metadata.json

The two models are trained and stored independently; metadata records the
backend, the neighbour count k, the training sample fingerprint, and the
adaptation wall time.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

from . import __version__
from .backends import predict_coordinate, train_coordinate_model
from .csv_io import FeatureBatch

METADATA = "metadata.json"
MODEL_DIRS = ("model_x", "model_y")


def train_artifact(
    batch: FeatureBatch,
    features_path,
    model_out,
    backend: str,
    finetune: bool = True,
) -> dict:
    """Fit both coordinate models and write the artifact; returns the metadata."""
    model_out = Path(model_out)
    model_out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()
    hyper = {}
    for coord, name in enumerate(MODEL_DIRS):
        hyper[name] = train_coordinate_model(
            backend, batch.features, batch.targets, batch.k, coord,
            model_out / name, finetune=finetune,
        )
    adaptation_s = time.perf_counter() - started
    digest = hashlib.sha256(Path(features_path).read_bytes()).hexdigest()
    metadata = {
        "adapter_version": __version__,
        "backend": backend,
        "finetuned": bool(finetune) and backend == "tabpfn",
        "k": batch.k,
        "training_rows": int(batch.features.shape[0]),
        "training_sample_sha256": digest,
        "adaptation_seconds": adaptation_s,
        "hyperparameters": hyper,
    }
    (model_out / METADATA).write_text(json.dumps(metadata, indent=2) + "\n")
    return metadata


def load_metadata(model_dir) -> dict:
    path = Path(model_dir) / METADATA
    if not path.exists():
        raise FileNotFoundError(f"not a model artifact (no {METADATA}): {model_dir}")
    return json.loads(path.read_text())


def predict_with_artifact(model_dir, batch: FeatureBatch):
    """Predict both coordinates for every row; returns (xs, ys)."""
    model_dir = Path(model_dir)
    load_metadata(model_dir)  # existence check with a clear error
    xs = predict_coordinate(model_dir / "model_x", batch.features, batch.k)
    ys = predict_coordinate(model_dir / "model_y", batch.features, batch.k)
    return xs, ys
