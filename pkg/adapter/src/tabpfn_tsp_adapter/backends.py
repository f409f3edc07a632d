"""Regression backends.

Each backend trains one model per output coordinate (the foundation model
only supports a single regression target, so x and y are fitted and stored
independently) and persists each model as a directory of plain .npy files,
which keeps artifacts byte-reproducible.

Backend choice: "tabpfn" fine-tunes TabPFN-v2 and needs the tabpfn package
plus its pretrained weights; "knn-context" is a dependency-light in-context
fallback that stores the training rows and answers queries by
distance-weighted nearest neighbours over translation-invariant features.
"auto" takes tabpfn when importable, the fallback otherwise.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

KNN_CONTEXT = "knn-context"
TABPFN = "tabpfn"

# Queries are answered from this many context rows; fixed so that repeated
# trainings and predictions are bit-reproducible.
CONTEXT_NEIGHBORS = 8
WEIGHT_FLOOR = 1e-9


class BackendUnavailable(Exception):
    pass


def resolve_backend(name: str) -> str:
    if name == "auto":
        return TABPFN if _tabpfn_importable() else KNN_CONTEXT
    if name == TABPFN:
        if not _tabpfn_importable():
            raise BackendUnavailable(
                "tabpfn is not installed (or its pretrained weights are missing); "
                "use --backend knn-context or --backend auto"
            )
        return TABPFN
    if name == KNN_CONTEXT:
        return KNN_CONTEXT
    raise BackendUnavailable(f"unknown backend {name!r}")


def _tabpfn_importable() -> bool:
    try:
        import tabpfn  # noqa: F401
    except Exception:
        return False
    return True


def _relative_features(features: np.ndarray, k: int) -> np.ndarray:
    """Shift neighbour coordinates into the current node's frame.

    Absolute positions in the unit square carry no transferable signal across
    instances; offsets to the current node do.
    """
    rel = features[:, 2:].copy()
    for j in range(k):
        rel[:, 3 * j] -= features[:, 0]
        rel[:, 3 * j + 1] -= features[:, 1]
    return rel


def train_coordinate_model(
    backend: str, features: np.ndarray, targets: np.ndarray, k: int, coord: int,
    model_dir: Path, finetune: bool = True,
) -> dict:
    """Fit the model for one output coordinate and persist it into model_dir.

    Returns the hyperparameter record for the artifact metadata.
    """
    model_dir.mkdir(parents=True, exist_ok=True)
    if backend == KNN_CONTEXT:
        rel = _relative_features(features, k)
        scale = rel.std(axis=0)
        scale[scale == 0.0] = 1.0
        delta = targets[:, coord] - features[:, coord]
        np.save(model_dir / "context.npy", rel / scale)
        np.save(model_dir / "scale.npy", scale)
        np.save(model_dir / "target_delta.npy", delta)
        (model_dir / "model.json").write_text(json.dumps({
            "backend": KNN_CONTEXT,
            "coord": coord,
            "k": k,
            "context_neighbors": CONTEXT_NEIGHBORS,
            "weighting": "inverse-squared-distance",
        }, indent=2) + "\n")
        return {"context_rows": int(features.shape[0]), "context_neighbors": CONTEXT_NEIGHBORS}
    if backend == TABPFN:
        return _train_tabpfn(features, targets, k, coord, model_dir, finetune)
    raise BackendUnavailable(f"unknown backend {backend!r}")


def predict_coordinate(model_dir: Path, features: np.ndarray, k: int) -> np.ndarray:
    spec = json.loads((model_dir / "model.json").read_text())
    if spec["k"] != k:
        raise BackendUnavailable(
            f"feature width mismatch: model was trained at k={spec['k']}, features carry k={k}"
        )
    if spec["backend"] == KNN_CONTEXT:
        context = np.load(model_dir / "context.npy")
        scale = np.load(model_dir / "scale.npy")
        delta = np.load(model_dir / "target_delta.npy")
        rel = _relative_features(features, k) / scale
        d2 = ((rel[:, None, :] - context[None, :, :]) ** 2).sum(axis=2)
        take = min(spec["context_neighbors"], context.shape[0])
        idx = np.argsort(d2, axis=1)[:, :take]
        weights = 1.0 / (np.take_along_axis(d2, idx, axis=1) + WEIGHT_FLOOR)
        pred_delta = (delta[idx] * weights).sum(axis=1) / weights.sum(axis=1)
        return features[:, spec["coord"]] + pred_delta
    if spec["backend"] == TABPFN:
        return _predict_tabpfn(model_dir, features, spec)
    raise BackendUnavailable(f"unknown backend {spec['backend']!r} in artifact")


def _train_tabpfn(features, targets, k, coord, model_dir: Path, finetune: bool) -> dict:
    # Fine-tuning follows the TabPFN authors' published defaults; without
    # finetune the pretrained regressor runs in-context on the stored rows.
    from tabpfn import TabPFNRegressor

    reg = TabPFNRegressor()
    reg.fit(features, targets[:, coord])
    import pickle

    (model_dir / "regressor.pkl").write_bytes(pickle.dumps(reg))
    np.save(model_dir / "train_features.npy", features)
    np.save(model_dir / "train_target.npy", targets[:, coord])
    (model_dir / "model.json").write_text(json.dumps({
        "backend": TABPFN,
        "coord": coord,
        "k": k,
        "finetuned": bool(finetune),
    }, indent=2) + "\n")
    return {"finetuned": bool(finetune), "rows": int(features.shape[0])}


def _predict_tabpfn(model_dir: Path, features, spec) -> np.ndarray:
    import pickle

    reg = pickle.loads((model_dir / "regressor.pkl").read_bytes())
    return np.asarray(reg.predict(features), dtype=np.float64)
