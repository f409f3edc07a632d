"""Command-line entry points for the train/predict batch contract.

Exit codes: 0 success, 1 data or backend error (message on stderr), 2 usage.
"""

from __future__ import annotations

import argparse
import sys

from .artifact import load_metadata, predict_with_artifact, train_artifact
from .backends import BackendUnavailable, resolve_backend
from .csv_io import FormatError, read_feature_csv, write_prediction_csv


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabpfn-tsp-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="fit the two coordinate regressors")
    t.add_argument("--features", required=True, help="training feature CSV")
    t.add_argument("--model-out", required=True, help="artifact directory to write")
    t.add_argument("--backend", default="auto", choices=["auto", "tabpfn", "knn-context"])
    t.add_argument("--no-finetune", action="store_true",
                   help="skip fine-tuning; run the backend in-context")

    p = sub.add_parser("predict", help="predict next-stop locations")
    p.add_argument("--features", required=True, help="inference feature CSV")
    p.add_argument("--model", required=True, help="artifact directory")
    p.add_argument("--out", required=True, help="prediction CSV to write")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            return _train(args)
        return _predict(args)
    except (FormatError, BackendUnavailable, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _train(args) -> int:
    batch = read_feature_csv(args.features, require_targets=True)
    backend = resolve_backend(args.backend)
    metadata = train_artifact(
        batch, args.features, args.model_out, backend, finetune=not args.no_finetune
    )
    print(
        f"trained {metadata['backend']} artifact at {args.model_out} "
        f"(k={metadata['k']}, {metadata['training_rows']} rows, "
        f"{metadata['adaptation_seconds']:.2f}s)"
    )
    return 0


def _predict(args) -> int:
    batch = read_feature_csv(args.features, require_targets=False)
    metadata = load_metadata(args.model)
    if metadata["k"] != batch.k:
        print(
            f"error: feature width mismatch: artifact k={metadata['k']}, "
            f"features k={batch.k}",
            file=sys.stderr,
        )
        return 1
    xs, ys = predict_with_artifact(args.model, batch)
    write_prediction_csv(batch.row_ids, xs, ys, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
