"""nodetour: build TSP tours from per-node next-stop location predictions.

The pipeline encodes each node with its nearest neighbours, asks a predictor
(builtin or an external process) for the location of each node's next stop,
converts those predictions into edge probabilities, extracts a tour by greedy
edge insertion, and optionally polishes it with 2-opt. A bitmask exact solver
and a benchmarking harness round out the toolkit.
"""

from .benchmark import (
    BenchmarkReport,
    RunFailure,
    RunRecord,
    gap_percent,
    run_benchmark,
    sweep_k,
)
from .decoding import (
    EdgeCandidate,
    ProbabilityMatrix,
    ScoreMatrix,
    candidate_edges,
    decode,
    greedy_construct,
    probability_matrix,
    score_matrix,
)
from .encoding import (
    FeatureRow,
    FeatureTable,
    encode_inference,
    encode_training,
    read_prediction_csv,
    write_feature_csv,
    write_prediction_csv,
)
from .errors import NodeTourError
from .exact import held_karp
from .geometry import (
    Tour,
    TourVerdict,
    TspInstance,
    distance,
    generate_instance,
    k_nearest,
    tour_length,
    validate_tour,
)
from .instance_io import read_instances, write_instance
from .local_search import best_of_restarts, improvement_delta, two_opt
from .predictors import PredictionSet, PredictorSpec, fit, predict

__version__ = "0.1.0"

__all__ = [
    "BenchmarkReport",
    "EdgeCandidate",
    "FeatureRow",
    "FeatureTable",
    "NodeTourError",
    "PredictionSet",
    "PredictorSpec",
    "ProbabilityMatrix",
    "RunFailure",
    "RunRecord",
    "ScoreMatrix",
    "Tour",
    "TourVerdict",
    "TspInstance",
    "best_of_restarts",
    "candidate_edges",
    "decode",
    "distance",
    "encode_inference",
    "encode_training",
    "fit",
    "gap_percent",
    "generate_instance",
    "greedy_construct",
    "held_karp",
    "improvement_delta",
    "k_nearest",
    "predict",
    "probability_matrix",
    "read_instances",
    "read_prediction_csv",
    "run_benchmark",
    "score_matrix",
    "sweep_k",
    "tour_length",
    "two_opt",
    "validate_tour",
    "write_feature_csv",
    "write_instance",
    "write_prediction_csv",
]
