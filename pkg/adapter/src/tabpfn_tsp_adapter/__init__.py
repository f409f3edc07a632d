"""Next-stop regression adapter behind the solver's external predictor contract.

Consumes feature CSVs, trains two regressors (one per output coordinate), and
answers prediction CSVs:

    tabpfn-tsp-adapter train   --features <train.csv> --model-out <dir>
    tabpfn-tsp-adapter predict --features <infer.csv> --model <dir> --out <pred.csv>

The preferred backend fine-tunes TabPFN-v2; when that package or its
pretrained weights are unavailable, an in-context k-NN regression backend
takes over, clearly labeled in the artifact metadata.
"""

__version__ = "0.1.0"
