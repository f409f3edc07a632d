import math

import numpy as np
import pytest

from nodetour import (
    PredictorSpec,
    Tour,
    TspInstance,
    candidate_edges,
    decode,
    distance,
    encode_inference,
    generate_instance,
    greedy_construct,
    held_karp,
    predict,
    probability_matrix,
    score_matrix,
    tour_length,
    validate_tour,
)
from nodetour.decoding import EdgeCandidate, ScoreMatrix
from nodetour.errors import DegenerateScoresError, IncompletePredictionsError

CORNERS = TspInstance(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)), id="corners")


def _random_preds(inst, key):
    rng = np.random.Generator(np.random.Philox(key=key))
    return {i: (float(x), float(y)) for i, (x, y) in enumerate(rng.random((inst.n, 2)))}


def test_score_matrix_scaled_345():
    inst = TspInstance(((0.0, 0.0), (0.6, 0.8), (0.5, 0.5)), id="t")
    preds = {0: (0.0, 0.0), 1: (0.1, 0.1), 2: (0.2, 0.2)}
    sm = score_matrix(inst, preds)
    assert sm.values[0, 1] == pytest.approx(1.0)
    assert sm.values[0, 0] == 0.0


def test_score_matrix_prediction_on_node_gives_zero():
    inst = CORNERS
    preds = {0: (1.0, 0.0), 1: (0.5, 0.5), 2: (0.5, 0.5), 3: (0.5, 0.5)}
    sm = score_matrix(inst, preds)
    assert sm.values[0, 1] == 0.0
    prob = probability_matrix(sm)  # zero entry excluded from the median, kept in softmax
    assert prob.values[0, 1] == prob.values.max()


def test_score_matrix_matches_double_loop():
    inst = generate_instance(10, 31)
    preds = _random_preds(inst, 77)
    sm = score_matrix(inst, preds)
    for i in range(10):
        for j in range(10):
            expect = 0.0 if i == j else distance(preds[i], inst.nodes[j])
            assert sm.values[i, j] == expect


def test_score_matrix_requires_complete_predictions():
    with pytest.raises(IncompletePredictionsError):
        score_matrix(CORNERS, {0: (0.1, 0.1)})
    with pytest.raises(IncompletePredictionsError):
        score_matrix(CORNERS, {0: (0.1, 0.1), 1: (0.2, 0.2), 2: (math.nan, 0.0), 3: (0.3, 0.3)})


def test_probability_two_nodes_equal_scores():
    prob = probability_matrix(ScoreMatrix(np.array([[0.0, 0.7], [0.7, 0.0]])))
    assert prob.values[0, 1] == pytest.approx(0.5)
    assert prob.values[1, 0] == pytest.approx(0.5)


def test_probability_median_of_four():
    values = np.array(
        [
            [0.0, 1.0, 2.0],
            [3.0, 0.0, 4.0],
            [1.0, 2.0, 0.0],
        ]
    )
    # off-diagonal multiset {1,2,3,4,1,2}; median of {1,1,2,2,3,4} = 2
    assert probability_matrix(ScoreMatrix(values)).norm_scale == 2.0
    values2 = np.array([[0.0, 1.0, 2.0], [3.0, 0.0, 4.0], [0.0, 0.0, 0.0]])
    # zeros dropped from the median: multiset {1,2,3,4} -> 2.5
    assert probability_matrix(ScoreMatrix(values2)).norm_scale == 2.5


def test_probability_matches_independent_softmax():
    inst = generate_instance(3, 5)
    preds = _random_preds(inst, 6)
    sm = score_matrix(inst, preds)
    prob = probability_matrix(sm)

    off = [(i, j) for i in range(3) for j in range(3) if i != j]
    vals = [sm.values[i, j] for i, j in off]
    tau = sorted(v for v in vals if v > 0)
    tau = (tau[len(tau) // 2 - 1] + tau[len(tau) // 2]) / 2 if len(tau) % 2 == 0 else tau[len(tau) // 2]
    exps = [math.exp(-v / tau) for v in vals]
    total = sum(exps)
    for (i, j), e in zip(off, exps):
        assert prob.values[i, j] == pytest.approx(e / total, abs=1e-12)


def test_probability_normalization_and_diagonal():
    for key in range(20):
        inst = generate_instance(30, 1000 + key)
        prob = probability_matrix(score_matrix(inst, _random_preds(inst, key)))
        assert abs(prob.values.sum() - 1.0) < 1e-9
        assert np.all(np.diag(prob.values) == 0.0)
        off = prob.values[~np.eye(30, dtype=bool)]
        assert np.all(off > 0.0)


def test_probability_scale_invariance():
    inst = generate_instance(25, 9)
    preds = _random_preds(inst, 10)
    base = probability_matrix(score_matrix(inst, preds)).values
    for factor in (0.5, 0.03125, 0.925):
        scaled_inst = TspInstance(
            tuple((x * factor, y * factor) for x, y in inst.nodes), id="s"
        )
        scaled_preds = {i: (x * factor, y * factor) for i, (x, y) in preds.items()}
        scaled = probability_matrix(score_matrix(scaled_inst, scaled_preds)).values
        assert np.max(np.abs(scaled - base)) < 1e-12


def test_probability_degenerate():
    values = np.zeros((3, 3))
    with pytest.raises(DegenerateScoresError):
        probability_matrix(type("S", (), {"values": values})())


def test_candidate_edges_corners_spatial():
    prob = probability_matrix(score_matrix(CORNERS, _random_preds(CORNERS, 2)))
    spatial, full = candidate_edges(CORNERS, prob, 1)
    # per the k_nearest tie rule: 0->1, 1->0, 2->1, 3->0
    assert {(c.i, c.j) for c in spatial} == {(0, 1), (1, 2), (0, 3)}
    assert len(full) == 6


def test_candidate_edges_n3_full_count():
    inst = TspInstance(((0.0, 0.0), (0.5, 0.1), (0.2, 0.9)), id="t")
    prob = probability_matrix(score_matrix(inst, _random_preds(inst, 3)))
    _, full = candidate_edges(inst, prob, 1)
    assert len(full) == 3


def test_candidate_score_is_larger_directed_entry():
    inst = generate_instance(8, 44)
    prob = probability_matrix(score_matrix(inst, _random_preds(inst, 45)))
    _, full = candidate_edges(inst, prob, 3)
    for c in full:
        assert c.score == max(prob.values[c.i, c.j], prob.values[c.j, c.i])
    scores = [c.score for c in full]
    assert scores == sorted(scores, reverse=True)


def test_greedy_construct_n3():
    full = [EdgeCandidate(0, 1, 0.5), EdgeCandidate(0, 2, 0.3), EdgeCandidate(1, 2, 0.2)]
    assert greedy_construct(3, [], full).order == (0, 1, 2)


def test_greedy_construct_fallback_completes():
    # spatial list that strands the graph as disjoint pairs; full pass must finish
    rng = np.random.Generator(np.random.Philox(key=12))
    for _ in range(1000):
        n = int(rng.integers(4, 33))
        scores = rng.random((n, n))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        full = [EdgeCandidate(i, j, float(scores[i, j])) for i, j in pairs]
        full.sort(key=lambda c: (-c.score, c.i, c.j))
        spatial = [EdgeCandidate(2 * i, 2 * i + 1, 1.0) for i in range(n // 2)]
        tour = greedy_construct(n, spatial, full)
        inst_nodes = tuple((float(x), float(y)) for x, y in rng.random((n, 2)))
        assert validate_tour(TspInstance(inst_nodes, id="f"), tour).ok


def test_decode_oracle_on_corners():
    table = encode_inference(CORNERS, 2)
    preds = predict(PredictorSpec.oracle(), table, reference=Tour((0, 1, 2, 3)))
    tour = decode(CORNERS, preds)
    assert tour.edges() == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})


def test_decode_nearest_on_corners_is_valid():
    table = encode_inference(CORNERS, 2)
    preds = predict(PredictorSpec.nearest(), table)
    tour = decode(CORNERS, preds)
    assert validate_tour(CORNERS, tour).ok


def test_decode_never_beats_exact():
    for seed in range(10):
        inst = generate_instance(8, 3000 + seed)
        _, best = held_karp(inst)
        tour = decode(inst, _random_preds(inst, seed))
        assert tour_length(inst, tour) >= best - 1e-9


def test_decode_reconstructs_arbitrary_permutation_full_width():
    # with the spatial list covering all pairs, oracle predictions place every
    # reference edge at the global maximum score, so any permutation comes back
    for seed in range(20):
        inst = generate_instance(50, 5000 + seed)
        rng = np.random.Generator(np.random.Philox(key=seed))
        ref = Tour(tuple(int(i) for i in rng.permutation(50)))
        table = encode_inference(inst, 5)
        preds = predict(PredictorSpec.oracle(), table, reference=ref)
        out = decode(inst, preds, m_spatial=49)
        assert out.edges() == ref.edges()


def test_decode_deterministic():
    inst = generate_instance(40, 77)
    preds = _random_preds(inst, 78)
    a = decode(inst, preds, 10)
    b = decode(inst, preds, 10)
    assert a.order == b.order


def test_decode_dump_artifact(tmp_path):
    inst = generate_instance(6, 1)
    path = tmp_path / "dump.txt"
    decode(inst, _random_preds(inst, 2), dump_path=path)
    text = path.read_text().splitlines()
    assert text[0].startswith("probability_matrix n=6")
    assert "tour_edges" in text
