"""Turn per-node next-stop predictions into a valid tour.

The pipeline has four steps:

1. score_matrix: entry (i, j) is the Euclidean distance from node i's
   predicted next-stop location to node j; the diagonal is forced to zero.
2. probability_matrix: scores are rescaled by the median of the nonzero
   finite off-diagonal entries, then a single softmax over the negated,
   stacked off-diagonal entries yields one probability per directed edge.
   The diagonal is excluded from the softmax and pinned at zero, so the
   off-diagonal mass sums to one.
3. candidate_edges: undirected candidates scored with the larger of the two
   directed probabilities, max(prob[i][j], prob[j][i]), as two lists: pairs
   that are spatially close (by node coordinates), and all pairs. Both are
   sorted by descending score, ties broken by (i, j). Scanning undirected
   pairs by their larger directed entry is the same order in which the
   directed entries themselves would be visited from the highest probability
   to the lowest, and it makes per-row maximality global: when every node's
   highest-probability successor edge is in the candidate set, those edges
   outrank everything else outright.
4. greedy_construct: scan the spatial list, then the full list, accepting an
   edge when both endpoints still have degree below two and the edge closes
   no cycle, except the final edge, which completes the Hamiltonian cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DegenerateScoresError, IncompletePredictionsError
from .geometry import Tour, TspInstance, k_nearest

DEFAULT_SPATIAL_NEIGHBORS = 10


@dataclass(frozen=True)
class ScoreMatrix:
    """Unnormalized next-stop scores; lower means more likely. Diagonal is zero."""

    values: np.ndarray


@dataclass(frozen=True)
class ProbabilityMatrix:
    """Directed edge probabilities; off-diagonal entries sum to one.

    norm_scale is the median used to rescale the scores, kept for audit.
    """

    values: np.ndarray
    norm_scale: float


class EdgeCandidate(NamedTuple):
    i: int
    j: int
    score: float


def score_matrix(inst: TspInstance, preds: dict[int, tuple[float, float]]) -> ScoreMatrix:
    """Distance from each node's predicted next-stop location to every node."""
    n = inst.n
    missing = [i for i in range(n) if i not in preds]
    if missing:
        raise IncompletePredictionsError(f"missing predictions for nodes {missing[:10]}")
    p = np.array([preds[i] for i in range(n)], dtype=np.float64)
    if not np.all(np.isfinite(p)):
        raise IncompletePredictionsError("predictions contain non-finite coordinates")
    coords = inst.coords
    dx = p[:, 0][:, None] - coords[:, 0][None, :]
    dy = p[:, 1][:, None] - coords[:, 1][None, :]
    values = np.sqrt(dx * dx + dy * dy)
    np.fill_diagonal(values, 0.0)
    return ScoreMatrix(values)


def probability_matrix(scores: ScoreMatrix) -> ProbabilityMatrix:
    """Median-rescale the scores and softmax them into edge probabilities.

    Zero and non-finite entries are left out of the median; zeros stay in the
    softmax, where they simply get the largest exponent. The softmax subtracts
    the maximum before exponentiating, so any finite score range is safe.
    """
    values = scores.values
    n = values.shape[0]
    if n < 2:
        raise ValueError("need at least 2 nodes")
    off = ~np.eye(n, dtype=bool)
    flat = values[off]
    usable = flat[np.isfinite(flat) & (flat > 0.0)]
    if usable.size == 0:
        raise DegenerateScoresError("every off-diagonal score is zero or non-finite")
    norm_scale = float(np.median(usable))
    z = -(flat / norm_scale)
    z -= z.max()
    e = np.exp(z)
    probs = np.zeros_like(values)
    probs[off] = e / e.sum()
    return ProbabilityMatrix(probs, norm_scale)


def candidate_edges(
    inst: TspInstance,
    prob: ProbabilityMatrix,
    m_spatial: int,
) -> tuple[list[EdgeCandidate], list[EdgeCandidate]]:
    """Build the spatially-close and all-pairs candidate lists.

    An undirected pair {i, j} is spatial when j is among the m_spatial nodes
    closest to i (or vice versa), closeness measured on the node coordinates,
    not the predictions. Each candidate's score is the larger directed
    probability, max(prob[i][j], prob[j][i]), so the lists visit undirected
    pairs in the order of the underlying directed entries.
    """
    n = inst.n
    if not 1 <= m_spatial <= n - 1:
        raise ValueError(f"m_spatial must be in [1, {n - 1}], got {m_spatial}")
    p = prob.values
    spatial_pairs = set()
    for i in range(n):
        for j, _ in k_nearest(inst, inst.nodes[i], m_spatial, exclude={i}):
            spatial_pairs.add((i, j) if i < j else (j, i))

    def as_candidates(pairs):
        cands = [EdgeCandidate(i, j, max(float(p[i, j]), float(p[j, i]))) for i, j in pairs]
        cands.sort(key=lambda c: (-c.score, c.i, c.j))
        return cands

    full_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return as_candidates(spatial_pairs), as_candidates(full_pairs)


def greedy_construct(
    n: int,
    spatial: list[EdgeCandidate],
    full: list[EdgeCandidate],
) -> Tour:
    """Greedy edge insertion with degree and subtour guards.

    Edges are taken in list order, spatial list first, the full list as a
    fallback. An edge is accepted when both endpoints have degree below two
    and its endpoints lie in different connected components; the single
    exception is the last edge, accepted once exactly n-1 edges are placed,
    which closes the Hamiltonian cycle. On a complete fallback list this
    always terminates with a valid tour.

    The returned tour starts at node 0 and runs toward the lower-indexed of
    node 0's two neighbours.
    """
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    degree = [0] * n
    adj: list[list[int]] = [[] for _ in range(n)]
    placed = 0
    for cand_list in (spatial, full):
        for i, j, _score in cand_list:
            if placed == n:
                break
            if degree[i] >= 2 or degree[j] >= 2:
                continue
            if j in adj[i]:
                continue
            ri, rj = find(i), find(j)
            if ri == rj and placed != n - 1:
                continue
            parent[ri] = rj
            adj[i].append(j)
            adj[j].append(i)
            degree[i] += 1
            degree[j] += 1
            placed += 1
        if placed == n:
            break
    if placed != n:
        raise RuntimeError(f"edge insertion stalled at {placed}/{n} edges")

    order = [0]
    prev, cur = -1, 0
    nxt = min(adj[0])
    while nxt != 0:
        order.append(nxt)
        prev, cur = cur, nxt
        a, b = adj[cur]
        nxt = b if a == prev else a
    return Tour(tuple(order))


def decode(
    inst: TspInstance,
    preds: dict[int, tuple[float, float]],
    m_spatial: int = DEFAULT_SPATIAL_NEIGHBORS,
    dump_path=None,
) -> Tour:
    """Full prediction-to-tour pipeline; deterministic given its inputs.

    m_spatial is clamped to n-1 for small instances. If dump_path is given,
    the probability matrix and the decoded edge list are written there as a
    text artifact for debugging.
    """
    prob = probability_matrix(score_matrix(inst, preds))
    spatial, full = candidate_edges(inst, prob, min(m_spatial, inst.n - 1))
    tour = greedy_construct(inst.n, spatial, full)
    if dump_path is not None:
        _write_dump(Path(dump_path), prob, tour)
    return tour


def _write_dump(path: Path, prob: ProbabilityMatrix, tour: Tour) -> None:
    # Row-major probability rows, then the tour's undirected edges in cycle order.
    n = prob.values.shape[0]
    lines = [f"probability_matrix n={n} norm_scale={prob.norm_scale!r}"]
    for i in range(n):
        lines.append(" ".join(repr(float(v)) for v in prob.values[i]))
    lines.append("tour_edges")
    for p in range(tour.n):
        a, b = tour.order[p], tour.order[(p + 1) % tour.n]
        lines.append(f"{a} {b}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
