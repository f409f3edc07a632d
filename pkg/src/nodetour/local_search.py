"""2-opt post-processing: remove two edges, reconnect by reversing the
segment between them, keep strict improvements.

Moves are scanned in repeated full sweeps over all position pairs (a, b) with
0 <= a < b < n and accepted immediately when they shorten the tour
(first-improvement). A sweep with no accepted move ends the search, in which
case the result is 2-opt optimal; an optional wall-clock limit can end it
early.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .errors import InvalidTourError
from .geometry import Tour, TspInstance, distance, tour_length, validate_tour

# Strictly-below threshold for accepting a move; avoids float-noise loops.
IMPROVEMENT_EPS = 1e-12

# Above this size an unset time limit defaults to 60 seconds per tour.
UNLIMITED_BELOW_N = 200
DEFAULT_TIME_LIMIT_S = 60.0


def improvement_delta(inst: TspInstance, t: Tour, a: int, b: int) -> float:
    """Length change from reversing tour positions a..b (inclusive, cyclic ends).

    delta = d(t[a-1], t[b]) + d(t[a], t[b+1]) - d(t[a-1], t[a]) - d(t[b], t[b+1]).
    The pair (0, n-1) reverses the whole tour and changes nothing: delta 0.
    """
    n = t.n
    if not 0 <= a < b < n:
        raise ValueError(f"need 0 <= a < b < n, got a={a}, b={b}, n={n}")
    if a == 0 and b == n - 1:
        return 0.0
    pts = inst.nodes
    order = t.order
    pa, pb = pts[order[a]], pts[order[b]]
    before, after = pts[order[a - 1]], pts[order[(b + 1) % n]]
    return (
        distance(before, pb) + distance(pa, after)
        - distance(before, pa) - distance(pb, after)
    )


def two_opt(inst: TspInstance, t: Tour, time_limit: float | None = None) -> Tour:
    """Improve a tour with first-improvement 2-opt until a sweep finds nothing.

    Position pairs (a, b) are scanned in ascending order and the first move
    that strictly shortens the tour is applied immediately; the deltas of a
    whole row of b-candidates are evaluated as one vector, which changes
    nothing about the scan order or the arithmetic but keeps large instances
    fast. time_limit is in seconds; None means no limit for instances up to
    UNLIMITED_BELOW_N nodes and DEFAULT_TIME_LIMIT_S above that. The returned
    tour is never longer than the input.
    """
    verdict = validate_tour(inst, t)
    if not verdict:
        raise InvalidTourError(verdict.reason)
    n = t.n
    if time_limit is None and n > UNLIMITED_BELOW_N:
        time_limit = DEFAULT_TIME_LIMIT_S
    deadline = None if time_limit is None else time.perf_counter() + time_limit

    coords = inst.coords
    order = np.array(t.order, dtype=np.intp)
    while True:
        improved = False
        for a in range(n - 1):
            if deadline is not None and time.perf_counter() > deadline:
                return Tour(tuple(int(v) for v in order))
            start_b = a + 1
            while start_b < n:
                before = coords[order[a - 1]]
                pa = coords[order[a]]
                bs = np.arange(start_b, n)
                pb = coords[order[bs]]
                pafter = coords[order[(bs + 1) % n]]
                d_before_pb = _edge_lengths(before[0] - pb[:, 0], before[1] - pb[:, 1])
                d_pa_after = _edge_lengths(pa[0] - pafter[:, 0], pa[1] - pafter[:, 1])
                d_before_pa = distance((before[0], before[1]), (pa[0], pa[1]))
                d_pb_after = _edge_lengths(pb[:, 0] - pafter[:, 0], pb[:, 1] - pafter[:, 1])
                deltas = d_before_pb + d_pa_after - d_before_pa - d_pb_after
                if a == 0:
                    # the pair (0, n-1) reverses the whole order: not a move
                    deltas[-1] = 0.0
                hits = np.nonzero(deltas < -IMPROVEMENT_EPS)[0]
                if hits.size == 0:
                    break
                b = int(bs[hits[0]])
                _reverse_segment(order, a, b)
                improved = True
                start_b = b + 1
        if not improved:
            return Tour(tuple(int(v) for v in order))


def _edge_lengths(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    return np.sqrt(dx * dx + dy * dy)


def _reverse_segment(order: np.ndarray, a: int, b: int) -> None:
    """Reverse positions a..b, or the complementary arc when that one is shorter.

    Both choices produce the same cyclic edge set; reversing the shorter arc
    keeps single moves at O(n/2) element swaps.
    """
    n = len(order)
    inner = b - a + 1
    if inner <= n - inner:
        order[a : b + 1] = order[a : b + 1][::-1]
        return
    i, j = (b + 1) % n, (a - 1) % n
    for _ in range((n - inner) // 2):
        order[i], order[j] = order[j], order[i]
        i = (i + 1) % n
        j = (j - 1) % n


def best_of_restarts(
    inst: TspInstance,
    restarts: int,
    seed: int = 0,
    time_limit: float | None = None,
) -> Tour:
    """Strongest of `restarts` 2-opt runs from seeded random starting tours.

    A desk-scale stand-in for a strong baseline solver on instances too large
    for the exact oracle. Deterministic given (instance, restarts, seed).
    """
    if restarts < 1:
        raise ValueError(f"need at least one restart, got {restarts}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    best: Tour | None = None
    best_len = math.inf
    for _ in range(restarts):
        start = Tour(tuple(int(i) for i in rng.permutation(inst.n)))
        improved = two_opt(inst, start, time_limit=time_limit)
        length = tour_length(inst, improved)
        if length < best_len:
            best, best_len = improved, length
    return best
