"""TSP instances, tours, Euclidean distances, and nearest-neighbour queries.

Every distance in this package is computed as sqrt(dx*dx + dy*dy) with exactly
one multiply-multiply-add-sqrt sequence, so scalar and vectorized code paths
produce bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InsufficientCandidatesError, InvalidSizeError, InvalidTourError

Point = tuple[float, float]


@dataclass(frozen=True)
class TspInstance:
    """Points in the unit square; the node's position in `nodes` is its identity."""

    nodes: tuple[Point, ...]
    id: str = ""

    def __post_init__(self):
        if len(self.nodes) < 3:
            raise InvalidSizeError(f"instance needs at least 3 nodes, got {len(self.nodes)}")
        object.__setattr__(self, "nodes", tuple((float(x), float(y)) for x, y in self.nodes))
        for x, y in self.nodes:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise ValueError(f"coordinate ({x}, {y}) outside the unit square")

    @property
    def n(self) -> int:
        return len(self.nodes)

    @cached_property
    def coords(self) -> np.ndarray:
        """(n, 2) float64 view of the node coordinates."""
        arr = np.array(self.nodes, dtype=np.float64)
        arr.setflags(write=False)
        return arr


@dataclass(frozen=True)
class Tour:
    """A candidate Hamiltonian cycle: node indices in visiting order, closed implicitly."""

    order: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))

    @property
    def n(self) -> int:
        return len(self.order)

    def edges(self) -> frozenset[tuple[int, int]]:
        """Undirected edge set, each edge as (low index, high index)."""
        n = len(self.order)
        out = set()
        for p in range(n):
            a, b = self.order[p], self.order[(p + 1) % n]
            out.add((a, b) if a < b else (b, a))
        return frozenset(out)

    def successors(self) -> list[int]:
        """succ[i] is the node visited right after node i (cyclic)."""
        n = len(self.order)
        succ = [0] * n
        for p in range(n):
            succ[self.order[p]] = self.order[(p + 1) % n]
        return succ


@dataclass(frozen=True)
class TourVerdict:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def generate_instance(n: int, seed: int) -> TspInstance:
    """Draw n points i.i.d. uniform on the unit square.

    The generator is NumPy's Philox counter-based bit generator keyed with
    `seed`, so the same (n, seed) reproduces the same instance on any machine.
    Seeds are interpreted as 64-bit integers; negative values map to their
    unsigned bit pattern.
    """
    if n < 3:
        raise InvalidSizeError(f"instance needs at least 3 nodes, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))
    pts = rng.random((n, 2))
    return TspInstance(tuple((float(x), float(y)) for x, y in pts), id=f"rnd{n}-{seed}")


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points."""
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return math.sqrt(dx * dx + dy * dy)


def tour_length(inst: TspInstance, t: Tour) -> float:
    """Total cycle length, including the closing edge.

    The n edge lengths are added with exact summation (math.fsum), so any two
    tours with the same edge set, in particular rotations and reversals, give
    bit-identical totals.
    """
    verdict = validate_tour(inst, t)
    if not verdict:
        raise InvalidTourError(verdict.reason)
    pts = inst.nodes
    lengths = []
    for p in range(t.n):
        lengths.append(distance(pts[t.order[p]], pts[t.order[(p + 1) % t.n]]))
    return math.fsum(lengths)


def validate_tour(inst: TspInstance, t: Tour) -> TourVerdict:
    """Check that t visits each of inst's nodes exactly once."""
    n = inst.n
    if t.n != n:
        return TourVerdict(False, f"wrong length: got {t.n}, expected {n}")
    seen = [False] * n
    for idx in t.order:
        if not 0 <= idx < n:
            return TourVerdict(False, f"out-of-range index {idx}")
        if seen[idx]:
            return TourVerdict(False, f"duplicate node {idx}")
        seen[idx] = True
    return TourVerdict(True)


def k_nearest(
    inst: TspInstance,
    from_point: Point,
    k: int,
    exclude: frozenset[int] | set[int] = frozenset(),
) -> list[tuple[int, float]]:
    """The k nodes closest to `from_point`, ascending by (distance, node index).

    Nodes whose index is in `exclude` never appear in the result.
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    coords = inst.coords
    if exclude:
        cand = np.array([i for i in range(inst.n) if i not in exclude], dtype=np.intp)
    else:
        cand = np.arange(inst.n, dtype=np.intp)
    if cand.size < k:
        raise InsufficientCandidatesError(
            f"need {k} candidates, only {cand.size} remain after exclusion"
        )
    dx = coords[cand, 0] - from_point[0]
    dy = coords[cand, 1] - from_point[1]
    dist = np.sqrt(dx * dx + dy * dy)
    # lexsort's last key is primary: distance first, node index breaks ties
    top = np.lexsort((cand, dist))[:k]
    return [(int(cand[p]), float(dist[p])) for p in top]
