"""Provably optimal tours for small instances via bitmask dynamic programming.

The classic subset DP runs in O(n^2 * 2^n) time and O(n * 2^n) memory, which
is comfortable up to the hard cap of 16 nodes; larger baselines have to come
from ingested reference tours.
"""

from __future__ import annotations

import numpy as np

from .errors import SizeCapError
from .geometry import Tour, TspInstance, tour_length

MAX_NODES = 16


def held_karp(inst: TspInstance) -> tuple[Tour, float]:
    """Optimal Hamiltonian cycle and its length.

    Ties between optimal tours are broken deterministically: the returned
    tour is the lexicographically smallest optimal order starting at node 0.
    The length is computed with tour_length, so it is directly comparable to
    every other length in the package.
    """
    n = inst.n
    if n > MAX_NODES:
        raise SizeCapError(f"exact solve capped at {MAX_NODES} nodes, got {n}")

    coords = inst.coords
    dx = coords[:, 0][:, None] - coords[:, 0][None, :]
    dy = coords[:, 1][:, None] - coords[:, 1][None, :]
    dist = np.sqrt(dx * dx + dy * dy)

    # Bit c stands for node c+1; node 0 is the fixed start.
    m = n - 1
    d0 = dist[0, 1:]          # start edges
    dm = dist[1:, 1:]         # edges among nodes 1..n-1
    full = (1 << m) - 1
    # cost[mask][c]: cheapest path from node 0 through exactly mask, ending at c+1
    cost = np.full((1 << m, m), np.inf)
    for mask in range(1, 1 << m):
        rest = mask
        while rest:
            low = rest & -rest
            c = low.bit_length() - 1
            rest ^= low
            pmask = mask ^ low
            if pmask == 0:
                cost[mask, c] = d0[c]
            else:
                cost[mask, c] = np.min(cost[pmask] + dm[:, c])

    # Walk forward, always taking the smallest-index node that still reaches
    # the optimum; cost[mask][c] doubles as the cheapest way back to node 0
    # from c+1 through mask (paths reverse at equal cost).
    order = [0]
    remaining = full
    closing = d0
    target = np.min(closing + cost[full])
    cur_row = closing
    while remaining:
        rest = remaining
        while rest:
            low = rest & -rest
            c = low.bit_length() - 1
            rest ^= low
            if cur_row[c] + cost[remaining, c] == target:
                order.append(c + 1)
                target = cost[remaining, c]
                remaining ^= low
                cur_row = dm[c]
                break
        else:
            raise AssertionError("reconstruction lost the optimal path")

    tour = Tour(tuple(order))
    return tour, tour_length(inst, tour)
