import itertools
import math

import pytest

from nodetour import Tour, TspInstance, generate_instance, held_karp, tour_length
from nodetour.errors import SizeCapError

CORNERS = TspInstance(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)), id="corners")


def brute_force(inst):
    best_len = math.inf
    best = None
    for perm in itertools.permutations(range(1, inst.n)):
        t = Tour((0,) + perm)
        length = tour_length(inst, t)
        if length < best_len:
            best_len, best = length, t
    return best, best_len


def test_corners_perimeter():
    tour, length = held_karp(CORNERS)
    assert length == pytest.approx(4.0)
    assert tour.edges() == frozenset({(0, 1), (1, 2), (2, 3), (0, 3)})


def test_triangle_is_its_perimeter():
    inst = TspInstance(((0.1, 0.1), (0.9, 0.2), (0.4, 0.8)), id="tri")
    tour, length = held_karp(inst)
    perimeter = tour_length(inst, Tour((0, 1, 2)))
    assert length == perimeter


def test_matches_brute_force_n9():
    inst = generate_instance(9, 314)
    _, bf_len = brute_force(inst)
    tour, hk_len = held_karp(inst)
    assert hk_len == bf_len
    assert tour_length(inst, tour) == bf_len


def test_dominates_every_enumerated_tour_n7():
    inst = generate_instance(7, 55)
    _, hk_len = held_karp(inst)
    for perm in itertools.permutations(range(1, 7)):
        assert hk_len <= tour_length(inst, Tour((0,) + perm)) + 1e-12


def test_lexicographic_tie_break_starts_at_zero():
    for seed in (1, 2, 3):
        inst = generate_instance(8, seed)
        tour, _ = held_karp(inst)
        assert tour.order[0] == 0
        # a tour and its reversal are equally long; the smaller second entry wins
        assert tour.order[1] < tour.order[-1]


def test_permutation_invariance():
    inst = generate_instance(9, 777)
    base_tour, base_len = held_karp(inst)
    relabel = [3, 1, 4, 0, 8, 2, 7, 5, 6]  # new index of each original node
    permuted = TspInstance(
        tuple(inst.nodes[relabel.index(i)] for i in range(9)), id="p"
    )
    permuted_tour, permuted_len = held_karp(permuted)
    assert abs(permuted_len - base_len) < 1e-12
    mapped = frozenset(
        (min(relabel[a], relabel[b]), max(relabel[a], relabel[b]))
        for a, b in base_tour.edges()
    )
    assert permuted_tour.edges() == mapped


def test_size_cap():
    with pytest.raises(SizeCapError):
        held_karp(generate_instance(17, 1))
    held_karp(generate_instance(16, 1))  # the cap itself is allowed
