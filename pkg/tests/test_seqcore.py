"""Tests for the sequential core: distance measure, MTF, and the oracles."""

import random
from fractions import Fraction

import pytest

from listlab.seqcore import (
    BudgetExceeded,
    CostModel,
    DistanceProfile,
    all_sequences,
    distance,
    mtf_run,
    opt_free_cost,
    opt_free_cost_brute,
    opt_paid_cost,
    prev_index,
    succ_index,
)

A, B, C, X, Y, Z = 1, 2, 3, 1, 2, 3


def test_prev_index_basic():
    assert prev_index([A, B, A], 3) == 1
    assert prev_index([A, B, A], 1) is None
    assert prev_index([A, A, A], 3) == 2


def test_prev_index_out_of_range():
    with pytest.raises(IndexError):
        prev_index([A, B], 3)
    with pytest.raises(IndexError):
        prev_index([A, B], 0)


def test_succ_index_basic():
    assert succ_index([A, B, A], 1) == 3
    assert succ_index([A, B, A], 3) is None
    assert succ_index([A, A, A], 1) == 2


def test_distance_hand_values():
    assert distance([A, B, A], ell=3) == DistanceProfile((3, 3, 2), 8)
    assert distance([A, A], ell=5) == DistanceProfile((5, 1), 6)
    assert distance([A, B, C, B], ell=3) == DistanceProfile((3, 3, 3, 2), 11)


def test_distance_renamed_universe():
    # first occurrences always count ell, even with more than ell items
    prof = distance([1, 2, 3, 4, 1], ell=2)
    assert prof.per_index == (2, 2, 2, 2, 4)


def test_distance_rejects_bad_input():
    with pytest.raises(ValueError):
        distance([0, 1], ell=3)
    with pytest.raises(ValueError):
        distance([1], ell=0)


def test_mtf_hand_values():
    cost, final = mtf_run([Z, Z], [X, Y, Z], CostModel.FULL)
    assert cost == 4 and final == [Z, X, Y]
    cost, final = mtf_run([X], [X, Y, Z], CostModel.FULL)
    assert cost == 1 and final == [X, Y, Z]


def test_mtf_partial_is_full_minus_length():
    rng = random.Random(7)
    for _ in range(50):
        ell = rng.randint(2, 6)
        init = list(range(1, ell + 1))
        seq = [rng.randint(1, ell) for _ in range(rng.randint(1, 20))]
        full, _ = mtf_run(seq, init, CostModel.FULL)
        part, _ = mtf_run(seq, init, CostModel.PARTIAL)
        assert part == full - len(seq)


def test_mtf_missing_item():
    with pytest.raises(ValueError):
        mtf_run([4], [1, 2, 3])


def test_distance_sandwich_random():
    # d(I) - ell^2/2 + ell/2 <= MTF(I) <= d(I), exact (doubled to stay integral)
    rng = random.Random(20260810)
    for _ in range(300):
        ell = rng.randint(2, 8)
        init = list(range(1, ell + 1))
        seq = [rng.randint(1, ell) for _ in range(rng.randint(1, 50))]
        d = distance(seq, ell).total
        cost, _ = mtf_run(seq, init)
        assert 2 * cost <= 2 * d
        assert 2 * cost >= 2 * d - ell * ell + ell


def test_opt_free_hand_values():
    assert opt_free_cost([Z], [X, Y, Z]) == 3
    assert opt_free_cost([Z, Z], [X, Y, Z]) == 4
    assert opt_free_cost([Y, X, Y, X], [X, Y]) == 6


def test_opt_free_matches_brute_force():
    rng = random.Random(3)
    for _ in range(40):
        init = [1, 2, 3]
        seq = [rng.randint(1, 3) for _ in range(rng.randint(1, 5))]
        assert opt_free_cost(seq, init) == opt_free_cost_brute(seq, init)


def test_opt_free_budget():
    with pytest.raises(BudgetExceeded):
        opt_free_cost([1], list(range(1, 8)))


def test_opt_paid_hand_values():
    assert opt_paid_cost([Z], [X, Y, Z]) == 3
    assert opt_paid_cost([X], [X, Y]) == 1


def test_opt_paid_below_opt_free_exhaustive():
    init = [1, 2, 3]
    for n in range(1, 6):
        for seq in all_sequences([1, 2, 3], n):
            assert opt_paid_cost(seq, init) <= opt_free_cost(seq, init)


def test_opt_paid_budget():
    with pytest.raises(BudgetExceeded):
        opt_paid_cost([1], list(range(1, 7)))


def test_opt_lower_bound_via_distance():
    # OPT(I) >= d(I)/2 * (ell+1)/ell - (ell^2-1)/4 on small instances
    rng = random.Random(11)
    for _ in range(40):
        ell = rng.randint(2, 4)
        init = list(range(1, ell + 1))
        seq = [rng.randint(1, ell) for _ in range(rng.randint(1, 8))]
        d = distance(seq, ell).total
        bound = Fraction(d, 2) * Fraction(ell + 1, ell) - Fraction(ell * ell - 1, 4)
        assert opt_paid_cost(seq, init) >= bound


def test_mtf_strict_ratio_small_sample():
    # MTF(I) <= (2 - 2/(ell+1)) * OPT(I); the exhaustive run is in acceptance
    init = [1, 2, 3]
    ratio = 2 - Fraction(2, 4)
    for seq in all_sequences([1, 2, 3], 4):
        cost, _ = mtf_run(seq, init)
        assert cost <= ratio * opt_paid_cost(seq, init)
