from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
import pytest

from conftest import line_fixture
from stiknn.core import Dataset
from stiknn.oracle import (
    MAX_N,
    SubsetGame,
    discrete_delta,
    hit_table,
    sti_exact_matrix,
    sti_exact_pair,
    sti_exact_pair_restricted,
)
from stiknn.valuation import rank_neighbors, u_subset, v_score


def match_0101_valuation(match_0101):
    train, test = match_0101
    return lambda S: v_score(S, train, test, 2)


# Comments use 1-based point ids; index = id - 1.
@pytest.mark.parametrize("S, expected", [((2, 3), 0.5), ((2,), 0.0), ((), 0.0)])
def test_alternating_fixture_deltas(match_0101, S, expected):
    assert discrete_delta(S, 0, 1, match_0101_valuation(match_0101)) == expected


def test_alternating_delta_for_point4_subset(match_0101):
    # A hand tally of +1/2 for S = {4} is wrong; direct evaluation gives
    # v(124) - v(14) - v(24) + v(4) = 1/2 - 1/2 - 1 + 1/2 = -1/2.
    assert discrete_delta((3,), 0, 1, match_0101_valuation(match_0101)) == -0.5


def test_alternating_phi12_from_enumeration(match_0101):
    # (2/4) * (1/3 * 1/2 + 0 + 1/3 * (-1/2) + 0) = 0, not 1/6.
    train, test = match_0101
    assert sti_exact_pair(train, test, 2, 0, 1) == 0.0
    assert sti_exact_pair(train, test, 2, 2, 3) == pytest.approx(-1 / 6, abs=1e-15)


def test_delta_zero_for_additive_small_sets(match_0101):
    train, test = match_0101
    # k = 3: every set touched with |S| <= 1 has at most 3 members, u is additive
    val = lambda S: v_score(S, train, test, 3)  # noqa: E731
    for S in [(), (2,), (3,)]:
        assert discrete_delta(S, 0, 1, val) == 0.0


def test_delta_rejects_overlap(match_0101):
    with pytest.raises(ValueError, match="overlaps"):
        discrete_delta((0, 2), 0, 1, match_0101_valuation(match_0101))
    with pytest.raises(ValueError):
        discrete_delta((), 1, 1, match_0101_valuation(match_0101))


def test_n2_hand_enumeration():
    train, test = line_fixture(["a", "a"], "a")
    M = sti_exact_matrix(train, test, 1).values
    assert M[0, 1] == -1.0 and M[1, 0] == -1.0
    assert np.diag(M).tolist() == [1.0, 1.0]


def test_all_mismatch_zero():
    train, test = line_fixture(["b", "c", "b", "b"], "a")
    assert sti_exact_pair(train, test, 2, 1, 3) == 0.0


def test_k_equals_n_zero():
    rng = np.random.default_rng(4)
    train = Dataset(rng.random((6, 2)), rng.integers(0, 2, 6))
    test = Dataset(rng.random((2, 2)), rng.integers(0, 2, 2))
    M = sti_exact_matrix(train, test, 6).values
    assert np.all(M[~np.eye(6, dtype=bool)] == 0.0)
    assert sti_exact_pair_restricted(train, test, 6, 0, 5) == 0.0


def test_cap_enforced():
    train = Dataset(np.arange(23.0).reshape(-1, 1), ["a"] * 23)
    test = Dataset(np.zeros((1, 1)), ["a"])
    with pytest.raises(ValueError, match="22"):
        sti_exact_pair(train, test, 2, 0, 1)
    small = train.subset(range(8))
    with pytest.raises(ValueError, match="n <= 5"):
        sti_exact_matrix(small, test, 2, cap=5)
    assert MAX_N == 22


def test_hit_table_matches_u_subset():
    rng = np.random.default_rng(2)
    for n, k in [(5, 2), (7, 3), (6, 6), (4, 1)]:
        train = Dataset(rng.random((n, 2)), rng.integers(0, 2, n))
        q, yq = rng.random(2), 1
        r = rank_neighbors(train, q)
        matches = (train.labels[r.order] == yq).astype(np.int8)
        table = hit_table(r.order, matches, k)
        for mask in range(1 << n):
            S = [i for i in range(n) if mask >> i & 1]
            assert table[mask] == round(k * u_subset(S, r, train.labels, yq, k))


def naive_pair(train, test, k, i, j):
    """Textbook double loop over subsets with exact fractions."""
    n = train.n
    rest = [x for x in range(n) if x not in (i, j)]
    rankings = [rank_neighbors(train, x) for x in test.X]

    def v(S):
        return sum(Fraction(round(k * u_subset(S, r, train.labels, y, k)), k)
                   for r, y in zip(rankings, test.labels)) / test.n

    total = Fraction(0)
    for s in range(len(rest) + 1):
        for S in combinations(rest, s):
            S = set(S)
            total += Fraction(1, comb(n - 1, s)) * (v(S | {i, j}) - v(S | {i}) - v(S | {j}) + v(S))
    return Fraction(2, n) * total


def test_tabulated_oracle_matches_textbook_loop():
    rng = np.random.default_rng(8)
    for n, k, t in [(4, 2, 1), (5, 1, 2), (6, 3, 3), (6, 5, 1)]:
        train = Dataset(rng.random((n, 2)), rng.integers(0, 3, n))
        test = Dataset(rng.random((t, 2)), rng.integers(0, 3, t))
        game = SubsetGame(train, test, k)
        for i in range(n):
            for j in range(i + 1, n):
                assert game.pair_fraction(i, j) == naive_pair(train, test, k, i, j)


def test_restricted_equals_full_exactly():
    rng = np.random.default_rng(12)
    for n in range(2, 9):
        for k in range(1, n + 1):
            train = Dataset(rng.random((n, 2)), rng.integers(0, 2, n))
            test = Dataset(rng.random((2, 2)), rng.integers(0, 2, 2))
            game = SubsetGame(train, test, k)
            for i in range(n):
                for j in range(i + 1, n):
                    sums = game.delta_by_size(i, j)
                    assert np.all(sums[: max(0, k - 1)] == 0)
                    assert game.pair_fraction(i, j) == game.pair_fraction(i, j, min_size=k - 1)


def test_restricted_k1_identical_terms():
    rng = np.random.default_rng(0)
    train = Dataset(rng.random((6, 2)), rng.integers(0, 2, 6))
    test = Dataset(rng.random((1, 2)), [1])
    for i, j in [(0, 1), (2, 5)]:
        assert sti_exact_pair_restricted(train, test, 1, i, j) == sti_exact_pair(train, test, 1, i, j)


def test_difference_lemma_small():
    rng = np.random.default_rng(21)
    train = Dataset(rng.random((6, 2)), rng.integers(0, 2, 6))
    test = Dataset(rng.random((2, 2)), rng.integers(0, 2, 2))
    game = SubsetGame(train, test, 2)
    for i, j, q in [(0, 1, 2), (3, 5, 1), (4, 0, 5)]:
        assert game.pair_fraction(i, j) - game.pair_fraction(i, q) == game.difference_rhs(i, j, q)
    with pytest.raises(ValueError):
        game.difference_rhs(1, 1, 2)


def test_oracle_matrix_symmetric_with_main_terms(match_0101):
    train, test = match_0101
    M = sti_exact_matrix(train, test, 2)
    assert np.array_equal(M.values, M.values.T)
    assert np.diag(M.values).tolist() == [0.0, 0.5, 0.0, 0.5]
    assert M.meta["oracle"] is True
