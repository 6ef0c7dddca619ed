"""Brute-force Shapley-Taylor pair interactions by subset enumeration.

This is the ground truth for small training sets (``n <= MAX_N``). Subsets are
bitmasks over original training indices. For every test point the utility of
all ``2**n`` subsets is tabulated once as an integer hit count (utility times
``k``). Discrete second differences are then summed per subset size in exact
integer arithmetic. The weighted size sums are combined as fractions, so
oracle values are exact rationals until the final float conversion.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from .core import Dataset, InteractionMatrix, KnnConfig
from .valuation import match_matrix, rank_all

MAX_N = 22


def _check_cap(n: int, cap: int = MAX_N) -> None:
    cap = min(cap, MAX_N)
    if n > cap:
        raise ValueError(f"brute-force enumeration is capped at n <= {cap} training points, got n={n}")


def discrete_delta(S, i: int, j: int, valuation: Callable[[frozenset], float]) -> float:
    """``v(S+ij) - v(S+i) - v(S+j) + v(S)`` for a set function ``valuation``."""
    S = frozenset(int(s) for s in S)
    if i == j:
        raise ValueError("pair indices must differ")
    if i in S or j in S:
        raise ValueError(f"subset {sorted(S)} overlaps the pair ({i}, {j})")
    return valuation(S | {i, j}) - valuation(S | {i}) - valuation(S | {j}) + valuation(S)


def hit_table(order: np.ndarray, matches_ranked: np.ndarray, k: int) -> np.ndarray:
    """Label-match count among the ``k`` nearest members of every subset.

    Args:
        order: neighbor order (original indices, nearest first).
        matches_ranked: match indicator per rank position.
        k: KNN parameter.

    Returns:
        int64 array of length ``2**n`` indexed by bitmask over original indices.
    """
    n = order.shape[0]
    out = np.empty(1 << n, dtype=np.int64)
    chunk = 1 << 16
    for lo in range(0, 1 << n, chunk):
        masks = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        member = ((masks[:, None] >> order[None, :]) & 1).astype(np.int32)
        within_k = np.cumsum(member, axis=1) <= k
        out[lo : lo + masks.shape[0]] = (member * within_k) @ matches_ranked.astype(np.int64)
    return out


class SubsetGame:
    """Tabulated KNN utilities of one (train, test, k) instance.

    ``total_hits[mask]`` is ``t * k * v(mask)``: label hits among the ``k``
    nearest subset members, summed over test points.
    """

    def __init__(self, train: Dataset, test: Dataset, k: int, metric: str = "euclidean",
                 cap: int = MAX_N):
        KnnConfig(k, metric)
        self.n, self.t, self.k = train.n, test.n, k
        _check_cap(self.n, cap)
        orders = rank_all(train, test, metric)
        matches = match_matrix(train, test, orders)
        self.total_hits = np.zeros(1 << self.n, dtype=np.int64)
        for o, m in zip(orders, matches):
            self.total_hits += hit_table(o, m, k)
        self.popcount = _popcount(np.arange(1 << self.n, dtype=np.int64))

    def value(self, S) -> Fraction:
        mask = 0
        for s in S:
            mask |= 1 << int(s)
        return Fraction(int(self.total_hits[mask]), self.t * self.k)

    def _free_masks(self, *fixed: int) -> np.ndarray:
        masks = np.arange(1 << self.n, dtype=np.int64)
        bad = 0
        for f in fixed:
            bad |= 1 << f
        return masks[(masks & bad) == 0]

    def delta_by_size(self, i: int, j: int) -> np.ndarray:
        """Integer sums of ``k*t*delta(S)`` grouped by ``|S|`` for ``S`` avoiding ``i, j``."""
        if i == j:
            raise ValueError("pair indices must differ")
        S = self._free_masks(i, j)
        bi, bj = 1 << i, 1 << j
        h = self.total_hits
        delta = h[S | bi | bj] - h[S | bi] - h[S | bj] + h[S]
        return _int_bincount(self.popcount[S], delta, self.n - 1)

    def pair_fraction(self, i: int, j: int, min_size: int = 0) -> Fraction:
        sums = self.delta_by_size(i, j)
        acc = Fraction(0)
        for s in range(min_size, self.n - 1):
            if sums[s]:
                acc += Fraction(int(sums[s]), comb(self.n - 1, s))
        return acc * Fraction(2, self.n * self.k * self.t)

    def difference_rhs(self, i: int, j: int, q: int) -> Fraction:
        """Enumeration of the closed form for ``phi_ij - phi_iq``.

        ``(2/n) * sum over S avoiding {i, j, q} of
        (1/C(n-1, s) + 1/C(n-1, s+1)) * (v(Sij) - v(Siq) - v(Sj) + v(Sq))``.
        """
        if len({i, j, q}) != 3:
            raise ValueError("indices i, j, q must be distinct")
        S = self._free_masks(i, j, q)
        bi, bj, bq = 1 << i, 1 << j, 1 << q
        h = self.total_hits
        d = h[S | bi | bj] - h[S | bi | bq] - h[S | bj] + h[S | bq]
        sums = _int_bincount(self.popcount[S], d, self.n - 2)
        acc = Fraction(0)
        for s in range(self.n - 2):
            if sums[s]:
                w = Fraction(1, comb(self.n - 1, s)) + Fraction(1, comb(self.n - 1, s + 1))
                acc += w * int(sums[s])
        return acc * Fraction(2, self.n * self.k * self.t)


def _popcount(masks: np.ndarray) -> np.ndarray:
    out = np.zeros_like(masks)
    m = masks.copy()
    while np.any(m):
        out += m & 1
        m >>= 1
    return out


def _int_bincount(groups: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, dtype=np.int64)
    np.add.at(out, groups, values)
    return out


def sti_exact_pair(train: Dataset, test: Dataset, k: int, i: int, j: int,
                   metric: str = "euclidean") -> float:
    """Pair interaction of training points ``i`` and ``j`` by full enumeration."""
    return float(SubsetGame(train, test, k, metric).pair_fraction(i, j))


def sti_exact_pair_restricted(train: Dataset, test: Dataset, k: int, i: int, j: int,
                              metric: str = "euclidean") -> float:
    """Same as :func:`sti_exact_pair` but summing only subset sizes ``k-1 .. n-2``."""
    return float(SubsetGame(train, test, k, metric).pair_fraction(i, j, min_size=k - 1))


def sti_exact_matrix(train: Dataset, test: Dataset, k: int, metric: str = "euclidean",
                     cap: int = MAX_N) -> InteractionMatrix:
    """Full interaction matrix by enumeration; main terms on the diagonal."""
    n = train.n
    if n < 2:
        raise ValueError(f"pair interactions need at least two training points, got n={n}")
    KnnConfig(k).check_train_size(n)
    game = SubsetGame(train, test, k, metric, cap)
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = float(game.pair_fraction(i, j))
    for i in range(n):
        out[i, i] = float(game.value({i}) - game.value(()))
    return InteractionMatrix(values=out, k=k, t=test.n, meta={"metric": metric, "oracle": True})
