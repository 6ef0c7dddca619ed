"""Exact Shapley-Taylor pair interactions for the KNN likelihood in O(t n^2).

For one test point, with training points ranked from nearest (rank 1) to
farthest (rank n):

* the pair of the two farthest points gets ``-2(n-k)/(n(n-1)) * u(n)``;
* walking the superdiagonal inwards, ``phi(j-2, j-1) = phi(j-1, j)`` plus
  ``2(j-k-1)/((j-2)(j-1)) * (u(j) - u(j-1))`` whenever ``j > k+1``;
* every above-diagonal entry of a ranked column equals that column's
  superdiagonal entry.

So a single test point is fully described by one value per ranked column.
The matrix for a test set is the mean of the single-test matrices, and the
diagonal holds the main terms ``v({i}) - v(empty)``.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .core import Dataset, InteractionMatrix, KnnConfig, NeighborRanking, joint_label_ids
from .valuation import match_matrix, rank_all

#: Test points per accumulation block. Fixed so the floating-point summation
#: order does not depend on the number of workers.
BLOCK_SIZE = 32


def _check_sizes(n: int, k: int) -> None:
    if n < 2:
        raise ValueError(f"pair interactions need at least two training points, got n={n}")
    KnnConfig(k).check_train_size(n)


def last_pair_term(n: int, k: int, u_last: float) -> float:
    """Interaction of the two training points farthest from the test point."""
    _check_sizes(n, k)
    return -2.0 * (n - k) / (n * (n - 1)) * u_last


def superdiag_step(phi_next: float, j: int, k: int, u_j: float, u_jm1: float) -> float:
    """One inward step along the superdiagonal (1-based rank ``j``, ``3 <= j <= n``).

    Returns ``phi(j-2, j-1)`` from ``phi_next = phi(j-1, j)``.
    """
    if j < 3:
        raise ValueError(f"superdiagonal steps start at rank 3, got j={j}")
    if j > k + 1:
        return phi_next + 2.0 * (j - k - 1) / ((j - 2) * (j - 1)) * (u_j - u_jm1)
    return phi_next


def _step_coefficients(n: int, k: int) -> np.ndarray:
    """Coefficient of ``u(j) - u(j-1)`` for ranks ``j = n, n-1, ..., 3``."""
    j = np.arange(n, 2, -1, dtype=np.float64)
    coef = 2.0 * (j - k - 1) / ((j - 2) * (j - 1))
    coef[j <= k + 1] = 0.0
    return coef


def column_values(matches: np.ndarray, k: int) -> np.ndarray:
    """Per-column interaction values in ranked coordinates.

    Args:
        matches: ``(t, n)`` or ``(n,)`` label-match indicators in rank order.
        k: KNN parameter, ``1 <= k <= n``.

    Returns:
        Array of the same shape; entry ``r`` (0-based rank) is the value shared
        by every above-diagonal cell of ranked column ``r``. Entry 0 is unused
        and set to zero.
    """
    m = np.atleast_2d(matches)
    t, n = m.shape
    _check_sizes(n, k)
    u = m.astype(np.float64) / k
    seed = -2.0 * (n - k) / (n * (n - 1)) * u[:, n - 1]
    # rank j contributes coef_j * (u_j - u_{j-1}); listed for j = n .. 3
    du = u[:, n - 1 : 1 : -1] - u[:, n - 2 : 0 : -1]
    terms = np.empty((t, n - 1))
    terms[:, 0] = seed
    terms[:, 1:] = _step_coefficients(n, k) * du
    # sequential cumsum reproduces the loop's left-to-right accumulation
    walk = np.cumsum(terms, axis=1)
    out = np.zeros((t, n))
    out[:, 1:] = walk[:, ::-1]
    return out if matches.ndim == 2 else out[0]


def sti_knn_one_test(ranking: NeighborRanking, train_labels, test_label, k: int) -> np.ndarray:
    """Pair-interaction matrix for a single test point, original index order.

    The diagonal is left at zero.
    """
    labels = np.asarray(train_labels)
    matches = np.array([labels[i] == test_label for i in ranking.order], dtype=np.int8)
    cols = column_values(matches, k)
    pos = ranking.positions()
    out = cols[np.maximum.outer(pos, pos)]
    np.fill_diagonal(out, 0.0)
    return out


def main_terms(train: Dataset, test: Dataset, k: int) -> np.ndarray:
    """Main terms ``v({i}) - v(empty)``: share of test points labelled like ``i``, over ``k``."""
    KnnConfig(k)
    y_train, y_test = joint_label_ids(train.labels, test.labels)
    counts = np.bincount(y_test, minlength=int(max(y_train.max(), y_test.max())) + 1)
    return counts[y_train] / (test.n * k)


TILE_CELLS = 1 << 15


def _accumulate_block(cols: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Sum of per-test matrices ``c[max(pos_i, pos_j)]`` over one block of test points.

    Works through row tiles of about ``TILE_CELLS`` cells so the accumulator and
    scratch buffers stay cache resident; without tiling the runtime grows
    faster than ``n**2`` once the matrix outgrows the cache. Each cell still
    adds test points in block order, so tiling does not change the result.
    """
    n = positions.shape[1]
    rows = max(1, TILE_CELLS // n)
    acc = np.empty((n, n))
    idx = np.empty((rows, n), dtype=np.intp)
    buf = np.empty((rows, n))
    for lo in range(0, n, rows):
        hi = min(n, lo + rows)
        tile, ix, b = acc[lo:hi], idx[: hi - lo], buf[: hi - lo]
        tile[:] = 0.0
        for c, pos in zip(cols, positions):
            np.maximum(pos[lo:hi, None], pos[None, :], out=ix)
            np.take(c, ix, out=b)
            tile += b
    return acc


def sti_knn(train: Dataset, test: Dataset, k: int, metric: str = "euclidean",
            n_jobs: int | None = 1) -> InteractionMatrix:
    """Exact pair-interaction matrix of the KNN valuation over a test set.

    Args:
        train: training set, ``n >= 2`` points; its order fixes row/column identity.
        test: test set, ``t >= 1`` points.
        k: number of neighbors, ``1 <= k <= n``.
        metric: distance used to rank training points.
        n_jobs: worker threads over test-point blocks. Results are bit-identical
            for every value because blocks are always summed in block order.

    Returns:
        InteractionMatrix with pair interactions off the diagonal and main
        terms on it.
    """
    n, t = train.n, test.n
    _check_sizes(n, k)
    started = time.perf_counter()
    orders = rank_all(train, test, metric)
    cols = column_values(match_matrix(train, test, orders), k)
    positions = np.empty_like(orders)
    np.put_along_axis(positions, orders, np.arange(n)[None, :], axis=1)

    blocks = [slice(lo, min(lo + BLOCK_SIZE, t)) for lo in range(0, t, BLOCK_SIZE)]
    work = lambda b: _accumulate_block(cols[b], positions[b])  # noqa: E731
    workers = max(1, int(n_jobs or 1))
    if workers == 1 or len(blocks) == 1:
        partials = map(work, blocks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(work, blocks))
    total = np.zeros((n, n))
    for part in partials:
        total += part
    total /= t
    np.fill_diagonal(total, main_terms(train, test, k))
    meta = {
        "metric": metric,
        "train": train.fingerprint(),
        "test": test.fingerprint(),
        "seconds": time.perf_counter() - started,
    }
    return InteractionMatrix(values=total, k=k, t=t, meta=meta)
