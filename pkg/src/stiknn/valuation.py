"""KNN valuation functions: neighbor ranking, likelihood utilities and LOO.

The utility of a training subset ``S`` for one test point is the fraction of
the ``k`` nearest members of ``S`` that carry the test label (divided by
``k`` even when ``|S| < k``). The dataset-level score ``v`` averages this over
the test set.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .core import Dataset, KnnConfig, NeighborRanking, joint_label_ids


def pairwise_distances(X: np.ndarray, Q: np.ndarray, metric: str = "euclidean") -> np.ndarray:
    """Distances from every query row in ``Q`` to every row in ``X``, shape ``(len(Q), len(X))``."""
    KnnConfig(1, metric)
    diff = np.abs(Q[:, None, :] - X[None, :, :])
    if metric == "euclidean":
        return np.sqrt(np.einsum("qnd,qnd->qn", diff, diff))
    if metric == "manhattan":
        return diff.sum(axis=2)
    return diff.max(axis=2)


def rank_neighbors(train: Dataset, query, metric: str = "euclidean") -> NeighborRanking:
    """Sort training indices by ascending distance to ``query``.

    ``query`` may be a feature vector or a :class:`~stiknn.core.LabeledPoint`.
    Equal distances are ordered by ascending training index.
    """
    x = np.asarray(getattr(query, "features", query), dtype=np.float64).reshape(-1)
    if x.shape[0] != train.dim:
        raise ValueError(f"query has dimension {x.shape[0]}, training set has {train.dim}")
    dist = pairwise_distances(train.X, x[None, :], metric)[0]
    order = np.argsort(dist, kind="stable")
    return NeighborRanking(order=order, distances=dist[order])


def rank_all(train: Dataset, test: Dataset, metric: str = "euclidean") -> np.ndarray:
    """Neighbor orders for every test point, shape ``(t, n)``."""
    if test.dim != train.dim:
        raise ValueError(f"test set has dimension {test.dim}, training set has {train.dim}")
    orders = np.empty((test.n, train.n), dtype=np.int64)
    # chunked so the (chunk, n, dim) difference tensor stays small
    step = max(1, 2_000_000 // max(1, train.n * train.dim))
    for lo in range(0, test.n, step):
        dist = pairwise_distances(train.X, test.X[lo : lo + step], metric)
        orders[lo : lo + step] = np.argsort(dist, axis=1, kind="stable")
    return orders


def u_single(train_label, test_label, k: int) -> float:
    """Utility of a single training point: ``1/k`` on a label match, else 0."""
    return (1.0 if train_label == test_label else 0.0) / k


def u_subset(subset: Iterable[int], ranking: NeighborRanking, labels, test_label, k: int) -> float:
    """Likelihood of the test label under KNN trained on ``subset``."""
    members = set(int(i) for i in subset)
    if not members:
        return 0.0
    hits = 0
    taken = 0
    for i in ranking.order:
        if int(i) in members:
            hits += labels[i] == test_label
            taken += 1
            if taken == k:
                break
    return hits / k


def v_score(subset: Iterable[int], train: Dataset, test: Dataset, k: int,
            metric: str = "euclidean") -> float:
    """Mean of :func:`u_subset` over every test point."""
    members = list(subset)
    total = 0.0
    for p in range(test.n):
        ranking = rank_neighbors(train, test.X[p], metric)
        total += u_subset(members, ranking, train.labels, test.labels[p], k)
    return total / test.n


def match_matrix(train: Dataset, test: Dataset, orders: np.ndarray) -> np.ndarray:
    """Label-match indicators in ranked order, shape ``(t, n)``, dtype int8."""
    y_train, y_test = joint_label_ids(train.labels, test.labels)
    return (y_train[orders] == y_test[:, None]).astype(np.int8)


def grand_score(train: Dataset, test: Dataset, k: int, metric: str = "euclidean") -> float:
    """``v(N)``: the valuation of the full training set."""
    matches = match_matrix(train, test, rank_all(train, test, metric))
    return float(matches[:, :k].sum(axis=1).mean() / k)


def loo_values(train: Dataset, test: Dataset, k: int, metric: str = "euclidean") -> np.ndarray:
    """Leave-one-out values ``v(N) - v(N \\ {i})`` for every training point.

    Removing a point only matters when it sits among the ``k`` nearest
    neighbors of a test point; then the ``(k+1)``-th neighbor takes its slot.
    """
    n = train.n
    if n < 2:
        raise ValueError("leave-one-out needs at least two training points")
    KnnConfig(k)
    orders = rank_all(train, test, metric)
    matches = match_matrix(train, test, orders).astype(np.float64)
    kk = min(k, n)
    successor = matches[:, kk] if kk < n else np.zeros(test.n)
    out = np.zeros(n)
    # loss at rank r < k is (own match - successor match) / k
    delta = (matches[:, :kk] - successor[:, None]) / k
    np.add.at(out, orders[:, :kk], delta)
    return out / test.n
