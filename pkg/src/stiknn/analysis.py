"""Statistics over interaction matrices: efficiency audit, k-sensitivity,
class-block structure, mislabel scoring and display ordering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, InteractionMatrix, intern_labels
from .sti import sti_knn
from .valuation import grand_score


@dataclass(frozen=True)
class EfficiencyReport:
    pair_sum: float
    full_sum: float
    mean: float
    v_of_N: float
    residual: float


def _values(matrix) -> np.ndarray:
    return np.asarray(matrix.values if isinstance(matrix, InteractionMatrix) else matrix,
                      dtype=np.float64)


def efficiency_report(matrix, train: Dataset, test: Dataset, k: int,
                      metric: str = "euclidean") -> EfficiencyReport:
    """Check that main terms plus each unordered pair once add up to ``v(N)``."""
    M = _values(matrix)
    if M.shape != (train.n, train.n):
        raise ValueError(f"matrix shape {M.shape} does not match training size {train.n}")
    pair_sum = float(np.trace(M) + M[np.triu_indices(train.n, 1)].sum())
    full_sum = float(M.sum())
    v_N = grand_score(train, test, k, metric)
    return EfficiencyReport(pair_sum, full_sum, full_sum / M.size, v_N, pair_sum - v_N)


def pearson(a, b) -> float:
    """Pearson correlation of two flattened matrices."""
    x = _values(a).ravel()
    y = _values(b).ravel()
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {_values(a).shape} vs {_values(b).shape}")
    x = x - x.mean()
    y = y - y.mean()
    sx, sy = np.sqrt(x @ x), np.sqrt(y @ y)
    if sx == 0.0 or sy == 0.0:
        raise ValueError("undefined correlation: an input has zero variance")
    return float(np.clip((x @ y) / (sx * sy), -1.0, 1.0))


@dataclass(frozen=True)
class KSweep:
    k_values: list
    correlations: np.ndarray
    stds: np.ndarray

    def min_correlation(self) -> float:
        return float(self.correlations.min())

    def std_strictly_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.stds) < 0))


def k_sweep(train: Dataset, test: Dataset, k_values, metric: str = "euclidean",
            n_jobs: int | None = 1) -> KSweep:
    """Interaction matrices for several ``k``: pairwise correlations and per-k std.

    Correlations use the full flattened matrices, diagonal included.
    """
    ks = [int(k) for k in k_values]
    if not ks:
        raise ValueError("k_values is empty")
    mats = [sti_knn(train, test, k, metric, n_jobs).values for k in ks]
    corr = np.eye(len(ks))
    for a in range(len(ks)):
        for b in range(a + 1, len(ks)):
            corr[a, b] = corr[b, a] = pearson(mats[a], mats[b])
    return KSweep(ks, corr, np.array([m.std() for m in mats]))


@dataclass(frozen=True)
class BlockStat:
    row_class: object
    col_class: object
    mean: float
    mean_abs: float
    count: int


def class_block_summary(matrix, labels) -> list[BlockStat]:
    """Mean and mean |.| of off-diagonal entries for every ordered class pair."""
    M = _values(matrix)
    mapping, ids = intern_labels(list(labels))
    if ids.shape[0] != M.shape[0]:
        raise ValueError(f"{ids.shape[0]} labels for a {M.shape[0]}x{M.shape[0]} matrix")
    off = ~np.eye(M.shape[0], dtype=bool)
    out = []
    for a_name, a in mapping.items():
        for b_name, b in mapping.items():
            cell = off & (ids[:, None] == a) & (ids[None, :] == b)
            vals = M[cell]
            mean = float(vals.mean()) if vals.size else float("nan")
            mean_abs = float(np.abs(vals).mean()) if vals.size else float("nan")
            out.append(BlockStat(a_name, b_name, mean, mean_abs, int(vals.size)))
    return out


def within_cross_means(matrix, labels) -> tuple[float, float]:
    """Off-diagonal means over same-class and cross-class pairs."""
    M = _values(matrix)
    _, ids = intern_labels(list(labels))
    same = ids[:, None] == ids[None, :]
    off = ~np.eye(M.shape[0], dtype=bool)
    return float(M[same & off].mean()), float(M[~same].mean())


def _cos(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(a @ b / (na * nb))


def mislabel_scores(matrix, labels) -> np.ndarray:
    """Per-point suspicion score; lower means more likely mislabeled.

    ``score_i = cos(row_i, own-class centroid without i) - cos(row_i, nearest other centroid)``
    where rows are taken with the diagonal zeroed (main terms measure something
    else and dominate the row direction). The nearest other class is the one
    whose centroid is most cosine-similar to ``row_i``. Points alone in their
    class get NaN.
    """
    R = _values(matrix).copy()
    np.fill_diagonal(R, 0.0)
    mapping, ids = intern_labels(list(labels))
    if len(mapping) < 2:
        raise ValueError("mislabel scores need at least two classes")
    n_cls = len(mapping)
    sums = np.zeros((n_cls, R.shape[1]))
    np.add.at(sums, ids, R)
    sizes = np.bincount(ids, minlength=n_cls)
    centroids = sums / sizes[:, None]
    scores = np.full(R.shape[0], np.nan)
    for i, c in enumerate(ids):
        if sizes[c] < 2:
            continue
        own = (sums[c] - R[i]) / (sizes[c] - 1)
        other = max(_cos(R[i], centroids[o]) for o in range(n_cls) if o != c)
        scores[i] = _cos(R[i], own) - other
    return scores


def suspicious_set(scores: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` lowest scores (NaN counts as most suspicious)."""
    key = np.where(np.isnan(scores), -np.inf, scores)
    return np.argsort(key, kind="stable")[:size]


def display_order(dataset: Dataset) -> np.ndarray:
    """Permutation sorting by class id, then x1, x2, ..., then original index."""
    _, ids = intern_labels(list(dataset.labels))
    keys = [np.arange(dataset.n)] + [dataset.X[:, c] for c in range(dataset.dim - 1, -1, -1)] + [ids]
    return np.lexsort(keys)
