"""Domain types shared across the package.

All containers are immutable after construction. The training-set order is
the identity used for interaction-matrix rows and columns; any reordering
for display is a separate view (see :func:`stiknn.analysis.display_order`).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np

METRICS = ("euclidean", "manhattan", "chebyshev")


class LabeledPoint(NamedTuple):
    features: np.ndarray
    label: Any


def intern_labels(raw_labels: Sequence) -> tuple[dict, np.ndarray]:
    """Map labels to dense integer ids in first-appearance order.

    Returns:
        ``(mapping, ids)`` where ``mapping[label] == id`` and ``ids`` is an
        int64 array aligned with ``raw_labels``.
    """
    mapping: dict = {}
    ids = np.empty(len(raw_labels), dtype=np.int64)
    for pos, label in enumerate(raw_labels):
        key = label.item() if isinstance(label, np.generic) else label
        ids[pos] = mapping.setdefault(key, len(mapping))
    return mapping, ids


def joint_label_ids(*label_arrays: Sequence) -> list[np.ndarray]:
    """Intern several label arrays against one shared mapping."""
    sizes = [len(a) for a in label_arrays]
    merged = [lab for arr in label_arrays for lab in arr]
    _, ids = intern_labels(merged)
    return np.split(ids, np.cumsum(sizes)[:-1])


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered collection of labeled points.

    Attributes:
        X: ``(n, dim)`` float64 feature matrix; every value finite.
        labels: length-``n`` array of categorical labels (any hashable).
        role: free-form tag, usually ``"train"`` or ``"test"``.
    """

    X: np.ndarray
    labels: np.ndarray
    role: str = "train"

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[1] < 1:
            raise ValueError(f"features must be a 2-D array with dim >= 1, got shape {X.shape}")
        if X.shape[0] < 1:
            raise ValueError("a dataset needs at least one point")
        if not np.all(np.isfinite(X)):
            raise ValueError("features must be finite (no NaN or inf)")
        labels = np.array(self.labels)
        if labels.ndim != 1 or labels.shape[0] != X.shape[0]:
            raise ValueError(
                f"expected {X.shape[0]} labels, got array of shape {labels.shape}"
            )
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "labels", _freeze(labels))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> LabeledPoint:
        return LabeledPoint(self.X[i], self.labels[i])

    def classes(self) -> list:
        """Distinct labels in first-appearance order."""
        return list(intern_labels(self.labels)[0])

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(self.X[idx], self.labels[idx], self.role)

    def with_labels(self, labels) -> "Dataset":
        return Dataset(self.X, labels, self.role)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update("\x1f".join(map(str, self.labels.tolist())).encode())
        return h.hexdigest()[:16]

    def equals(self, other: "Dataset") -> bool:
        """Exact equality of features and (stringified) labels, order included."""
        return (
            self.X.shape == other.X.shape
            and bool(np.array_equal(self.X, other.X))
            and [str(a) for a in self.labels] == [str(b) for b in other.labels]
        )


@dataclass(frozen=True)
class KnnConfig:
    k: int
    metric: str = "euclidean"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; choose one of {METRICS}")

    def check_train_size(self, n: int) -> None:
        if self.k > n:
            raise ValueError(f"k exceeds training size (k={self.k}, n={n})")


@dataclass(frozen=True, eq=False)
class NeighborRanking:
    """Training indices sorted by ascending distance to one query point.

    Ties keep ascending original-index order.
    """

    order: np.ndarray
    distances: np.ndarray

    @property
    def n(self) -> int:
        return self.order.shape[0]

    def positions(self) -> np.ndarray:
        """Inverse permutation: ``positions()[i]`` is the 0-based rank of train point ``i``."""
        pos = np.empty_like(self.order)
        pos[self.order] = np.arange(self.order.shape[0])
        return pos


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Symmetric ``n x n`` matrix of pair interactions with main terms on the diagonal."""

    values: np.ndarray
    k: int
    t: int
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def off_diagonal(self) -> np.ndarray:
        return self.values[~np.eye(self.n, dtype=bool)]

    def permuted(self, perm) -> "InteractionMatrix":
        """View with rows and columns reordered by ``perm`` (display only)."""
        p = np.asarray(perm)
        return InteractionMatrix(self.values[np.ix_(p, p)], self.k, self.t, dict(self.meta))
