"""scikit-learn style front end.

``STIKNN`` is fitted on a training set and then valuates that training set
against any labelled test set::

    est = STIKNN(n_neighbors=5).fit(X_train, y_train)
    phi = est.interactions(X_test, y_test)      # (n_train, n_train)

It also behaves as the KNN classifier whose likelihood is being valued
(``predict_proba``/``predict``), so it composes with sklearn utilities such
as ``clone`` and ``get_params``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import Dataset, InteractionMatrix, KnnConfig, intern_labels
from .oracle import sti_exact_matrix
from .sti import main_terms, sti_knn
from .valuation import grand_score, loo_values, rank_all


class STIKNN(BaseEstimator):
    """Exact Shapley-Taylor pair interactions of training points for a KNN model.

    Parameters
    ----------
    n_neighbors : int, default=5
        The ``k`` of the KNN likelihood; must not exceed the training size.
    metric : {"euclidean", "manhattan", "chebyshev"}, default="euclidean"
        Distance used to rank training points for each test point.
    n_jobs : int or None, default=None
        Worker threads over test points. Output does not depend on it.

    Attributes
    ----------
    train_ : Dataset
        The fitted training set; its order indexes matrix rows and columns.
    classes_ : ndarray
        Distinct training labels in first-appearance order.
    n_features_in_ : int
    """

    def __init__(self, n_neighbors: int = 5, metric: str = "euclidean", n_jobs=None):
        self.n_neighbors = n_neighbors
        self.metric = metric
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=False)
        KnnConfig(self.n_neighbors, self.metric).check_train_size(X.shape[0])
        if X.shape[0] < 2:
            raise ValueError("pair interactions need at least two training points")
        self.train_ = Dataset(X, y, "train")
        self.classes_ = np.array(list(intern_labels(list(y))[0]))
        self.n_features_in_ = X.shape[1]
        return self

    def _test_set(self, X, y) -> Dataset:
        check_is_fitted(self, "train_")
        X, y = check_X_y(X, y, dtype=np.float64, y_numeric=False)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, estimator was fitted with {self.n_features_in_}")
        return Dataset(X, y, "test")

    def interaction_matrix(self, X, y) -> InteractionMatrix:
        test = self._test_set(X, y)
        return sti_knn(self.train_, test, self.n_neighbors, self.metric, self.n_jobs)

    def interactions(self, X, y) -> np.ndarray:
        """Pair interactions (off-diagonal) and main terms (diagonal) against ``(X, y)``."""
        return self.interaction_matrix(X, y).values

    def main_terms(self, X, y) -> np.ndarray:
        test = self._test_set(X, y)
        return main_terms(self.train_, test, self.n_neighbors)

    def loo_values(self, X, y) -> np.ndarray:
        test = self._test_set(X, y)
        return loo_values(self.train_, test, self.n_neighbors, self.metric)

    def predict_proba(self, X) -> np.ndarray:
        """Share of the ``k`` nearest training points carrying each class (columns follow ``classes_``)."""
        check_is_fitted(self, "train_")
        X = check_array(X, dtype=np.float64)
        queries = Dataset(X, np.zeros(X.shape[0]), "test")
        orders = rank_all(self.train_, queries, self.metric)[:, : self.n_neighbors]
        _, ids = intern_labels(list(self.train_.labels))
        proba = np.zeros((X.shape[0], self.classes_.shape[0]))
        for c in range(self.classes_.shape[0]):
            proba[:, c] = (ids[orders] == c).sum(axis=1)
        return proba / self.n_neighbors

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def score(self, X, y) -> float:
        """Mean likelihood of the true label, i.e. the valuation of the full training set.

        Unlike ``ClassifierMixin.score`` this is not accuracy.
        """
        test = self._test_set(X, y)
        return grand_score(self.train_, test, self.n_neighbors, self.metric)


class BruteForceSTI(STIKNN):
    """Same interface as :class:`STIKNN`, computed by subset enumeration.

    Only feasible for small training sets; ``max_n`` (at most 22) guards the
    ``2**n`` cost.
    """

    def __init__(self, n_neighbors: int = 5, metric: str = "euclidean", n_jobs=None,
                 max_n: int = 15):
        super().__init__(n_neighbors=n_neighbors, metric=metric, n_jobs=n_jobs)
        self.max_n = max_n

    def interaction_matrix(self, X, y) -> InteractionMatrix:
        test = self._test_set(X, y)
        return sti_exact_matrix(self.train_, test, self.n_neighbors, self.metric, cap=self.max_n)
