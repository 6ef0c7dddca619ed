"""Exact pair-interaction Shapley values (Shapley-Taylor index) for KNN data valuation."""

from .analysis import (
    class_block_summary,
    display_order,
    efficiency_report,
    k_sweep,
    mislabel_scores,
    pearson,
)
from .core import Dataset, InteractionMatrix, KnnConfig, LabeledPoint, NeighborRanking, intern_labels
from .datagen import (
    fetch_openml,
    inject_label_noise,
    make_circles,
    make_moons,
    read_csv,
    subsample_class,
    train_test_split,
    write_csv,
)
from .estimator import STIKNN, BruteForceSTI
from .oracle import discrete_delta, sti_exact_matrix, sti_exact_pair, sti_exact_pair_restricted
from .sti import last_pair_term, main_terms, sti_knn, sti_knn_one_test, superdiag_step
from .valuation import loo_values, rank_neighbors, u_single, u_subset, v_score

__version__ = "0.1.0"

__all__ = [
    "BruteForceSTI", "Dataset", "InteractionMatrix", "KnnConfig", "LabeledPoint",
    "NeighborRanking", "STIKNN", "class_block_summary", "discrete_delta", "display_order",
    "efficiency_report", "fetch_openml", "inject_label_noise", "intern_labels", "k_sweep",
    "last_pair_term", "loo_values", "main_terms", "make_circles", "make_moons",
    "mislabel_scores", "pearson", "rank_neighbors", "read_csv", "sti_exact_matrix",
    "sti_exact_pair", "sti_exact_pair_restricted", "sti_knn", "sti_knn_one_test",
    "subsample_class", "superdiag_step", "train_test_split", "u_single", "u_subset",
    "v_score", "write_csv",
]
