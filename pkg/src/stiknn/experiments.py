"""Reusable experiment setups: the oracle-equivalence sweep and circle runs."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .core import Dataset
from .datagen import inject_label_noise, make_circles, subsample_class
from .oracle import sti_exact_matrix
from .sti import sti_knn


@dataclass(frozen=True)
class Instance:
    n: int
    k: int
    t: int
    n_classes: int
    trial: int
    train: Dataset
    test: Dataset

    def describe(self) -> str:
        return f"n={self.n} k={self.k} t={self.t} classes={self.n_classes} trial={self.trial}"


def random_instance(n: int, k: int, t: int, n_classes: int, trial: int, seed: int = 0) -> Instance:
    """Uniform 2-D positions and uniform labels, seeded by every coordinate of the cell."""
    rng = np.random.default_rng([seed, n, k, t, n_classes, trial])
    train = Dataset(rng.random((n, 2)), rng.integers(0, n_classes, n), "train")
    test = Dataset(rng.random((t, 2)), rng.integers(0, n_classes, t), "test")
    return Instance(n, k, t, n_classes, trial, train, test)


def sweep_instances(n_max: int = 10, trials: int = 50, seed: int = 0, t_values=(1, 3),
                    class_counts=(2, 3), n_min: int = 2) -> Iterator[Instance]:
    """Every ``n`` in ``[n_min, n_max]``, ``k`` in ``[1, n]``, ``t``, label arity and trial."""
    for n in range(n_min, n_max + 1):
        for k in range(1, n + 1):
            for t in t_values:
                for c in class_counts:
                    for trial in range(trials):
                        yield random_instance(n, k, t, c, trial, seed)


@dataclass
class SweepResult:
    instances: int = 0
    worst: float = 0.0
    worst_case: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def passed(self, tol: float) -> bool:
        return self.worst <= tol


def equivalence_sweep(n_max: int = 10, trials: int = 50, seed: int = 0, t_values=(1, 3),
                      tol: float = 1e-10, n_jobs: int | None = 1,
                      fast: Callable | None = None) -> SweepResult:
    """Largest elementwise gap between the recursion and the brute-force oracle.

    ``fast`` defaults to :func:`stiknn.sti.sti_knn`; it is injectable so the
    sweep itself can be tested against a deliberately broken implementation.
    """
    fast = fast or sti_knn
    res = SweepResult()
    started = time.perf_counter()
    for inst in sweep_instances(n_max, trials, seed, t_values):
        got = np.asarray(fast(inst.train, inst.test, inst.k, n_jobs=n_jobs).values)
        want = sti_exact_matrix(inst.train, inst.test, inst.k).values
        gap = float(np.abs(got - want).max())
        res.instances += 1
        if gap >= res.worst:
            res.worst, res.worst_case = gap, inst.describe()
        if gap > tol:
            res.failures.append(inst.describe())
    res.seconds = time.perf_counter() - started
    return res


@dataclass(frozen=True)
class CircleRun:
    train: Dataset
    test: Dataset
    flipped: tuple = ()


def circle_run(n_per_class: int = 300, t_per_class: int = 50, noise_std: float = 0.1,
               factor: float = 0.5, seed: int = 42, flip_fraction: float = 0.0,
               shrink_class=None, keep_fraction: float = 1.0) -> CircleRun:
    """Circle training set plus an independently drawn circle test set.

    The test set uses ``seed + 1``. Label flips (``flip_fraction``) and class
    shrinking (``shrink_class``/``keep_fraction``) touch only the training set.
    """
    train = make_circles(n_per_class, factor, noise_std, seed)
    drawn = make_circles(t_per_class, factor, noise_std, seed + 1)
    test = Dataset(drawn.X, drawn.labels, "test")
    if shrink_class is not None:
        train = subsample_class(train, shrink_class, keep_fraction, seed)
    flipped: list = []
    if flip_fraction > 0:
        train, flipped = inject_label_noise(train, flip_fraction, seed)
    return CircleRun(train, test, tuple(flipped))
