"""Runtime scaling of :func:`stiknn.sti.sti_knn` in ``n`` and ``t``."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .datagen import make_circles
from .sti import sti_knn

N_VALUES = (250, 500, 1000, 2000)
T_VALUES = (50, 100, 200, 400)


@dataclass(frozen=True)
class Timing:
    axis: str
    n: int
    t: int
    seconds: float


@dataclass(frozen=True)
class BenchResult:
    timings: list
    slope_n: float
    slope_t: float


def _circles(n: int, seed: int, role: str) -> Dataset:
    d = make_circles((n + 1) // 2, 0.5, 0.1, seed)
    return Dataset(d.X[:n], d.labels[:n], role)


def time_once(n: int, t: int, k: int = 5, repeats: int = 3, seed: int = 0,
              n_jobs: int | None = 1) -> float:
    """Best-of-``repeats`` wall time of one ``sti_knn`` call."""
    train = _circles(n, seed, "train")
    test = _circles(t, seed + 1, "test")
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        sti_knn(train, test, k, n_jobs=n_jobs)
        best = min(best, time.perf_counter() - started)
    return best


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def run_benchmark(n_values=N_VALUES, t_values=T_VALUES, fixed_t: int = 50, fixed_n: int = 500,
                  k: int = 5, repeats: int = 3, seed: int = 0, n_jobs: int | None = 1) -> BenchResult:
    timings = [Timing("n", n, fixed_t, time_once(n, fixed_t, k, repeats, seed, n_jobs))
               for n in n_values]
    timings += [Timing("t", fixed_n, t, time_once(fixed_n, t, k, repeats, seed, n_jobs))
                for t in t_values]
    slope_n = loglog_slope([r.n for r in timings if r.axis == "n"],
                           [r.seconds for r in timings if r.axis == "n"])
    slope_t = loglog_slope([r.t for r in timings if r.axis == "t"],
                           [r.seconds for r in timings if r.axis == "t"])
    return BenchResult(timings, slope_n, slope_t)
