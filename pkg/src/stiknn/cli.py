"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or precondition
error, 3 I/O or network error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time

import numpy as np

from . import analysis, bench, datagen, experiments, export
from .core import Dataset
from .oracle import MAX_N, sti_exact_matrix
from .sti import sti_knn
from .valuation import loo_values

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("stiknn")


class CommandError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _load(path: str, role: str) -> Dataset:
    return datagen.read_csv(path, role)


def _emit_matrix(M, dataset: Dataset, args) -> None:
    values = np.asarray(M)
    if getattr(args, "order", "original") == "display":
        perm = analysis.display_order(dataset)
        values = values[np.ix_(perm, perm)]
    export.write_matrix_csv(values, args.out)
    if getattr(args, "heatmap", None):
        export.write_ppm(values, args.heatmap)


def _print_efficiency(M, train, test, k, metric, seconds) -> None:
    rep = analysis.efficiency_report(M, train, test, k, metric)
    print(f"pair_sum  {rep.pair_sum:.17g}")
    print(f"v(N)      {rep.v_of_N:.17g}")
    print(f"residual  {rep.residual:.3e}")
    print(f"mean      {rep.mean:.3e}")
    print(f"runtime   {seconds:.3f}s")


def cmd_compute(args) -> int:
    train, test = _load(args.train, "train"), _load(args.test, "test")
    started = time.perf_counter()
    M = sti_knn(train, test, args.k, args.metric, args.threads)
    seconds = time.perf_counter() - started
    _emit_matrix(M.values, train, args)
    _print_efficiency(M, train, test, args.k, args.metric, seconds)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if not 1 <= args.cap <= MAX_N:
        raise CommandError(f"--cap must lie in [1, {MAX_N}]")
    train, test = _load(args.train, "train"), _load(args.test, "test")
    if train.n > args.cap:
        raise CommandError(f"training size {train.n} exceeds the enumeration cap {args.cap}")
    started = time.perf_counter()
    M = sti_exact_matrix(train, test, args.k, args.metric, cap=args.cap)
    seconds = time.perf_counter() - started
    _emit_matrix(M.values, train, args)
    _print_efficiency(M, train, test, args.k, args.metric, seconds)
    return EXIT_OK


def cmd_verify(args) -> int:
    res = experiments.equivalence_sweep(args.n_max, args.trials, args.seed, tol=args.tol,
                                        n_jobs=args.threads, fast=sti_knn)
    status = "PASS" if res.passed(args.tol) else "FAIL"
    print(f"{status}: {res.instances} instances, max |fast - oracle| = {res.worst:.3e} "
          f"(tol {args.tol:g}) at {res.worst_case}; {res.seconds:.1f}s")
    return EXIT_OK if res.passed(args.tol) else EXIT_VERIFY


def _k_values(args) -> list[int]:
    if args.k:
        return args.k
    if args.k_min > args.k_max:
        raise CommandError("--k-min exceeds --k-max")
    return list(range(args.k_min, args.k_max + 1))


def cmd_ksweep(args) -> int:
    train, test = _load(args.train, "train"), _load(args.test, "test")
    ks = _k_values(args)
    res = analysis.k_sweep(train, test, ks, args.metric, args.threads)
    rows = [["k_a", "k_b", "pearson"]]
    for a, ka in enumerate(ks):
        for b, kb in enumerate(ks):
            rows.append([ka, kb, f"{res.correlations[a, b]:.17g}"])
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(rows)
    if args.std_out:
        with open(args.std_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "std"])
            w.writerows([[k, f"{s:.17g}"] for k, s in zip(ks, res.stds)])
    print(f"k values          {ks[0]}..{ks[-1]} ({len(ks)})")
    print(f"min pearson       {res.min_correlation():.6f}")
    print(f"std decreasing    {res.std_strictly_decreasing()}")
    for k, s in zip(ks, res.stds):
        print(f"  k={k:<3d} std={s:.6e}")
    return EXIT_OK


def cmd_loo(args) -> int:
    train, test = _load(args.train, "train"), _load(args.test, "test")
    values = loo_values(train, test, args.k, args.metric)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "loo"])
        w.writerows([[i, f"{v:.17g}"] for i, v in enumerate(values)])
    print(f"wrote {len(values)} LOO values to {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    train, test = _load(args.train, "train"), _load(args.test, "test")
    M = sti_knn(train, test, args.k, args.metric, args.threads)
    _print_efficiency(M, train, test, args.k, args.metric, M.meta["seconds"])
    print("class blocks (row, col, mean, mean|.|, cells)")
    for b in analysis.class_block_summary(M, train.labels):
        print(f"  {b.row_class!s:>6} {b.col_class!s:>6} {b.mean: .6e} {b.mean_abs:.6e} {b.count}")
    if len(train.classes()) >= 2:
        scores = analysis.mislabel_scores(M, train.labels)
        bucket = analysis.suspicious_set(scores, max(1, -(-train.n // 10)))
        print(f"most suspicious decile ({len(bucket)} points): {' '.join(map(str, sorted(bucket)))}")
        if args.scores_out:
            with open(args.scores_out, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["index", "label", "score"])
                w.writerows([[i, train.labels[i], f"{s:.17g}"] for i, s in enumerate(scores)])
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "circles":
        data = datagen.make_circles(args.n, args.factor, args.noise, args.seed)
    else:
        data = datagen.make_moons(args.n, args.noise, args.seed)
    if args.shrink_class is not None:
        data = datagen.subsample_class(data, args.shrink_class, args.keep_fraction, args.seed)
    if args.flip_fraction:
        data, flipped = datagen.inject_label_noise(data, args.flip_fraction, args.seed)
        if args.flips_out:
            with open(args.flips_out, "w") as fh:
                fh.write("".join(f"{i}\n" for i in flipped))
    if args.test_out:
        train, test = datagen.train_test_split(data, args.test_fraction, args.seed)
        datagen.write_csv(train, args.out)
        datagen.write_csv(test, args.test_out)
        print(f"wrote {train.n} train points to {args.out} and {test.n} test points to {args.test_out}")
    else:
        datagen.write_csv(data, args.out)
        print(f"wrote {data.n} points to {args.out}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    data = datagen.fetch_openml(args.id, args.cache_dir)
    if args.out:
        datagen.write_csv(data, args.out)
    print(f"dataset {args.id}: {data.n} points, {data.dim} features, classes {data.classes()}")
    return EXIT_OK


def cmd_bench(args) -> int:
    res = bench.run_benchmark(args.n_values, args.t_values, args.fixed_t, args.fixed_n,
                              args.k, args.repeats, args.seed, args.threads)
    rows = [["axis", "n", "t", "seconds"]]
    rows += [[r.axis, r.n, r.t, f"{r.seconds:.6f}"] for r in res.timings]
    rows += [["slope_n", "", "", f"{res.slope_n:.4f}"], ["slope_t", "", "", f"{res.slope_t:.4f}"]]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        csv.writer(out, lineterminator="\n").writerows(rows)
    finally:
        if args.out:
            out.close()
    print(f"log-log slope vs n: {res.slope_n:.3f}   vs t: {res.slope_t:.3f}", file=sys.stderr)
    if args.check:
        ok = abs(res.slope_n - 2) <= 0.3 and abs(res.slope_t - 1) <= 0.3
        return EXIT_OK if ok else EXIT_VERIFY
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stiknn", description="Exact KNN Shapley-Taylor pair interactions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def pair_io(sp, k_required=True):
        sp.add_argument("--train", required=True, help="training set CSV (x1,...,xd,label)")
        sp.add_argument("--test", required=True, help="test set CSV")
        if k_required:
            sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--metric", default="euclidean", choices=["euclidean", "manhattan", "chebyshev"])

    def threads(sp):
        sp.add_argument("--threads", type=int, default=1, help="worker threads (results do not depend on it)")

    sp = sub.add_parser("compute", help="interaction matrix via the O(t n^2) recursion")
    pair_io(sp)
    threads(sp)
    sp.add_argument("--out", required=True, help="matrix CSV output")
    sp.add_argument("--heatmap", help="optional binary PPM heatmap output")
    sp.add_argument("--order", choices=["original", "display"], default="original")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("oracle", help="interaction matrix by brute-force enumeration")
    pair_io(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--cap", type=int, default=15, help=f"largest n to enumerate (<= {MAX_N})")
    sp.add_argument("--heatmap")
    sp.add_argument("--order", choices=["original", "display"], default="original")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("verify", help="recursion vs oracle on random small instances")
    sp.add_argument("--n-max", type=int, default=10)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-10)
    threads(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("ksweep", help="correlation and std of matrices across k")
    pair_io(sp, k_required=False)
    threads(sp)
    sp.add_argument("--k", type=int, nargs="+", help="explicit k values (overrides range)")
    sp.add_argument("--k-min", type=int, default=3)
    sp.add_argument("--k-max", type=int, default=20)
    sp.add_argument("--out", help="CSV of pairwise Pearson correlations")
    sp.add_argument("--std-out", help="CSV of matrix std per k")
    sp.set_defaults(func=cmd_ksweep)

    sp = sub.add_parser("loo", help="leave-one-out values")
    pair_io(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_loo)

    sp = sub.add_parser("analyze", help="efficiency, class blocks and mislabel scores")
    pair_io(sp)
    threads(sp)
    sp.add_argument("--scores-out", help="CSV of per-point mislabel scores")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    sp.add_argument("--kind", choices=["circles", "moons"], required=True)
    sp.add_argument("--n", type=int, required=True, help="points per class")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--noise", type=float, default=0.1)
    sp.add_argument("--factor", type=float, default=0.5, help="inner radius (circles)")
    sp.add_argument("--flip-fraction", type=float, default=0.0)
    sp.add_argument("--flips-out", help="write flipped indices, one per line")
    sp.add_argument("--shrink-class", type=int)
    sp.add_argument("--keep-fraction", type=float, default=1.0)
    sp.add_argument("--test-out", help="also split 80/20 and write the test part here")
    sp.add_argument("--test-fraction", type=float, default=0.2)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("fetch", help="download an OpenML dataset into the cache")
    sp.add_argument("--id", type=int, required=True)
    sp.add_argument("--cache-dir", help="defaults to $STI_CACHE_DIR or ~/.cache/stiknn")
    sp.add_argument("--out", help="also copy the dataset CSV here")
    sp.set_defaults(func=cmd_fetch)

    sp = sub.add_parser("bench", help="runtime scaling in n and t")
    sp.add_argument("--n-values", type=int, nargs="+", default=list(bench.N_VALUES))
    sp.add_argument("--t-values", type=int, nargs="+", default=list(bench.T_VALUES))
    sp.add_argument("--fixed-t", type=int, default=50)
    sp.add_argument("--fixed-n", type=int, default=500)
    sp.add_argument("--k", type=int, default=5)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="timings CSV (stdout when omitted)")
    sp.add_argument("--check", action="store_true", help="exit 1 unless slopes are 2±0.3 (n) and 1±0.3 (t)")
    threads(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except datagen.OpenMLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # includes DatasetFormatError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
