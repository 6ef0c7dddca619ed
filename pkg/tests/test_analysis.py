import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stiknn.analysis import (
    class_block_summary,
    display_order,
    efficiency_report,
    k_sweep,
    mislabel_scores,
    pearson,
    suspicious_set,
    within_cross_means,
)
from stiknn.core import Dataset
from stiknn.experiments import circle_run
from stiknn.sti import sti_knn


def test_efficiency_report_match_0101(match_0101):
    train, test = match_0101
    rep = efficiency_report(sti_knn(train, test, 2), train, test, 2)
    assert rep.v_of_N == 0.5
    assert rep.pair_sum == pytest.approx(0.5, abs=1e-15)
    assert rep.residual == pytest.approx(0.0, abs=1e-15)
    assert rep.mean == pytest.approx(rep.full_sum / 16)


def test_efficiency_report_zero_case():
    train = Dataset(np.arange(4.0).reshape(-1, 1), ["b"] * 4)
    test = Dataset(np.zeros((2, 1)), ["a", "a"])
    rep = efficiency_report(sti_knn(train, test, 2), train, test, 2)
    assert rep.residual == 0.0 and rep.v_of_N == 0.0


def test_efficiency_report_shape_mismatch(match_0101):
    train, test = match_0101
    with pytest.raises(ValueError, match="shape"):
        efficiency_report(np.zeros((3, 3)), train, test, 2)


def test_pearson_basic():
    M = np.arange(16.0).reshape(4, 4) ** 1.5
    assert pearson(M, M) == pytest.approx(1.0)
    assert pearson(M, -M) == pytest.approx(-1.0)
    assert pearson(M, M + 3.7) == pytest.approx(1.0)
    with pytest.raises(ValueError, match="undefined correlation"):
        pearson(M, np.ones((4, 4)))
    with pytest.raises(ValueError, match="shape"):
        pearson(M, np.ones((2, 2)))


@given(st.integers(0, 2**31 - 1), st.floats(0.01, 100), st.floats(-10, 10))
@settings(max_examples=50, deadline=None)
def test_pearson_symmetric_and_affine_invariant(seed, scale, shift):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(5, 5)), rng.normal(size=(5, 5))
    assert pearson(a, b) == pytest.approx(pearson(b, a), abs=1e-12)
    assert pearson(a * scale + shift, b) == pytest.approx(pearson(a, b), abs=1e-9)


def test_k_sweep_single_k():
    run = circle_run(n_per_class=20, t_per_class=5)
    res = k_sweep(run.train, run.test, [4])
    assert res.correlations.shape == (1, 1) and res.correlations[0, 0] == 1.0
    assert res.stds.shape == (1,)


def test_k_sweep_table_shape():
    run = circle_run(n_per_class=30, t_per_class=10)
    res = k_sweep(run.train, run.test, [3, 5, 8])
    C = res.correlations
    assert np.array_equal(C, C.T) and np.all(np.diag(C) == 1.0)
    assert res.std_strictly_decreasing()


def test_class_block_single_class():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(5, 5))
    (block,) = class_block_summary(M, ["x"] * 5)
    off = M[~np.eye(5, dtype=bool)]
    assert block.mean == pytest.approx(off.mean())
    assert block.mean_abs == pytest.approx(np.abs(off).mean())
    assert block.count == 20


def test_class_block_ordered_pairs():
    M = np.array([[9.0, 1.0, 2.0], [1.0, 9.0, 3.0], [2.0, 3.0, 9.0]])
    blocks = {(b.row_class, b.col_class): b for b in class_block_summary(M, ["a", "a", "b"])}
    assert blocks[("a", "a")].mean == 1.0
    assert blocks[("a", "b")].mean == 2.5 and blocks[("b", "a")].mean == 2.5
    assert blocks[("b", "b")].count == 0 and np.isnan(blocks[("b", "b")].mean)


@given(st.integers(0, 2**31 - 1), st.floats(1e-3, 1e3))
@settings(max_examples=40, deadline=None)
def test_mislabel_scores_invariant_to_positive_scale(seed, c):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(6, 6))
    labels = [0, 0, 0, 1, 1, 1]
    np.testing.assert_allclose(mislabel_scores(M * c, labels), mislabel_scores(M, labels), atol=1e-12)


def test_mislabel_scores_bounded_and_symmetric_case_uniform():
    s = mislabel_scores(np.ones((4, 4)), [0, 0, 1, 1])
    assert np.allclose(s, s[0])
    rng = np.random.default_rng(2)
    r = mislabel_scores(rng.normal(size=(10, 10)), rng.integers(0, 3, 10).tolist())
    finite = r[np.isfinite(r)]
    assert np.all(finite >= -2 - 1e-12) and np.all(finite <= 2 + 1e-12)


def test_mislabel_point_like_other_class_scores_negative():
    # class a rows load on columns 0-2, class b rows on 3-5; point 2 (labelled a) copies b.
    a = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
    M = np.vstack([a, a, b, b, b, b])
    scores = mislabel_scores(M, ["a", "a", "a", "b", "b", "b"])
    assert scores[2] == pytest.approx(-1.0)
    assert scores[0] > 0 and scores[1] > 0
    assert suspicious_set(scores, 1).tolist() == [2]


def test_mislabel_singleton_class_not_computable():
    rng = np.random.default_rng(1)
    scores = mislabel_scores(rng.normal(size=(4, 4)), ["a", "a", "a", "b"])
    assert np.isnan(scores[3]) and not np.any(np.isnan(scores[:3]))
    assert suspicious_set(scores, 1).tolist() == [3]
    with pytest.raises(ValueError):
        mislabel_scores(np.zeros((2, 2)), ["a", "a"])


def test_display_order():
    sorted_ds = Dataset(np.array([[0.0, 1.0], [1.0, 0.0], [0.0, 0.0], [2.0, 2.0]]), [0, 0, 1, 1])
    assert display_order(sorted_ds).tolist() == [0, 1, 2, 3]
    mixed = Dataset(np.array([[3.0], [2.0], [1.0], [0.0]]), ["p", "q", "p", "q"])
    assert display_order(mixed).tolist() == [2, 0, 3, 1]
    ties = Dataset(np.zeros((4, 2)), [0, 0, 0, 0])
    assert display_order(ties).tolist() == [0, 1, 2, 3]
    x2 = Dataset(np.array([[1.0, 5.0], [1.0, 2.0], [0.0, 9.0]]), [0, 0, 0])
    assert display_order(x2).tolist() == [2, 1, 0]


def test_display_order_idempotent():
    rng = np.random.default_rng(3)
    d = Dataset(rng.integers(0, 3, (30, 2)).astype(float), rng.integers(0, 2, 30))
    p = display_order(d)
    again = display_order(d.subset(p))
    assert np.array_equal(again, np.arange(30))
    assert np.array_equal(display_order(d), p)


def test_unbalanced_run_raises_in_class_interaction():
    balanced = circle_run(n_per_class=150, t_per_class=40, seed=7)
    shrunk = circle_run(n_per_class=150, t_per_class=40, seed=7, shrink_class=0, keep_fraction=0.3)

    def block0(run):
        M = sti_knn(run.train, run.test, 5)
        return next(b for b in class_block_summary(M, run.train.labels)
                    if b.row_class == 0 and b.col_class == 0).mean_abs

    assert block0(shrunk) > block0(balanced)


def test_within_cross_means():
    M = np.array([[0.0, -2.0, 0.1], [-2.0, 0.0, 0.2], [0.1, 0.2, 0.0]])
    within, cross = within_cross_means(M, [1, 1, 2])
    assert within == -2.0 and cross == pytest.approx(0.15)
