import math
import warnings

import numpy as np
import pytest

from graphkern import (
    ConfigError,
    ConvergenceWarning,
    CvProtocol,
    DegenerateFoldError,
    SvmModel,
    aggregate_accuracies,
    nested_cv,
    stratified_folds,
    svm_predict,
    svm_train,
)
from graphkern.svm import BinaryMachine, _rng


def blobs(n_per, centers, seed=0):
    """2D points around the given centers; returns (X, labels)."""
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(rng.normal(loc=center, scale=0.4, size=(n_per, 2)))
        ys.append(np.full(n_per, label))
    return np.vstack(xs), np.concatenate(ys)


def linear_kernel(x, x2=None):
    return x @ (x if x2 is None else x2).T


def dual_objective(kernel, labels_pm, coef_full):
    # 0.5 a'Qa - 1'a with Q = yy' * K and coef = a * y
    alpha = np.abs(coef_full)
    return 0.5 * coef_full @ kernel @ coef_full - alpha.sum()


def projected_gradient_dual(kernel, labels_pm, c, steps=30000, lr=None):
    """Slow independent QP solver used to cross-check the solver output.

    Projection onto {0 <= a <= c, y'a = 0} works by shifting along y until
    the clipped equality constraint balances (bisection; the constraint is
    monotone in the shift).
    """
    q = (labels_pm[:, None] * labels_pm[None, :]) * kernel
    if lr is None:
        lr = 1.0 / max(1.0, np.linalg.norm(q, 2))
    alpha = np.zeros(labels_pm.shape[0])

    def project(z):
        lo, hi = -c - z.max(), c + z.max()
        for _ in range(100):
            theta = 0.5 * (lo + hi)
            val = labels_pm @ np.clip(z - theta * labels_pm, 0.0, c)
            if val > 0:
                lo = theta
            else:
                hi = theta
        return np.clip(z - 0.5 * (lo + hi) * labels_pm, 0.0, c)

    for _ in range(steps):
        grad = q @ alpha - 1.0
        alpha = project(alpha - lr * grad)
    return alpha


def full_coef(model, machine, n):
    out = np.zeros(n)
    out[machine.indices] = machine.coef
    return out


def test_binary_training_separates_blobs():
    x, y = blobs(20, [(-2.0, 0.0), (2.0, 0.0)])
    kernel = linear_kernel(x)
    model = svm_train(kernel, y, c=1.0)
    assert model.converged
    assert model.classes.tolist() == [0, 1]
    assert len(model.machines) == 1
    pred = svm_predict(model, kernel)
    assert (pred == y).mean() == 1.0
    # unseen points on either side
    probe = np.array([[-3.0, 0.5], [3.0, -0.5]])
    pred = svm_predict(model, linear_kernel(probe, x))
    assert pred.tolist() == [0, 1]


def test_solver_matches_projected_gradient_objective():
    x, y = blobs(15, [(-1.0, -0.5), (1.2, 0.8)], seed=3)
    kernel = linear_kernel(x)
    y_pm = np.where(y == 0, -1.0, 1.0)
    for c in (0.1, 1.0, 10.0):
        model = svm_train(kernel, y, c=c)
        coef = full_coef(model, model.machines[0], y.shape[0])
        ours = dual_objective(kernel, y_pm, coef)
        ref_alpha = projected_gradient_dual(kernel, y_pm, c)
        ref = dual_objective(kernel, y_pm, ref_alpha * y_pm)
        assert ours <= ref + 1e-3 * abs(ref)
        assert math.isclose(ours, ref, rel_tol=1e-3)


def test_box_constraint_holds():
    x, y = blobs(12, [(-0.3, 0.0), (0.3, 0.0)], seed=5)  # heavy overlap
    for c in (0.01, 1.0):
        model = svm_train(linear_kernel(x), y, c=c)
        alpha = np.abs(model.machines[0].coef)
        assert alpha.max() <= c + 1e-12
        assert alpha.sum() > 0
        # the equality constraint y'a = 0 balances the two classes
        assert abs(model.machines[0].coef.sum()) <= 1e-9 * alpha.sum()


def test_multiclass_one_vs_one():
    x, y = blobs(12, [(-3.0, 0.0), (0.0, 3.0), (3.0, 0.0)], seed=1)
    kernel = linear_kernel(x)
    model = svm_train(kernel, y, c=10.0)
    assert model.classes.tolist() == [0, 1, 2]
    pairs = {(m.class_pos, m.class_neg) for m in model.machines}
    assert pairs == {(0, 1), (0, 2), (1, 2)}
    assert (svm_predict(model, kernel) == y).mean() >= 0.95


def test_vote_ties_go_to_smallest_label():
    # three stub machines, each winning one duel: a full three-way tie
    machines = (
        BinaryMachine(0, 1, np.array([0]), np.array([0.0]), -1.0, 1, True),
        BinaryMachine(1, 2, np.array([0]), np.array([0.0]), -1.0, 1, True),
        BinaryMachine(0, 2, np.array([0]), np.array([0.0]), 1.0, 1, True),
    )
    model = SvmModel(classes=np.array([0, 1, 2]), machines=machines,
                     train_size=1)
    assert svm_predict(model, np.zeros((2, 1))).tolist() == [0, 0]


def test_svm_train_validation():
    with pytest.raises(ConfigError):
        svm_train(np.ones((3, 2)), np.array([0, 1, 0]), c=1.0)
    with pytest.raises(ConfigError):
        svm_train(np.eye(2), np.array([0, 1]), c=0.0)
    with pytest.raises(ConfigError):
        svm_train(np.eye(3), np.array([0, 1]), c=1.0)


def test_single_class_predicts_that_class():
    model = svm_train(np.eye(3), np.array([7, 7, 7]), c=1.0)
    assert len(model.machines) == 0
    assert svm_predict(model, np.zeros((4, 3))).tolist() == [7] * 4


def test_orthogonal_two_point_problem():
    model = svm_train(np.eye(2), np.array([0, 1]), c=1.0)
    pred = svm_predict(model, np.eye(2))
    assert pred.tolist() == [0, 1]


def test_predict_validation():
    x, y = blobs(5, [(-2.0, 0.0), (2.0, 0.0)])
    model = svm_train(linear_kernel(x), y, c=1.0)
    with pytest.raises(ConfigError):
        svm_predict(model, np.zeros((2, 3)))


def test_convergence_warning_on_iteration_cap():
    x, y = blobs(25, [(-0.2, 0.0), (0.2, 0.0)], seed=7)
    with pytest.warns(ConvergenceWarning):
        model = svm_train(linear_kernel(x), y, c=100.0, max_iter=1)
    assert not model.converged


def test_stratified_folds_balance():
    labels = np.array([0] * 5 + [1] * 5)
    folds = stratified_folds(labels, 10, _rng(0))
    sizes = [f.size for f in folds]
    assert sizes == [1] * 10  # the deal cursor carries across classes
    labels = np.array([0] * 7 + [1] * 6 + [2] * 4)
    folds = stratified_folds(labels, 4, _rng(1))
    sizes = [f.size for f in folds]
    assert max(sizes) - min(sizes) <= 1
    joined = np.sort(np.concatenate(folds))
    assert joined.tolist() == list(range(17))
    for cl in (0, 1, 2):
        per = [int((labels[f] == cl).sum()) for f in folds]
        assert max(per) - min(per) <= 1


def test_protocol_validation():
    with pytest.raises(ConfigError):
        CvProtocol(outer_folds=1)
    with pytest.raises(ConfigError):
        CvProtocol(repetitions=0)
    with pytest.raises(ConfigError):
        CvProtocol(c_grid=())


def cv_setup(n_per=10, seed=2):
    x, y = blobs(n_per, [(-2.0, 0.0), (2.0, 0.0)], seed=seed)
    return {0: linear_kernel(x)}, y


def test_nested_cv_separable_data():
    grams, y = cv_setup()
    protocol = CvProtocol(outer_folds=5, inner_folds=3, repetitions=2,
                          c_grid=(0.1, 10.0), seed=0)
    result = nested_cv(grams, y, protocol)
    assert result.mean_accuracy == 1.0
    assert result.std_accuracy == 0.0
    assert len(result.rep_accuracies) == 2
    assert len(result.selections) == 2 * 5
    for rep, fold, param, c in result.selections:
        assert param == 0 and c in (0.1, 10.0)
    assert result.convergence_failures == 0


def test_nested_cv_rep_seed_equivalence():
    grams, y = cv_setup(n_per=8, seed=4)
    base = CvProtocol(outer_folds=4, inner_folds=3, repetitions=3,
                      c_grid=(1.0,), seed=11)
    multi = nested_cv(grams, y, base)
    for rep in range(3):
        single = nested_cv(
            grams, y,
            CvProtocol(outer_folds=4, inner_folds=3, repetitions=1,
                       c_grid=(1.0,), seed=11 + rep),
        )
        assert single.rep_accuracies[0] == multi.rep_accuracies[rep]


def test_nested_cv_thread_count_is_invisible():
    grams, y = cv_setup(n_per=8, seed=6)
    protocol = CvProtocol(outer_folds=4, inner_folds=3, repetitions=2,
                          c_grid=(0.1, 1.0), seed=3)
    a = nested_cv(grams, y, protocol, threads=1)
    b = nested_cv(grams, y, protocol, threads=4)
    assert a.rep_accuracies == b.rep_accuracies
    assert a.selections == b.selections


def test_nested_cv_tie_prefers_smaller_param():
    grams, y = cv_setup(n_per=8, seed=8)
    # identical matrices under two parameter keys: scores tie everywhere
    grams = {0: grams[0], 1: grams[0]}
    protocol = CvProtocol(outer_folds=4, inner_folds=3, repetitions=1,
                          c_grid=(1.0,), seed=0)
    result = nested_cv(grams, y, protocol)
    assert all(sel[2] == 0 for sel in result.selections)


def test_nested_cv_errors():
    grams, y = cv_setup(n_per=3)
    with pytest.raises(ConfigError):
        nested_cv(grams, y, CvProtocol(outer_folds=10, inner_folds=2))
    with pytest.raises(ConfigError):
        nested_cv({0: np.eye(4)}, y, CvProtocol(outer_folds=2, inner_folds=2))
    lopsided = np.array([0] * 9 + [1])
    with pytest.raises(DegenerateFoldError):
        nested_cv({0: np.eye(10)}, lopsided,
                  CvProtocol(outer_folds=2, inner_folds=2, repetitions=1))


def test_nested_cv_random_labels_score_chance():
    rng = np.random.default_rng(12)
    x = rng.normal(size=(40, 2))
    labels = np.array([0, 1] * 20)
    protocol = CvProtocol(outer_folds=5, inner_folds=3, repetitions=4,
                          c_grid=(1.0,), seed=1)
    result = nested_cv({0: linear_kernel(x)}, labels, protocol)
    assert 0.3 <= result.mean_accuracy <= 0.7


def test_aggregate_accuracies_population_std():
    mean, std = aggregate_accuracies([0.5, 1.0])
    assert mean == 0.75
    assert std == 0.25  # population (not sample) standard deviation
    mean, std = aggregate_accuracies([0.7])
    assert (mean, std) == (0.7, 0.0)
