"""Precomputed-kernel C-SVC with SMO, and the nested cross-validation
protocol used for the classification experiments.

The solver minimizes the standard C-SVC dual with first-order
maximal-violating-pair working-set selection and stops when the KKT
violation falls below the tolerance. Multiclass uses one-vs-one with
majority voting. Everything is deterministic given the seed: folds come
from per-(repetition, fold) RNG streams, and model selection breaks ties
toward the smaller gap size, then the smaller c.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import ConfigError, ConvergenceWarning, DegenerateFoldError

DEFAULT_TOL = 1e-3
DEFAULT_JITTER = 1e-8

DEFAULT_C_GRID = tuple(10.0**e for e in range(-9, 10, 2))


@dataclass(frozen=True)
class BinaryMachine:
    """One one-vs-one submachine: positive class first."""

    class_pos: int
    class_neg: int
    indices: np.ndarray
    coef: np.ndarray
    rho: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class SvmModel:
    classes: np.ndarray
    machines: tuple
    train_size: int

    @property
    def converged(self) -> bool:
        return all(m.converged for m in self.machines)


def svm_train(
    kernel: np.ndarray,
    labels,
    c: float,
    tol: float = DEFAULT_TOL,
    max_iter: Optional[int] = None,
    jitter: float = DEFAULT_JITTER,
) -> SvmModel:
    """Train one-vs-one C-SVC machines on a precomputed kernel matrix.

    `jitter` is added to the kernel diagonal of each subproblem to absorb
    slightly negative eigenvalues. Hitting the iteration cap raises a
    ConvergenceWarning (warning, not an error) and is recorded on the
    machine.
    """
    labels = np.asarray(labels, np.int64)
    n = labels.shape[0]
    if kernel.shape != (n, n):
        raise ConfigError(
            f"kernel shape {kernel.shape} does not match {n} labels"
        )
    if not c > 0:
        raise ConfigError(f"c must be positive, got {c}")
    classes = np.unique(labels)
    solver = backend.active().smo_solve
    machines = []
    for ai in range(classes.shape[0]):
        for bi in range(ai + 1, classes.shape[0]):
            ca, cb = int(classes[ai]), int(classes[bi])
            idx = np.flatnonzero((labels == ca) | (labels == cb))
            y = np.where(labels[idx] == ca, 1.0, -1.0)
            sub = kernel[np.ix_(idx, idx)]
            q = (y[:, None] * y[None, :]) * sub
            q[np.diag_indices_from(q)] += jitter
            cap = max_iter if max_iter is not None else max(10_000_000, 100 * idx.size)
            alpha, rho, iterations, converged = solver(
                np.ascontiguousarray(q), y, float(c), float(tol), cap
            )
            if not converged:
                warnings.warn(
                    f"SMO hit the iteration cap ({cap}) for classes "
                    f"{ca} vs {cb} at c={c:g}",
                    ConvergenceWarning,
                )
            machines.append(
                BinaryMachine(
                    class_pos=ca,
                    class_neg=cb,
                    indices=idx,
                    coef=alpha * y,
                    rho=float(rho),
                    iterations=int(iterations),
                    converged=bool(converged),
                )
            )
    return SvmModel(classes=classes, machines=tuple(machines), train_size=n)


def svm_predict(model: SvmModel, kernel_rows: np.ndarray) -> np.ndarray:
    """Predict labels for rows of kernel values against the training set.

    `kernel_rows[t, i]` is the kernel between test item t and training
    item i, in training order. Ties in the one-vs-one vote go to the
    smallest class label.
    """
    m = kernel_rows.shape[0]
    if kernel_rows.ndim != 2 or kernel_rows.shape[1] != model.train_size:
        raise ConfigError(
            f"kernel rows shape {kernel_rows.shape} does not match "
            f"training size {model.train_size}"
        )
    class_index = {int(cl): i for i, cl in enumerate(model.classes)}
    votes = np.zeros((m, model.classes.shape[0]), np.int64)
    for machine in model.machines:
        dec = kernel_rows[:, machine.indices] @ machine.coef - machine.rho
        pos = dec > 0
        votes[pos, class_index[machine.class_pos]] += 1
        votes[~pos, class_index[machine.class_neg]] += 1
    return model.classes[np.argmax(votes, axis=1)]


def stratified_folds(labels, folds: int, rng: np.random.Generator):
    """Shuffle each class, then deal round-robin; returns index arrays.

    The deal position carries over between classes, so fold sizes differ
    by at most one while each class stays spread as evenly as possible.
    """
    labels = np.asarray(labels)
    out = [[] for _ in range(folds)]
    cursor = 0
    for cl in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == cl))
        for member in members:
            out[cursor % folds].append(member)
            cursor += 1
    return [np.sort(np.asarray(f, np.int64)) for f in out]


@dataclass(frozen=True)
class CvProtocol:
    outer_folds: int = 10
    inner_folds: int = 10
    repetitions: int = 10
    c_grid: tuple = DEFAULT_C_GRID
    seed: int = 0

    def __post_init__(self):
        if not self.c_grid:
            raise ConfigError("c grid must be non-empty")
        if min(self.outer_folds, self.inner_folds) < 2:
            raise ConfigError("need at least 2 folds")
        if self.repetitions < 1:
            raise ConfigError("need at least 1 repetition")


@dataclass(frozen=True)
class CvResult:
    mean_accuracy: float
    std_accuracy: float
    rep_accuracies: tuple
    selections: tuple
    convergence_failures: int


def aggregate_accuracies(values):
    """(mean, population std) of per-repetition accuracies."""
    arr = np.asarray(values, np.float64)
    return float(arr.mean()), float(arr.std())


def _rng(*key):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def _check_trainable(labels, where):
    if np.unique(labels).size < 2:
        raise DegenerateFoldError(
            f"{where} training portion contains fewer than 2 classes; "
            f"use fewer folds or more data"
        )


def nested_cv(grams, labels, protocol: CvProtocol, threads: int = 1) -> CvResult:
    """Nested stratified cross-validation over precomputed kernels.

    `grams` maps a kernel parameter (the gap size for the hopper kernel)
    to its GramMatrix or raw matrix; the inner folds grid-search that
    parameter jointly with c, maximizing mean validation accuracy. The
    winner is refit on the full outer-train split and scored on the
    held-out fold. Repetition r of a run seeded with seed equals
    repetition 0 of a run seeded with seed+r, which lets the noise sweep
    reproduce classification runs exactly.
    """
    labels = np.asarray(labels, np.int64)
    if labels.shape[0] < protocol.outer_folds:
        raise ConfigError(
            f"{labels.shape[0]} items cannot fill {protocol.outer_folds} "
            f"outer folds"
        )
    params = sorted(grams)
    matrices = {}
    for p in params:
        values = getattr(grams[p], "values", grams[p])
        if values.shape != (labels.shape[0],) * 2:
            raise ConfigError(
                f"gram for parameter {p!r} has shape {values.shape}, "
                f"expected {(labels.shape[0],) * 2}"
            )
        matrices[p] = np.asarray(values, np.float64)

    tasks = [
        (rep, fold)
        for rep in range(protocol.repetitions)
        for fold in range(protocol.outer_folds)
    ]
    # fold layouts depend only on (seed + rep, fold), computed up front so
    # worker scheduling cannot influence them
    layouts = {}
    for rep in range(protocol.repetitions):
        rep_seed = protocol.seed + rep
        layouts[rep] = stratified_folds(
            labels, protocol.outer_folds, _rng(rep_seed, 0)
        )

    def run_fold(task):
        rep, fold = task
        rep_seed = protocol.seed + rep
        outer = layouts[rep]
        test_idx = outer[fold]
        train_idx = np.sort(
            np.concatenate([outer[f] for f in range(len(outer)) if f != fold])
        )
        _check_trainable(labels[train_idx], "outer")
        inner = stratified_folds(
            labels[train_idx], protocol.inner_folds, _rng(rep_seed, 1 + fold)
        )
        best = None  # (score, param, c); first best wins on ties,
        # and the grid iterates (param, c) in ascending order
        failures = 0
        for param in params:
            kernel = matrices[param]
            for c in protocol.c_grid:
                scores = []
                for v in range(len(inner)):
                    val_idx = train_idx[inner[v]]
                    if val_idx.size == 0:
                        continue
                    fit_idx = train_idx[
                        np.sort(
                            np.concatenate(
                                [inner[f] for f in range(len(inner)) if f != v]
                            )
                        )
                    ]
                    _check_trainable(labels[fit_idx], "inner")
                    model = svm_train(
                        kernel[np.ix_(fit_idx, fit_idx)], labels[fit_idx], c
                    )
                    failures += sum(
                        1 for mach in model.machines if not mach.converged
                    )
                    pred = svm_predict(
                        model, kernel[np.ix_(val_idx, fit_idx)]
                    )
                    scores.append(float(np.mean(pred == labels[val_idx])))
                score = float(np.mean(scores)) if scores else 0.0
                if best is None or score > best[0]:
                    best = (score, param, c)
        _, param, c = best
        kernel = matrices[param]
        model = svm_train(kernel[np.ix_(train_idx, train_idx)],
                          labels[train_idx], c)
        failures += sum(1 for mach in model.machines if not mach.converged)
        pred = svm_predict(model, kernel[np.ix_(test_idx, train_idx)])
        accuracy = float(np.mean(pred == labels[test_idx])) if test_idx.size else 0.0
        return accuracy, (rep, fold, param, c), failures

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_fold, tasks))
    else:
        results = [run_fold(task) for task in tasks]

    rep_accuracies = []
    selections = []
    failures = 0
    for rep in range(protocol.repetitions):
        accs = []
        for fold in range(protocol.outer_folds):
            accuracy, selection, fold_failures = results[
                rep * protocol.outer_folds + fold
            ]
            accs.append(accuracy)
            selections.append(selection)
            failures += fold_failures
        rep_accuracies.append(float(np.mean(accs)))
    mean, std = aggregate_accuracies(rep_accuracies)
    return CvResult(
        mean_accuracy=mean,
        std_accuracy=std,
        rep_accuracies=tuple(rep_accuracies),
        selections=tuple(selections),
        convergence_failures=failures,
    )
