"""Gram-matrix assembly, normalization, PSD checking, and CSV round-trip."""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ComputeError, ConfigError, DataFormatError, ZeroDiagonalError
from .graphs import Dataset
from .hopper import (
    NodeKernelSpec,
    hop_count_matrices,
    hop_count_matrices_gapfree,
    node_kernel_matrix,
    pair_kernel,
)
from .wl import DEFAULT_WL_ITERATIONS, wl_kernel, wl_relabel


@dataclass(frozen=True)
class GhConfig:
    """Gappy GraphHopper kernel configuration.

    `gapfree=True` selects the implementation path that never touches the
    gap-extension code; it requires s == 0.
    """

    s: int
    node_kernel: NodeKernelSpec
    gapfree: bool = False

    def __post_init__(self):
        if self.s < 0:
            raise ConfigError(f"gap size must be non-negative, got {self.s}")
        if self.gapfree and self.s != 0:
            raise ConfigError("the gap-free path only computes s=0")

    def describe(self) -> dict:
        return {
            "kernel": "gh",
            "s": self.s,
            "gapfree": self.gapfree,
            "node_kernel": self.node_kernel.describe(),
        }


@dataclass(frozen=True)
class WlConfig:
    h: int = DEFAULT_WL_ITERATIONS

    def __post_init__(self):
        if self.h < 1:
            raise ConfigError(f"iteration count must be positive, got {self.h}")

    def describe(self) -> dict:
        return {"kernel": "wl", "h": self.h}


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric kernel matrix over a dataset, with provenance."""

    values: np.ndarray
    normalized: bool = False
    provenance: Optional[dict] = None

    @property
    def size(self) -> int:
        return self.values.shape[0]


def _readonly(a):
    a.setflags(write=False)
    return a


def _map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def gram(dataset: Dataset, config, threads: int = 1) -> GramMatrix:
    """Pairwise kernel matrix: upper triangle computed, then mirrored.

    Per-graph features (hop-count matrices or WL histograms) are computed
    once per graph. Each matrix cell is written by exactly one task, so the
    result is identical for any thread count.
    """
    n = len(dataset)
    values = np.zeros((n, n))
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    if isinstance(config, GhConfig):
        spec = config.node_kernel
        if config.gapfree:
            feats = _map(
                lambda g: hop_count_matrices_gapfree(g), dataset.graphs, threads
            )
        else:
            feats = _map(
                lambda g: hop_count_matrices(g, config.s), dataset.graphs, threads
            )

        def cell(pair):
            i, j = pair
            kn = node_kernel_matrix(spec, dataset.graphs[i], dataset.graphs[j])
            return pair_kernel(feats[i], feats[j], kn)

    elif isinstance(config, WlConfig):
        feats = wl_relabel(dataset, config.h)

        def cell(pair):
            i, j = pair
            return wl_kernel(feats[i], feats[j])

    else:
        raise ConfigError(f"unknown kernel config {type(config).__name__}")

    for (i, j), value in zip(pairs, _map(cell, pairs, threads)):
        values[i, j] = value
        values[j, i] = value

    provenance = config.describe()
    provenance["dataset"] = {
        "name": dataset.meta.name,
        "graphs": n,
        "noise_x": dataset.meta.noise_x,
        "seed": dataset.meta.seed,
    }
    return GramMatrix(values=_readonly(values), normalized=False,
                      provenance=provenance)


def normalize(gm: GramMatrix) -> GramMatrix:
    """Cosine normalization k(a,b)/sqrt(k(a,a) k(b,b)); idempotent."""
    if gm.normalized:
        return gm
    diag = np.diag(gm.values).copy()
    if gm.size and diag.min() <= 0:
        bad = int(np.argmin(diag))
        raise ZeroDiagonalError(
            f"graph {bad} has self-similarity {diag[bad]}; cannot normalize "
            f"(empty feature representation)"
        )
    scale = 1.0 / np.sqrt(diag)
    values = gm.values * scale[:, None] * scale[None, :]
    return GramMatrix(values=_readonly(values), normalized=True,
                      provenance=gm.provenance)


def check_psd(gm: GramMatrix) -> float:
    """Smallest eigenvalue by a full symmetric eigensolve.

    Valid kernels satisfy min eigenvalue >= -1e-8 * max|entry| up to
    numerical error; callers assert against that bound. Raises if the
    matrix is not symmetric to within 1e-12 (relative to the largest
    entry magnitude).
    """
    a = gm.values
    if a.size == 0:
        return 0.0
    scale = max(1.0, float(np.abs(a).max()))
    asym = float(np.abs(a - a.T).max())
    if asym > 1e-12 * scale:
        raise ComputeError(
            f"gram matrix asymmetric: max |K - K.T| = {asym:.3e}"
        )
    return float(np.linalg.eigvalsh((a + a.T) / 2.0)[0])


def sidecar_path(csv_path) -> str:
    return str(csv_path) + ".json"


def save_gram(gm: GramMatrix, csv_path) -> None:
    """Headerless N x N CSV plus a JSON sidecar at `<csv_path>.json`.

    Floats are written with repr (shortest round-trip form), so equal
    matrices always produce byte-identical files.
    """
    with open(csv_path, "w", encoding="utf-8") as fh:
        for row in gm.values:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
    meta = {
        "size": gm.size,
        "normalized": gm.normalized,
        "provenance": gm.provenance,
    }
    with open(sidecar_path(csv_path), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_gram(csv_path) -> GramMatrix:
    rows = []
    with open(csv_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            try:
                rows.append([float(p) for p in text.split(",")])
            except ValueError:
                raise DataFormatError(
                    "malformed-line: non-numeric gram entry",
                    path=str(csv_path),
                    line=lineno,
                ) from None
            if len(rows[-1]) != len(rows[0]):
                raise DataFormatError(
                    f"malformed-line: row of {len(rows[-1])} entries in a "
                    f"{len(rows[0])}-wide matrix",
                    path=str(csv_path),
                    line=lineno,
                )
    values = np.asarray(rows, np.float64) if rows else np.zeros((0, 0))
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise DataFormatError(
            f"gram matrix must be square, got shape {values.shape}",
            path=str(csv_path),
        )
    normalized = False
    provenance = None
    side = sidecar_path(csv_path)
    if os.path.isfile(side):
        with open(side, "r", encoding="utf-8") as fh:
            meta = json.load(fh)
        normalized = bool(meta.get("normalized", False))
        provenance = meta.get("provenance")
    return GramMatrix(values=_readonly(values), normalized=normalized,
                      provenance=provenance)
