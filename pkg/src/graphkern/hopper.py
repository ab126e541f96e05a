"""Node kernels and the gappy GraphHopper graph kernel.

The graph kernel sums a path kernel over all pairs of (gappy) shortest
paths of the two graphs; the path kernel sums node kernels over aligned
positions and is zero for paths of unequal discrete length. Evaluating
that double sum directly is exponential, so the production path aggregates
per-node hop-count matrices: M_v[i, k] counts, over all roots, the pairs
(prefix path ending at v with i+1 nodes, suffix path starting at v with
k+1 nodes), and the kernel is sum_{v,v'} <M_v, M'_{v'}> * k_node(v, v').
`kernel_bruteforce` keeps the literal double sum as an oracle.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import backend
from .errors import ConfigError, CountOverflowError, KernelInputError, SizeGuardError
from .graphs import Graph
from .spdag import (
    DEFAULT_MAX_PATHS,
    MAX_EXACT_COUNT,
    build_spdag,
    enumerate_paths,
    extend_gappy,
    raw_count_vectors,
)

VALID_NODE_KERNELS = ("dirac", "gaussian", "product")


@dataclass(frozen=True)
class NodeKernelSpec:
    """Selects the node kernel: label match, attribute Gaussian, or both.

    `bandwidth` is the Gaussian decay rate; when omitted it defaults to
    1/d for attribute dimension d at the point of use.
    """

    kind: str
    bandwidth: Optional[float] = None

    def __post_init__(self):
        if self.kind not in VALID_NODE_KERNELS:
            raise ConfigError(
                f"unknown node kernel {self.kind!r}: "
                f"expected one of {', '.join(VALID_NODE_KERNELS)}"
            )
        if self.bandwidth is not None:
            if self.kind == "dirac":
                raise ConfigError("bandwidth applies to gaussian/product only")
            if not self.bandwidth > 0:
                raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")

    def describe(self) -> dict:
        return {"kind": self.kind, "bandwidth": self.bandwidth}


def _require_labels(spec, g, g2):
    if g.labels is None or g2.labels is None:
        raise KernelInputError(
            f"missing-label: node kernel {spec.kind!r} needs discrete labels "
            f"on both graphs"
        )


def _require_attributes(spec, g, g2):
    if g.attributes is None or g2.attributes is None:
        raise KernelInputError(
            f"missing-attribute: node kernel {spec.kind!r} needs attribute "
            f"vectors on both graphs"
        )
    if g.attributes.shape[1] != g2.attributes.shape[1]:
        raise KernelInputError(
            f"attribute-dim-mismatch: {g.attributes.shape[1]} vs "
            f"{g2.attributes.shape[1]}"
        )


def _bandwidth(spec, dim):
    return spec.bandwidth if spec.bandwidth is not None else 1.0 / dim


def node_kernel_matrix(spec: NodeKernelSpec, g: Graph, g2: Graph) -> np.ndarray:
    """All-pairs node kernel values as an (n, n2) float64 matrix."""
    if spec.kind in ("dirac", "product"):
        _require_labels(spec, g, g2)
        dirac = (g.labels[:, None] == g2.labels[None, :]).astype(np.float64)
        if spec.kind == "dirac":
            return dirac
    if spec.kind in ("gaussian", "product"):
        _require_attributes(spec, g, g2)
        diff = g.attributes[:, None, :] - g2.attributes[None, :, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        gauss = np.exp(-_bandwidth(spec, g.attributes.shape[1]) * sq)
        if spec.kind == "gaussian":
            return gauss
    return dirac * gauss


def node_kernel(spec: NodeKernelSpec, g: Graph, v: int, g2: Graph, v2: int) -> float:
    """Node kernel between node v of g and node v2 of g2."""
    value = 1.0
    if spec.kind in ("dirac", "product"):
        _require_labels(spec, g, g2)
        value *= 1.0 if g.labels[v] == g2.labels[v2] else 0.0
    if spec.kind in ("gaussian", "product"):
        _require_attributes(spec, g, g2)
        d = g.attributes[v] - g2.attributes[v2]
        value *= np.exp(-_bandwidth(spec, g.attributes.shape[1]) * float(d @ d))
    return float(value)


@dataclass(frozen=True, eq=False)
class HopCountMatrices:
    """Per-node hop-count matrices of one graph at a fixed gap size.

    mats[v, i, k] counts pairs of (root-to-v path with i+1 nodes, path from
    v with k+1 nodes), accumulated over every rooted DAG. mats[v, i, k] is
    zero whenever i + k + 1 exceeds `delta`, the graph's maximal discrete
    path length, because the two counted paths concatenate to a DAG path
    with i + k + 1 nodes.
    """

    mats: np.ndarray
    delta: int

    @property
    def node_count(self) -> int:
        return self.mats.shape[0]

    def flat_padded(self, delta: int) -> np.ndarray:
        """Rows flattened to width delta**2, zero-padded past own delta."""
        n, d = self.mats.shape[0], self.delta
        if delta < d:
            raise ConfigError(f"cannot pad delta {d} down to {delta}")
        out = np.zeros((n, delta, delta))
        out[:, :d, :d] = self.mats
        return out.reshape(n, delta * delta)


def _rooted_dags(g, s, threads, gapfree):
    def build(root):
        dag = build_spdag(g, root)
        if not gapfree:
            dag = extend_gappy(dag, s)
        return dag

    roots = range(g.node_count)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(build, roots))
    return [build(root) for root in roots]


def _accumulate(g, dags, threads):
    n = g.node_count
    delta = max(dag.max_len for dag in dags)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(
                pool.map(lambda dag: raw_count_vectors(dag, delta), dags)
            )
    else:
        counts = [raw_count_vectors(dag, delta) for dag in dags]
    acc = np.zeros((n, delta, delta))
    add = backend.active().add_outer_products
    # merge in root order: per-slot accumulation stays exact (all terms are
    # non-negative integers) and independent of the thread count above
    for dag, (prefix, suffix) in zip(dags, counts):
        add(acc, prefix, suffix, dag.topo, delta)
    if acc.max() > MAX_EXACT_COUNT:
        raise CountOverflowError(
            f"hop-count matrix entry {acc.max():.3g} exceeds the "
            f"exactly-representable limit 2**53; reduce the gap size"
        )
    mats = acc.astype(np.int64)
    mats.setflags(write=False)
    return HopCountMatrices(mats=mats, delta=delta)


def hop_count_matrices(g: Graph, s: int, threads: int = 1) -> HopCountMatrices:
    """Aggregate prefix/suffix path-count outer products over all roots."""
    if g.node_count == 0:
        return HopCountMatrices(mats=np.zeros((0, 0, 0), np.int64), delta=0)
    return _accumulate(g, _rooted_dags(g, s, threads, gapfree=False), threads)


def hop_count_matrices_gapfree(g: Graph, threads: int = 1) -> HopCountMatrices:
    """Gap-free variant; this code path never touches the gap extension."""
    if g.node_count == 0:
        return HopCountMatrices(mats=np.zeros((0, 0, 0), np.int64), delta=0)
    return _accumulate(g, _rooted_dags(g, 0, threads, gapfree=True), threads)


def pair_kernel(h: HopCountMatrices, h2: HopCountMatrices, kn: np.ndarray) -> float:
    """Kernel value from precomputed hop-count matrices and node kernels.

    Padding both sides to the common delta is equivalent to truncating the
    inner products at min(delta, delta2): entries beyond a graph's own
    delta are structurally zero (see HopCountMatrices).
    """
    if h.node_count == 0 or h2.node_count == 0:
        return 0.0
    delta = max(h.delta, h2.delta)
    a = h.flat_padded(delta)
    a2 = h2.flat_padded(delta)
    # keep every inner-product term and partial sum at or below 2**53 so the
    # BLAS matmul is exact and independent of its internal summation order
    bound = np.sqrt(np.einsum("ij,ij->i", a, a).max()) * np.sqrt(
        np.einsum("ij,ij->i", a2, a2).max()
    )
    if bound > MAX_EXACT_COUNT:
        raise CountOverflowError(
            f"hop-count inner products may reach {bound:.3g}, beyond the "
            f"exactly-representable limit 2**53; reduce the gap size"
        )
    weights = a @ a2.T
    return float((weights * kn).sum())


def graphhopper_kernel(
    g: Graph, g2: Graph, s: int, spec: NodeKernelSpec, threads: int = 1
) -> float:
    """Gappy GraphHopper kernel between two graphs."""
    if g.node_count == 0 or g2.node_count == 0:
        return 0.0
    kn = node_kernel_matrix(spec, g, g2)
    return pair_kernel(
        hop_count_matrices(g, s, threads), hop_count_matrices(g2, s, threads), kn
    )


def graphhopper_kernel_gapfree(
    g: Graph, g2: Graph, spec: NodeKernelSpec, threads: int = 1
) -> float:
    """Gap-free GraphHopper kernel, bypassing the gap-extension code."""
    if g.node_count == 0 or g2.node_count == 0:
        return 0.0
    kn = node_kernel_matrix(spec, g, g2)
    return pair_kernel(
        hop_count_matrices_gapfree(g, threads),
        hop_count_matrices_gapfree(g2, threads),
        kn,
    )


def all_paths(g: Graph, s: int, max_paths: int = DEFAULT_MAX_PATHS) -> set:
    """Union over roots of every directed path in the gap-extended DAGs."""
    pool = set()
    for root in range(g.node_count):
        dag = extend_gappy(build_spdag(g, root), s)
        pool |= enumerate_paths(dag, max_paths)
        if len(pool) > max_paths:
            raise SizeGuardError(
                f"more than {max_paths} paths across roots; "
                f"raise max_paths to enumerate anyway"
            )
    return pool


def _paths_by_length(paths):
    grouped = {}
    for path in sorted(paths):
        grouped.setdefault(len(path), []).append(path)
    return {
        length: np.asarray(group, np.int64) for length, group in grouped.items()
    }


def kernel_bruteforce(
    g: Graph,
    g2: Graph,
    s: int,
    spec: NodeKernelSpec,
    max_paths: int = DEFAULT_MAX_PATHS,
) -> float:
    """Literal path-pair sum; exponential-size oracle for small graphs.

    Enumerates both graphs' path pools, then for every pair of paths of
    equal discrete length sums the node kernel over aligned positions.
    """
    if g.node_count == 0 or g2.node_count == 0:
        return 0.0
    kn = node_kernel_matrix(spec, g, g2)
    pool = _paths_by_length(all_paths(g, s, max_paths))
    pool2 = _paths_by_length(all_paths(g2, s, max_paths))
    total = 0.0
    for length in sorted(pool):
        group2 = pool2.get(length)
        if group2 is None:
            continue
        group = pool[length]
        for i in range(length):
            total += kn[group[:, i]][:, group2[:, i]].sum()
    return float(total)
