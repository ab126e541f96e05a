"""Undirected graph values with CSR adjacency, plus the dataset container.

Graphs are immutable once built: arrays are marked read-only and the
dataclasses are frozen, so they are safe to share across worker threads.
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import GraphValidationError


def _readonly(a):
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected graph in CSR form; every edge appears in both directions.

    `indices[indptr[v]:indptr[v+1]]` lists the neighbors of v in ascending
    order, with `lengths` aligned per directed edge. `integral_lengths`
    records whether all edge lengths are whole numbers, which lets the
    shortest-path DAG builder compare distances exactly.
    """

    indptr: np.ndarray
    indices: np.ndarray
    lengths: np.ndarray
    labels: Optional[np.ndarray] = None
    attributes: Optional[np.ndarray] = None
    integral_lengths: bool = True

    @property
    def node_count(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return self.indices.shape[0] // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def __repr__(self):
        extras = []
        if self.labels is not None:
            extras.append("labeled")
        if self.attributes is not None:
            extras.append(f"attrs[{self.attributes.shape[1]}]")
        tail = (", " + ", ".join(extras)) if extras else ""
        return f"Graph(n={self.node_count}, m={self.edge_count}{tail})"


def from_edges(node_count, edges, labels=None, attributes=None) -> Graph:
    """Build a validated Graph from undirected edges.

    `edges` holds (u, v) or (u, v, length) tuples with 0-based node ids;
    omitted lengths default to 1.0. Each undirected pair may appear once.
    """
    if node_count < 0:
        raise GraphValidationError("out-of-range", "negative node count")
    seen = {}
    src = []
    dst = []
    lens = []
    for edge in edges:
        if len(edge) == 2:
            u, v = edge
            length = 1.0
        else:
            u, v, length = edge
        u = int(u)
        v = int(v)
        length = float(length)
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise GraphValidationError(
                "out-of-range", f"edge ({u},{v}) outside 0..{node_count - 1}"
            )
        if u == v:
            raise GraphValidationError("self-loop", f"self-loop at node {u}")
        if length <= 0 or not np.isfinite(length):
            raise GraphValidationError(
                "nonpositive-length", f"edge ({u},{v}) has length {length}"
            )
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise GraphValidationError(
                "parallel-edge", f"edge ({key[0]},{key[1]}) listed more than once"
            )
        seen[key] = length
        src.extend((u, v))
        dst.extend((v, u))
        lens.extend((length, length))

    src = np.asarray(src, np.int64)
    dst = np.asarray(dst, np.int64)
    lens = np.asarray(lens, np.float64)
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    lens = lens[order]
    indptr = np.zeros(node_count + 1, np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)

    g = Graph(
        indptr=_readonly(indptr),
        indices=_readonly(dst),
        lengths=_readonly(lens),
        labels=_coerce_labels(labels, node_count),
        attributes=_coerce_attributes(attributes, node_count),
        integral_lengths=bool(lens.size == 0 or np.all(lens == np.floor(lens))),
    )
    validate(g)
    return g


def _coerce_labels(labels, node_count):
    if labels is None:
        return None
    arr = np.ascontiguousarray(labels, np.int64)
    if arr.shape != (node_count,):
        raise GraphValidationError(
            "label-shape",
            f"expected {node_count} node labels, got shape {arr.shape}",
        )
    return _readonly(arr)


def _coerce_attributes(attributes, node_count):
    if attributes is None:
        return None
    arr = np.ascontiguousarray(attributes, np.float64)
    if arr.ndim != 2 or arr.shape[0] != node_count:
        raise GraphValidationError(
            "attribute-dim-mismatch",
            f"expected ({node_count}, d) attribute array, got shape {arr.shape}",
        )
    return _readonly(arr)


def validate(g: Graph) -> None:
    """Check every Graph invariant, raising on the first violation."""
    n = g.node_count
    indptr, indices, lengths = g.indptr, g.indices, g.lengths
    if indptr[0] != 0 or np.any(np.diff(indptr) < 0):
        raise GraphValidationError("out-of-range", "corrupt CSR index pointer")
    if indices.shape != lengths.shape:
        raise GraphValidationError(
            "out-of-range", "adjacency and length arrays differ in size"
        )
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise GraphValidationError("out-of-range", "neighbor id outside 0..n-1")
    if np.any(lengths <= 0) or not np.all(np.isfinite(lengths)):
        bad = int(np.argmax((lengths <= 0) | ~np.isfinite(lengths)))
        u = int(np.searchsorted(indptr, bad, side="right") - 1)
        raise GraphValidationError(
            "nonpositive-length",
            f"edge ({u},{int(indices[bad])}) has length {lengths[bad]}",
        )
    # per-row order, self-loops, duplicates, and symmetry
    edge_map = {}
    for u in range(n):
        lo, hi = indptr[u], indptr[u + 1]
        row = indices[lo:hi]
        if row.size and np.any(np.diff(row) <= 0):
            pos = lo + int(np.argmax(np.diff(row) <= 0)) + 1
            if indices[pos] == indices[pos - 1]:
                raise GraphValidationError(
                    "parallel-edge", f"duplicate edge ({u},{int(indices[pos])})"
                )
            raise GraphValidationError(
                "out-of-range", f"unsorted adjacency row for node {u}"
            )
        for e in range(lo, hi):
            v = int(indices[e])
            if v == u:
                raise GraphValidationError("self-loop", f"self-loop at node {u}")
            edge_map[(u, v)] = float(lengths[e])
    for (u, v), length in edge_map.items():
        back = edge_map.get((v, u))
        if back is None or back != length:
            raise GraphValidationError(
                "asymmetric-edge",
                f"edge ({u},{v},{length}) lacks an equal reverse edge",
            )
    if g.labels is not None:
        _coerce_labels(g.labels, n)
    if g.attributes is not None:
        _coerce_attributes(g.attributes, n)


def degree(g: Graph, v: int) -> int:
    """Number of edges adjacent to node v."""
    if not 0 <= v < g.node_count:
        raise GraphValidationError(
            "out-of-range", f"node {v} outside 0..{g.node_count - 1}"
        )
    return int(g.indptr[v + 1] - g.indptr[v])


def degrees(g: Graph) -> np.ndarray:
    return np.diff(g.indptr)


def with_degree_labels(g: Graph) -> Graph:
    """Copy of g whose discrete labels are the node degrees."""
    return replace(g, labels=_readonly(degrees(g)))


def graphs_equal(a: Graph, b: Graph) -> bool:
    """Exact structural equality: adjacency, lengths, labels, attributes."""
    if a.node_count != b.node_count:
        return False
    if not (
        np.array_equal(a.indptr, b.indptr)
        and np.array_equal(a.indices, b.indices)
        and np.array_equal(a.lengths, b.lengths)
    ):
        return False
    for x, y in ((a.labels, b.labels), (a.attributes, b.attributes)):
        if (x is None) != (y is None):
            return False
        if x is not None and not np.array_equal(x, y):
            return False
    return True


@dataclass(frozen=True)
class DatasetMeta:
    name: str
    noise_x: float = 0.0
    seed: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """Graphs plus per-graph class labels and provenance."""

    graphs: tuple
    class_labels: np.ndarray
    meta: DatasetMeta

    def __post_init__(self):
        if len(self.graphs) != self.class_labels.shape[0]:
            raise GraphValidationError(
                "label-shape",
                f"{len(self.graphs)} graphs but "
                f"{self.class_labels.shape[0]} class labels",
            )

    def __len__(self):
        return len(self.graphs)

    @property
    def has_node_labels(self) -> bool:
        return all(g.labels is not None for g in self.graphs)

    @property
    def has_attributes(self) -> bool:
        return all(g.attributes is not None for g in self.graphs)


def make_dataset(graphs, class_labels, name, noise_x=0.0, seed=None) -> Dataset:
    labels = _readonly(np.ascontiguousarray(class_labels, np.int64))
    return Dataset(
        graphs=tuple(graphs),
        class_labels=labels,
        meta=DatasetMeta(name=name, noise_x=float(noise_x), seed=seed),
    )
