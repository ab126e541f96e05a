"""Rooted shortest-path DAGs, gap extension, and path-count vectors.

A shortest-path DAG rooted at `a` contains exactly the edges that lie on
some shortest path from `a`; every directed path from the root is a
shortest path. Gap extension with size `s` adds a shortcut edge for every
ordered pair joined by a directed base path of 2..s+1 edges, i.e. paths
that skip up to `s` consecutive interior nodes.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ConfigError, CountOverflowError, GraphValidationError, SizeGuardError
from .graphs import Graph

# largest count that float64 holds exactly; the message-passing loops run in
# float64, so anything beyond this could silently lose precision
MAX_EXACT_COUNT = float(2**53)

DEFAULT_MAX_PATHS = 10**6


@dataclass(frozen=True, eq=False)
class SpDag:
    """Shortest-path DAG rooted at `root`, possibly gap-extended.

    Children and parents are CSR adjacency over the original node ids;
    unreachable nodes keep dist == inf and have no incident DAG edges.
    `topo` lists the reachable nodes in (distance, id) order, root first,
    which is a topological order for the base and any gap-extended DAG.
    `max_len` is the maximal node count over directed paths from the root;
    gap edges only shorten paths, so extension never changes it.
    """

    root: int
    dist: np.ndarray
    child_indptr: np.ndarray
    child_indices: np.ndarray
    child_is_gap: np.ndarray
    parent_indptr: np.ndarray
    parent_indices: np.ndarray
    topo: np.ndarray
    gap_size: int
    max_len: int

    @property
    def node_count(self) -> int:
        return self.dist.shape[0]

    @property
    def edge_count(self) -> int:
        return self.child_indices.shape[0]


@dataclass(frozen=True, eq=False)
class CountVectors:
    """Per-node path counts in a rooted DAG, indexed by discrete length.

    desc[v, i-1] counts directed paths from the root ending at v with
    exactly i nodes; occ[v, k-1] counts directed paths starting at v with
    exactly k nodes. Rows of unreachable nodes are all zero.
    """

    desc: np.ndarray
    occ: np.ndarray
    max_len: int


def _readonly(a):
    a.setflags(write=False)
    return a


def _transpose_csr(n, indptr, indices):
    parent_indptr = np.zeros(n + 1, np.int64)
    np.add.at(parent_indptr, indices + 1, 1)
    np.cumsum(parent_indptr, out=parent_indptr)
    parent_indices = np.empty(indices.shape[0], np.int64)
    fill = parent_indptr[:-1].copy()
    for u in range(n):
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            parent_indices[fill[v]] = u
            fill[v] += 1
    return parent_indptr, parent_indices


def build_spdag(g: Graph, root: int) -> SpDag:
    """Dijkstra from `root`, keeping edge (u,v) iff dist(u)+l(u,v)=dist(v).

    The qualification test is exact when all edge lengths are integral and
    otherwise allows |dist(u)+l-dist(v)| <= 1e-9 * max(1, dist(v)).
    """
    n = g.node_count
    if not 0 <= root < n:
        raise GraphValidationError("out-of-range", f"root {root} outside 0..{n - 1}")
    rel_tol = 0.0 if g.integral_lengths else 1e-9
    b = backend.active()
    dist, child_indptr, child_indices = b.dijkstra_dag(
        g.indptr, g.indices, g.lengths, root, rel_tol
    )
    reachable = np.flatnonzero(np.isfinite(dist))
    # stable sort on dist keeps ties in id order, giving (dist, id) overall;
    # edge lengths are positive so this is a topological order
    topo = reachable[np.argsort(dist[reachable], kind="stable")].astype(np.int64)
    max_len = int(b.longest_path_len(child_indptr, child_indices, topo))
    parent_indptr, parent_indices = _transpose_csr(n, child_indptr, child_indices)
    return SpDag(
        root=root,
        dist=_readonly(dist),
        child_indptr=_readonly(child_indptr),
        child_indices=_readonly(child_indices),
        child_is_gap=_readonly(np.zeros(child_indices.shape[0], np.bool_)),
        parent_indptr=_readonly(parent_indptr),
        parent_indices=_readonly(parent_indices),
        topo=_readonly(topo),
        gap_size=0,
        max_len=max_len,
    )


def extend_gappy(dag: SpDag, s: int) -> SpDag:
    """Add one edge per ordered pair joined by a base path of 2..s+1 edges.

    Set semantics: pairs already joined by a base edge are not duplicated.
    s=0 returns the input object unchanged.
    """
    if s < 0:
        raise ConfigError(f"gap size must be non-negative, got {s}")
    if dag.gap_size != 0:
        raise ConfigError("extend_gappy expects a base DAG (gap_size 0)")
    if s == 0:
        return dag
    n = dag.node_count
    b = backend.active()
    gap_src, gap_dst = b.gap_edges(dag.child_indptr, dag.child_indices, dag.topo, s)

    base_src = np.repeat(np.arange(n, dtype=np.int64), np.diff(dag.child_indptr))
    src = np.concatenate([base_src, gap_src])
    dst = np.concatenate([dag.child_indices, gap_dst])
    is_gap = np.concatenate(
        [
            np.zeros(base_src.shape[0], np.bool_),
            np.ones(gap_src.shape[0], np.bool_),
        ]
    )
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    is_gap = is_gap[order]
    child_indptr = np.zeros(n + 1, np.int64)
    np.add.at(child_indptr, src + 1, 1)
    np.cumsum(child_indptr, out=child_indptr)
    parent_indptr, parent_indices = _transpose_csr(n, child_indptr, dst)
    return SpDag(
        root=dag.root,
        dist=dag.dist,
        child_indptr=_readonly(child_indptr),
        child_indices=_readonly(dst),
        child_is_gap=_readonly(is_gap),
        parent_indptr=_readonly(parent_indptr),
        parent_indices=_readonly(parent_indices),
        topo=dag.topo,
        gap_size=s,
        max_len=dag.max_len,
    )


def raw_count_vectors(dag: SpDag, max_len: int = None):
    """Float64 (prefix, suffix) count arrays, overflow-guarded.

    Counts are integers carried in float64; the guard rejects anything
    beyond 2**53, the last value float64 represents exactly.
    """
    if max_len is None:
        max_len = dag.max_len
    elif max_len < dag.max_len:
        raise ConfigError(
            f"max_len {max_len} below the DAG's longest path {dag.max_len}"
        )
    b = backend.active()
    prefix, suffix = b.path_count_vectors(
        dag.child_indptr, dag.child_indices, dag.topo, max_len
    )
    peak = max(prefix.max(), suffix.max())
    if peak > MAX_EXACT_COUNT:
        raise CountOverflowError(
            f"path count {peak:.3g} exceeds the exactly-representable "
            f"limit 2**53; reduce the gap size"
        )
    return prefix, suffix


def count_vectors(dag: SpDag, max_len: int = None) -> CountVectors:
    """Message passing over the DAG for prefix and suffix path counts.

    The forward pass accumulates, in topological order, the number of
    root-to-v paths of each discrete length; the backward pass does the
    same for paths starting at v. `max_len` may be raised above the DAG's
    own bound to produce zero-padded vectors of a common width.
    """
    prefix, suffix = raw_count_vectors(dag, max_len)
    return CountVectors(
        desc=_readonly(prefix.astype(np.int64)),
        occ=_readonly(suffix.astype(np.int64)),
        max_len=prefix.shape[1],
    )


def enumerate_paths(dag: SpDag, max_paths: int = DEFAULT_MAX_PATHS) -> set:
    """All directed paths from the root, as node-id tuples.

    Includes the single-node path (root,). Worst-case exponential; raises
    once more than `max_paths` paths would be produced.
    """
    paths = set()
    stack = [(dag.root,)]
    while stack:
        path = stack.pop()
        if len(paths) >= max_paths:
            raise SizeGuardError(
                f"more than {max_paths} paths from root {dag.root}; "
                f"raise max_paths to enumerate anyway"
            )
        paths.add(path)
        v = path[-1]
        for e in range(dag.child_indptr[v], dag.child_indptr[v + 1]):
            stack.append(path + (int(dag.child_indices[e]),))
    return paths


def to_debug_text(dag: SpDag) -> str:
    """One 'u -> v' line per DAG edge, '[gap]'-tagged, in (u, v) order."""
    lines = []
    for u in range(dag.node_count):
        for e in range(dag.child_indptr[u], dag.child_indptr[u + 1]):
            v = int(dag.child_indices[e])
            tag = " [gap]" if dag.child_is_gap[e] else ""
            lines.append(f"{u} -> {v}{tag}")
    return "\n".join(lines) + ("\n" if lines else "")
