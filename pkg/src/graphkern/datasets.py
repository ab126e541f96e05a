"""TU-format dataset loading, dataset statistics, and noise injection.

The TU text format spreads one dataset over several files sharing a name
prefix: `{name}_A.txt` lists 1-based edges "i, j", `{name}_graph_indicator.txt`
maps each node line to its graph id, `{name}_graph_labels.txt` holds one
class label per graph, and the optional `{name}_node_labels.txt` /
`{name}_node_attributes.txt` carry per-node data.
"""

import os
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, DataFormatError
from .graphs import Dataset, Graph, from_edges, make_dataset, with_degree_labels


def data_dir(path=None) -> str:
    """Resolve the dataset directory: explicit path, else GRAPHKERN_DATA_DIR."""
    if path:
        return str(path)
    env = os.environ.get("GRAPHKERN_DATA_DIR")
    if env:
        return env
    raise ConfigError(
        "no dataset directory: pass a path or set GRAPHKERN_DATA_DIR"
    )


def _find_file(directory, name, suffix, required=True):
    # TU archives unpack to a directory named after the dataset, so accept
    # both {dir}/{name}_X.txt and {dir}/{name}/{name}_X.txt
    for candidate in (
        os.path.join(directory, f"{name}_{suffix}.txt"),
        os.path.join(directory, name, f"{name}_{suffix}.txt"),
    ):
        if os.path.isfile(candidate):
            return candidate
    if required:
        raise DataFormatError(
            f"missing-file: no {name}_{suffix}.txt under {directory}",
            path=os.path.join(directory, f"{name}_{suffix}.txt"),
        )
    return None


def _parse_ints(path, expected_fields):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = [p.strip() for p in text.split(",")]
            if len(parts) != expected_fields:
                raise DataFormatError(
                    f"malformed-line: expected {expected_fields} "
                    f"comma-separated integers, got {text!r}",
                    path=path,
                    line=lineno,
                )
            try:
                rows.append(tuple(int(p) for p in parts))
            except ValueError:
                raise DataFormatError(
                    f"malformed-line: non-integer field in {text!r}",
                    path=path,
                    line=lineno,
                ) from None
    return rows


def _parse_float_rows(path):
    rows = []
    dim = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = text.split(",")
            try:
                row = [float(p) for p in parts]
            except ValueError:
                raise DataFormatError(
                    f"malformed-line: non-numeric field in {text!r}",
                    path=path,
                    line=lineno,
                ) from None
            if dim is None:
                dim = len(row)
            elif len(row) != dim:
                raise DataFormatError(
                    f"malformed-line: attribute dimension changed from "
                    f"{dim} to {len(row)}",
                    path=path,
                    line=lineno,
                )
            rows.append(row)
    return rows


def load_tu_dataset(directory, name: str) -> Dataset:
    """Load a TU-format dataset; every graph is validated on the way in.

    Edges get unit length 1.0; the file may list each undirected edge in
    one or both directions (duplicates are merged). Node ids are rebased
    to dense 0-based ids per graph.
    """
    directory = data_dir(directory)
    a_path = _find_file(directory, name, "A")
    ind_path = _find_file(directory, name, "graph_indicator")
    gl_path = _find_file(directory, name, "graph_labels")
    nl_path = _find_file(directory, name, "node_labels", required=False)
    na_path = _find_file(directory, name, "node_attributes", required=False)

    indicator = [row[0] for row in _parse_ints(ind_path, 1)]
    if not indicator:
        raise DataFormatError(
            "malformed-line: empty graph indicator file", path=ind_path, line=1
        )
    num_graphs = max(indicator)
    if min(indicator) < 1:
        raise DataFormatError(
            "malformed-line: graph ids must start at 1", path=ind_path
        )

    class_labels = [row[0] for row in _parse_ints(gl_path, 1)]
    if len(class_labels) != num_graphs:
        raise DataFormatError(
            f"malformed-line: {len(class_labels)} graph labels for "
            f"{num_graphs} graphs",
            path=gl_path,
        )

    # global 1-based node id -> (graph index, local id)
    node_graph = np.asarray(indicator, np.int64) - 1
    local_id = np.zeros(len(indicator), np.int64)
    sizes = np.zeros(num_graphs, np.int64)
    for node, graph_idx in enumerate(node_graph):
        local_id[node] = sizes[graph_idx]
        sizes[graph_idx] += 1

    edge_sets = [set() for _ in range(num_graphs)]
    with open(a_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            parts = [p.strip() for p in text.split(",")]
            try:
                i, j = (int(p) for p in parts)
            except ValueError:
                raise DataFormatError(
                    f"malformed-line: expected 'i, j', got {text!r}",
                    path=a_path,
                    line=lineno,
                ) from None
            if not (1 <= i <= len(indicator) and 1 <= j <= len(indicator)):
                raise DataFormatError(
                    f"malformed-line: node id outside the indicator range "
                    f"in {text!r}",
                    path=a_path,
                    line=lineno,
                )
            gi, gj = node_graph[i - 1], node_graph[j - 1]
            if gi != gj:
                raise DataFormatError(
                    f"inconsistent-indicator: edge ({i},{j}) crosses graphs "
                    f"{gi + 1} and {gj + 1}",
                    path=a_path,
                    line=lineno,
                )
            u, v = int(local_id[i - 1]), int(local_id[j - 1])
            edge_sets[gi].add((u, v) if u <= v else (v, u))

    node_labels = None
    if nl_path is not None:
        rows = _parse_ints(nl_path, 1)
        if len(rows) != len(indicator):
            raise DataFormatError(
                f"malformed-line: {len(rows)} node labels for "
                f"{len(indicator)} nodes",
                path=nl_path,
            )
        node_labels = [row[0] for row in rows]

    attributes = None
    if na_path is not None:
        attributes = _parse_float_rows(na_path)
        if len(attributes) != len(indicator):
            raise DataFormatError(
                f"malformed-line: {len(attributes)} attribute rows for "
                f"{len(indicator)} nodes",
                path=na_path,
            )

    graphs = []
    cursor = 0
    for graph_idx in range(num_graphs):
        n = int(sizes[graph_idx])
        labels = node_labels[cursor : cursor + n] if node_labels else None
        attrs = attributes[cursor : cursor + n] if attributes else None
        cursor += n
        graphs.append(
            from_edges(n, sorted(edge_sets[graph_idx]), labels=labels,
                       attributes=attrs)
        )
    return make_dataset(graphs, class_labels, name=name)


def load_edge_list(path) -> Graph:
    """Small plain-text graph for debugging commands.

    Format: comment lines start with '#'; the first data line is the node
    count; every further line is 'u v' or 'u v length' with 0-based ids.
    """
    n = None
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            try:
                if n is None:
                    if len(parts) != 1:
                        raise ValueError
                    n = int(parts[0])
                elif len(parts) == 2:
                    edges.append((int(parts[0]), int(parts[1])))
                elif len(parts) == 3:
                    edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
                else:
                    raise ValueError
            except ValueError:
                raise DataFormatError(
                    f"malformed-line: expected 'n' or 'u v [length]', "
                    f"got {text!r}",
                    path=str(path),
                    line=lineno,
                ) from None
    if n is None:
        raise DataFormatError(
            "malformed-line: empty graph file", path=str(path), line=1
        )
    return from_edges(n, edges)


def dataset_stats(dataset: Dataset) -> dict:
    """Summary statistics in dataset-table form."""
    ns = np.array([g.node_count for g in dataset.graphs], np.float64)
    ms = np.array([g.edge_count for g in dataset.graphs], np.float64)
    possible = ns * (ns - 1) / 2.0
    density = np.divide(ms, possible, out=np.zeros_like(ms), where=possible > 0)
    attr_dim = (
        dataset.graphs[0].attributes.shape[1]
        if dataset.graphs and dataset.has_attributes
        else None
    )
    return {
        "name": dataset.meta.name,
        "graphs": len(dataset),
        "classes": int(np.unique(dataset.class_labels).size),
        "mean_nodes": float(ns.mean()) if len(dataset) else 0.0,
        "mean_edges": float(ms.mean()) if len(dataset) else 0.0,
        "mean_density": float(density.mean()) if len(dataset) else 0.0,
        "node_labels": dataset.has_node_labels,
        "attributes": dataset.has_attributes,
        "attribute_dim": attr_dim,
        "noise_x": dataset.meta.noise_x,
    }


@dataclass(frozen=True)
class NoiseConfig:
    """Structural noise: a fraction x of new nodes attached per graph.

    Each graph gains round(x * node_count) fresh nodes (round half up);
    each new node attaches with `attach_edges` unit-length edges to
    distinct nodes chosen uniformly among those present at attachment
    time. New labels follow `label_policy`: "uniform" draws from the
    dataset's label alphabet, "majority" uses its most frequent label.
    Attribute vectors, when the dataset has them, are drawn uniformly
    from the dataset-wide pool of existing rows.
    """

    x: float
    seed: int
    attach_edges: int = 1
    label_policy: str = "uniform"

    def __post_init__(self):
        if self.x < 0:
            raise ConfigError(f"noise fraction must be non-negative, got {self.x}")
        if self.x > 0.5:
            warnings.warn(
                f"noise fraction {self.x} is outside the studied range [0, 0.5]"
            )
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.attach_edges < 1:
            raise ConfigError(
                f"attach_edges must be at least 1, got {self.attach_edges}"
            )
        if self.label_policy not in ("uniform", "majority"):
            raise ConfigError(
                f"unknown label policy {self.label_policy!r}: "
                f"expected 'uniform' or 'majority'"
            )


def _undirected_edges(g: Graph):
    edges = []
    for u in range(g.node_count):
        for e in range(g.indptr[u], g.indptr[u + 1]):
            v = int(g.indices[e])
            if u < v:
                edges.append((u, v, float(g.lengths[e])))
    return edges


def inject_noise(dataset: Dataset, cfg: NoiseConfig) -> Dataset:
    """Seeded structural noise; x=0 returns the same graph objects.

    Every graph gets its own RNG stream keyed by (seed, graph index), so
    results are independent of processing order and safe to parallelize.
    Per new node the draw order is: attachment targets, then label, then
    attribute row.
    """
    if cfg.x == 0:
        return make_dataset(
            dataset.graphs,
            dataset.class_labels,
            name=dataset.meta.name,
            noise_x=0.0,
            seed=cfg.seed,
        )

    labeled = dataset.has_node_labels
    attributed = dataset.has_attributes
    alphabet = None
    majority = None
    if labeled:
        all_labels = np.concatenate([g.labels for g in dataset.graphs])
        alphabet, counts = np.unique(all_labels, return_counts=True)
        majority = int(alphabet[np.argmax(counts)])
    pool = (
        np.vstack([g.attributes for g in dataset.graphs]) if attributed else None
    )

    noisy = []
    for index, g in enumerate(dataset.graphs):
        n = g.node_count
        if n == 0:
            raise DataError(
                "empty-graph: cannot attach noise nodes to a graph "
                "with no nodes"
            )
        added = int(np.floor(cfg.x * n + 0.5))
        if added == 0:
            noisy.append(g)
            continue
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((cfg.seed, index)))
        )
        edges = _undirected_edges(g)
        labels = list(g.labels) if labeled else None
        attrs = list(np.asarray(g.attributes)) if attributed else None
        for t in range(added):
            new_id = n + t
            targets = rng.choice(new_id, size=min(cfg.attach_edges, new_id),
                                 replace=False)
            for target in np.sort(targets):
                edges.append((int(target), new_id, 1.0))
            if labeled:
                if cfg.label_policy == "uniform":
                    labels.append(int(alphabet[rng.integers(alphabet.size)]))
                else:
                    labels.append(majority)
            if attributed:
                attrs.append(pool[int(rng.integers(pool.shape[0]))])
        noisy.append(
            from_edges(n + added, edges, labels=labels,
                       attributes=np.vstack(attrs) if attributed else None)
        )
    return make_dataset(
        noisy,
        dataset.class_labels,
        name=dataset.meta.name,
        noise_x=cfg.x,
        seed=cfg.seed,
    )


def ensure_node_labels(dataset: Dataset) -> Dataset:
    """Degree-label every graph when the dataset has no discrete labels."""
    if dataset.has_node_labels:
        return dataset
    return make_dataset(
        [with_degree_labels(g) for g in dataset.graphs],
        dataset.class_labels,
        name=dataset.meta.name,
        noise_x=dataset.meta.noise_x,
        seed=dataset.meta.seed,
    )
