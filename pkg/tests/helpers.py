"""Shared fixtures' workhorses: graph generators and on-disk dataset writers."""

import os

import numpy as np

from graphkern import from_edges


def chain_graph(n, labels=None, attributes=None):
    """Path graph 0-1-...-(n-1) with unit lengths."""
    return from_edges(n, [(i, i + 1) for i in range(n - 1)],
                      labels=labels, attributes=attributes)


def cycle_graph(n, labels=None):
    edges = [(i, (i + 1) % n) for i in range(n)]
    return from_edges(n, edges, labels=labels)


def random_graph(rng, max_nodes=8, n_labels=3, attr_dim=None, p=0.45,
                 constant_label=None):
    """Erdos-Renyi draw; may be disconnected, which the kernels tolerate."""
    n = int(rng.integers(1, max_nodes + 1))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    if constant_label is not None:
        labels = np.full(n, constant_label, dtype=np.int64)
    else:
        labels = rng.integers(0, n_labels, size=n)
    attrs = rng.normal(size=(n, attr_dim)) if attr_dim else None
    return from_edges(n, edges, labels=labels, attributes=attrs)


def write_tu_files(directory, name, graphs, classes, node_labels=None,
                   attributes=None):
    """Emit the four flat benchmark files for a list of (n, edges) graphs.

    `graphs` holds (node_count, undirected edge list over local 0-based ids);
    both edge directions are written, ids are shifted to a global 1-based
    range. `node_labels`/`attributes` are per-node lists flattened over the
    whole collection.
    """
    os.makedirs(directory, exist_ok=True)
    adj, indicator = [], []
    base = 0
    for gi, (n, edges) in enumerate(graphs):
        for u, v in edges:
            adj.append(f"{base + u + 1}, {base + v + 1}")
            adj.append(f"{base + v + 1}, {base + u + 1}")
        indicator.extend([str(gi + 1)] * n)
        base += n

    def dump(suffix, lines):
        path = os.path.join(directory, f"{name}_{suffix}.txt")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    dump("A", adj)
    dump("graph_indicator", indicator)
    dump("graph_labels", [str(c) for c in classes])
    if node_labels is not None:
        dump("node_labels", [str(l) for l in node_labels])
    if attributes is not None:
        dump("node_attributes", [", ".join(repr(float(x)) for x in row)
                                 for row in attributes])
    return directory


def toy_collection(count=24, seed=5):
    """Cycles vs stars: two structurally separable classes.

    Returns (graphs, classes, node_labels) in write_tu_files form.
    """
    rng = np.random.default_rng(seed)
    graphs, classes, node_labels = [], [], []
    for i in range(count):
        n = int(rng.integers(5, 8))
        if i % 2 == 0:
            edges = [(j, (j + 1) % n) for j in range(n)]
            classes.append(1)
        else:
            edges = [(0, j) for j in range(1, n)]
            classes.append(2)
        graphs.append((n, edges))
        node_labels.extend((j % 3) + 1 for j in range(n))
    return graphs, classes, node_labels


def find_dataset(name):
    """Directory holding `{name}_A.txt` style files, or None.

    Looks in GRAPHKERN_DATA_DIR, then `tests/data`, accepting either flat
    files or a `{name}/` subdirectory.
    """
    roots = []
    env = os.environ.get("GRAPHKERN_DATA_DIR")
    if env:
        roots.append(env)
    roots.append(os.path.join(os.path.dirname(__file__), "data"))
    for root in roots:
        for candidate in (root, os.path.join(root, name)):
            if os.path.isfile(os.path.join(candidate, f"{name}_A.txt")):
                return root
    return None
