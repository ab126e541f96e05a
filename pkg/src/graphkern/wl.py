"""Weisfeiler-Lehman subtree kernel over discretely labeled graphs.

Each refinement iteration replaces a node's label with an injective
compression of (own label, sorted multiset of neighbor labels). Feature
vectors are the per-iteration label histograms; the kernel is the sum over
iterations of their dot products. Compression ids are assigned in sorted
signature order after collecting all signatures of an iteration, so the
result is independent of graph order, node order, and any parallelism in
the collection phase.
"""

import itertools
from dataclasses import dataclass

from .errors import ConfigError, KernelInputError

DEFAULT_WL_ITERATIONS = 5

# distinguishes features from different relabeling runs, whose compressed
# ids are not comparable
_run_tokens = itertools.count(1)


@dataclass(frozen=True, eq=False)
class WlFeatures:
    """Per-iteration label histograms of one graph (iterations 0..h)."""

    counts: tuple
    token: int

    @property
    def iterations(self) -> int:
        return len(self.counts) - 1


def _graph_list(dataset_or_graphs):
    graphs = getattr(dataset_or_graphs, "graphs", dataset_or_graphs)
    return list(graphs)


def wl_relabel(dataset, h: int = DEFAULT_WL_ITERATIONS):
    """Run h refinement iterations, returning one WlFeatures per graph.

    All graphs must carry discrete labels; apply degree labeling first for
    unlabeled data. The compression dictionary is shared across the whole
    input, so the returned features are mutually comparable.
    """
    if h < 1:
        raise ConfigError(f"iteration count must be positive, got {h}")
    graphs = _graph_list(dataset)
    for g in graphs:
        if g.labels is None:
            raise KernelInputError(
                "missing-labels: Weisfeiler-Lehman needs discrete labels "
                "on every graph"
            )
    token = next(_run_tokens)

    current = [[int(x) for x in g.labels] for g in graphs]
    histograms = [[_histogram(labels)] for labels in current]

    for _ in range(h):
        signatures = []
        for g, labels in zip(graphs, current):
            sigs = []
            for v in range(g.node_count):
                row = g.indices[g.indptr[v] : g.indptr[v + 1]]
                sigs.append((labels[v], tuple(sorted(labels[n] for n in row))))
            signatures.append(sigs)
        # two-phase compression: ids in sorted signature order
        table = {sig: i for i, sig in enumerate(sorted(set().union(*signatures)))
                 } if signatures else {}
        current = [[table[sig] for sig in sigs] for sigs in signatures]
        for hist, labels in zip(histograms, current):
            hist.append(_histogram(labels))

    return [
        WlFeatures(counts=tuple(hist), token=token) for hist in histograms
    ]


def _histogram(labels):
    counts = {}
    for label in labels:
        counts[label] = counts.get(label, 0) + 1
    return counts


def wl_kernel(f: WlFeatures, f2: WlFeatures) -> float:
    """Sum over iterations of the label-histogram dot products."""
    if f.token != f2.token:
        raise KernelInputError(
            "dictionary-mismatch: features come from different relabeling "
            "runs and use incompatible compressed ids"
        )
    total = 0
    for counts, counts2 in zip(f.counts, f2.counts):
        for label, c in counts.items():
            c2 = counts2.get(label)
            if c2 is not None:
                total += c * c2
    return float(total)
