import dataclasses

import numpy as np
import pytest

from graphkern import (
    GraphValidationError,
    degree,
    degrees,
    from_edges,
    graphs_equal,
    make_dataset,
    validate,
    with_degree_labels,
)

from helpers import chain_graph, cycle_graph


def test_from_edges_basic_csr():
    g = from_edges(3, [(0, 1), (1, 2, 2.5)])
    assert g.node_count == 3
    assert g.edge_count == 2
    assert list(g.neighbors(1)) == [0, 2]
    assert list(g.neighbors(0)) == [1]
    # stored lengths mirror both directions
    assert g.lengths[g.indptr[1]:g.indptr[2]].tolist() == [1.0, 2.5]
    assert not g.integral_lengths
    assert from_edges(2, [(0, 1)]).integral_lengths


def test_from_edges_isolated_nodes_and_empty():
    g = from_edges(4, [(0, 1)])
    assert degree(g, 2) == 0
    empty = from_edges(0, [])
    assert empty.node_count == 0 and empty.edge_count == 0
    lone = from_edges(1, [])
    assert lone.node_count == 1


@pytest.mark.parametrize(
    "node_count,edges,reason",
    [
        (2, [(0, 2)], "out-of-range"),
        (2, [(-1, 0)], "out-of-range"),
        (2, [(1, 1)], "self-loop"),
        (2, [(0, 1, 0.0)], "nonpositive-length"),
        (2, [(0, 1, -3)], "nonpositive-length"),
        (2, [(0, 1, float("inf"))], "nonpositive-length"),
        (3, [(0, 1), (1, 0)], "parallel-edge"),
        (-1, [], "out-of-range"),
    ],
)
def test_from_edges_rejects(node_count, edges, reason):
    with pytest.raises(GraphValidationError) as exc:
        from_edges(node_count, edges)
    assert exc.value.reason == reason


def test_label_and_attribute_coercion():
    g = from_edges(2, [(0, 1)], labels=[3, 4], attributes=[[0.5], [1.5]])
    assert g.labels.dtype == np.int64
    assert g.attributes.shape == (2, 1)
    assert not g.labels.flags.writeable
    with pytest.raises(GraphValidationError) as exc:
        from_edges(2, [(0, 1)], labels=[1])
    assert exc.value.reason == "label-shape"
    with pytest.raises(GraphValidationError) as exc:
        from_edges(2, [(0, 1)], attributes=[0.5, 1.5, 2.5])
    assert exc.value.reason == "attribute-dim-mismatch"


def test_validate_catches_asymmetry():
    g = from_edges(3, [(0, 1), (1, 2)])
    # drop one direction of (1, 2) by rebuilding CSR arrays directly
    keep = ~((np.repeat(np.arange(3), np.diff(g.indptr)) == 2)
             & (g.indices == 1))
    indices = g.indices[keep]
    lengths = g.lengths[keep]
    indptr = np.array([0, 1, 3, 3], np.int64)
    bad = dataclasses.replace(g, indptr=indptr, indices=indices,
                              lengths=lengths)
    with pytest.raises(GraphValidationError) as exc:
        validate(bad)
    assert exc.value.reason == "asymmetric-edge"


def test_validate_catches_unequal_mirror_lengths():
    g = from_edges(2, [(0, 1)])
    lengths = np.array([1.0, 2.0])
    bad = dataclasses.replace(g, lengths=lengths)
    with pytest.raises(GraphValidationError) as exc:
        validate(bad)
    assert exc.value.reason == "asymmetric-edge"


def test_degree_helpers():
    g = cycle_graph(4)
    assert degrees(g).tolist() == [2, 2, 2, 2]
    star = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    assert degree(star, 0) == 3
    assert degrees(star).tolist() == [3, 1, 1, 1]
    with pytest.raises(GraphValidationError):
        degree(star, 4)


def test_with_degree_labels():
    star = from_edges(4, [(0, 1), (0, 2), (0, 3)])
    labeled = with_degree_labels(star)
    assert labeled.labels.tolist() == [3, 1, 1, 1]
    assert star.labels is None  # original untouched
    assert graphs_equal(star, from_edges(4, [(0, 1), (0, 2), (0, 3)]))


def test_graphs_equal_discriminates():
    a = chain_graph(3, labels=[0, 1, 0])
    assert graphs_equal(a, chain_graph(3, labels=[0, 1, 0]))
    assert not graphs_equal(a, chain_graph(3, labels=[0, 1, 1]))
    assert not graphs_equal(a, chain_graph(3))
    assert not graphs_equal(a, chain_graph(4, labels=[0, 1, 0, 1]))
    b = from_edges(3, [(0, 1), (1, 2, 2.0)], labels=[0, 1, 0])
    assert not graphs_equal(a, b)


def test_dataset_construction():
    graphs = [chain_graph(3), cycle_graph(4)]
    ds = make_dataset(graphs, [0, 1], "tiny")
    assert len(ds) == 2
    assert ds.meta.name == "tiny"
    assert ds.meta.noise_x == 0.0
    assert not ds.has_node_labels
    labeled = make_dataset([chain_graph(3, labels=[1, 1, 1])], [0], "l")
    assert labeled.has_node_labels
    with pytest.raises(GraphValidationError):
        make_dataset(graphs, [0], "broken")
