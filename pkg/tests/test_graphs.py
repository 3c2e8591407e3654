import numpy as np
import pytest

from voxcompress import (DisjointSet, Topology, WeightedGraph,
                         capped_components, connected_components,
                         minimum_spanning_tree, nearest_neighbor_graph,
                         weight_edges)

from oracles import bfs_component_count, bfs_labels, exhaustive_mst


def chain_graph(values):
    """Weighted path over consecutive nodes of a 1D value list."""
    values = np.asarray(values, dtype=float)[:, None]
    topo = Topology(len(values), [(i, i + 1) for i in range(len(values) - 1)])
    return weight_edges(values, topo)


def test_weight_edges_chain():
    g = chain_graph([0, 1, 3])
    assert g.weights.tolist() == [1.0, 2.0]


def test_weight_edges_identical_rows():
    topo = Topology(3, [(0, 1), (1, 2)])
    g = weight_edges(np.ones((3, 4)), topo)
    assert (g.weights == 0).all()


def test_weight_edges_random_vs_direct():
    rng = np.random.default_rng(0)
    data = rng.standard_normal((5, 3))
    edges = [(0, 1), (0, 4), (1, 3), (2, 3), (2, 4)]
    g = weight_edges(data, Topology(5, edges))
    for (a, b), w in zip(edges, g.weights):
        assert w == pytest.approx(np.sqrt(((data[a] - data[b]) ** 2).sum()), rel=1e-12)


def test_nn_graph_chain():
    nn = nearest_neighbor_graph(chain_graph([0, 1, 3, 7]))
    assert nn.out.tolist() == [1, 0, 1, 2]


def test_nn_graph_mutual_pair():
    g = WeightedGraph(2, [(0, 1)], [2.5])
    nn = nearest_neighbor_graph(g)
    assert nn.out.tolist() == [1, 0]


def test_nn_graph_star_tie_break():
    # center 0, equal weights: leaves point at center, center at smallest leaf
    g = WeightedGraph(4, [(0, 1), (0, 2), (0, 3)], [1.0, 1.0, 1.0])
    nn = nearest_neighbor_graph(g)
    assert nn.out.tolist() == [1, 0, 0, 0]


def test_nn_graph_isolated_node():
    g = WeightedGraph(3, [(0, 1)], [1.0])
    nn = nearest_neighbor_graph(g)
    assert nn.out.tolist() == [1, 0, -1]


def test_nn_graph_minimizes_incident_weight():
    rng = np.random.default_rng(1)
    for _ in range(20):
        q = int(rng.integers(3, 12))
        pairs = [(i, j) for i in range(q) for j in range(i + 1, q)
                 if rng.random() < 0.5]
        if not pairs:
            continue
        w = rng.random(len(pairs))
        g = WeightedGraph(q, pairs, w)
        nn = nearest_neighbor_graph(g)
        for node in range(q):
            incident = [(wi, b if a == node else a)
                        for (a, b), wi in zip(pairs, w) if node in (a, b)]
            if not incident:
                assert nn.out[node] == -1
            else:
                best = min((wi, other) for wi, other in incident)
                assert nn.out[node] == best[1]
                assert nn.out_weight[node] == best[0]


def test_connected_components_chain():
    nn = nearest_neighbor_graph(chain_graph([0, 1, 3, 7]))
    labels = connected_components(nn)
    assert labels.tolist() == [0, 0, 0, 0]


def test_connected_components_pairs_and_isolated():
    g = WeightedGraph(5, [(0, 1), (2, 3)], [1.0, 1.0])
    labels = connected_components(nearest_neighbor_graph(g))
    assert labels.tolist() == [0, 0, 1, 1, 2]


def test_connected_components_vs_bfs():
    rng = np.random.default_rng(2)
    for _ in range(20):
        q = int(rng.integers(2, 15))
        pairs = [(i, j) for i in range(q) for j in range(i + 1, q)
                 if rng.random() < 0.4]
        if not pairs:
            continue
        g = WeightedGraph(q, pairs, rng.random(len(pairs)))
        nn = nearest_neighbor_graph(g)
        src, dst, _ = nn.directed_edges()
        expected = bfs_labels(q, list(zip(src.tolist(), dst.tolist())))
        assert connected_components(nn).tolist() == expected.tolist()


def test_nn_components_never_percolate():
    # distinct pairwise weights: every non-isolated component has size >= 2,
    # so the count is at most q/2 plus the isolated nodes
    rng = np.random.default_rng(3)
    for _ in range(20):
        q = int(rng.integers(4, 30))
        pairs = [(i, j) for i in range(q) for j in range(i + 1, q)
                 if rng.random() < 0.3]
        if not pairs:
            continue
        w = rng.permutation(len(pairs)) + 1.0
        nn = nearest_neighbor_graph(WeightedGraph(q, pairs, w))
        labels = connected_components(nn)
        isolated = int((nn.out == -1).sum())
        sizes = np.bincount(labels)
        non_isolated_sizes = sizes[sizes > 1]
        assert (sizes == 1).sum() == isolated
        assert len(non_isolated_sizes) + isolated <= q // 2 + isolated


def test_capped_components_chain_trace():
    nn = nearest_neighbor_graph(chain_graph([0, 1, 3, 7]))
    labels, c = capped_components(nn, 2)
    assert c == 2
    assert labels.tolist() == [0, 0, 0, 1]


def test_capped_components_cap_at_least_plain_count():
    g = WeightedGraph(4, [(0, 1), (2, 3)], [1.0, 1.0])
    nn = nearest_neighbor_graph(g)
    labels, c = capped_components(nn, 1)  # edges cannot join the two pairs
    assert c == 2
    assert labels.tolist() == [0, 0, 1, 1]


def test_capped_identity_when_cap_ge_q():
    nn = nearest_neighbor_graph(chain_graph([0, 1, 3, 7]))
    labels, c = capped_components(nn, 4)
    assert c == 4
    assert labels.tolist() == [0, 1, 2, 3]


def test_capped_k1_connected():
    nn = nearest_neighbor_graph(chain_graph([0, 1, 3, 7]))
    labels, c = capped_components(nn, 1)
    assert c == 1
    assert labels.tolist() == [0, 0, 0, 0]


def test_capped_matches_plain_when_not_binding():
    rng = np.random.default_rng(4)
    for _ in range(20):
        q = int(rng.integers(3, 20))
        pairs = [(i, j) for i in range(q) for j in range(i + 1, q)
                 if rng.random() < 0.3]
        if not pairs:
            continue
        nn = nearest_neighbor_graph(WeightedGraph(q, pairs, rng.random(len(pairs))))
        plain = connected_components(nn)
        cc = plain.max() + 1
        capped, c = capped_components(nn, int(cc))
        assert c == cc
        assert capped.tolist() == plain.tolist()
        # any cap between cc and q is hit exactly
        cap = int(rng.integers(cc, q + 1))
        _, c2 = capped_components(nn, cap)
        assert c2 == cap


def test_mst_triangle():
    g = WeightedGraph(3, [(0, 1), (0, 2), (1, 2)], [1.0, 2.0, 3.0])
    mst = minimum_spanning_tree(g)
    assert sorted(mst.weights.tolist()) == [1.0, 2.0]
    assert mst.weights.sum() == 3.0


def test_mst_tree_unchanged():
    g = chain_graph([0, 1, 3, 7])
    mst = minimum_spanning_tree(g)
    assert mst.edges.tolist() == g.edges.tolist()
    assert mst.weights.tolist() == g.weights.tolist()


def test_mst_vs_exhaustive():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 25:
        q = int(rng.integers(4, 9))
        pairs = [(i, j) for i in range(q) for j in range(i + 1, q)
                 if rng.random() < 0.5]
        if len(pairs) < q - 1 or len(pairs) > 13:
            continue
        w = rng.random(len(pairs))
        if bfs_component_count(q, pairs) != 1:
            continue
        g = WeightedGraph(q, pairs, w)
        mst = minimum_spanning_tree(g)
        total, edge_set = exhaustive_mst(q, pairs, w)
        assert mst.weights.sum() == pytest.approx(total, rel=1e-12)
        got = set(map(tuple, mst.edges.tolist()))
        expected = {tuple(pairs[i]) for i in edge_set}
        assert got == expected
        checked += 1


def test_mst_invariant_under_edge_order():
    rng = np.random.default_rng(6)
    q = 10
    pairs = [(i, j) for i in range(q) for j in range(i + 1, q) if rng.random() < 0.5]
    w = rng.random(len(pairs))
    perm = rng.permutation(len(pairs))
    a = minimum_spanning_tree(WeightedGraph(q, pairs, w))
    b = minimum_spanning_tree(
        WeightedGraph(q, [pairs[i] for i in perm], w[perm])
    )
    assert a.edges.tolist() == b.edges.tolist()
    assert a.weights.sum() == b.weights.sum()


def test_disjoint_set_component_accounting():
    ds = DisjointSet(5)
    assert ds.n_components == 5
    assert ds.union(0, 1)
    assert not ds.union(1, 0)
    assert ds.union(3, 4)
    assert ds.n_components == 3
    assert ds.find(1) == ds.find(0)
    assert ds.labels().tolist() == [0, 0, 1, 2, 2]
