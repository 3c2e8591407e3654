"""Weighted-graph primitives shared by the clusterers.

All operations are deterministic: ties are broken everywhere by
(weight, smaller endpoint, larger endpoint), and component labels are
numbered by the smallest contained node index.
"""

from __future__ import annotations

import numpy as np

from .lattice import Topology


class WeightedGraph:
    """q nodes plus (m, 2) edges with nonnegative finite weights, i < j."""

    def __init__(self, n_nodes: int, edges: np.ndarray, weights: np.ndarray,
                 validate: bool = True):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if len(edges) != len(weights):
            raise ValueError("edges and weights length mismatch")
        if validate and edges.size:
            if edges.min() < 0 or edges.max() >= n_nodes:
                raise ValueError("edge endpoint out of range")
            if (edges[:, 0] >= edges[:, 1]).any():
                raise ValueError("edges must satisfy i < j")
            if not np.isfinite(weights).all() or (weights < 0).any():
                raise ValueError("weights must be finite and >= 0")
        self.n_nodes = int(n_nodes)
        self.edges = edges
        self.weights = weights

    @property
    def n_edges(self) -> int:
        return len(self.edges)


class DisjointSet:
    """Array union-find with union by rank and path halving."""

    def __init__(self, n: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.rank = np.zeros(n, dtype=np.int8)
        self.n_components = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        """Merge the sets of a and b; True if they were distinct."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.n_components -= 1
        return True

    def labels(self) -> np.ndarray:
        """Component labels numbered by smallest contained node index."""
        parent = self.parent
        roots = np.empty(len(parent), dtype=np.int64)
        for x in range(len(parent)):
            roots[x] = self.find(x)
        return _canonical_labels(roots)


class NnGraph:
    """Directed 1-nearest-neighbor graph: out[i] = best neighbor or -1."""

    def __init__(self, n_nodes: int, out: np.ndarray, out_weight: np.ndarray):
        self.n_nodes = int(n_nodes)
        self.out = out
        self.out_weight = out_weight

    def directed_edges(self):
        """(src, dst, w) arrays over the non-isolated nodes."""
        src = np.flatnonzero(self.out >= 0)
        return src, self.out[src], self.out_weight[src]


def _canonical_labels(assignment: np.ndarray) -> np.ndarray:
    """Relabel an arbitrary id array so labels follow first appearance."""
    _, first, inverse = np.unique(assignment, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse]


def weight_edges(data: np.ndarray, topology: Topology) -> WeightedGraph:
    """One weighted edge per topology edge, w = Euclidean distance of the rows."""
    data = np.asarray(data, dtype=np.float64)
    e = topology.edges
    if e.size:
        w = np.linalg.norm(data[e[:, 0]] - data[e[:, 1]], axis=1)
    else:
        w = np.empty(0, dtype=np.float64)
    return WeightedGraph(topology.n_voxels, e, w, validate=False)


def nearest_neighbor_graph(g: WeightedGraph) -> NnGraph:
    """Minimum-weight incident edge per node; ties go to the smaller neighbor."""
    q = g.n_nodes
    out = np.full(q, -1, dtype=np.int64)
    out_weight = np.full(q, np.nan)
    if g.n_edges:
        src = np.concatenate([g.edges[:, 0], g.edges[:, 1]])
        dst = np.concatenate([g.edges[:, 1], g.edges[:, 0]])
        w = np.concatenate([g.weights, g.weights])
        order = np.lexsort((dst, w, src))
        src, dst, w = src[order], dst[order], w[order]
        nodes, first = np.unique(src, return_index=True)
        out[nodes] = dst[first]
        out_weight[nodes] = w[first]
    return NnGraph(q, out, out_weight)


def _deduped_nn_edges(nn: NnGraph):
    """Undirected (i, j, w) edges of the nn graph, sorted by (w, i, j)."""
    src, dst, w = nn.directed_edges()
    if not len(src):
        return (np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0, np.float64))
    i = np.minimum(src, dst)
    j = np.maximum(src, dst)
    key = i * np.int64(nn.n_nodes) + j
    _, keep = np.unique(key, return_index=True)
    i, j, w = i[keep], j[keep], w[keep]
    order = np.lexsort((j, i, w))
    return i[order], j[order], w[order]


def connected_components(nn: NnGraph) -> np.ndarray:
    """Labels of the undirected components of the nn graph."""
    ds = DisjointSet(nn.n_nodes)
    src, dst, _ = nn.directed_edges()
    for a, b in zip(src.tolist(), dst.tolist()):
        ds.union(a, b)
    return ds.labels()


def capped_components(nn: NnGraph, cap: int) -> tuple[np.ndarray, int]:
    """Components of the nn graph, merging cheapest edges first and stopping
    once the component count reaches ``cap``.

    Returns (labels, n_components); n_components can exceed ``cap`` when the
    edge set alone cannot reach it (caller handles).
    """
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    ds = DisjointSet(nn.n_nodes)
    i, j, _ = _deduped_nn_edges(nn)
    for a, b in zip(i.tolist(), j.tolist()):
        if ds.n_components <= cap:
            break
        ds.union(a, b)
    return ds.labels(), ds.n_components


def minimum_spanning_tree(g: WeightedGraph) -> WeightedGraph:
    """Kruskal minimum spanning forest, ties broken by (w, i, j)."""
    ds = DisjointSet(g.n_nodes)
    order = np.lexsort((g.edges[:, 1], g.edges[:, 0], g.weights))
    keep = []
    for idx in order.tolist():
        if ds.union(int(g.edges[idx, 0]), int(g.edges[idx, 1])):
            keep.append(idx)
            if ds.n_components == 1:
                break
    keep = np.array(keep, dtype=np.int64)
    edges = g.edges[keep]
    weights = g.weights[keep]
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return WeightedGraph(g.n_nodes, edges[order], weights[order], validate=False)
