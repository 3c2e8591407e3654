"""Baseline clusterers: random spanning-tree splitting and graph-constrained
bottom-up linkage (single / average / complete / Ward)."""

from __future__ import annotations

import heapq

import numpy as np

from .errors import DisconnectedTopology, InfeasibleK, InvalidK
from .graphs import DisjointSet, minimum_spanning_tree, weight_edges
from .lattice import ImageStack, Topology, connected_component_count

LINKAGE_KINDS = ("single", "average", "complete", "ward")


def _check_k(k: int, p: int):
    if k < 1 or k > p:
        raise InvalidK(f"k={k} outside [1, {p}]")


def rand_single_linkage(x: ImageStack, topology: Topology, k: int, seed: int
                        ) -> np.ndarray:
    """Split the minimum spanning tree into k pieces by deleting k-1 random
    edges, never creating singletons.

    An edge is deletable only while both of its endpoints still have degree
    >= 2 in the current forest; the choice is uniform over the currently
    deletable edges and resampled after every deletion. Requires a connected
    topology (a single spanning tree).
    """
    p = x.n_voxels
    _check_k(k, p)
    if p == 1:
        return np.zeros(1, dtype=np.int64)
    mst = minimum_spanning_tree(weight_edges(x.data, topology))
    if mst.n_edges < p - 1:
        raise DisconnectedTopology(
            "rand single linkage needs a connected topology (got a forest)"
        )
    if k == 1:
        return np.zeros(p, dtype=np.int64)

    edges = mst.edges
    degree = np.bincount(edges.ravel(), minlength=p)
    incident = [[] for _ in range(p)]
    for e, (a, b) in enumerate(edges.tolist()):
        incident[a].append(e)
        incident[b].append(e)
    alive = np.ones(len(edges), dtype=bool)

    # uniform sampling with O(1) removal: list + position map
    elig_list = []
    elig_pos = {}

    def elig_add(e):
        elig_pos[e] = len(elig_list)
        elig_list.append(e)

    def elig_discard(e):
        pos = elig_pos.pop(e, None)
        if pos is None:
            return
        last = elig_list.pop()
        if pos < len(elig_list):
            elig_list[pos] = last
            elig_pos[last] = pos

    for e, (a, b) in enumerate(edges.tolist()):
        if degree[a] >= 2 and degree[b] >= 2:
            elig_add(e)

    rng = np.random.default_rng(seed)
    for _ in range(k - 1):
        if not elig_list:
            raise InfeasibleK(
                f"ran out of deletable edges before reaching k={k} "
                "(every remaining edge touches a degree-1 node)"
            )
        e = elig_list[int(rng.integers(len(elig_list)))]
        elig_discard(e)
        alive[e] = False
        for node in edges[e]:
            degree[node] -= 1
            if degree[node] < 2:
                for f in incident[node]:
                    if alive[f]:
                        elig_discard(f)

    ds = DisjointSet(p)
    for a, b in edges[alive].tolist():
        ds.union(a, b)
    labels = ds.labels()
    assert ds.n_components == k
    return labels


def _ward_cost(sums, sizes, a, b):
    sa, sb = sizes[a], sizes[b]
    diff = sums[a] / sa - sums[b] / sb
    return (sa * sb) / (sa + sb) * float(diff @ diff)


def agglomerative(x: ImageStack, topology: Topology, k: int, kind: str
                  ) -> np.ndarray:
    """Bottom-up merging restricted to topology edges, until k clusters remain.

    The globally cheapest adjacent pair merges at each step (ties by smallest
    cluster-id pair, where a cluster's id is its smallest voxel). Inter-cluster
    dissimilarities follow the Lance-Williams updates: min for single, max for
    complete, size-weighted mean for average; Ward uses the variance-increase
    cost computed from cluster moments. A neighbor adjacent to only one of the
    merged clusters keeps that side's value.
    """
    if kind not in LINKAGE_KINDS:
        raise ValueError(f"unknown linkage {kind!r}, expected one of {LINKAGE_KINDS}")
    p = x.n_voxels
    _check_k(k, p)
    n_comp = connected_component_count(topology)
    if n_comp > k:
        raise InfeasibleK(
            f"topology has {n_comp} connected components, cannot form k={k} clusters"
        )

    data = x.data
    sizes = np.ones(p, dtype=np.int64)
    sums = data.copy() if kind == "ward" else None
    neighbors = [{} for _ in range(p)]
    heap = []
    e = topology.edges
    dist = np.linalg.norm(data[e[:, 0]] - data[e[:, 1]], axis=1) if e.size else []
    if kind == "ward":
        dist = 0.5 * np.square(dist)  # variance increase for a singleton pair
    for (a, b), d in zip(e.tolist(), np.asarray(dist).tolist()):
        neighbors[a][b] = d
        neighbors[b][a] = d
        heap.append((d, a, b))
    heapq.heapify(heap)

    alive = np.ones(p, dtype=bool)
    ds = DisjointSet(p)
    n_clusters = p
    while n_clusters > k:
        d, a, b = heapq.heappop(heap)
        if not (alive[a] and alive[b]) or neighbors[a].get(b) != d:
            continue
        u, v = a, b  # a < b, so the merged cluster keeps the smaller id
        su, sv = int(sizes[u]), int(sizes[v])
        others = set(neighbors[u]) | set(neighbors[v])
        others.discard(u)
        others.discard(v)
        for other in others:
            neighbors[other].pop(v, None)
        sizes[u] += sizes[v]
        if kind == "ward":
            sums[u] += sums[v]
        merged = {}
        for other in others:
            if kind == "ward":
                d_new = _ward_cost(sums, sizes, u, other)
            else:
                du = neighbors[u].get(other)
                dv = neighbors[v].get(other)
                if du is None:
                    d_new = dv
                elif dv is None:
                    d_new = du
                elif kind == "single":
                    d_new = min(du, dv)
                elif kind == "complete":
                    d_new = max(du, dv)
                else:  # average
                    d_new = (su * du + sv * dv) / (su + sv)
            merged[other] = d_new
            neighbors[other][u] = d_new
            lo, hi = (u, other) if u < other else (other, u)
            heapq.heappush(heap, (d_new, lo, hi))
        neighbors[v].clear()
        neighbors[u] = merged
        alive[v] = False
        ds.union(u, v)
        n_clusters -= 1

    labels = ds.labels()
    assert n_clusters == k
    return labels
