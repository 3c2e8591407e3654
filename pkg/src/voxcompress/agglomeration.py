"""Recursive nearest-neighbor agglomeration on a lattice topology.

The clusterer alternates four linear-time passes until exactly k clusters
remain: weight the current adjacency by Euclidean feature distance, keep each
node's single cheapest edge, merge the resulting components (cheapest edges
first, stopping at k), then replace merged rows by their means and contract
the adjacency. Cluster counts at least halve per round wherever merges are
possible, so the number of rounds stays logarithmic in p/k.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleK, InvalidK
from .graphs import capped_components, nearest_neighbor_graph, weight_edges
from .lattice import ImageStack, Topology, connected_component_count


@dataclass
class RecursiveNNResult:
    """Labels plus the per-round component counts (q0 = p, q1, ...)."""

    labels: np.ndarray
    n_clusters: int
    n_iterations: int
    cluster_counts: list[int] = field(default_factory=list)


def label_means(data: np.ndarray, labels: np.ndarray, n_clusters: int | None = None
                ) -> np.ndarray:
    """Row j of the result is the mean of the data rows with label j.

    This realizes the normal-equation reduction (UtU)^-1 UtX without forming
    U: UtU is diagonal with the cluster sizes.
    """
    data = np.asarray(data, dtype=np.float64)
    labels = np.asarray(labels)
    if n_clusters is None:
        n_clusters = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=n_clusters).astype(np.float64)
    if (counts == 0).any():
        raise ValueError("labels are not surjective onto [0, n_clusters)")
    out = np.empty((n_clusters, data.shape[1]))
    for col in range(data.shape[1]):
        out[:, col] = np.bincount(labels, weights=data[:, col], minlength=n_clusters)
    out /= counts[:, None]
    return out


def contract_topology(topology: Topology, labels: np.ndarray, n_clusters: int
                      ) -> Topology:
    """Quotient graph: clusters a != b are adjacent iff some original edge
    joins a voxel labeled a to one labeled b."""
    labels = np.asarray(labels, dtype=np.int64)
    e = topology.edges
    if e.size:
        a = labels[e[:, 0]]
        b = labels[e[:, 1]]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        keep = lo != hi
        lo, hi = lo[keep], hi[keep]
        key = np.unique(lo * np.int64(n_clusters) + hi)
        edges = np.stack([key // n_clusters, key % n_clusters], axis=1)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Topology(n_clusters, edges, validate=False)


def recursive_nn_cluster(x: ImageStack, topology: Topology, k: int
                         ) -> RecursiveNNResult:
    """Cluster the voxels of ``x`` into exactly k spatially connected groups.

    Raises InvalidK when k is outside [1, p] and InfeasibleK when the topology
    has more connected components than k (components can never merge).
    """
    p = x.n_voxels
    if k < 1 or k > p:
        raise InvalidK(f"k={k} outside [1, {p}]")
    if topology.n_voxels != p:
        raise ValueError("topology and image stack disagree on voxel count")
    n_comp = connected_component_count(topology)
    if n_comp > k:
        raise InfeasibleK(
            f"topology has {n_comp} connected components, cannot form k={k} clusters"
        )
    labels = np.arange(p, dtype=np.int64)
    data = x.data
    topo = topology
    q = p
    counts = [p]
    while q > k:
        graph = weight_edges(data, topo)
        nn = nearest_neighbor_graph(graph)
        step_labels, c = capped_components(nn, k)
        data = label_means(data, step_labels, c)
        topo = contract_topology(topo, step_labels, c)
        labels = step_labels[labels]
        q = c
        counts.append(c)
    return RecursiveNNResult(labels, q, len(counts) - 1, counts)
