"""Masked 2D/3D image lattices and their face-neighbor graphs.

Voxels are the ``True`` cells of a mask, numbered 0..p-1 in row-major order
of the grid. That ordering is the canonical one: every other module breaks
ties by voxel index, so determinism everywhere hangs on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cs_connected_components

MAX_GRID_CELLS = 2**31 - 1


@dataclass(frozen=True)
class GridShape:
    """Voxel counts per axis of a 2D or 3D grid."""

    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        object.__setattr__(self, "dims", dims)
        if not 2 <= len(dims) <= 3:
            raise ValueError(f"grid must be 2D or 3D, got {len(dims)} axes")
        if any(d < 1 for d in dims):
            raise ValueError(f"every axis must have >= 1 cells, got {dims}")
        if int(np.prod(dims, dtype=np.int64)) > MAX_GRID_CELLS:
            raise ValueError(f"grid of shape {dims} exceeds {MAX_GRID_CELLS} cells")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))


class Mask:
    """Boolean mask over a grid; the True cells are the voxels.

    ``flat_index[v]`` is the row-major grid position of voxel v, and
    ``voxel_of_cell`` maps grid positions back to voxel ids (-1 outside).
    """

    def __init__(self, shape: GridShape, inside: np.ndarray):
        inside = np.ascontiguousarray(inside, dtype=bool)
        if inside.shape != tuple(shape.dims):
            raise ValueError(f"mask shape {inside.shape} != grid shape {shape.dims}")
        if not inside.any():
            raise ValueError("mask has no inside cells")
        self.shape = shape
        self.inside = inside
        self.flat_index = np.flatnonzero(inside.ravel())
        self.n_voxels = int(self.flat_index.size)
        voxel_of_cell = np.full(shape.n_cells, -1, dtype=np.int64)
        voxel_of_cell[self.flat_index] = np.arange(self.n_voxels)
        self.voxel_of_cell = voxel_of_cell

    @classmethod
    def full(cls, dims) -> "Mask":
        shape = dims if isinstance(dims, GridShape) else GridShape(tuple(dims))
        return cls(shape, np.ones(shape.dims, dtype=bool))

    def coordinates(self) -> np.ndarray:
        """(p, ndim) integer grid coordinates of each voxel."""
        return np.stack(np.unravel_index(self.flat_index, self.shape.dims), axis=1)

    def __repr__(self):
        return f"Mask(shape={self.shape.dims}, n_voxels={self.n_voxels})"


class ImageStack:
    """p voxels x n samples of finite feature values on a masked lattice."""

    def __init__(self, mask: Mask, data: np.ndarray):
        data = np.asarray(data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError(f"data must be 2D (p, n), got shape {data.shape}")
        if data.shape[0] != mask.n_voxels:
            raise ValueError(
                f"data has {data.shape[0]} rows but mask has {mask.n_voxels} voxels"
            )
        if data.shape[1] < 1:
            raise ValueError("need at least one sample column")
        if not np.isfinite(data).all():
            raise ValueError("data contains non-finite values")
        self.mask = mask
        self.data = data

    @property
    def n_voxels(self) -> int:
        return self.mask.n_voxels

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"ImageStack(p={self.n_voxels}, n={self.n_samples})"


class Topology:
    """Undirected voxel adjacency as a canonical (m, 2) edge array, i < j."""

    def __init__(self, n_voxels: int, edges: np.ndarray, validate: bool = True):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if validate and edges.size:
            if edges.min() < 0 or edges.max() >= n_voxels:
                raise ValueError("edge endpoint out of range")
            if (edges[:, 0] >= edges[:, 1]).any():
                raise ValueError("edges must satisfy i < j (no self-loops)")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if len(edges) > 1 and (np.diff(edges, axis=0) == 0).all(axis=1).any():
                raise ValueError("duplicate edges")
        self.n_voxels = int(n_voxels)
        self.edges = edges

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __repr__(self):
        return f"Topology(n_voxels={self.n_voxels}, n_edges={self.n_edges})"


def build_lattice_topology(mask: Mask, connectivity: str = "faces") -> Topology:
    """Face-adjacency graph of the inside cells (4-connectivity in 2D, 6 in 3D).

    Edges pair voxels adjacent along exactly one axis; output is sorted by
    (i, j) and identical for identical inputs.
    """
    if connectivity != "faces":
        raise ValueError(f"unsupported connectivity {connectivity!r}")
    inside = mask.inside
    voxel = mask.voxel_of_cell.reshape(mask.shape.dims)
    ndim = inside.ndim
    parts = []
    for axis in range(ndim):
        lo = [slice(None)] * ndim
        hi = [slice(None)] * ndim
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        both = inside[tuple(lo)] & inside[tuple(hi)]
        if both.any():
            # row-major voxel ids grow with the flat index, so lo < hi already
            parts.append(
                np.stack([voxel[tuple(lo)][both], voxel[tuple(hi)][both]], axis=1)
            )
    if parts:
        edges = np.concatenate(parts, axis=0)
        edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return Topology(mask.n_voxels, edges, validate=False)


def connected_component_count(topology: Topology) -> int:
    """Number of connected components; isolated voxels count as components."""
    p = topology.n_voxels
    if topology.n_edges == 0:
        return p
    e = topology.edges
    adj = coo_matrix(
        (np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(p, p)
    )
    n_comp, _ = _cs_connected_components(adj, directed=False)
    return int(n_comp)
