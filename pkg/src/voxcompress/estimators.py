"""Scikit-learn style transformers over the lattice clusterers and the sparse
random projection.

These follow the usual feature-agglomeration convention: X is
(n_samples, n_features) with one feature per voxel of the mask, ``fit`` learns
the grouping, ``transform`` maps samples to the k compressed components, and
``inverse_transform`` embeds compressed samples back into voxel space.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .agglomeration import recursive_nn_cluster
from .compression import MODES, CompressionModel
from .lattice import GridShape, ImageStack, Mask, build_lattice_topology
from .linkage import LINKAGE_KINDS, agglomerative, rand_single_linkage
from .projection import make_projection, project


def as_mask(mask) -> Mask:
    """Accept a Mask, a GridShape, or a dims tuple (meaning a full mask)."""
    if isinstance(mask, Mask):
        return mask
    if isinstance(mask, GridShape):
        return Mask.full(mask)
    return Mask.full(GridShape(tuple(mask)))


def _validate_samples(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected 2D (n_samples, n_features), got shape {X.shape}")
    if not np.isfinite(X).all():
        raise ValueError("X contains non-finite values")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"X has {X.shape[1]} features, expected {n_features}")
    return X


class BaseLatticeAgglomeration(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing for the lattice clusterers."""

    def __init__(self, n_clusters=2, mask=None, scaling="mean"):
        self.n_clusters = n_clusters
        self.mask = mask
        self.scaling = scaling

    def _cluster(self, stack, topology):
        raise NotImplementedError

    def fit(self, X, y=None):
        if self.mask is None:
            raise ValueError("mask (or a grid shape) is required")
        if self.scaling not in MODES:
            raise ValueError(f"scaling must be one of {MODES}")
        mask = as_mask(self.mask)
        X = _validate_samples(X, mask.n_voxels)
        stack = ImageStack(mask, X.T)
        topology = build_lattice_topology(mask)
        self.labels_ = self._cluster(stack, topology)
        self.model_ = CompressionModel(
            self.labels_, int(self.n_clusters), mode=self.scaling
        )
        self.n_features_in_ = mask.n_voxels
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        X = _validate_samples(X, self.n_features_in_)
        return self.model_.reduce(X.T).T

    def inverse_transform(self, Z):
        check_is_fitted(self, "model_")
        Z = np.asarray(Z, dtype=np.float64)
        return self.model_.expand(Z.T).T


class RecursiveNNAgglomeration(BaseLatticeAgglomeration):
    """Feature agglomeration by recursive nearest-neighbor merging.

    Linear-time in the voxel count and free of percolation: no giant cluster,
    no singletons (unless the cluster budget forces them on the first round).
    """

    def _cluster(self, stack, topology):
        result = recursive_nn_cluster(stack, topology, int(self.n_clusters))
        self.n_iterations_ = result.n_iterations
        self.cluster_counts_ = result.cluster_counts
        return result.labels


class GraphAgglomeration(BaseLatticeAgglomeration):
    """Connectivity-constrained bottom-up linkage (single/average/complete/ward)."""

    def __init__(self, n_clusters=2, mask=None, scaling="mean", linkage="ward"):
        super().__init__(n_clusters=n_clusters, mask=mask, scaling=scaling)
        self.linkage = linkage

    def _cluster(self, stack, topology):
        if self.linkage not in LINKAGE_KINDS:
            raise ValueError(f"linkage must be one of {LINKAGE_KINDS}")
        return agglomerative(stack, topology, int(self.n_clusters), self.linkage)


class RandomTreeAgglomeration(BaseLatticeAgglomeration):
    """Minimum-spanning-tree splitting by random singleton-free edge deletion."""

    def __init__(self, n_clusters=2, mask=None, scaling="mean", random_state=0):
        super().__init__(n_clusters=n_clusters, mask=mask, scaling=scaling)
        self.random_state = random_state

    def _cluster(self, stack, topology):
        return rand_single_linkage(
            stack, topology, int(self.n_clusters), int(self.random_state)
        )


class SparseSignProjection(BaseEstimator, TransformerMixin):
    """Very sparse +/- sign random projection to n_components dimensions."""

    def __init__(self, n_components=100, random_state=0):
        self.n_components = n_components
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _validate_samples(X)
        self.n_features_in_ = X.shape[1]
        self.projection_ = make_projection(
            self.n_features_in_, int(self.n_components), int(self.random_state)
        )
        return self

    def transform(self, X):
        check_is_fitted(self, "projection_")
        X = _validate_samples(X, self.n_features_in_)
        return project(self.projection_, X.T).T
