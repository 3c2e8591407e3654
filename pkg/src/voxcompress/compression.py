"""Turn a voxel labeling into a compression operator.

``mean`` mode stores per-cluster averages (the natural signal summary for
denoising); ``scaled`` mode multiplies each average by sqrt(cluster size),
which makes reduce an orthogonal projection in disguise: distances never
expand, so isometry ratios stay in (0, 1].
"""

from __future__ import annotations

import numpy as np

from .errors import DegeneratePair

MODES = ("mean", "scaled")


class CompressionModel:
    """Surjective labeling of p voxels into k clusters plus a scaling mode."""

    def __init__(self, labels: np.ndarray, n_clusters: int | None = None,
                 mode: str = "mean"):
        labels = np.asarray(labels, dtype=np.int64)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1D array")
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if n_clusters is None:
            n_clusters = int(labels.max()) + 1
        if labels.min() < 0 or labels.max() >= n_clusters:
            raise ValueError("labels out of range")
        sizes = np.bincount(labels, minlength=n_clusters)
        if (sizes == 0).any():
            raise ValueError("labels are not surjective onto [0, n_clusters)")
        self.labels = labels
        self.n_clusters = int(n_clusters)
        self.n_voxels = int(labels.size)
        self.sizes = sizes
        self.mode = mode

    def reduce(self, x: np.ndarray) -> np.ndarray:
        """Compress a p-vector (or the columns of a (p, n) matrix) to k values."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.n_voxels:
            raise ValueError(f"expected {self.n_voxels} voxels, got {x.shape[0]}")
        if x.ndim == 1:
            out = np.bincount(self.labels, weights=x, minlength=self.n_clusters)
            out /= self.sizes
        else:
            out = np.empty((self.n_clusters, x.shape[1]))
            for col in range(x.shape[1]):
                out[:, col] = np.bincount(
                    self.labels, weights=x[:, col], minlength=self.n_clusters
                )
            out /= self.sizes[:, None]
        if self.mode == "scaled":
            scale = np.sqrt(self.sizes)
            out = out * (scale if x.ndim == 1 else scale[:, None])
        return out

    def expand(self, z: np.ndarray) -> np.ndarray:
        """Broadcast cluster values back to voxel space (inverse of reduce on
        cluster-constant images; expand(reduce(x)) is the per-cluster mean map)."""
        z = np.asarray(z, dtype=np.float64)
        if z.shape[0] != self.n_clusters:
            raise ValueError(f"expected {self.n_clusters} clusters, got {z.shape[0]}")
        if self.mode == "scaled":
            scale = np.sqrt(self.sizes)
            z = z / (scale if z.ndim == 1 else scale[:, None])
        return z[self.labels]


def isometry_ratio(f, x1: np.ndarray, x2: np.ndarray) -> float:
    """eta = |f(x1) - f(x2)|^2 / |x1 - x2|^2 for any linear reducer f."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    denom = float(np.square(x1 - x2).sum())
    if denom == 0.0:
        raise DegeneratePair("x1 and x2 are identical, eta is undefined")
    diff = f(x1) - f(x2)
    return float(np.square(diff).sum()) / denom


def batch_isometry_ratios(original: np.ndarray, reduced: np.ndarray,
                          pairs: np.ndarray) -> tuple[np.ndarray, int]:
    """eta for many column pairs at once.

    original is (p, n), reduced is (k, n) (same columns through some reducer),
    pairs is (m, 2) column indices. Pairs with zero original distance are
    excluded; returns (etas, n_excluded).
    """
    a, b = pairs[:, 0], pairs[:, 1]
    denom = np.square(original[:, a] - original[:, b]).sum(axis=0)
    numer = np.square(reduced[:, a] - reduced[:, b]).sum(axis=0)
    keep = denom > 0
    return numer[keep] / denom[keep], int((~keep).sum())
