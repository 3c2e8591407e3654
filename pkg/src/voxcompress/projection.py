"""Very sparse sign random projections (expected density 1/sqrt(p)).

Entries are i.i.d.: +sqrt(s) with probability 1/(2s), -sqrt(s) with
probability 1/(2s), 0 otherwise, with s = sqrt(p), then scaled by 1/sqrt(k).
That makes E[|f(x)|^2] = |x|^2 with only ~k*sqrt(p) stored entries.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import sparse

# columns are generated in fixed-size blocks so the stream of uniforms (and
# hence the projection) is a pure function of (p, k, seed)
_COLUMN_BLOCK = 1024


class SparseProjection:
    """Immutable k x p sparse sign matrix; apply with :func:`project`."""

    def __init__(self, n_input: int, n_components: int, seed: int, matrix):
        self.n_input = n_input
        self.n_components = n_components
        self.seed = seed
        self.matrix = matrix

    @property
    def n_nonzeros(self) -> int:
        return int(self.matrix.nnz)

    def __repr__(self):
        return (f"SparseProjection(p={self.n_input}, k={self.n_components}, "
                f"nnz={self.n_nonzeros})")


def make_projection(p: int, k: int, seed: int) -> SparseProjection:
    """Draw the k x p sparse sign matrix; identical output for identical seeds."""
    if p < 1 or k < 1:
        raise ValueError(f"need p >= 1 and k >= 1, got p={p}, k={k}")
    s = math.sqrt(p)
    scale = math.sqrt(s) / math.sqrt(k)
    rng = np.random.default_rng(seed)
    block = max(1, min(_COLUMN_BLOCK, 4_000_000 // k))
    rows, cols, vals = [], [], []
    for start in range(0, p, block):
        width = min(block, p - start)
        u = rng.random((k, width))
        hit = u < 1.0 / s
        r, c = np.nonzero(hit)
        sign = np.where(u[r, c] < 0.5 / s, scale, -scale)
        rows.append(r)
        cols.append(c + start)
        vals.append(sign)
    matrix = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(k, p),
    )
    return SparseProjection(p, k, seed, matrix)


def project(proj: SparseProjection, x: np.ndarray) -> np.ndarray:
    """Apply the projection to a p-vector or to the columns of a (p, n) matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != proj.n_input:
        raise ValueError(f"expected length {proj.n_input}, got {x.shape[0]}")
    return proj.matrix @ x
