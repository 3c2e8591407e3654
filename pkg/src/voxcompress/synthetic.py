"""Synthetic volumes: smooth Gaussian random fields plus white noise, and a
subject x condition stack for the denoising experiment.

One voxel is one millimeter here, so a smoothing FWHM given in mm is applied
directly in voxel units. Smoothing uses separable Gaussian convolution with
the kernel truncated at 4 sigma and zero padding at the edges (no wrap), and
each smoothed sample is renormalized to unit empirical variance so the noise
std reads as a noise-to-signal knob.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .lattice import GridShape, ImageStack, Mask

FWHM_TO_SIGMA = 1.0 / math.sqrt(8.0 * math.log(2.0))

# amplitude of the per-subject smooth field relative to the white noise; kept
# below the unit condition-signal amplitude so between-subject variance is
# noise-dominated while between-condition variance is signal-dominated
SUBJECT_FIELD_SCALE = 0.5


@dataclass(frozen=True)
class SmoothFieldSpec:
    shape: GridShape
    n_samples: int
    fwhm: float = 8.0
    noise_sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.fwhm < 0 or self.noise_sigma < 0:
            raise ValueError("fwhm and noise_sigma must be >= 0")


@dataclass
class SignalNoiseStack:
    signal: ImageStack
    noise: ImageStack
    combined: ImageStack


@dataclass
class SubjectConditionStack:
    """Maps laid out subject-major: column(s, c) = s * n_conditions + c."""

    stack: ImageStack
    n_subjects: int
    n_conditions: int

    def column(self, subject: int, condition: int) -> int:
        return subject * self.n_conditions + condition


def _smooth_unit_fields(rng, n: int, dims, fwhm: float) -> np.ndarray:
    """n white fields, smoothed and standardized to zero mean / unit variance
    per field (smoothing shifts power to low frequencies, so without the
    centering the renormalized per-field mean would wander far from 0)."""
    fields = rng.standard_normal((n, *dims))
    if fwhm > 0:
        sigma = fwhm * FWHM_TO_SIGMA
        for i in range(n):
            fields[i] = gaussian_filter(
                fields[i], sigma=sigma, mode="constant", cval=0.0, truncate=4.0
            )
    for i in range(n):
        fields[i] -= fields[i].mean()
        std = fields[i].std()
        if std > 0:
            fields[i] /= std
    return fields


def _to_stack(mask: Mask, fields: np.ndarray) -> ImageStack:
    data = fields.reshape(fields.shape[0], -1)[:, mask.flat_index].T
    return ImageStack(mask, data)


def smooth_random_field(spec: SmoothFieldSpec) -> SignalNoiseStack:
    """Signal + noise stacks over the full grid, deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    mask = Mask.full(spec.shape)
    signal = _smooth_unit_fields(rng, spec.n_samples, spec.shape.dims, spec.fwhm)
    noise = spec.noise_sigma * rng.standard_normal((spec.n_samples, *spec.shape.dims))
    signal_stack = _to_stack(mask, signal)
    noise_stack = _to_stack(mask, noise)
    combined = ImageStack(mask, signal_stack.data + noise_stack.data)
    return SignalNoiseStack(signal_stack, noise_stack, combined)


def subject_condition_stack(shape: GridShape, n_subjects: int, n_conditions: int,
                            fwhm: float = 8.0, subject_sigma: float = 1.0,
                            seed: int = 0) -> SubjectConditionStack:
    """S x C activation-style maps: shared smooth condition signals plus
    subject-specific smooth fields and white noise, both scaled by
    ``subject_sigma``.

    map(s, c) = signal_c + subject_sigma * (0.5 * field_s + noise_sc)
    """
    if n_subjects < 1 or n_conditions < 1:
        raise ValueError("need at least one subject and one condition")
    if subject_sigma < 0:
        raise ValueError("subject_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    mask = Mask.full(shape)
    p = mask.n_voxels
    cond = _to_stack(mask, _smooth_unit_fields(rng, n_conditions, shape.dims, fwhm))
    subj = _to_stack(mask, _smooth_unit_fields(rng, n_subjects, shape.dims, fwhm))
    data = np.empty((p, n_subjects * n_conditions))
    for s in range(n_subjects):
        for c in range(n_conditions):
            eps = rng.standard_normal(p)
            data[:, s * n_conditions + c] = cond.data[:, c] + subject_sigma * (
                SUBJECT_FIELD_SCALE * subj.data[:, s] + eps
            )
    return SubjectConditionStack(ImageStack(mask, data), n_subjects, n_conditions)


def variance_ratio(stack: SubjectConditionStack, data: np.ndarray | None = None
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Per-voxel (between-condition variance, between-subject variance).

    Between-condition variance is the across-condition variance within each
    subject, averaged over subjects; between-subject variance symmetrically.
    Pass ``data`` to evaluate a transformed copy of the maps (same layout).
    """
    if data is None:
        data = stack.stack.data
    p = data.shape[0]
    cube = data.reshape(p, stack.n_subjects, stack.n_conditions)
    between_condition = cube.var(axis=2).mean(axis=1)
    between_subject = cube.var(axis=1).mean(axis=1)
    return between_condition, between_subject
