"""Primary-ambient decomposition by scene rotation + center extraction.

A per-tile rotation re-pans the dominant source to the center of the
stereo scene, where the MMSE center extractor can pull it out as the
primary component; the counter-rotation puts it back. The whole
composition collapses to a closed-form pair of 2x2 matrices applied
directly to the observation, with the ambient matrix symmetric and
the primary matrix its complement to identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .center_extract import DET_EPS
from .covariance import BinCovariance, CovarianceField, regularize, sliding_mean
from .stft import StereoSpectrogram, StftConfig


@dataclass(frozen=True)
class RotationAngle:
    """Scene rotation in radians, in (-pi/2, pi/2]."""

    theta: float


@dataclass(frozen=True)
class UnmixPair:
    """Per-tile ambient matrix g_a and primary matrix g_p = I - g_a."""

    g_a: np.ndarray
    g_p: np.ndarray


@dataclass
class UnmixGrid:
    """(T, K) grids of the symmetric ambient-matrix entries."""

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.a11.shape

    def pair_at(self, t: int, k: int) -> UnmixPair:
        g_a = np.array(
            [[self.a11[t, k], self.a12[t, k]], [self.a12[t, k], self.a22[t, k]]]
        )
        return UnmixPair(g_a, np.eye(2) - g_a)


@dataclass
class PadOutput:
    """Ambient and primary tile grids; a + p reconstructs the input."""

    a_l: np.ndarray
    a_r: np.ndarray
    p_l: np.ndarray
    p_r: np.ndarray
    config: StftConfig
    original_len: int
    sample_rate: int


def rotation_angle(cov: BinCovariance) -> RotationAngle:
    """Angle that centers the dominant source: half the two-argument
    arctangent of (c_ll - c_rr) over 2 c_lr. Zero for silent tiles."""
    return RotationAngle(0.5 * np.arctan2(cov.c_ll - cov.c_rr, 2.0 * cov.c_lr))


def rotation_matrix(angle: RotationAngle) -> np.ndarray:
    c, s = np.cos(angle.theta), np.sin(angle.theta)
    return np.array([[c, -s], [s, c]])


def rotate_cov(cov: BinCovariance, angle: RotationAngle) -> BinCovariance:
    """Congruence of the covariance by the rotation matrix (trace preserved)."""
    c, s = np.cos(angle.theta), np.sin(angle.theta)
    a, b, e = cov.c_ll, cov.c_rr, cov.c_lr
    return BinCovariance(
        c_ll=c * c * a - 2.0 * c * s * e + s * s * b,
        c_rr=s * s * a + 2.0 * c * s * e + c * c * b,
        c_lr=c * s * (a - b) + (c * c - s * s) * e,
    )


def direct_energy(c_ll, c_rr, c_lr):
    """Total direct-component energy k = sqrt((c_ll - c_rr)^2 + 4 c_lr^2)."""
    return np.hypot(c_ll - c_rr, 2.0 * c_lr)


def _pad_gains(c_ll, c_rr, c_lr):
    """Vectorized closed-form ambient-matrix entries (a11, a12, a22).

    The common factor (k - c_ll - c_rr) / (2 (c_lr^2 - c_ll c_rr))
    is evaluated as the algebraically identical 2 / (k + c_ll + c_rr),
    which cancels neither for extreme channel ratios nor near full
    coherence. Determinant underflow (only reachable for essentially
    silent tiles once the covariance is regularized) falls back to the
    all-ambient pass-through g_a = I.
    """
    k = direct_energy(c_ll, c_rr, c_lr)
    det = c_ll * c_rr - c_lr * c_lr
    ok = np.abs(det) >= DET_EPS
    factor = 2.0 / np.where(ok, k + c_ll + c_rr, 1.0)
    a11 = np.where(ok, c_rr * factor, 1.0)
    a12 = np.where(ok, -c_lr * factor, 0.0)
    a22 = np.where(ok, c_ll * factor, 1.0)
    return a11, a12, a22


def pad_unmix(cov: BinCovariance) -> UnmixPair:
    """Closed-form ambient/primary matrices for one regularized tile."""
    a11, a12, a22 = _pad_gains(cov.c_ll, cov.c_rr, cov.c_lr)
    g_a = np.array([[a11, a12], [a12, a22]], dtype=np.float64)
    return UnmixPair(g_a, np.eye(2) - g_a)


def pad_unmix_field(field: CovarianceField) -> UnmixGrid:
    """Closed-form ambient matrices for every tile of a covariance field."""
    a11, a12, a22 = _pad_gains(field.c_ll, field.c_rr, field.c_lr)
    return UnmixGrid(a11, a12, a22)


def smooth_unmix(grid: UnmixGrid, length: int = 3) -> UnmixGrid:
    """Centered per-bin sliding mean of the ambient matrices over time.

    Only g_a is averaged; g_p is always re-derived as I - g_a, which
    keeps the complementarity identity exact and equals smoothing both
    matrices with the same linear mean.
    """
    return UnmixGrid(
        sliding_mean(grid.a11, length),
        sliding_mean(grid.a12, length),
        sliding_mean(grid.a22, length),
    )


def apply_pad(
    spec: StereoSpectrogram,
    field: CovarianceField,
    smooth_frames: int = 3,
) -> PadOutput:
    """Decompose a spectrogram into ambient and primary tile grids.

    The field is regularized, the closed-form ambient matrices are
    smoothed over `smooth_frames`, and the primary output is taken as
    x - a, realizing g_p = I - g_a exactly so the decomposition is
    lossless by construction.
    """
    if field.shape != (spec.frames, spec.bins):
        raise ValueError("covariance field does not match the spectrogram")
    grid = smooth_unmix(pad_unmix_field(regularize(field)), smooth_frames)
    xl, xr = spec.left, spec.right
    a_l = grid.a11 * xl + grid.a12 * xr
    a_r = grid.a12 * xl + grid.a22 * xr
    return PadOutput(
        a_l=a_l,
        a_r=a_r,
        p_l=xl - a_l,
        p_r=xr - a_r,
        config=spec.config,
        original_len=spec.original_len,
        sample_rate=spec.sample_rate,
    )
