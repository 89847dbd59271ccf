"""MMSE center-channel extraction.

Solves the three component energies from the observation covariance
under the independence assumptions of the left/right/center model,
then forms the closed-form 3x2 un-mixing matrix applied per tile.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covariance import BinCovariance, CovarianceField, regularize
from .stft import StereoSpectrogram

# Determinant underflow below this falls back to pass-through (no center).
DET_EPS = 1e-30


@dataclass(frozen=True)
class ComponentEnergies:
    e_l: float
    e_c: float
    e_r: float


@dataclass(frozen=True)
class CeUnmix:
    """3x2 matrix mapping (x_L, x_R) to (l, r, c) estimates."""

    g: np.ndarray

    def __post_init__(self):
        if self.g.shape != (3, 2):
            raise ValueError("CE un-mixing matrix must be 3x2")


def component_energies(cov: BinCovariance) -> ComponentEnergies:
    """Left/center/right energies from one covariance summary.

    The center energy is the (real) cross term; out-of-phase content
    (negative cross term) has no meaning in the model and clamps the
    center to zero, with channel energies clamped non-negative.
    """
    e_c = max(cov.c_lr, 0.0)
    return ComponentEnergies(
        e_l=max(cov.c_ll - e_c, 0.0),
        e_c=e_c,
        e_r=max(cov.c_rr - e_c, 0.0),
    )


def _ce_gains(c_ll, c_rr, c_lr):
    """Vectorized closed-form CE gains; returns the six matrix entries.

    Works on scalars or broadcastable arrays. Negative cross terms are
    clamped to zero first (consistent with a zero center energy), and
    a vanishing determinant falls back to identity pass-through.
    """
    c = np.maximum(c_lr, 0.0)
    det = c_ll * c_rr - c * c
    ok = np.abs(det) >= DET_EPS
    safe = np.where(ok, det, 1.0)
    g11 = np.where(ok, (c_ll * c_rr - c_rr * c) / safe, 1.0)
    g12 = np.where(ok, (c * c - c * c_ll) / safe, 0.0)
    g21 = np.where(ok, (c * c - c * c_rr) / safe, 0.0)
    g22 = np.where(ok, (c_ll * c_rr - c_ll * c) / safe, 1.0)
    g31 = np.where(ok, (c_rr * c - c * c) / safe, 0.0)
    g32 = np.where(ok, (c_ll * c - c * c) / safe, 0.0)
    return g11, g12, g21, g22, g31, g32


def ce_unmix(cov: BinCovariance) -> CeUnmix:
    """Closed-form MMSE un-mixing matrix for one (regularized) tile."""
    g11, g12, g21, g22, g31, g32 = _ce_gains(cov.c_ll, cov.c_rr, cov.c_lr)
    return CeUnmix(np.array([[g11, g12], [g21, g22], [g31, g32]], dtype=np.float64))


def apply_ce(
    spec: StereoSpectrogram, field: CovarianceField
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Separate tiles into left, right, and center estimate grids.

    The covariance field is regularized (floors + PSD clamp) before
    the solve; by construction l + c = x_L and r + c = x_R.
    """
    if field.shape != (spec.frames, spec.bins):
        raise ValueError("covariance field does not match the spectrogram")
    field = regularize(field)
    g11, g12, g21, g22, g31, g32 = _ce_gains(field.c_ll, field.c_rr, field.c_lr)
    xl, xr = spec.left, spec.right
    return g11 * xl + g12 * xr, g21 * xl + g22 * xr, g31 * xl + g32 * xr
