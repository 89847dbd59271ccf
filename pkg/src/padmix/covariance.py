"""Per-tile observation covariance estimation and temporal smoothing.

Only three real numbers are kept per tile: the two channel energies
and the real part of the cross term. The imaginary part of the cross
term is discarded here and never used downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stft import StereoSpectrogram

# Relative Cauchy-Schwarz margin kept after clamping, protects the
# 2x2 inversions downstream from exactly singular matrices.
PSD_MARGIN = 1e-9
# Relative level of the per-frame energy floor for silent bins.
FLOOR_REL = 1e-12


@dataclass(frozen=True)
class BinCovariance:
    """2x2 real covariance summary of one time-frequency tile."""

    c_ll: float
    c_rr: float
    c_lr: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.c_ll, self.c_lr], [self.c_lr, self.c_rr]])


@dataclass
class CovarianceField:
    """(T, K) grids of the per-tile covariance entries."""

    c_ll: np.ndarray
    c_rr: np.ndarray
    c_lr: np.ndarray
    smoothing_len: int = 1

    def __post_init__(self):
        if not (self.c_ll.shape == self.c_rr.shape == self.c_lr.shape):
            raise ValueError("covariance grids must share one shape")

    @property
    def shape(self) -> tuple[int, int]:
        return self.c_ll.shape

    def at(self, t: int, k: int) -> BinCovariance:
        return BinCovariance(
            float(self.c_ll[t, k]), float(self.c_rr[t, k]), float(self.c_lr[t, k])
        )


def instantaneous_cov(spec: StereoSpectrogram) -> CovarianceField:
    """Single-frame covariance per tile: |X_L|^2, |X_R|^2, Re(conj(X_L) X_R)."""
    xl, xr = spec.left, spec.right
    return CovarianceField(
        c_ll=(xl.real**2 + xl.imag**2),
        c_rr=(xr.real**2 + xr.imag**2),
        c_lr=(xl.real * xr.real + xl.imag * xr.imag),
        smoothing_len=1,
    )


def sliding_mean(arr: np.ndarray, length: int, axis: int = 0) -> np.ndarray:
    """Centered sliding mean with truncated windows at the edges."""
    if length < 1 or length % 2 == 0:
        raise ValueError("smoothing length must be odd and >= 1")
    if length == 1:
        return arr.copy()
    arr = np.moveaxis(arr, axis, 0)
    t = arr.shape[0]
    half = length // 2
    csum = np.cumsum(arr, axis=0, dtype=np.float64)
    csum = np.concatenate([np.zeros((1,) + arr.shape[1:]), csum], axis=0)
    idx = np.arange(t)
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, t)
    out = (csum[hi] - csum[lo]) / (hi - lo).reshape((-1,) + (1,) * (arr.ndim - 1))
    return np.moveaxis(out, 0, axis)


def clamp_psd(field: CovarianceField) -> CovarianceField:
    """Scale |c_lr| down to sqrt(c_ll c_rr)(1 - margin) where Cauchy-Schwarz fails."""
    bound = np.sqrt(field.c_ll * field.c_rr) * (1.0 - PSD_MARGIN)
    c_lr = np.clip(field.c_lr, -bound, bound)
    return CovarianceField(field.c_ll, field.c_rr, c_lr, field.smoothing_len)


def smooth_time(field: CovarianceField, length: int = 5) -> CovarianceField:
    """Centered per-bin sliding mean over `length` frames (truncated at edges).

    The Cauchy-Schwarz clamp is re-applied afterwards: averaging the
    real parts can break the inequality through numerical noise only,
    but inversion downstream needs it to hold.
    """
    smoothed = CovarianceField(
        sliding_mean(field.c_ll, length),
        sliding_mean(field.c_rr, length),
        sliding_mean(field.c_lr, length),
        smoothing_len=length,
    )
    return clamp_psd(smoothed)


def regularize(field: CovarianceField) -> CovarianceField:
    """Floor silent-bin energies and enforce the PSD margin.

    The floor is 1e-12 of the frame's broadband energy (plus a tiny
    absolute term), keeping silent bins from producing 0/0 in the
    un-mixing solve while staying far below audible content.
    """
    frame_energy = np.sum(field.c_ll + field.c_rr, axis=1, keepdims=True)
    floor = FLOOR_REL * (frame_energy + 1e-30)
    return clamp_psd(
        CovarianceField(
            np.maximum(field.c_ll, floor),
            np.maximum(field.c_rr, floor),
            field.c_lr.copy(),
            field.smoothing_len,
        )
    )
