"""Stereo-to-quad up-mix dial, rendering, and rear-to-front metering.

31 dial positions span three regions: stereo-image narrowing down to
dual mono (5 positions), ambient relocation from the fronts to the
rears (16 positions, the first being the untouched stereo mix), and
rear ambient boost up to +20 dB (10 positions).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .audio_io import QUAD, AudioBuffer
from .loudness import integrated_loudness, normalize_to

NARROWING_A = (0.5, 0.57, 0.66, 0.76, 0.87)
RELOCATION_GA_DB = (
    0.0, -1.5, -3.0, -5.0, -7.5, -10.5, -14.0, -18.0,
    -23.0, -28.0, -34.0, -41.0, -49.0, -59.0, -76.0, -96.0,
)
BOOST_BA_DB = (1.0, 3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, 17.0, 20.0)

NUM_DIAL_POSITIONS = len(NARROWING_A) + len(RELOCATION_GA_DB) + len(BOOST_BA_DB)
STEREO_REFERENCE_DIAL = len(NARROWING_A)  # g_a = 0 dB: unprocessed stereo


@dataclass(frozen=True)
class DialSetting:
    """One of the 31 up-mix positions; param is the region coefficient
    (cross-mix a, front ambient gain in dB, or rear boost in dB)."""

    index: int
    region: str
    param: float

    @classmethod
    def from_index(cls, index: int) -> "DialSetting":
        if not 0 <= index < NUM_DIAL_POSITIONS:
            raise ValueError(f"dial index {index} outside 0..{NUM_DIAL_POSITIONS - 1}")
        if index < 5:
            return cls(index, "narrowing", NARROWING_A[index])
        if index < 21:
            return cls(index, "relocation", RELOCATION_GA_DB[index - 5])
        return cls(index, "boost", BOOST_BA_DB[index - 21])


def all_dials() -> list[DialSetting]:
    return [DialSetting.from_index(i) for i in range(NUM_DIAL_POSITIONS)]


@dataclass
class QuadRender:
    """4-channel render plus its metering and normalization metadata."""

    audio: AudioBuffer
    rfr_db: float
    dial: DialSetting
    loudness_lufs: float | None = None
    norm_gain_db: float = 0.0


def render(
    x: AudioBuffer, primary: AudioBuffer, ambient: AudioBuffer, dial: DialSetting
) -> QuadRender:
    """Mix the front/rear loudspeaker feeds for one dial position.

    narrowing:  fronts cross-mixed from the input stereo, silent rears;
    relocation: fronts keep the primary plus attenuated ambient, the
                amplitude complement of the ambient goes to the rears;
    boost:      primary-only fronts, amplified ambient rears.
    """
    for buf in (x, primary, ambient):
        if buf.channels != 2:
            raise ValueError("stereo x/primary/ambient buffers required")
        if buf.num_samples != x.num_samples or buf.sample_rate != x.sample_rate:
            raise ValueError("x, primary, ambient must share length and rate")
    x_l, x_r = x.samples
    p_l, p_r = primary.samples
    a_l, a_r = ambient.samples
    if dial.region == "narrowing":
        a = dial.param
        fl = a * x_l + (1.0 - a) * x_r
        fr = (1.0 - a) * x_l + a * x_r
        sl = np.zeros_like(fl)
        sr = np.zeros_like(fl)
    elif dial.region == "relocation":
        g = 10.0 ** (dial.param / 20.0)
        fl = p_l + g * a_l
        fr = p_r + g * a_r
        sl = (1.0 - g) * a_l
        sr = (1.0 - g) * a_r
    else:
        b = 10.0 ** (dial.param / 20.0)
        fl, fr = p_l, p_r
        sl = b * a_l
        sr = b * a_r
    audio = AudioBuffer(np.stack([fl, fr, sl, sr]), x.sample_rate, QUAD)
    return QuadRender(audio=audio, rfr_db=rfr(audio), dial=dial)


def rfr(quad: AudioBuffer) -> float:
    """Rear-to-front energy ratio in dB; -inf for silent rears, +inf
    for silent fronts under non-silent rears."""
    if quad.channel_layout != QUAD:
        raise ValueError("expected FL,FR,SL,SR channel order")
    front = float(np.sum(quad.samples[0] ** 2) + np.sum(quad.samples[1] ** 2))
    rear = float(np.sum(quad.samples[2] ** 2) + np.sum(quad.samples[3] ** 2))
    if rear == 0.0:
        return float("-inf")
    if front == 0.0:
        return float("inf")
    return 10.0 * np.log10(rear / front)


def normalize_render(quad: QuadRender, target_lufs: float) -> QuadRender:
    """Normalize a render to the target loudness; RFR is gain-invariant
    so the metered value carries over unchanged."""
    audio, gain_db = normalize_to(quad.audio, target_lufs)
    return replace(
        quad,
        audio=audio,
        loudness_lufs=integrated_loudness(audio),
        norm_gain_db=gain_db,
    )
