"""End-to-end wiring: audio in, decomposition, up-mix renders out."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import STEREO, AudioBuffer
from .center_extract import apply_ce
from .covariance import instantaneous_cov, smooth_time
from .loudness import integrated_loudness
from .pad import apply_pad
from .stft import StereoSpectrogram, StftConfig, analyze, synthesize
from .upmix import DialSetting, QuadRender, normalize_render, render

MATCH_INPUT = "match-input"


@dataclass(frozen=True)
class PipelineConfig:
    stft: StftConfig = field(default_factory=StftConfig)
    cov_smooth_frames: int = 5
    unmix_smooth_frames: int = 3
    mode: str = "pad"
    loudness_target: float | str = MATCH_INPUT

    def __post_init__(self):
        for n in (self.cov_smooth_frames, self.unmix_smooth_frames):
            if n < 1 or n % 2 == 0:
                raise ValueError("smoothing lengths must be odd and >= 1")
        if self.mode not in ("pad", "ce"):
            raise ValueError(f"unknown mode {self.mode!r}")


def _smoothed_cov(spec: StereoSpectrogram, cfg: PipelineConfig):
    return smooth_time(instantaneous_cov(spec), cfg.cov_smooth_frames)


def decompose_pad(
    buf: AudioBuffer, cfg: PipelineConfig | None = None
) -> tuple[AudioBuffer, AudioBuffer]:
    """Split a stereo buffer into (primary, ambient) stereo buffers."""
    cfg = cfg or PipelineConfig()
    spec = analyze(buf, cfg.stft)
    out = apply_pad(spec, _smoothed_cov(spec, cfg), cfg.unmix_smooth_frames)
    primary = synthesize(
        np.stack([out.p_l, out.p_r]), cfg.stft, buf.num_samples, buf.sample_rate, STEREO
    )
    ambient = synthesize(
        np.stack([out.a_l, out.a_r]), cfg.stft, buf.num_samples, buf.sample_rate, STEREO
    )
    return primary, ambient


def decompose_ce(
    buf: AudioBuffer, cfg: PipelineConfig | None = None
) -> tuple[AudioBuffer, AudioBuffer, AudioBuffer]:
    """Split a stereo buffer into mono (left, right, center) estimates."""
    cfg = cfg or PipelineConfig()
    spec = analyze(buf, cfg.stft)
    l_tiles, r_tiles, c_tiles = apply_ce(spec, _smoothed_cov(spec, cfg))
    mono = lambda tiles: synthesize(
        tiles[None], cfg.stft, buf.num_samples, buf.sample_rate, ("FL",)
    )
    return mono(l_tiles), mono(r_tiles), mono(c_tiles)


def upmix_render(
    buf: AudioBuffer,
    dial: DialSetting | int,
    cfg: PipelineConfig | None = None,
    components: tuple[AudioBuffer, AudioBuffer] | None = None,
) -> QuadRender:
    """Render one dial position, loudness-normalized per the config.

    `components` short-circuits the PAD stage with a precomputed
    (primary, ambient) pair so dial sweeps decompose only once.
    """
    cfg = cfg or PipelineConfig()
    if isinstance(dial, int):
        dial = DialSetting.from_index(dial)
    primary, ambient = components or decompose_pad(buf, cfg)
    quad = render(buf, primary, ambient, dial)
    target = cfg.loudness_target
    if target == MATCH_INPUT:
        target = integrated_loudness(buf)
    return normalize_render(quad, target)
