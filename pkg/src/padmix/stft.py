"""STFT analysis/synthesis used by the whole decomposition pipeline.

Defaults: 1024-sample frames, 50% overlap, sine window for both
analysis and synthesis, 2x zero-padded transforms (size 2048, 1025
non-negative-frequency bins). The sine window squared overlap-adds to
exactly 1 at 50% overlap, so analyze -> synthesize is an identity up
to float rounding. Energy bookkeeping follows the unnormalized FFT
convention: full-spectrum tile energy of a frame equals transform_size
times the windowed-frame sample energy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioBuffer

_COLA_TOL = 1e-9


@dataclass(frozen=True)
class StftConfig:
    frame_len: int = 1024
    hop: int = 512
    zero_pad_factor: int = 2

    def __post_init__(self):
        if self.frame_len <= 0 or self.hop <= 0 or self.zero_pad_factor < 1:
            raise ValueError("frame_len, hop, zero_pad_factor must be positive")
        if self.hop > self.frame_len:
            raise ValueError("hop larger than frame_len leaves gaps")
        self._check_cola()

    def _check_cola(self):
        # analysis window x synthesis window summed over all frame offsets
        # must be 1 at every sample; checked over one interior hop period.
        w2 = self.window() ** 2
        acc = np.zeros(self.hop)
        for start in range(0, self.frame_len, self.hop):
            seg = w2[start : start + self.hop]
            acc[: len(seg)] += seg
        if np.max(np.abs(acc - 1.0)) > _COLA_TOL:
            raise ValueError(
                f"sine window does not overlap-add to 1 at hop={self.hop} "
                f"(frame_len={self.frame_len})"
            )

    @property
    def transform_size(self) -> int:
        return self.frame_len * self.zero_pad_factor

    @property
    def bins(self) -> int:
        return self.transform_size // 2 + 1

    def window(self) -> np.ndarray:
        n = np.arange(self.frame_len)
        return np.sin(np.pi * (n + 0.5) / self.frame_len)

    def num_frames(self, n_samples: int) -> int:
        return -(-(n_samples + self.frame_len) // self.hop)


@dataclass
class StereoSpectrogram:
    """Complex STFT tiles of a stereo observation.

    ``left`` and ``right`` have shape (frames, bins).
    """

    left: np.ndarray
    right: np.ndarray
    config: StftConfig
    original_len: int
    sample_rate: int = field(default=48000)

    def __post_init__(self):
        if self.left.shape != self.right.shape or self.left.ndim != 2:
            raise ValueError("left/right tile grids must share a (T, K) shape")
        if self.left.shape[1] != self.config.bins:
            raise ValueError("bin count inconsistent with config")

    @property
    def frames(self) -> int:
        return self.left.shape[0]

    @property
    def bins(self) -> int:
        return self.left.shape[1]


def _frame(x: np.ndarray, cfg: StftConfig) -> np.ndarray:
    """Slice (channels, n) into windowed frames (channels, T, frame_len)."""
    n = x.shape[1]
    t = cfg.num_frames(n)
    total = (t - 1) * cfg.hop + cfg.frame_len
    padded = np.pad(x, ((0, 0), (cfg.frame_len, total - n - cfg.frame_len)))
    view = np.lib.stride_tricks.sliding_window_view(padded, cfg.frame_len, axis=1)
    return view[:, :: cfg.hop, :][:, :t, :]


def analyze(buf: AudioBuffer, cfg: StftConfig | None = None) -> StereoSpectrogram:
    """Transform a stereo buffer into its complex sub-band tiles.

    The signal is zero-padded by frame_len at the front (and as needed
    at the back) so every input sample is covered by full analysis
    windows; T = ceil((len + frame_len) / hop). Each windowed frame is
    zero-padded to transform_size before the FFT.
    """
    if cfg is None:
        cfg = StftConfig()
    if buf.channels != 2:
        raise ValueError("stereo input required")
    frames = _frame(buf.samples, cfg) * cfg.window()
    tiles = np.fft.rfft(frames, n=cfg.transform_size, axis=-1)
    return StereoSpectrogram(
        tiles[0], tiles[1], cfg, buf.num_samples, buf.sample_rate
    )


def synthesize(
    tiles: np.ndarray,
    cfg: StftConfig,
    out_len: int,
    sample_rate: int = 48000,
    channel_layout: tuple[str, ...] = (),
) -> AudioBuffer:
    """Weighted overlap-add resynthesis of (channels, T, K) tiles.

    Inverse-transforms each tile, keeps the frame_len head (the
    zero-pad tail is dropped), applies the synthesis sine window, and
    overlap-adds. The frame_len of leading edge padding added by
    analyze() is trimmed and the result truncated to out_len.
    """
    if isinstance(tiles, StereoSpectrogram):
        tiles = np.stack([tiles.left, tiles.right])
    tiles = np.asarray(tiles)
    if tiles.ndim == 2:
        tiles = tiles[None]
    if tiles.shape[-1] != cfg.bins:
        raise ValueError("tile bins inconsistent with config")
    n_ch, t = tiles.shape[0], tiles.shape[1]
    frames = np.fft.irfft(tiles, n=cfg.transform_size, axis=-1)[..., : cfg.frame_len]
    frames *= cfg.window()
    total = (t - 1) * cfg.hop + cfg.frame_len
    out = np.zeros((n_ch, total))
    for i in range(t):
        out[:, i * cfg.hop : i * cfg.hop + cfg.frame_len] += frames[:, i]
    samples = out[:, cfg.frame_len : cfg.frame_len + out_len]
    if samples.shape[1] < out_len:
        samples = np.pad(samples, ((0, 0), (0, out_len - samples.shape[1])))
    return AudioBuffer(samples, sample_rate, channel_layout)
