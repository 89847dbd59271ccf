"""Multichannel RIFF/WAVE reading and writing.

Supports PCM 16-bit, PCM 24-bit, and IEEE float 32-bit, interleaved,
1 to 6 channels. Amplitudes are exchanged as float64 at nominal full
scale +-1.0. Channel layouts are carried as ordered labels only (no
sidecar metadata, no channel-mask semantics beyond ordering).
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass, field

import numpy as np

STEREO = ("FL", "FR")
QUAD = ("FL", "FR", "SL", "SR")
SURROUND_5_1 = ("FL", "FR", "C", "LFE", "SL", "SR")

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE

_DEFAULT_LAYOUTS = {
    1: ("FL",),
    2: STEREO,
    3: ("FL", "FR", "C"),
    4: QUAD,
    5: ("FL", "FR", "C", "SL", "SR"),
    6: SURROUND_5_1,
}


class AudioFileError(Exception):
    """Unreadable, truncated, or unsupported audio file."""


class ClippingWarning(UserWarning):
    """Samples beyond +-1.0 were clamped while writing an integer format."""


@dataclass
class AudioBuffer:
    """Uniform-length multichannel audio at a fixed sample rate.

    ``samples`` has shape (channels, n) with float values at nominal
    full scale +-1.0. ``channel_layout`` is an ordered label tuple of
    the same length as the channel axis.
    """

    samples: np.ndarray
    sample_rate: int
    channel_layout: tuple[str, ...] = field(default=())

    def __post_init__(self):
        self.samples = np.atleast_2d(np.asarray(self.samples, dtype=np.float64))
        if self.samples.ndim != 2:
            raise ValueError("samples must be a (channels, n) array")
        if not (1 <= self.samples.shape[0] <= 6):
            raise ValueError(f"channel count {self.samples.shape[0]} outside 1..6")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be a positive integer")
        if not self.channel_layout:
            self.channel_layout = _DEFAULT_LAYOUTS[self.samples.shape[0]]
        if len(self.channel_layout) != self.samples.shape[0]:
            raise ValueError("layout length does not match channel count")

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration_s(self) -> float:
        return self.samples.shape[1] / self.sample_rate

    def channel(self, label: str) -> np.ndarray:
        return self.samples[self.channel_layout.index(label)]


def _parse_fmt(chunk: bytes) -> tuple[int, int, int, int]:
    if len(chunk) < 16:
        raise AudioFileError("fmt chunk truncated")
    tag, n_ch, rate, _, _, bits = struct.unpack_from("<HHIIHH", chunk, 0)
    if tag == _WAVE_FORMAT_EXTENSIBLE:
        if len(chunk) < 40:
            raise AudioFileError("extensible fmt chunk truncated")
        # sub-format GUID starts with the effective format tag
        tag = struct.unpack_from("<H", chunk, 24)[0]
    return tag, n_ch, rate, bits


def _decode(data: bytes, tag: int, bits: int, n_ch: int) -> np.ndarray:
    if tag == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        flat = np.frombuffer(data, dtype="<f4").astype(np.float64)
    elif tag == _WAVE_FORMAT_PCM and bits == 16:
        flat = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32768.0
    elif tag == _WAVE_FORMAT_PCM and bits == 24:
        raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, 3)
        vals = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int32) << 16)
        )
        vals = np.where(vals & 0x800000, vals - (1 << 24), vals)
        flat = vals.astype(np.float64) / 8388608.0
    else:
        raise AudioFileError(f"unsupported format: tag={tag} bits={bits}")
    if flat.size % n_ch:
        flat = flat[: flat.size - flat.size % n_ch]
    return flat.reshape(-1, n_ch).T


def read_wav(path) -> AudioBuffer:
    """Read a WAV file into an AudioBuffer at +-1.0 nominal full scale.

    Raises AudioFileError on anything that is not RIFF/WAVE carrying
    PCM16, PCM24, or IEEE float32 samples.
    """
    with open(path, "rb") as fh:
        header = fh.read(12)
        if len(header) < 12 or header[:4] != b"RIFF" or header[8:12] != b"WAVE":
            raise AudioFileError(f"{path}: not a RIFF/WAVE file")
        fmt = None
        data = None
        while True:
            head = fh.read(8)
            if len(head) < 8:
                break
            cid, size = struct.unpack("<4sI", head)
            body = fh.read(size)
            if len(body) < size and cid in (b"fmt ", b"data"):
                raise AudioFileError(f"{path}: truncated {cid.decode()} chunk")
            if size % 2:
                fh.read(1)  # chunk padding byte
            if cid == b"fmt ":
                fmt = _parse_fmt(body)
            elif cid == b"data":
                data = body
        if fmt is None or data is None:
            raise AudioFileError(f"{path}: missing fmt or data chunk")
    tag, n_ch, rate, bits = fmt
    if not (1 <= n_ch <= 6):
        raise AudioFileError(f"{path}: channel count {n_ch} outside 1..6")
    samples = _decode(data, tag, bits, n_ch)
    return AudioBuffer(samples, rate, _DEFAULT_LAYOUTS[n_ch])


def _encode(samples: np.ndarray, fmt: str) -> tuple[bytes, int, int, int]:
    interleaved = np.ascontiguousarray(samples.T)
    if fmt == "float32":
        return interleaved.astype("<f4").tobytes(), _WAVE_FORMAT_IEEE_FLOAT, 32, 0
    clipped = np.clip(interleaved, -1.0, 1.0)
    n_clipped = int(np.count_nonzero(np.abs(interleaved) > 1.0))
    if fmt == "pcm16":
        # symmetric scale, top code clamped: 32767/32768 survives a round trip
        ints = np.minimum(np.round(clipped * 32768.0), 32767.0).astype("<i2")
        return ints.tobytes(), _WAVE_FORMAT_PCM, 16, n_clipped
    if fmt == "pcm24":
        ints = np.minimum(np.round(clipped * 8388608.0), 8388607.0).astype(np.int32)
        raw = np.empty((ints.size, 3), dtype=np.uint8)
        raw[:, 0] = ints.ravel() & 0xFF
        raw[:, 1] = (ints.ravel() >> 8) & 0xFF
        raw[:, 2] = (ints.ravel() >> 16) & 0xFF
        return raw.tobytes(), _WAVE_FORMAT_PCM, 24, n_clipped
    raise ValueError(f"unknown sample format {fmt!r}")


def wav_bytes(buf: AudioBuffer, fmt: str = "float32") -> tuple[bytes, int]:
    """Serialize an AudioBuffer to complete WAV file bytes.

    Returns (bytes, clamped-sample count); integer formats clamp
    out-of-range amplitudes rather than erroring, because loudness
    normalization legitimately pushes peaks over full scale.
    """
    data, tag, bits, n_clipped = _encode(buf.samples, fmt)
    n_ch = buf.channels
    block_align = n_ch * bits // 8
    fmt_chunk = struct.pack(
        "<HHIIHH", tag, n_ch, buf.sample_rate,
        buf.sample_rate * block_align, block_align, bits,
    )
    pad = b"\x00" if len(data) % 2 else b""
    body = (
        b"WAVE"
        + b"fmt " + struct.pack("<I", len(fmt_chunk)) + fmt_chunk
        + b"data" + struct.pack("<I", len(data)) + data + pad
    )
    return b"RIFF" + struct.pack("<I", len(body)) + body, n_clipped


def write_wav(path, buf: AudioBuffer, fmt: str = "float32") -> int:
    """Write an AudioBuffer as WAV; returns the number of clamped samples
    (a ClippingWarning is issued when nonzero). float32 is lossless."""
    data, n_clipped = wav_bytes(buf, fmt)
    if n_clipped:
        warnings.warn(
            f"{path}: {n_clipped} samples beyond full scale clamped for {fmt}",
            ClippingWarning,
            stacklevel=2,
        )
    with open(path, "wb") as fh:
        fh.write(data)
    return n_clipped


def to_5_1(quad: AudioBuffer) -> AudioBuffer:
    """Map a quad FL,FR,SL,SR buffer to 5.1 with silent C and LFE."""
    if quad.channel_layout != QUAD:
        raise ValueError("expected FL,FR,SL,SR input")
    zeros = np.zeros_like(quad.samples[0])
    samples = np.stack([
        quad.samples[0], quad.samples[1], zeros, zeros.copy(),
        quad.samples[2], quad.samples[3],
    ])
    return AudioBuffer(samples, quad.sample_rate, SURROUND_5_1)
