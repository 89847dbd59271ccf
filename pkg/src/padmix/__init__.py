"""Primary-ambient decomposition and stereo-to-quad up-mixing toolkit."""

from .audio_io import QUAD, STEREO, SURROUND_5_1, AudioBuffer, read_wav, to_5_1, write_wav
from .center_extract import CeUnmix, ComponentEnergies, apply_ce, ce_unmix, component_energies
from .covariance import BinCovariance, CovarianceField, instantaneous_cov, regularize, smooth_time
from .loudness import LoudnessError, integrated_loudness, normalize_to
from .pad import (
    PadOutput,
    RotationAngle,
    UnmixPair,
    apply_pad,
    pad_unmix,
    rotate_cov,
    rotation_angle,
    smooth_unmix,
)
from .pipeline import MATCH_INPUT, PipelineConfig, decompose_ce, decompose_pad, upmix_render
from .stft import StereoSpectrogram, StftConfig, analyze, synthesize
from .upmix import DialSetting, QuadRender, all_dials, normalize_render, render, rfr

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer", "read_wav", "write_wav", "to_5_1", "STEREO", "QUAD", "SURROUND_5_1",
    "StftConfig", "StereoSpectrogram", "analyze", "synthesize",
    "BinCovariance", "CovarianceField", "instantaneous_cov", "smooth_time", "regularize",
    "ComponentEnergies", "CeUnmix", "component_energies", "ce_unmix", "apply_ce",
    "RotationAngle", "UnmixPair", "PadOutput", "rotation_angle", "rotate_cov",
    "pad_unmix", "smooth_unmix", "apply_pad",
    "integrated_loudness", "normalize_to", "LoudnessError",
    "DialSetting", "QuadRender", "render", "rfr", "normalize_render", "all_dials",
    "PipelineConfig", "MATCH_INPUT", "decompose_pad", "decompose_ce", "upmix_render",
]
