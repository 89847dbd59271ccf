import numpy as np
import pytest

from padmix import AudioBuffer


def sine_buf(freq, seconds=1.0, rate=48000, amp=1.0, channels=("both",)):
    """Stereo sine test buffer; channels selects 'left', 'right', 'both'."""
    t = np.arange(int(seconds * rate)) / rate
    tone = amp * np.sin(2 * np.pi * freq * t)
    left = tone if channels[0] in ("left", "both") else np.zeros_like(tone)
    right = tone if channels[0] in ("right", "both") else np.zeros_like(tone)
    return AudioBuffer(np.stack([left, right]), rate)


def noise_buf(seed, seconds=1.0, rate=48000, amp=0.25, channels=2):
    rng = np.random.default_rng(seed)
    samples = amp * rng.standard_normal((channels, int(seconds * rate)))
    return AudioBuffer(samples, rate)


@pytest.fixture
def stereo_noise():
    return noise_buf(seed=7734, seconds=1.0)
