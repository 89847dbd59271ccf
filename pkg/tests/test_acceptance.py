"""Acceptance suite: one test per criterion, tolerances pinned.

Run with `pytest tests/test_acceptance.py -v -s` to see one pass line
per criterion; any assertion failure is the corresponding fail line.
"""

import time

import numpy as np
import pytest

from padmix import (
    AudioBuffer,
    BinCovariance,
    DialSetting,
    analyze,
    apply_pad,
    decompose_pad,
    instantaneous_cov,
    integrated_loudness,
    normalize_render,
    pad_unmix,
    render,
    rfr,
    rotate_cov,
    rotation_angle,
    smooth_time,
    synthesize,
    upmix_render,
)
from padmix.covariance import regularize
from padmix.pad import direct_energy
from padmix.upmix import NUM_DIAL_POSITIONS

from .conftest import noise_buf, sine_buf
from .oracles import bs1770_integrated, random_covariances, rotation_pipeline_unmix

RATE = 48000


def _passed(msg):
    print(f"\nACCEPTANCE PASS: {msg}")


@pytest.fixture(scope="module")
def cov_samples():
    # 10k valid covariances: energies over 12 decades, coherence to the
    # clamp margin; shared between the algebra criteria (2) and (3)
    return random_covariances(10000, seed=20260810)


@pytest.fixture(scope="module")
def corpus():
    """Three deterministic stereo items with distinct scene structure."""
    rng = np.random.default_rng(7001)
    n = 6 * RATE
    items = {}

    s = rng.standard_normal(n)
    noise = 0.35 * rng.standard_normal((2, n))
    items["panned_broadband"] = np.stack([np.cos(0.5) * s, np.sin(0.5) * s]) + noise

    t = np.arange(n) / RATE
    tones = sum(
        amp * np.sin(2 * np.pi * f * t + ph)
        for amp, f, ph in ((0.4, 220, 0.1), (0.25, 541, 1.0), (0.2, 1333, 2.2),
                           (0.15, 3211, 0.5), (0.1, 7919, 1.7))
    )
    items["tonal_mix"] = np.stack([0.9 * tones, 0.55 * tones]) + 0.15 * rng.standard_normal((2, n))

    envelope = np.clip(np.sin(2 * np.pi * 2.3 * t) + 0.4, 0.0, None)
    voiced = envelope * rng.standard_normal(n) * 0.5
    items["speech_like"] = np.stack([voiced, voiced]) + 0.2 * rng.standard_normal((2, n))

    out = {}
    for name, x in items.items():
        x = 0.5 * x / np.max(np.abs(x))
        out[name] = AudioBuffer(x, RATE)
    return out


def test_criterion_1_stft_round_trip():
    buf = noise_buf(seed=10001, seconds=10.0, amp=0.25)
    t0 = time.perf_counter()
    spec = analyze(buf)
    back = synthesize(spec, spec.config, buf.num_samples)
    elapsed = time.perf_counter() - t0
    err = np.sum((back.samples - buf.samples) ** 2) / np.sum(buf.samples**2)
    assert err < 1e-10
    assert elapsed < 1.0
    _passed(f"1 STFT round trip: rel err {err:.2e} < 1e-10 in {elapsed:.2f}s")


def test_criterion_2_closed_form_equals_rotation_pipeline(cov_samples):
    c_ll, c_rr, c_lr = cov_samples
    worst_a = worst_p = worst_ident = 0.0
    eye = np.eye(2)
    for a, b, c in zip(c_ll, c_rr, c_lr):
        pair = pad_unmix(BinCovariance(a, b, c))
        g_a_ref, g_p_ref = rotation_pipeline_unmix(a, b, c)
        worst_a = max(worst_a, np.max(np.abs(pair.g_a - g_a_ref)))
        worst_p = max(worst_p, np.max(np.abs(pair.g_p - g_p_ref)))
        worst_ident = max(
            worst_ident,
            np.max(np.abs(pair.g_p + pair.g_a - eye)),
            np.max(np.abs(g_p_ref + g_a_ref - eye)),
        )
    assert worst_a < 1e-10
    assert worst_p < 1e-10
    assert worst_ident < 1e-12
    _passed(
        "2 closed form == rotation pipeline over 10k covariances: "
        f"max|dG_A| {worst_a:.2e} < 1e-10, G_P = I - G_A to {worst_ident:.2e}"
    )


def test_criterion_3_rotation_correctness(cov_samples):
    c_ll, c_rr, c_lr = cov_samples
    worst_diag = worst_cross = 0.0
    for a, b, c in zip(c_ll, c_rr, c_lr):
        cov = BinCovariance(a, b, c)
        rot = rotate_cov(cov, rotation_angle(cov))
        mean_diag = 0.5 * (rot.c_ll + rot.c_rr)
        worst_diag = max(worst_diag, abs(rot.c_ll - rot.c_rr) / mean_diag)
        half_k = 0.5 * direct_energy(a, b, c)
        worst_cross = max(worst_cross, abs(rot.c_lr - half_k) / max(half_k, 1e-300))
    assert worst_diag < 1e-9
    assert worst_cross < 1e-9
    _passed(
        f"3 rotation: diagonal equal to {worst_diag:.2e} rel, "
        f"cross-term = k/2 to {worst_cross:.2e} rel (both < 1e-9)"
    )


def test_criterion_4_lossless_decomposition(corpus):
    worst = -np.inf
    for name, buf in corpus.items():
        primary, ambient = decompose_pad(buf)
        resid = primary.samples + ambient.samples - buf.samples
        err_db = 10 * np.log10(np.sum(resid**2) / np.sum(buf.samples**2))
        worst = max(worst, err_db)
        assert err_db < -90.0, name
    _passed(f"4 lossless decomposition on {len(corpus)} items: worst {worst:.1f} dB < -90")


def test_criterion_5_synthetic_scene_recovery():
    n = 10 * RATE
    worst_a = worst_b = 0.0
    for par_db in (0.0, 6.0, 12.0):
        for phi in (np.pi / 8, np.pi / 6, np.pi / 4, np.pi / 3):
            rng = np.random.default_rng(1234)
            s = rng.standard_normal(n)
            sigma = np.sqrt(10.0 ** (-par_db / 10.0) / 2.0)
            ambient_truth = sigma * rng.standard_normal((2, n))
            x = np.stack([np.cos(phi) * s, np.sin(phi) * s]) + ambient_truth
            spec = analyze(AudioBuffer(x, RATE))
            field = smooth_time(instantaneous_cov(spec), 5)
            out = apply_pad(spec, field, 3)

            # (a) primary inter-channel energy ratio vs cot^2(phi)
            ratio_db = 10 * np.log10(
                np.sum(np.abs(out.p_l) ** 2) / np.sum(np.abs(out.p_r) ** 2)
            )
            err_a = ratio_db - 10 * np.log10(1.0 / np.tan(phi) ** 2)
            worst_a = max(worst_a, abs(err_a))
            assert abs(err_a) <= 1.5, f"phi={phi:.3f} PAR={par_db}"

            # (b) model ambient-energy estimate vs retained ground truth
            if par_db in (0.0, 6.0):
                reg = regularize(field)
                k = direct_energy(reg.c_ll, reg.c_rr, reg.c_lr)
                estimated = np.sum(np.maximum(reg.c_ll + reg.c_rr - k, 0.0))
                truth_spec = analyze(AudioBuffer(ambient_truth, RATE))
                truth = np.sum(
                    np.abs(truth_spec.left) ** 2 + np.abs(truth_spec.right) ** 2
                )
                err_b = 10 * np.log10(estimated / truth)
                worst_b = max(worst_b, abs(err_b))
                assert abs(err_b) <= 1.5, f"phi={phi:.3f} PAR={par_db}"
    _passed(
        "5 synthetic-scene recovery (4 angles x 3 PARs): "
        f"worst direction err {worst_a:.2f} dB, worst ambient-energy err "
        f"{worst_b:.2f} dB (both <= 1.5)"
    )


def test_criterion_6_dial_table_conformance(corpus):
    for name, buf in corpus.items():
        primary, ambient = decompose_pad(buf)

        ref = render(buf, primary, ambient, DialSetting.from_index(5))
        resid = ref.audio.samples[:2] - buf.samples
        rel = np.sum(resid**2) / np.sum(buf.samples**2)
        assert rel < 1e-9, name
        assert not np.any(ref.audio.samples[2:]), name

        values = [
            render(buf, primary, ambient, DialSetting.from_index(i)).rfr_db
            for i in range(5, NUM_DIAL_POSITIONS)
        ]
        finite = values[1:]
        assert values[0] == float("-inf")
        assert np.all(np.diff(finite) >= -1e-12), name

        mono = render(buf, primary, ambient, DialSetting.from_index(0))
        mid = 0.5 * (buf.samples[0] + buf.samples[1])
        assert np.allclose(mono.audio.samples[0], mid, atol=1e-12), name
        assert np.allclose(mono.audio.samples[1], mid, atol=1e-12), name
    _passed(
        "6 dial conformance on all items: dial 5 = input (silent rears), "
        "RFR non-decreasing over dials 5..30, dial 0 dual mono"
    )


def test_criterion_7_loudness(corpus):
    sine = sine_buf(997.0, seconds=10.0)
    got = integrated_loudness(sine)
    want = bs1770_integrated(sine.samples, RATE, [1.0, 1.0])
    assert got == pytest.approx(want, abs=0.02)
    assert got == pytest.approx(-0.69, abs=0.1)

    buf = corpus["panned_broadband"]
    primary, ambient = decompose_pad(buf)
    target = integrated_loudness(buf)
    measured = [
        normalize_render(render(buf, primary, ambient, DialSetting.from_index(i)), target).loudness_lufs
        for i in range(NUM_DIAL_POSITIONS)
    ]
    spread = max(measured) - min(measured)
    assert spread <= 0.2
    _passed(
        f"7 loudness: 997 Hz stereo sine {got:.3f} LUFS (oracle {want:.3f}, "
        f"target -0.69 +- 0.1); 31 normalized renders within {spread:.3f} LU"
    )


def test_criterion_8_rfr_units():
    fronts = noise_buf(seed=10008, seconds=1.0, amp=0.2).samples
    quad = lambda rears: AudioBuffer(np.vstack([fronts, rears]), RATE)
    assert rfr(quad(np.zeros_like(fronts))) == float("-inf")
    half = rfr(quad(0.5 * fronts))
    assert half == pytest.approx(-6.02, abs=0.01)
    scaled = AudioBuffer(np.vstack([fronts, 0.5 * fronts]) * 0.03, RATE)
    assert rfr(scaled) == pytest.approx(half, abs=1e-9)
    _passed(
        f"8 RFR units: silent rears -inf, half-amplitude rears {half:.3f} dB "
        "(-6.02 +- 0.01), gain-invariant"
    )


def test_criterion_9_performance_budget():
    rng = np.random.default_rng(10009)
    n = 30 * RATE
    s = 0.3 * rng.standard_normal(n)
    x = AudioBuffer(
        np.stack([0.8 * s, 0.6 * s]) + 0.1 * rng.standard_normal((2, n)), RATE
    )
    t0 = time.perf_counter()
    primary, ambient = decompose_pad(x)
    upmix_render(x, 18, components=(primary, ambient))
    elapsed = time.perf_counter() - t0
    assert elapsed < 3.0
    _passed(f"9 performance: 30 s item PAD + one render in {elapsed:.2f}s < 3s")
