import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import minimax_threshold, sure_threshold, universal_threshold
from lwsense.errors import EmptyInput, InvalidParams, ShapeMismatch, TooShort
from lwsense.evaluate import peak_db_change
from lwsense.synth import ambient_signal, get_preset
from lwsense.wavelet import (
    DenoiseConfig,
    WaveletDecomposition,
    apply_threshold,
    denoise_signal,
    dwt_forward,
    dwt_inverse,
    estimate_noise_sigma,
    level_thresholds,
    threshold_value,
)

pywt = pytest.importorskip("pywt")


def test_haar_constant():
    d = dwt_forward([1, 1, 1, 1], "haar", 1)
    assert np.allclose(d.approx, [math.sqrt(2)] * 2, atol=1e-15)
    assert np.allclose(d.details[0], 0, atol=1e-15)
    assert np.allclose(dwt_inverse(d), [1, 1, 1, 1], atol=1e-15)


def test_haar_inverse_from_coefficients():
    d = WaveletDecomposition(np.array([math.sqrt(2)] * 2), (np.zeros(2),), "haar", 4)
    assert np.allclose(dwt_inverse(d), 1.0, atol=1e-15)


def test_zero_signal():
    d = dwt_forward(np.zeros(600))
    assert not d.approx.any() and not any(x.any() for x in d.details)
    assert not dwt_inverse(d).any()


@pytest.mark.parametrize("n", [600, 601, 64, 37])
@pytest.mark.parametrize("wav", ["db4", "haar"])
def test_matches_pywt(n, wav):
    x = np.random.default_rng(n).standard_normal(n)
    levels = 2 if n <= 64 else 4
    ours = dwt_forward(x, wav, levels)
    ref = pywt.wavedec(x, wav, mode="symmetric", level=levels)
    assert np.allclose(ours.approx, ref[0], rtol=0, atol=1e-12)
    for mine, theirs in zip(ours.details, reversed(ref[1:])):
        assert np.allclose(mine, theirs, rtol=0, atol=1e-12)
    assert np.allclose(dwt_inverse(ours), pywt.waverec(ref, wav, mode="symmetric")[:n], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(16, 700), st.integers(0, 2**31), st.floats(1e-6, 1e6))
def test_perfect_reconstruction(n, seed, scale):
    x = np.random.default_rng(seed).standard_normal(n) * scale
    rec = dwt_inverse(dwt_forward(x, "db4", 2))
    assert np.max(np.abs(rec - x)) <= 1e-8 * (1 + np.max(np.abs(x)))


def test_forward_errors():
    with pytest.raises(TooShort):
        dwt_forward(np.ones(15), "db4", 4)
    with pytest.raises(InvalidParams):
        dwt_forward(np.ones(600), "sym9", 4)
    d = dwt_forward(np.ones(600))
    bad = dataclasses.replace(d, details=(d.details[0][:-1],) + d.details[1:])
    with pytest.raises(ShapeMismatch):
        dwt_inverse(bad)


def test_noise_sigma():
    assert estimate_noise_sigma(np.full(10, 0.6745)) == pytest.approx(1.0)
    assert estimate_noise_sigma(np.zeros(5)) == 0
    x = np.random.default_rng(0).normal(0, 2, 100_000)
    assert abs(estimate_noise_sigma(x) - 2) < 0.2
    with pytest.raises(EmptyInput):
        estimate_noise_sigma([])


def test_threshold_examples():
    assert threshold_value(np.zeros(600), "sqtwolog", 0.05, 600) == pytest.approx(0.17884, abs=1e-5)
    assert threshold_value(np.zeros(600), "minimaxi", 1.0, 600) == pytest.approx(2.0816, abs=1e-4)
    assert threshold_value(np.zeros(40), "rigrsure", 1.0) == 0.0
    assert threshold_value(np.ones(32), "minimaxi", 1.0) == 0.0


@pytest.mark.parametrize("n", [33, 64, 1000])
@pytest.mark.parametrize("sigma", [0.01, 1.0, 3.7])
def test_fixed_forms_against_mpmath(n, sigma):
    assert threshold_value([0.0], "sqtwolog", sigma, n) == pytest.approx(universal_threshold(sigma, n), rel=1e-13)
    assert threshold_value([0.0], "minimaxi", sigma, n) == pytest.approx(minimax_threshold(sigma, n), rel=1e-13)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-20, 20, allow_subnormal=False), min_size=1, max_size=40))
def test_rigrsure_matches_bruteforce(x):
    assert threshold_value(x, "rigrsure", 1.0) == sure_threshold(x)


def test_heursure_branches():
    rng = np.random.default_rng(1)
    noise = rng.standard_normal(256)
    assert threshold_value(noise, "heursure", 1.0) == pytest.approx(math.sqrt(2 * math.log(256)))
    sparse = noise.copy()
    sparse[:20] += 30
    lam = threshold_value(sparse, "heursure", 1.0)
    assert lam == pytest.approx(min(threshold_value(sparse, "rigrsure", 1.0), math.sqrt(2 * math.log(256))))


def test_apply_threshold_examples():
    assert apply_threshold([5.0, -1.5], 2, "soft").tolist() == [3.0, 0.0]
    assert apply_threshold([5.0, 1.5], 2, "hard").tolist() == [5.0, 0.0]
    x = np.random.default_rng(2).standard_normal(50)
    for mode in ("soft", "hard"):
        assert np.array_equal(apply_threshold(x, 0.0, mode), x)
    with pytest.raises(InvalidParams):
        apply_threshold(x, 1, "medium")


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0, 1e3))
def test_soft_is_contraction(x, y, lam):
    sx, sy = apply_threshold([x, y], lam, "soft")
    assert abs(sx) <= abs(x)
    assert abs(sx - sy) <= abs(x - y) + 1e-12


def test_config_validation():
    with pytest.raises(InvalidParams):
        DenoiseConfig(levels=7)
    with pytest.raises(InvalidParams):
        DenoiseConfig(rule="bayes")
    cfg = DenoiseConfig()
    assert len(level_thresholds(dwt_forward(np.random.default_rng(0).standard_normal(600)), cfg)) == 4


def test_denoise_zero_and_smooth():
    assert not denoise_signal(np.zeros(600)).any()
    t = np.arange(600) / 100
    smooth = 0.4 + 0.8 * np.exp(-((t - 3) / 0.6) ** 2)
    out = denoise_signal(smooth)
    assert np.sqrt(np.mean((out - smooth) ** 2)) <= 0.05 * np.sqrt(np.mean(smooth**2))


def test_denoise_kills_aliased_flicker():
    sc = dataclasses.replace(get_preset("ir20"), flicker_60_amp=0.0)
    x = ambient_signal(sc, seed=4)
    assert peak_db_change(x, denoise_signal(x), 20.0) >= 10


@pytest.mark.parametrize("rule", ["rigrsure", "heursure", "sqtwolog", "minimaxi"])
@pytest.mark.parametrize("mode", ["soft", "hard"])
def test_denoise_reduces_error(rule, mode):
    t = np.arange(600) / 100
    clean = np.sin(2 * np.pi * 0.5 * t) + 0.6 * np.exp(-((t - 2) / 0.3) ** 2)
    power = np.sqrt(np.mean(clean**2))
    cfg = DenoiseConfig(rule=rule, mode=mode)
    wins = 0
    trials = 40
    for seed in range(trials):
        rng = np.random.default_rng(seed)
        snr_db = rng.uniform(0, 20)
        noisy = clean + rng.normal(0, power / 10 ** (snr_db / 20), 600)
        wins += np.sqrt(np.mean((denoise_signal(noisy, cfg) - clean) ** 2)) <= np.sqrt(np.mean((noisy - clean) ** 2))
    assert wins >= 0.95 * trials
