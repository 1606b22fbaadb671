import dataclasses
import math

import numpy as np
import pytest

from oracles import loglog_interp
from lwsense.errors import InvalidParams, OutOfRange
from lwsense.evaluate import power_spectrum
from lwsense.synth import (
    POWER_TABLE,
    PRESETS,
    DatasetSpec,
    EnvelopeParams,
    amplitude_scale,
    gesture_envelope,
    get_preset,
    reflected_power,
    synth_dataset,
    synth_trace,
)
from lwsense.types import LABELS, GestureLabel, Source, validate_trace


def test_power_table_values():
    assert reflected_power(Source.INFRARED, 20) == 0.193
    assert reflected_power(Source.VISIBLE, 35) == 0.0286


def test_power_interpolation_matches_independent_loglog():
    got = reflected_power("infrared", 22.5)
    assert got == pytest.approx(loglog_interp(22.5, 20, 0.193, 25, 0.065), rel=1e-12)


def test_power_out_of_range():
    with pytest.raises(OutOfRange):
        reflected_power("infrared", 4.9)
    with pytest.raises(OutOfRange):
        reflected_power("visible", 36)


@pytest.mark.parametrize("source", list(Source))
def test_amplitude_scale_strictly_decreasing(source):
    d = np.linspace(5, 35, 121)
    s = [amplitude_scale(source, x) for x in d]
    assert all(a > b for a, b in zip(s, s[1:]))
    assert sorted(POWER_TABLE[source]) == [5, 10, 15, 20, 25, 30, 35]


def test_zero_duration_envelope():
    p = EnvelopeParams(GestureLabel.C, duration_s=0.0, peak_volts=0.3)
    assert not gesture_envelope(p).any()


def test_single_push_bump():
    p = EnvelopeParams(GestureLabel.C, duration_s=2.0, peak_volts=0.3, onset_s=1.5)
    env = gesture_envelope(p)
    assert 150 <= int(np.argmax(env)) <= 350
    assert env.max() == pytest.approx(0.3)
    assert np.array_equal(env, gesture_envelope(p))
    # one local maximum
    inner = env[151:349]
    peaks = np.flatnonzero((inner > np.roll(inner, 1)) & (inner >= np.roll(inner, -1)))[1:-1]
    assert len(peaks) <= 1


def test_envelope_window_checked():
    with pytest.raises(InvalidParams):
        EnvelopeParams(GestureLabel.A, duration_s=5.5, peak_volts=1, onset_s=1.0)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_trace_invariants(name):
    sc = get_preset(name)
    for i, lab in enumerate(LABELS):
        t = synth_trace(lab, sc, subject_id=1, seed=100 + i)
        assert validate_trace(t).ok


def test_trace_determinism():
    sc = get_preset("ir20")
    a, b = synth_trace("e", sc, 2, 42), synth_trace("e", sc, 2, 42)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert synth_trace("e", sc, 2, 43).samples.tobytes() != a.samples.tobytes()


def test_dark_trace_has_no_flicker_peaks():
    sc = get_preset("ir20-dark")
    assert sc.flicker_120_amp == 0 and sc.flicker_60_amp == 0
    x = synth_trace("a", sc, 1, 5).samples[:100]
    f, mag = power_spectrum(x)
    floor = np.median(mag[1:])
    for hz in (20, 40):
        i = int(np.argmin(abs(f - hz)))
        assert mag[i] < 4 * floor


def test_lit_trace_shows_20hz():
    sc = dataclasses.replace(get_preset("ir20"), flicker_120_amp=0.3, white_noise_sd=0.005)
    x = synth_trace("a", sc, 1, 5).samples[:100]
    f, mag = power_spectrum(x)
    assert f[1 + np.argmax(mag[1:])] == pytest.approx(20.0)


def test_pre_gesture_mean_is_baseline():
    sc = dataclasses.replace(get_preset("ir20"), baseline_volts=0.2)
    tol = 3 * sc.white_noise_sd / math.sqrt(50)
    misses = sum(abs(synth_trace(lab, sc, 1, s).samples[:50].mean() - 0.2) > tol
                 for s in range(40) for lab in "ab")
    assert misses <= 1  # 3-sigma band: expect ~0.2 of 80


def test_dataset_counts_and_order():
    ds = synth_dataset(DatasetSpec(get_preset("vis20"), subjects=1, reps=1, seed=0))
    assert [t.meta.gesture for t in ds.traces] == list(LABELS)
    full = synth_dataset(DatasetSpec(subjects=5, reps=24))
    assert len(full) == 960
    assert sorted(set(full.subjects)) == [1, 2, 3, 4, 5]


def test_dataset_determinism(tmp_path):
    from lwsense.types import write_dataset

    spec = DatasetSpec(get_preset("ir35"), subjects=2, reps=2, seed=11)
    m1 = write_dataset(synth_dataset(spec), tmp_path / "a")[0].read_bytes()
    m2 = write_dataset(synth_dataset(spec), tmp_path / "b")[0].read_bytes()
    assert m1 == m2
