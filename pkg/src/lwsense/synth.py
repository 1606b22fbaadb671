"""Seeded synthetic reflected-intensity traces.

A trace is ``baseline + scale * envelope + flicker + white noise``. The gesture
amplitude follows the measured reflected power tables: each source is scaled
relative to infrared at 20 cm, so visible and far scenarios have lower SNR.

Seeding scheme: every random draw comes from
``numpy.random.SeedSequence(entropy=dataset_seed, spawn_key=key)`` with

* ``key = (0, subject_id)`` for the persistent subject profile,
* ``key = (1, subject_id, gesture_index, rep)`` for the 64-bit trace seed.

A trace seed alone then fixes duration/onset jitter, flicker phases and noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidParams, OutOfRange
from .types import (
    LABELS,
    SAMPLE_RATE,
    TRACE_LENGTH,
    Dataset,
    GestureLabel,
    Lighting,
    Source,
    Trace,
    TraceMeta,
)

# Reflected power at the detector (mW) from a flat hand, by distance (cm).
POWER_TABLE = {
    Source.INFRARED: {5: 1.09, 10: 0.415, 15: 0.248, 20: 0.193, 25: 0.065, 30: 0.053, 35: 0.048},
    Source.VISIBLE: {5: 0.0512, 10: 0.0412, 15: 0.0364, 20: 0.0337, 25: 0.0315, 30: 0.0296, 35: 0.0286},
}
REFERENCE_DISTANCE = 20.0

WINDOW_S = 6.0
MIN_ONSET_S = 1.0
HAND_DISTANCE_SD = 2.5  # cm, per repetition


def reflected_power(source, distance_cm: float) -> float:
    """Reflected power in mW, log-log interpolated between table nodes."""
    table = POWER_TABLE[Source(source)]
    nodes = sorted(table)
    if not nodes[0] <= distance_cm <= nodes[-1]:
        raise OutOfRange(f"distance {distance_cm} cm outside [{nodes[0]}, {nodes[-1]}]")
    if distance_cm in table:
        return table[distance_cm]
    hi = next(i for i, d in enumerate(nodes) if d > distance_cm)
    d0, d1 = nodes[hi - 1], nodes[hi]
    w = (math.log(distance_cm) - math.log(d0)) / (math.log(d1) - math.log(d0))
    return math.exp((1 - w) * math.log(table[d0]) + w * math.log(table[d1]))


def amplitude_scale(source, distance_cm: float) -> float:
    """Gesture amplitude relative to infrared at the reference distance."""
    # P(src, d) / P(src, 20) times the source's power ratio to infrared at 20 cm
    return reflected_power(source, distance_cm) / reflected_power(Source.INFRARED, REFERENCE_DISTANCE)


@dataclass(frozen=True)
class ScenarioSpec:
    source: Source = Source.INFRARED
    distance_cm: float = 20.0
    lighting: Lighting = Lighting.ON
    flicker_120_amp: float = 0.03
    flicker_60_amp: float = 0.015
    white_noise_sd: float = 0.02
    baseline_volts: float = 0.4
    peak_volts: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "lighting", Lighting(self.lighting))
        for name in ("flicker_120_amp", "flicker_60_amp", "white_noise_sd", "baseline_volts"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be >= 0")
        if not self.distance_cm > 0:
            raise InvalidParams("distance_cm must be > 0")
        if self.lighting is Lighting.OFF:
            object.__setattr__(self, "flicker_120_amp", 0.0)
            object.__setattr__(self, "flicker_60_amp", 0.0)

    @property
    def amplitude(self) -> float:
        return self.peak_volts * amplitude_scale(self.source, self.distance_cm)


# Lights on adds ambient background, mains flicker and extra shot noise.
_AMBIENT_ON = dict(flicker_120_amp=0.03, flicker_60_amp=0.015, white_noise_sd=0.02, baseline_volts=0.4)
_AMBIENT_OFF = dict(white_noise_sd=0.01, baseline_volts=0.25)

PRESETS = {
    "ir20": ScenarioSpec(Source.INFRARED, 20, Lighting.ON, **_AMBIENT_ON),
    "ir35": ScenarioSpec(Source.INFRARED, 35, Lighting.ON, **_AMBIENT_ON),
    "vis20": ScenarioSpec(Source.VISIBLE, 20, Lighting.ON, **_AMBIENT_ON),
    "vis35": ScenarioSpec(Source.VISIBLE, 35, Lighting.ON, **_AMBIENT_ON),
    "ir20-dark": ScenarioSpec(Source.INFRARED, 20, Lighting.OFF, **_AMBIENT_OFF),
    "vis20-dark": ScenarioSpec(Source.VISIBLE, 20, Lighting.OFF, **_AMBIENT_OFF),
}


def get_preset(name: str) -> ScenarioSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise InvalidParams(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


# -- envelopes -------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeParams:
    gesture: GestureLabel
    duration_s: float
    peak_volts: float
    subject_gain: float = 1.0
    onset_s: float = 1.5
    warp: float = 1.0  # subject time-warp exponent applied to the unit phase

    def __post_init__(self):
        object.__setattr__(self, "gesture", GestureLabel.parse(self.gesture))
        if self.duration_s < 0 or self.onset_s < 0:
            raise InvalidParams("duration and onset must be >= 0")
        if self.onset_s + self.duration_s > WINDOW_S + 1e-9:
            raise InvalidParams("onset_s + duration_s must be <= 6 s")
        if not self.peak_volts > 0 or not self.subject_gain > 0 or not self.warp > 0:
            raise InvalidParams("peak_volts, subject_gain and warp must be > 0")


def _bump(u, centre, width):
    return np.exp(-0.5 * ((u - centre) / width) ** 2)


def _edge_taper(u, edge=0.08):
    r = np.clip(np.minimum(u, 1.0 - u) / edge, 0.0, 1.0)
    return r * r * (3.0 - 2.0 * r)


def _ramp(u, lo, hi):
    r = np.clip((u - lo) / (hi - lo), 0.0, 1.0)
    return r * r * (3.0 - 2.0 * r)


def _shape_a(u):  # slow ramp-up, quick drop
    return _ramp(u, 0.0, 0.75) ** 1.3 * (1.0 - _ramp(u, 0.78, 1.0))


def _shape_b(u):  # quick rise, slow ramp-down
    return _ramp(u, 0.0, 0.2) * (1.0 - _ramp(u, 0.25, 1.0)) ** 1.3


def _shape_c(u):  # single bump
    return _bump(u, 0.5, 0.15)


def _shape_d(u):  # small asymmetric double ripple
    return _bump(u, 0.28, 0.08) + 0.6 * _bump(u, 0.6, 0.09)


def _shape_e(u):  # double bump
    return _bump(u, 0.3, 0.11) + _bump(u, 0.72, 0.11)


def _shape_f(u):  # triple bump
    return _bump(u, 0.18, 0.07) + 0.9 * _bump(u, 0.5, 0.07) + _bump(u, 0.82, 0.07)


def _shape_g(u):  # bump with plateau
    return _ramp(u, 0.05, 0.3) * (1.0 - _ramp(u, 0.7, 0.95))


def _shape_h(u):  # sawtooth pair
    first = _ramp(u, 0.02, 0.42) * (1.0 - _ramp(u, 0.42, 0.5))
    second = _ramp(u, 0.5, 0.9) * (1.0 - _ramp(u, 0.9, 0.98))
    return first + 0.85 * second


_SHAPES = {
    GestureLabel.A: _shape_a, GestureLabel.B: _shape_b, GestureLabel.C: _shape_c,
    GestureLabel.D: _shape_d, GestureLabel.E: _shape_e, GestureLabel.F: _shape_f,
    GestureLabel.G: _shape_g, GestureLabel.H: _shape_h,
}

# "d" is a faint sweep; its peak is a fraction of the others.
GESTURE_PEAK = {lab: 1.0 for lab in LABELS}
GESTURE_PEAK[GestureLabel.D] = 0.35


def gesture_envelope(params: EnvelopeParams, n: int = TRACE_LENGTH, fs: float = SAMPLE_RATE) -> np.ndarray:
    """Noise-free gesture bump; zero outside ``[onset, onset + duration]``."""
    if n != round(WINDOW_S * fs):
        raise InvalidParams(f"n must be round(6 * fs) = {round(WINDOW_S * fs)}, got {n}")
    out = np.zeros(n)
    if params.duration_s == 0:
        return out
    t = np.arange(n) / fs
    inside = (t >= params.onset_s) & (t <= params.onset_s + params.duration_s)
    if not inside.any():
        return out
    u = (t[inside] - params.onset_s) / params.duration_s
    shape = _SHAPES[params.gesture](u ** params.warp) * _edge_taper(u)
    top = shape.max()
    if top > 0:
        out[inside] = shape / top * params.peak_volts * params.subject_gain
    return out


# -- traces and datasets ---------------------------------------------------

@dataclass(frozen=True)
class SubjectProfile:
    """Persistent per-subject style: gain, tempo and a phase warp."""

    gain: float = 1.0
    duration_s: float = 2.5
    warp: float = 1.0

    @classmethod
    def draw(cls, rng: np.random.Generator) -> "SubjectProfile":
        return cls(
            gain=float(np.exp(rng.uniform(np.log(0.6), np.log(1.6)))),
            duration_s=float(rng.uniform(2.2, 2.8)),
            warp=float(rng.uniform(0.85, 1.15)),
        )


def subject_profile(dataset_seed: int, subject_id: int) -> SubjectProfile:
    ss = np.random.SeedSequence(entropy=dataset_seed, spawn_key=(0, subject_id))
    return SubjectProfile.draw(np.random.default_rng(ss))


def trace_seed(dataset_seed: int, subject_id: int, gesture: GestureLabel, rep: int) -> int:
    ss = np.random.SeedSequence(entropy=dataset_seed, spawn_key=(1, subject_id, gesture.index, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def hand_distance_scale(scenario: ScenarioSpec, rng: np.random.Generator) -> float:
    """Amplitude change from the hand landing a little nearer or farther."""
    lo, hi = min(POWER_TABLE[scenario.source]), max(POWER_TABLE[scenario.source])
    nominal = float(np.clip(scenario.distance_cm, lo, hi))
    actual = float(np.clip(nominal + rng.normal(0.0, HAND_DISTANCE_SD), lo, hi))
    return reflected_power(scenario.source, actual) / reflected_power(scenario.source, nominal)


def draw_envelope(label, scenario: ScenarioSpec, subject: SubjectProfile, rng: np.random.Generator) -> EnvelopeParams:
    label = GestureLabel.parse(label)
    duration = float(np.clip(subject.duration_s + rng.normal(0.0, 0.12), 2.0, 3.0))
    latest = WINDOW_S - duration - 0.5
    onset = float(rng.uniform(MIN_ONSET_S, max(MIN_ONSET_S, min(latest, 2.5))))
    peak = scenario.amplitude * GESTURE_PEAK[label] * hand_distance_scale(scenario, rng)
    return EnvelopeParams(
        gesture=label,
        duration_s=duration,
        peak_volts=peak,
        subject_gain=subject.gain * float(rng.uniform(0.8, 1.2)),
        onset_s=onset,
        warp=subject.warp * float(rng.uniform(0.95, 1.05)),
    )


def ambient_signal(scenario: ScenarioSpec, seed: int = 0, n: int = TRACE_LENGTH, fs: float = SAMPLE_RATE) -> np.ndarray:
    """Baseline plus sampled flicker plus white noise, with no gesture."""
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    phi120, phi60 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    return (
        scenario.baseline_volts
        + scenario.flicker_120_amp * np.sin(2 * np.pi * 120.0 * t + phi120)
        + scenario.flicker_60_amp * np.sin(2 * np.pi * 60.0 * t + phi60)
        + rng.normal(0.0, scenario.white_noise_sd, size=n)
    )


def synth_trace(
    label,
    scenario: ScenarioSpec,
    subject_id: int = 0,
    seed: int = 0,
    subject: SubjectProfile | None = None,
    rep: int = 0,
) -> Trace:
    label = GestureLabel.parse(label)
    subject = subject or SubjectProfile()
    rng = np.random.default_rng(seed)
    env = draw_envelope(label, scenario, subject, rng)
    n, fs = TRACE_LENGTH, SAMPLE_RATE
    t = np.arange(n) / fs
    phi120, phi60 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    samples = (
        scenario.baseline_volts
        + gesture_envelope(env, n, fs)
        + scenario.flicker_120_amp * np.sin(2 * np.pi * 120.0 * t + phi120)
        + scenario.flicker_60_amp * np.sin(2 * np.pi * 60.0 * t + phi60)
        + rng.normal(0.0, scenario.white_noise_sd, size=n)
    )
    meta = TraceMeta(
        subject_id=subject_id,
        gesture=label,
        distance_cm=scenario.distance_cm,
        source=scenario.source,
        lighting=scenario.lighting,
        seed=seed,
        rep=rep,
    )
    return Trace(samples, meta, fs)


@dataclass(frozen=True)
class DatasetSpec:
    scenario: ScenarioSpec = PRESETS["ir20"]
    subjects: int = 5
    reps: int = 24
    seed: int = 0

    def __post_init__(self):
        if self.subjects < 1 or self.reps < 1:
            raise InvalidParams("subjects and reps must be >= 1")


def synth_dataset(spec: DatasetSpec) -> Dataset:
    """Traces ordered by subject, then repetition, then gesture."""
    traces = []
    for subject_id in range(1, spec.subjects + 1):
        profile = subject_profile(spec.seed, subject_id)
        for rep in range(spec.reps):
            for label in LABELS:
                seed = trace_seed(spec.seed, subject_id, label, rep)
                traces.append(synth_trace(label, spec.scenario, subject_id, seed, profile, rep))
    return Dataset(tuple(traces), info={"seed": spec.seed})


def preset_dataset(name: str, seed: int = 0, subjects: int = 5, reps: int = 24, **overrides) -> Dataset:
    scenario = get_preset(name)
    if overrides:
        scenario = replace(scenario, **overrides)
    return synth_dataset(DatasetSpec(scenario, subjects, reps, seed))
