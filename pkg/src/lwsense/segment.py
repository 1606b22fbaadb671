"""Baseline estimation and amplitude-threshold gesture detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NoGesture, TooShort

BASELINE_WINDOW = 50  # first 0.5 s at 100 Hz
GUARD = 10
MIN_SEGMENT = 50
DEFAULT_FACTOR = 1.10


@dataclass(frozen=True)
class GestureBounds:
    start_idx: int
    end_idx: int
    baseline: float
    threshold: float
    baseline_suspect: bool = False

    @property
    def length(self) -> int:
        return self.end_idx - self.start_idx + 1

    def to_json(self) -> dict:
        return {
            "start_idx": self.start_idx,
            "end_idx": self.end_idx,
            "baseline": self.baseline,
            "threshold": self.threshold,
            "baseline_suspect": self.baseline_suspect,
        }


def _samples(trace) -> np.ndarray:
    return np.asarray(getattr(trace, "samples", trace), dtype=np.float64)


def estimate_baseline(trace, window_samples: int = BASELINE_WINDOW) -> float:
    x = _samples(trace)
    if not 1 <= window_samples <= len(x):
        raise InvalidParams(f"window_samples must be in [1, {len(x)}]")
    return float(np.mean(x[:window_samples]))


def detect_gesture(
    trace,
    factor: float = DEFAULT_FACTOR,
    window_samples: int = BASELINE_WINDOW,
    guard: int = GUARD,
    min_length: int = MIN_SEGMENT,
) -> GestureBounds:
    """Find where the trace first and last rises above ``factor * baseline``.

    Both crossings are widened by ``guard`` samples and clamped to the trace.
    Expects a denoised trace with a positive, gesture-free lead-in.
    """
    if not factor > 1:
        raise InvalidParams("factor must be > 1")
    x = _samples(trace)
    baseline = estimate_baseline(x, window_samples)
    threshold = baseline * factor
    above = np.flatnonzero(x > threshold)
    if above.size == 0:
        raise NoGesture(f"no sample exceeds threshold {threshold:.6g} V")
    last = len(x) - 1
    start = max(int(above[0]) - guard, 0)
    end = min(int(above[-1]) + guard, last)
    if end - start < min_length:
        raise TooShort(f"gesture span {end - start} samples < {min_length}")
    suspect = bool(baseline > np.median(x))
    return GestureBounds(start, end, baseline, threshold, suspect)


def trim(trace, bounds: GestureBounds) -> np.ndarray:
    return _samples(trace)[bounds.start_idx:bounds.end_idx + 1].copy()
