"""Preprocessing chain: denoise, detect, trim; plus featurizer construction."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace

import numpy as np

from .align import FEATURIZERS
from .classify import DEFAULT_K
from .errors import InvalidParams, NoGesture, TooShort
from .segment import DEFAULT_FACTOR, detect_gesture, trim
from .types import Trace
from .wavelet import DenoiseConfig, denoise_signal

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    denoise: bool = True
    wavelet: str = "db4"
    levels: int = 4
    rule: str = "rigrsure"
    mode: str = "soft"
    level_dependent: bool = True
    factor: float = DEFAULT_FACTOR
    align: str = "zeropad"
    standardize: bool = True
    k: int = DEFAULT_K

    def __post_init__(self):
        if self.align not in FEATURIZERS:
            raise InvalidParams(f"unknown align method {self.align!r}; choose from {sorted(FEATURIZERS)}")
        if self.k < 1:
            raise InvalidParams("k must be >= 1")
        if not self.factor > 1:
            raise InvalidParams("factor must be > 1")
        self.denoise_config()

    def denoise_config(self) -> DenoiseConfig:
        return DenoiseConfig(self.wavelet, self.levels, self.rule, self.mode, self.level_dependent)

    def featurizer(self):
        return FEATURIZERS[self.align](standardize=self.standardize)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, doc: dict) -> "PipelineConfig":
        return cls(**doc)

    def with_(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class Segment:
    values: np.ndarray
    start_idx: int
    end_idx: int
    detected: bool


def preprocess(trace: Trace | np.ndarray, config: PipelineConfig = PipelineConfig()) -> Segment:
    """Denoise (optionally), then cut out the gesture.

    A trace without a detectable gesture is kept whole rather than dropped,
    so every trace still receives a prediction.
    """
    x = np.asarray(getattr(trace, "samples", trace), dtype=np.float64)
    if config.denoise:
        x = denoise_signal(x, config.denoise_config())
    try:
        bounds = detect_gesture(x, config.factor)
    except (NoGesture, TooShort) as exc:
        log.warning("gesture detection failed (%s); using the whole trace", exc)
        return Segment(x.copy(), 0, len(x) - 1, False)
    return Segment(trim(x, bounds), bounds.start_idx, bounds.end_idx, True)


def preprocess_all(traces, config: PipelineConfig = PipelineConfig()) -> list[Segment]:
    return [preprocess(t, config) for t in traces]
