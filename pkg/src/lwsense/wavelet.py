"""Discrete wavelet transform and threshold denoising.

The transform uses half-sample symmetric extension, producing
``(N + F - 1) // 2`` coefficients per level for a length-``N`` input and a
length-``F`` filter. Per-level lengths are stored so the inverse can trim
back to the exact original length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EmptyInput, InvalidParams, ShapeMismatch, TooShort
from .types import TRACE_LENGTH, Trace

_DB4_LO = np.array([
    -0.010597401785069032, 0.0328830116668852, 0.030841381835560764,
    -0.18703481171909309, -0.027983769416859854, 0.6308807679298589,
    0.7148465705529157, 0.2303778133088965,
])
_HAAR_LO = np.array([1.0, 1.0]) / math.sqrt(2.0)

RULES = ("rigrsure", "heursure", "sqtwolog", "minimaxi")
MODES = ("soft", "hard")
MAD_SCALE = 0.6745


@dataclass(frozen=True)
class Wavelet:
    name: str
    dec_lo: np.ndarray
    dec_hi: np.ndarray
    rec_lo: np.ndarray
    rec_hi: np.ndarray

    @property
    def length(self) -> int:
        return len(self.dec_lo)


def _orthogonal(name: str, dec_lo: np.ndarray) -> Wavelet:
    rec_lo = dec_lo[::-1].copy()
    rec_hi = dec_lo * (-1.0) ** np.arange(len(dec_lo))
    return Wavelet(name, dec_lo, rec_hi[::-1].copy(), rec_lo, rec_hi)


WAVELETS = {"haar": _orthogonal("haar", _HAAR_LO), "db4": _orthogonal("db4", _DB4_LO)}


def get_wavelet(wavelet_id: str) -> Wavelet:
    try:
        return WAVELETS[wavelet_id]
    except KeyError:
        raise InvalidParams(f"unknown wavelet {wavelet_id!r}; choose from {sorted(WAVELETS)}") from None


@dataclass(frozen=True, eq=False)
class WaveletDecomposition:
    approx: np.ndarray
    details: tuple[np.ndarray, ...]  # level 1 (finest) first
    wavelet_id: str
    original_length: int
    lengths: tuple[int, ...] = ()  # input length at each level, finest first
    boundary_mode: str = "symmetric"

    @property
    def levels(self) -> int:
        return len(self.details)

    def with_details(self, details) -> "WaveletDecomposition":
        return replace(self, details=tuple(np.asarray(d, dtype=np.float64) for d in details))


def _analysis(x: np.ndarray, w: Wavelet):
    F = w.length
    ext = np.pad(x, F - 1, mode="symmetric")
    n_out = (len(x) + F - 1) // 2
    lo = np.convolve(ext, w.dec_lo)[F:F + 2 * n_out:2]
    hi = np.convolve(ext, w.dec_hi)[F:F + 2 * n_out:2]
    return lo, hi


def _synthesis(a: np.ndarray, d: np.ndarray, w: Wavelet) -> np.ndarray:
    F = w.length
    ua = np.zeros(2 * len(a))
    ua[::2] = a
    ud = np.zeros(2 * len(d))
    ud[::2] = d
    out = np.convolve(ua, w.rec_lo) + np.convolve(ud, w.rec_hi)
    return out[F - 2:F - 2 + 2 * len(a) - F + 2]


def max_levels(n: int) -> int:
    """Deepest level allowed for an ``n``-sample input (``2**levels <= n``)."""
    return int(math.floor(math.log2(n))) if n >= 2 else 0


def dwt_forward(signal, wavelet_id: str = "db4", levels: int = 4) -> WaveletDecomposition:
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ShapeMismatch("signal must be one-dimensional")
    if levels < 1:
        raise InvalidParams("levels must be >= 1")
    if len(x) < 2**levels:
        raise TooShort(f"{len(x)} samples cannot support {levels} levels (need >= {2**levels})")
    if not np.all(np.isfinite(x)):
        raise InvalidParams("signal contains non-finite samples")
    w = get_wavelet(wavelet_id)
    details, lengths = [], []
    approx = x
    for _ in range(levels):
        lengths.append(len(approx))
        approx, d = _analysis(approx, w)
        details.append(d)
    return WaveletDecomposition(approx, tuple(details), wavelet_id, len(x), tuple(lengths))


def _expected_count(n: int, F: int) -> int:
    return (n + F - 1) // 2


def dwt_inverse(decomp: WaveletDecomposition) -> np.ndarray:
    w = get_wavelet(decomp.wavelet_id)
    F = w.length
    lengths = decomp.lengths
    if not lengths:
        # reconstruct the per-level input lengths from the original length
        n, lengths = decomp.original_length, []
        for _ in decomp.details:
            lengths.append(n)
            n = _expected_count(n, F)
    if len(lengths) != len(decomp.details) or lengths[0] != decomp.original_length:
        raise ShapeMismatch("level lengths inconsistent with decomposition")
    a = np.asarray(decomp.approx, dtype=np.float64)
    for level in range(len(decomp.details) - 1, -1, -1):
        d = np.asarray(decomp.details[level], dtype=np.float64)
        want = _expected_count(lengths[level], F)
        if len(a) != want or len(d) != want:
            raise ShapeMismatch(
                f"level {level + 1}: expected {want} coefficients, got approx={len(a)} detail={len(d)}"
            )
        a = _synthesis(a, d, w)[:lengths[level]]
    return a


def estimate_noise_sigma(details) -> float:
    """Robust noise scale from median absolute deviation about zero."""
    d = np.asarray(details, dtype=np.float64)
    if d.size == 0:
        raise EmptyInput("cannot estimate noise from an empty coefficient array")
    return float(np.median(np.abs(d)) / MAD_SCALE)


def sure_risks(x) -> tuple[np.ndarray, np.ndarray]:
    """SURE risk of soft thresholding at each candidate ``sqrt(s_k)``.

    ``x`` is noise-normalised; returns ``(sorted squares s, risk)`` where
    ``risk[k-1] = (n - 2k + sum(s[:k]) + (n - k) s[k-1]) / n``.
    """
    s = np.sort(np.asarray(x, dtype=np.float64) ** 2)
    n = len(s)
    k = np.arange(1, n + 1)
    risk = (n - 2 * k + np.cumsum(s) + (n - k) * s) / n
    return s, risk


def _rigrsure_unit(x) -> float:
    _, risk = sure_risks(x)
    # sorted |x| rather than sqrt(s): exact, and immune to x**2 underflow
    return float(np.sort(np.abs(np.asarray(x, dtype=np.float64)))[int(np.argmin(risk))])


def threshold_value(coeffs, rule: str, sigma: float, n: int | None = None) -> float:
    """Threshold for ``coeffs`` under one of the four selection rules.

    ``sigma`` scales the unit-noise threshold; ``n`` is the sample count used by
    the fixed-form rules (defaults to ``len(coeffs)``).
    """
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    if n is None:
        n = len(c)
    if sigma < 0:
        raise InvalidParams("sigma must be >= 0")
    if n < 1:
        raise InvalidParams("n must be >= 1")
    if rule == "sqtwolog":
        return sigma * math.sqrt(2.0 * math.log(n))
    if rule == "minimaxi":
        return sigma * (0.3936 + 0.1829 * math.log2(n)) if n > 32 else 0.0
    if rule not in ("rigrsure", "heursure"):
        raise InvalidParams(f"unknown threshold rule {rule!r}; choose from {RULES}")
    if c.size == 0:
        raise EmptyInput(f"{rule} needs at least one coefficient")
    if sigma == 0:
        return 0.0
    x = c / sigma
    if rule == "rigrsure":
        return sigma * _rigrsure_unit(x)
    m = len(x)
    universal = math.sqrt(2.0 * math.log(m)) if m > 1 else 0.0
    eta = (float(np.dot(x, x)) - m) / m
    crit = math.log2(m) ** 1.5 / math.sqrt(m)
    if eta < crit:
        return sigma * universal
    return sigma * min(_rigrsure_unit(x), universal)


def apply_threshold(coeffs, lam: float, mode: str = "soft") -> np.ndarray:
    if lam < 0:
        raise InvalidParams("threshold must be >= 0")
    c = np.asarray(coeffs, dtype=np.float64)
    if mode == "soft":
        return np.sign(c) * np.maximum(np.abs(c) - lam, 0.0)
    if mode == "hard":
        return np.where(np.abs(c) > lam, c, 0.0)
    raise InvalidParams(f"unknown threshold mode {mode!r}; choose from {MODES}")


@dataclass(frozen=True)
class DenoiseConfig:
    wavelet_id: str = "db4"
    levels: int = 4
    rule: str = "rigrsure"
    mode: str = "soft"
    level_dependent: bool = True
    signal_length: int = field(default=TRACE_LENGTH, compare=False)

    def __post_init__(self):
        w = get_wavelet(self.wavelet_id)
        if self.rule not in RULES:
            raise InvalidParams(f"unknown threshold rule {self.rule!r}")
        if self.mode not in MODES:
            raise InvalidParams(f"unknown threshold mode {self.mode!r}")
        if self.levels < 1 or self.signal_length / 2**self.levels < w.length:
            raise InvalidParams(
                f"levels={self.levels} too deep for {self.signal_length} samples with {self.wavelet_id}"
            )


def level_thresholds(decomp: WaveletDecomposition, config: DenoiseConfig) -> list[float]:
    """Per-level thresholds (one value repeated when thresholding globally).

    Level-dependent mode rescales each level by its own noise estimate, so
    narrow-band interference concentrated in one level is treated as noise
    there. Global mode uses the finest-level estimate and one threshold.
    """
    n = decomp.original_length
    if config.level_dependent:
        out = []
        for d in decomp.details:
            sigma = estimate_noise_sigma(d)
            out.append(threshold_value(d, config.rule, sigma, n if _fixed_form(config.rule) else None))
        return out
    sigma = estimate_noise_sigma(decomp.details[0])
    pooled = np.concatenate(decomp.details)
    lam = threshold_value(pooled, config.rule, sigma, n if _fixed_form(config.rule) else None)
    return [lam] * decomp.levels


def _fixed_form(rule: str) -> bool:
    return rule in ("sqtwolog", "minimaxi")


def denoise_signal(signal, config: DenoiseConfig = DenoiseConfig()) -> np.ndarray:
    x = np.asarray(signal, dtype=np.float64)
    if len(x) != config.signal_length:
        config = replace(config, signal_length=len(x))
    decomp = dwt_forward(x, config.wavelet_id, config.levels)
    lams = level_thresholds(decomp, config)
    details = [apply_threshold(d, lam, config.mode) for d, lam in zip(decomp.details, lams)]
    return dwt_inverse(decomp.with_details(details))


def denoise(trace: Trace, config: DenoiseConfig = DenoiseConfig()) -> Trace:
    """Threshold the detail coefficients of ``trace`` and rebuild it."""
    return trace.with_samples(denoise_signal(trace.samples, config))
