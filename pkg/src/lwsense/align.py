"""Length normalisation, z-score standardisation and dynamic time warping.

Two featurizers turn variable-length gesture segments into a fixed-length
matrix:

* :class:`ZeroPadFeaturizer` appends zeros up to the longest training segment.
* :class:`DtwTemplateFeaturizer` warps each segment onto a per-class medoid
  template. Kept as a comparison point; it flattens shape differences between
  gestures and classifies worse.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateFlat, EmptyInput, ShapeMismatch, TargetTooShort
from .types import LABELS, FeatureVector

log = logging.getLogger(__name__)

FLAT_SD = 1e-12


@dataclass(frozen=True)
class DtwResult:
    distance: float
    path: np.ndarray  # (K, 2) index pairs from (0, 0) to (n-1, m-1)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in self.path]


def zero_pad(segment, target_len: int) -> FeatureVector:
    seg = np.asarray(segment, dtype=np.float64)
    if target_len < len(seg):
        raise TargetTooShort(f"target length {target_len} < segment length {len(seg)}")
    out = np.zeros(target_len)
    out[:len(seg)] = seg
    return FeatureVector(out)


def zscore(vector) -> np.ndarray:
    """Standardise to zero mean and unit sample standard deviation (ddof=1)."""
    x = np.asarray(getattr(vector, "values", vector), dtype=np.float64)
    if len(x) < 2:
        raise DegenerateFlat("need at least two samples to standardise")
    centred = x - x.mean()
    sd = float(np.sqrt(np.dot(centred, centred) / (len(x) - 1)))
    if sd <= FLAT_SD:
        raise DegenerateFlat(f"standard deviation {sd:.3g} too small to standardise")
    out = centred / sd
    # second pass removes the residual mean left by rounding
    return out - out.mean()


def _as_sequence(x) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyInput("DTW needs two non-empty one-dimensional sequences")
    return arr


def dtw_distance(a, b) -> DtwResult:
    a, b = _as_sequence(a), _as_sequence(b)
    dist, path = kernels.dtw_path(a, b)
    return DtwResult(float(dist), path)


def dtw_align(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Both sequences resampled along the optimal path (equal lengths)."""
    a, b = _as_sequence(a), _as_sequence(b)
    _, path = kernels.dtw_path(a, b)
    return a[path[:, 0]], b[path[:, 1]]


def warp_onto(sample, template) -> np.ndarray:
    """Project ``sample`` onto the time axis of ``template``.

    Each template index takes the mean of the sample values aligned to it,
    so the output has ``len(template)`` entries.
    """
    s, t = _as_sequence(sample), _as_sequence(template)
    _, path = kernels.dtw_path(s, t)
    sums = np.bincount(path[:, 1], weights=s[path[:, 0]], minlength=len(t))
    counts = np.bincount(path[:, 1], minlength=len(t))
    return sums / counts


def fit_length(segments) -> int:
    return max(len(s) for s in segments)


def _fit_to(segment, length: int) -> np.ndarray:
    seg = np.asarray(segment, dtype=np.float64)
    if len(seg) > length:
        log.warning("segment of %d samples truncated to %d", len(seg), length)
        seg = seg[:length]
    return zero_pad(seg, length).values


def _standardise_rows(rows) -> np.ndarray:
    out = np.empty_like(rows)
    for i, row in enumerate(rows):
        try:
            out[i] = zscore(row)
        except DegenerateFlat:
            out[i] = row - row.mean()
    return out


class ZeroPadFeaturizer:
    """Zero-pad to the longest training segment, then optionally z-score."""

    name = "zeropad"

    def __init__(self, standardize: bool = True):
        self.standardize = standardize
        self.length: int | None = None

    def fit(self, segments, labels=None) -> "ZeroPadFeaturizer":
        self.length = fit_length(segments)
        return self

    def transform(self, segments) -> np.ndarray:
        if self.length is None:
            raise ShapeMismatch("featurizer used before fit")
        rows = np.array([_fit_to(s, self.length) for s in segments])
        return _standardise_rows(rows) if self.standardize else rows


class DtwTemplateFeaturizer:
    """Warp every segment onto the medoid template of its nearest class.

    Medoids are picked per class among the zero-padded, z-scored training
    vectors (Euclidean). A segment is assigned to the template nearest in
    that same representation, DTW-warped onto it, and zero-padded to the
    longest template.
    """

    name = "dtw-to-template"

    def __init__(self, standardize: bool = True):
        self.standardize = standardize
        self._pad = ZeroPadFeaturizer(standardize=True)
        self.templates: list[np.ndarray] = []
        self._template_rows: np.ndarray | None = None
        self.length: int | None = None

    def fit(self, segments, labels) -> "DtwTemplateFeaturizer":
        self._pad.fit(segments)
        rows = self._pad.transform(segments)
        labels = list(labels)
        templates, template_rows = [], []
        for lab in LABELS:
            idx = [i for i, y in enumerate(labels) if y == lab]
            if not idx:
                continue
            block = rows[idx]
            sq = np.sum(block**2, axis=1)
            d2 = sq[:, None] + sq[None, :] - 2.0 * block @ block.T
            medoid = idx[int(np.argmin(np.sum(np.sqrt(np.maximum(d2, 0.0)), axis=1)))]
            templates.append(_standardised_segment(segments[medoid]))
            template_rows.append(rows[medoid])
        self.templates = templates
        self._template_rows = np.array(template_rows)
        self.length = max(len(t) for t in templates)
        return self

    def transform(self, segments) -> np.ndarray:
        if self._template_rows is None:
            raise ShapeMismatch("featurizer used before fit")
        rows = self._pad.transform(segments)
        d2 = (
            np.sum(rows**2, axis=1)[:, None]
            + np.sum(self._template_rows**2, axis=1)[None, :]
            - 2.0 * rows @ self._template_rows.T
        )
        nearest = np.argmin(d2, axis=1)
        out = np.zeros((len(segments), self.length))
        for i, (seg, t) in enumerate(zip(segments, nearest)):
            warped = warp_onto(_standardised_segment(seg), self.templates[t])
            out[i, :len(warped)] = warped
        return _standardise_rows(out) if self.standardize else out


def _standardised_segment(seg) -> np.ndarray:
    seg = np.asarray(seg, dtype=np.float64)
    try:
        return zscore(seg)
    except DegenerateFlat:
        return seg - seg.mean()


FEATURIZERS = {
    ZeroPadFeaturizer.name: ZeroPadFeaturizer,
    DtwTemplateFeaturizer.name: DtwTemplateFeaturizer,
}
