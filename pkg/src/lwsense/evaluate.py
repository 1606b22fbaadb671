"""Cross-validation protocols, confusion matrices and spectral diagnostics."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .classify import predict, train_knn
from .errors import LengthMismatch, SingleSubject, TooFewSamples
from .pipeline import PipelineConfig, Segment, preprocess_all
from .types import LABELS, Dataset, GestureLabel

N_CLASSES = len(LABELS)


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Row-normalised proportions; rows are performed, columns estimated."""

    matrix: np.ndarray
    support: np.ndarray

    @property
    def empty_rows(self) -> list[GestureLabel]:
        return [LABELS[i] for i in np.flatnonzero(self.support == 0)]

    @property
    def accuracy(self) -> float:
        """Support-weighted diagonal."""
        total = self.support.sum()
        return float(np.dot(np.diag(self.matrix), self.support) / total) if total else 0.0

    @property
    def mean_recall(self) -> float:
        rows = self.support > 0
        return float(np.mean(np.diag(self.matrix)[rows])) if rows.any() else 0.0

    def to_json(self) -> dict:
        return {
            "labels": [lab.value for lab in LABELS],
            "matrix": self.matrix.tolist(),
            "support": self.support.tolist(),
        }

    def to_csv(self) -> str:
        lines = ["performed," + ",".join(lab.value for lab in LABELS)]
        for lab, row in zip(LABELS, self.matrix):
            lines.append(lab.value + "," + ",".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"


def confusion_matrix(truths, predictions) -> ConfusionMatrix:
    truths = [GestureLabel.parse(t) for t in truths]
    predictions = [GestureLabel.parse(p) for p in predictions]
    if len(truths) != len(predictions):
        raise LengthMismatch(f"{len(truths)} truths vs {len(predictions)} predictions")
    counts = np.zeros((N_CLASSES, N_CLASSES))
    for t, p in zip(truths, predictions):
        counts[t.index, p.index] += 1
    support = counts.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        matrix = np.where(support[:, None] > 0, counts / support[:, None], 0.0)
    return ConfusionMatrix(matrix, support.astype(int))


def average_confusion(matrices) -> ConfusionMatrix:
    """Mean of per-fold matrices, row by row over folds where that row has support."""
    matrices = list(matrices)
    stack = np.array([m.matrix for m in matrices])
    has = np.array([m.support > 0 for m in matrices])
    n = has.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(n[:, None] > 0, (stack * has[:, :, None]).sum(axis=0) / n[:, None], 0.0)
    support = np.sum([m.support for m in matrices], axis=0)
    return ConfusionMatrix(mean, support)


@dataclass(frozen=True, eq=False)
class EvalReport:
    protocol: str
    fold_accuracies: tuple[float, ...]
    confusion: ConfusionMatrix
    predictions: tuple[GestureLabel, ...]
    seed: int | None = None
    config: dict = field(default_factory=dict)
    fold_lengths: tuple[int, ...] = ()
    undetected: int = 0
    stratified: bool | None = None

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    @property
    def sd_accuracy(self) -> float:
        if len(self.fold_accuracies) < 2:
            return 0.0
        return float(np.std(self.fold_accuracies, ddof=1))

    def payload(self) -> dict:
        return {
            "protocol": self.protocol,
            "seed": self.seed,
            "stratified": self.stratified,
            "config": self.config,
            "fold_accuracies": list(self.fold_accuracies),
            "mean_accuracy": self.mean_accuracy,
            "sd_accuracy": self.sd_accuracy,
            "fold_feature_lengths": list(self.fold_lengths),
            "undetected_traces": self.undetected,
            "confusion": self.confusion.to_json(),
            "predictions": [p.value for p in self.predictions],
        }

    def to_json(self) -> dict:
        body = self.payload()
        return {"payload": body, "payload_sha256": payload_digest(body)}


def payload_digest(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


# -- splitting -------------------------------------------------------------

def kfold_split(labels, k: int = 10, seed: int = 0, stratified: bool = True) -> list[np.ndarray]:
    """Partition ``range(len(labels))`` into ``k`` folds.

    Indices are shuffled (per class when stratified), laid end to end and
    dealt round-robin, so fold sizes differ by at most one and each class is
    spread as evenly as its count allows.
    """
    labels = list(getattr(labels, "labels", labels))
    n = len(labels)
    if k < 2:
        raise TooFewSamples("k must be >= 2")
    if n < k:
        raise TooFewSamples(f"{n} samples cannot fill {k} folds")
    rng = np.random.default_rng(seed)
    if stratified:
        parsed = [GestureLabel.parse(y) for y in labels]
        order = np.concatenate([
            rng.permutation(np.array([i for i, y in enumerate(parsed) if y == lab], dtype=np.int64))
            for lab in LABELS
        ])
    else:
        order = rng.permutation(n)
    return [np.sort(order[f::k]) for f in range(k)]


def subject_folds(subjects) -> tuple[list[int], list[np.ndarray]]:
    subjects = np.asarray(list(subjects))
    ids = sorted(set(subjects.tolist()))
    if len(ids) < 2:
        raise SingleSubject("leave-one-subject-out needs at least two subjects")
    return ids, [np.flatnonzero(subjects == s) for s in ids]


# -- protocols -------------------------------------------------------------

def run_folds(
    segments: list[Segment],
    labels: list[GestureLabel],
    folds: list[np.ndarray],
    config: PipelineConfig,
    protocol: str,
    seed: int | None = None,
) -> EvalReport:
    n = len(segments)
    values = [s.values for s in segments]
    predicted: list[GestureLabel | None] = [None] * n
    accuracies, matrices, lengths = [], [], []
    for test in folds:
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        train = np.flatnonzero(mask)
        featurizer = config.featurizer()
        featurizer.fit([values[i] for i in train], [labels[i] for i in train])
        model = train_knn(featurizer.transform([values[i] for i in train]), [labels[i] for i in train], config.k)
        test_rows = featurizer.transform([values[i] for i in test])
        fold_pred = [predict(model, row)[0] for row in test_rows]
        for i, p in zip(test, fold_pred):
            predicted[i] = p
        truths = [labels[i] for i in test]
        accuracies.append(float(np.mean([p == t for p, t in zip(fold_pred, truths)])))
        matrices.append(confusion_matrix(truths, fold_pred))
        lengths.append(int(featurizer.length))
    return EvalReport(
        protocol=protocol,
        fold_accuracies=tuple(accuracies),
        confusion=average_confusion(matrices),
        predictions=tuple(predicted),
        seed=seed,
        config=config.to_json(),
        fold_lengths=tuple(lengths),
        undetected=sum(not s.detected for s in segments),
    )


def cross_validate(
    dataset: Dataset,
    config: PipelineConfig = PipelineConfig(),
    k: int = 10,
    seed: int = 0,
    stratified: bool = True,
    segments: list[Segment] | None = None,
) -> EvalReport:
    """k-fold cross-validation; feature length comes from training folds only."""
    labels = dataset.labels
    folds = kfold_split(labels, k, seed, stratified)
    if segments is None:
        segments = preprocess_all(dataset.traces, config)
    report = run_folds(segments, labels, folds, config, f"kfold{k}", seed)
    return replace(report, stratified=stratified)


def leave_one_subject_out(
    dataset: Dataset,
    config: PipelineConfig = PipelineConfig(),
    segments: list[Segment] | None = None,
) -> EvalReport:
    _, folds = subject_folds(dataset.subjects)
    if segments is None:
        segments = preprocess_all(dataset.traces, config)
    return run_folds(segments, dataset.labels, folds, config, "loso")


def evaluate(
    dataset: Dataset,
    config: PipelineConfig,
    protocol: str = "kfold10",
    seed: int = 0,
    stratified: bool = True,
) -> EvalReport:
    if protocol == "loso":
        return leave_one_subject_out(dataset, config)
    if protocol.startswith("kfold"):
        return cross_validate(dataset, config, int(protocol[5:] or 10), seed, stratified)
    raise ValueError(f"unknown protocol {protocol!r}")


# -- ablations -------------------------------------------------------------

ABLATION_AXES = {
    "denoise": (True, False),
    "standardize": (True, False),
    "align": ("zeropad", "dtw-to-template"),
}


def ablation_run(
    dataset: Dataset,
    toggles: list[dict] | None = None,
    base: PipelineConfig = PipelineConfig(),
    protocol: str = "kfold10",
    seed: int = 0,
    stratified: bool = True,
) -> list[tuple[dict, EvalReport]]:
    """Evaluate each toggle combination with identical folds and seed.

    ``toggles`` defaults to the full grid over denoise, standardize and align.
    Preprocessing is shared between combinations that only differ downstream.
    """
    if toggles is None:
        keys = list(ABLATION_AXES)
        toggles = [dict(zip(keys, combo)) for combo in itertools.product(*ABLATION_AXES.values())]
    cache: dict[tuple, list[Segment]] = {}
    rows = []
    for tog in toggles:
        cfg = base.with_(**tog)
        key = (cfg.denoise, cfg.wavelet, cfg.levels, cfg.rule, cfg.mode, cfg.level_dependent, cfg.factor)
        if key not in cache:
            cache[key] = preprocess_all(dataset.traces, cfg)
        if protocol == "loso":
            report = leave_one_subject_out(dataset, cfg, segments=cache[key])
        else:
            report = cross_validate(dataset, cfg, int(protocol[5:] or 10), seed, stratified, segments=cache[key])
        rows.append((dict(tog), report))
    return rows


def ablation_table(rows) -> str:
    lines = ["denoise,standardize,align,mean_accuracy,sd_accuracy"]
    for tog, rep in rows:
        cfg = rep.config
        lines.append(
            f"{cfg['denoise']},{cfg['standardize']},{cfg['align']},{rep.mean_accuracy:.4f},{rep.sd_accuracy:.4f}"
        )
    return "\n".join(lines) + "\n"


# -- spectra ---------------------------------------------------------------

def power_spectrum(trace, sample_rate: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """|DFT| of the mean-removed signal on bins 0 .. fs/2."""
    x = np.asarray(getattr(trace, "samples", trace), dtype=np.float64)
    fs = sample_rate or getattr(trace, "sample_rate", 100.0)
    freqs = np.fft.rfftfreq(len(x), 1.0 / fs)
    return freqs, np.abs(np.fft.rfft(x - x.mean()))


def dominant_frequency(trace, sample_rate: float | None = None, min_hz: float = 0.0) -> float:
    freqs, mag = power_spectrum(trace, sample_rate)
    keep = freqs >= min_hz
    return float(freqs[keep][np.argmax(mag[keep])])


def peak_db_change(before, after, freq_hz: float, sample_rate: float = 100.0) -> float:
    """Drop in dB of the spectral bin nearest ``freq_hz`` (positive = reduced)."""
    f, mb = power_spectrum(before, sample_rate)
    _, ma = power_spectrum(after, sample_rate)
    i = int(np.argmin(np.abs(f - freq_hz)))
    return float(20.0 * np.log10(mb[i] / max(ma[i], 1e-300)))
