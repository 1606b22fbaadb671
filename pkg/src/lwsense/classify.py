"""K-nearest-neighbour gesture classifier.

Ties are resolved deterministically: equal distances keep training-row order;
equal vote counts go to the label with the smallest summed neighbour distance
(summed in neighbour-rank order), then to the earliest label a < b < ... < h.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DatasetError, KTooLarge, ShapeMismatch, TooFewSamples
from .types import GestureLabel

MODEL_VERSION = 1
DEFAULT_K = 5


@dataclass(frozen=True, eq=False)
class KnnModel:
    features: np.ndarray
    labels: tuple[GestureLabel, ...]
    k: int = DEFAULT_K

    @property
    def length(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.features.shape[0]


def train_knn(features, labels, k: int = DEFAULT_K) -> KnnModel:
    """Validate and store the training set; KNN does no fitting."""
    rows = [np.asarray(r, dtype=np.float64).ravel() for r in features]
    if not rows:
        raise TooFewSamples("need at least one training vector")
    if len({len(r) for r in rows}) != 1:
        raise ShapeMismatch("training vectors have mixed lengths")
    labels = tuple(GestureLabel.parse(y) for y in labels)
    if len(labels) != len(rows):
        raise ShapeMismatch(f"{len(rows)} vectors but {len(labels)} labels")
    if k < 1:
        raise KTooLarge("k must be >= 1")
    if k > len(rows):
        raise KTooLarge(f"k={k} exceeds {len(rows)} training vectors")
    X = np.array(rows)
    if not np.all(np.isfinite(X)):
        raise ShapeMismatch("training vectors must be finite")
    X.setflags(write=False)
    return KnnModel(X, labels, int(k))


def _vote(labels, dists, order):
    counts: dict[GestureLabel, int] = {}
    sums: dict[GestureLabel, float] = {}
    for i in order:
        lab = labels[i]
        counts[lab] = counts.get(lab, 0) + 1
        sums[lab] = sums.get(lab, 0.0) + float(dists[i])
    winner = min(counts, key=lambda lab: (-counts[lab], sums[lab], lab.index))
    return winner, counts


def predict(model: KnnModel, vector) -> tuple[GestureLabel, dict[GestureLabel, int]]:
    q = np.asarray(getattr(vector, "values", vector), dtype=np.float64).ravel()
    if len(q) != model.length:
        raise ShapeMismatch(f"query length {len(q)} != model length {model.length}")
    dists = np.sqrt(np.sum((model.features - q) ** 2, axis=1))
    order = np.argsort(dists, kind="stable")[:model.k]
    return _vote(model.labels, dists, order)


def predict_many(model: KnnModel, vectors) -> list[GestureLabel]:
    return [predict(model, v)[0] for v in vectors]


def save_model(model: KnnModel, path, pipeline: dict | None = None) -> None:
    """Write the versioned JSON model; ``pipeline`` records how features were made."""
    doc = {
        "version": MODEL_VERSION,
        "k": model.k,
        "L": model.length,
        "labels": [lab.value for lab in model.labels],
        "features": model.features.ravel().tolist(),
    }
    if pipeline is not None:
        doc["pipeline"] = pipeline
    Path(path).write_text(json.dumps(doc) + "\n")


def load_model(path) -> KnnModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("version") != MODEL_VERSION:
        raise DatasetError(f"unsupported model version {doc.get('version')!r}")
    L = int(doc["L"])
    flat = np.asarray(doc["features"], dtype=np.float64)
    if L < 1 or flat.size != L * len(doc["labels"]):
        raise ShapeMismatch("model features do not match L x len(labels)")
    return train_knn(flat.reshape(-1, L), doc["labels"], int(doc["k"]))
