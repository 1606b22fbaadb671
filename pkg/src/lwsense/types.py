"""Domain types, trace validation, and on-disk trace/dataset formats.

A dataset directory looks like::

    <root>/<source>_<distance>cm_<lighting>/manifest.json
    <root>/<source>_<distance>cm_<lighting>/<subject>/<gesture>_<rep>.csv

Each CSV holds one header line ``t_s,volts`` followed by one row per sample.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import total_ordering
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DatasetError, InvalidParams

log = logging.getLogger(__name__)

SAMPLE_RATE = 100.0
TRACE_LENGTH = 600
MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1


@total_ordering
class GestureLabel(str, Enum):
    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    F = "f"
    G = "g"
    H = "h"

    @property
    def index(self) -> int:
        return _LABEL_ORDER[self]

    def __lt__(self, other):
        if not isinstance(other, GestureLabel):
            return NotImplemented
        return self.index < other.index

    @classmethod
    def parse(cls, text: str) -> "GestureLabel":
        key = str(text).strip().strip("()").lower()
        try:
            return cls(key)
        except ValueError:
            raise InvalidParams(f"unknown gesture label {text!r}") from None

    def __str__(self) -> str:
        return self.value


_LABEL_ORDER = {lab: i for i, lab in enumerate(GestureLabel)}
LABELS: tuple[GestureLabel, ...] = tuple(GestureLabel)


class Source(str, Enum):
    INFRARED = "infrared"
    VISIBLE = "visible"

    def __str__(self) -> str:
        return self.value


class Lighting(str, Enum):
    ON = "on"
    OFF = "off"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TraceMeta:
    subject_id: int
    gesture: GestureLabel
    distance_cm: float = 20.0
    source: Source = Source.INFRARED
    lighting: Lighting = Lighting.ON
    seed: int = 0
    rep: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gesture", GestureLabel.parse(self.gesture))
        object.__setattr__(self, "source", Source(self.source))
        object.__setattr__(self, "lighting", Lighting(self.lighting))
        object.__setattr__(self, "distance_cm", float(self.distance_cm))
        object.__setattr__(self, "subject_id", int(self.subject_id))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "rep", int(self.rep))
        if not self.distance_cm > 0:
            raise InvalidParams(f"distance_cm must be > 0, got {self.distance_cm}")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParams("seed must fit in 64 unsigned bits")

    @property
    def scenario_dir(self) -> str:
        return f"{self.source.value}_{self.distance_cm:g}cm_{self.lighting.value}"

    def to_json(self) -> dict:
        d = asdict(self)
        d["gesture"] = self.gesture.value
        d["source"] = self.source.value
        d["lighting"] = self.lighting.value
        return d


@dataclass(frozen=True, eq=False)
class Trace:
    """Fixed-rate voltage series plus its acquisition metadata.

    ``samples`` is copied and frozen on construction.
    """

    samples: np.ndarray
    meta: TraceMeta
    sample_rate: float = SAMPLE_RATE

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidParams("trace samples must be one-dimensional")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    def with_samples(self, samples) -> "Trace":
        return Trace(samples, self.meta, self.sample_rate)


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise InvalidParams("feature vector contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def length(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_trace(trace: Trace) -> ValidationReport:
    """Check a trace against the 600-sample, 100 Hz acquisition format."""
    problems = []
    if len(trace.samples) != TRACE_LENGTH:
        problems.append(f"length != {TRACE_LENGTH} (got {len(trace.samples)})")
    if trace.sample_rate != SAMPLE_RATE:
        problems.append(f"sample_rate != {SAMPLE_RATE:g} (got {trace.sample_rate:g})")
    bad = np.flatnonzero(~np.isfinite(trace.samples))
    problems.extend(f"non-finite sample at index {i}" for i in bad)
    return ValidationReport(tuple(problems))


@dataclass(frozen=True)
class Dataset:
    traces: tuple[Trace, ...]
    checksum: str = ""
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        traces = tuple(self.traces)
        object.__setattr__(self, "traces", traces)
        rates = {t.sample_rate for t in traces}
        if len(rates) > 1:
            raise DatasetError(f"mixed sample rates in dataset: {sorted(rates)}")
        if not self.checksum:
            object.__setattr__(self, "checksum", traces_checksum(traces))

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def labels(self) -> list[GestureLabel]:
        return [t.meta.gesture for t in self.traces]

    @property
    def subjects(self) -> list[int]:
        return [t.meta.subject_id for t in self.traces]

    def counts(self) -> Counter:
        """Trace count per (subject, gesture, scenario)."""
        return Counter(
            (t.meta.subject_id, t.meta.gesture.value, t.meta.scenario_dir) for t in self.traces
        )

    def subset(self, indices: Iterable[int]) -> "Dataset":
        return Dataset(tuple(self.traces[i] for i in indices))


def traces_checksum(traces: Sequence[Trace]) -> str:
    h = hashlib.sha256()
    for t in traces:
        h.update(json.dumps(t.meta.to_json(), sort_keys=True).encode())
        h.update(np.ascontiguousarray(t.samples, dtype="<f8").tobytes())
    return h.hexdigest()


# -- trace CSV -------------------------------------------------------------

def format_volts(v: float) -> str:
    return f"{v:.17g}"


def trace_to_csv_text(trace: Trace) -> str:
    lines = ["t_s,volts"]
    fs = trace.sample_rate
    lines.extend(f"{i / fs:.4f},{format_volts(v)}" for i, v in enumerate(trace.samples))
    return "\n".join(lines) + "\n"


def write_trace_csv(trace: Trace, path) -> str:
    """Write ``trace`` and return the sha256 of the bytes written."""
    data = trace_to_csv_text(trace).encode()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def read_trace_csv(path, meta: TraceMeta | None = None) -> Trace:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t_s", "volts"]:
            raise DatasetError(f"{path}: expected header 't_s,volts'")
        times, volts = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                times.append(float(row[0]))
                volts.append(float(row[1]))
            except (ValueError, IndexError):
                raise DatasetError(f"{path}:{lineno}: malformed row {row!r}") from None
    fs = SAMPLE_RATE
    if len(times) >= 2:
        dt = times[1] - times[0]
        if dt > 0:
            fs = round(1.0 / dt, 6)
    if meta is None:
        meta = TraceMeta(subject_id=0, gesture=GestureLabel.A)
    trace = Trace(np.array(volts), meta, fs)
    if len(trace) != TRACE_LENGTH:
        log.warning("%s: %d samples (expected %d)", path, len(trace), TRACE_LENGTH)
    return trace


# -- dataset directory -----------------------------------------------------

def trace_relpath(meta: TraceMeta) -> str:
    return f"{meta.subject_id}/{meta.gesture.value}_{meta.rep}.csv"


def write_dataset(dataset: Dataset, root, extra: dict | None = None) -> list[Path]:
    """Write every trace under ``root`` grouped by scenario; return manifest paths."""
    root = Path(root)
    groups: dict[str, list[Trace]] = {}
    for t in dataset.traces:
        groups.setdefault(t.meta.scenario_dir, []).append(t)
    written = []
    for scen, traces in groups.items():
        ddir = root / scen
        entries = []
        for t in traces:
            rel = trace_relpath(t.meta)
            digest = write_trace_csv(t, ddir / rel)
            entries.append({"path": rel, "sha256": digest, **t.meta.to_json()})
        manifest = {
            "version": MANIFEST_VERSION,
            "scenario": scen,
            "sample_rate": traces[0].sample_rate,
            "n_traces": len(traces),
            "checksum": _entries_checksum(entries),
            "traces": entries,
        }
        if extra:
            manifest["generator"] = extra
        mpath = ddir / MANIFEST_NAME
        mpath.write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        written.append(mpath)
    return written


def _entries_checksum(entries) -> str:
    blob = json.dumps(entries, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def find_dataset_dir(path) -> Path:
    """Resolve ``path`` to the directory holding a manifest.

    Accepts the scenario directory itself, or a root with exactly one scenario.
    """
    path = Path(path)
    if (path / MANIFEST_NAME).is_file():
        return path
    found = sorted(p.parent for p in path.glob(f"*/{MANIFEST_NAME}"))
    if len(found) == 1:
        return found[0]
    if not found:
        raise DatasetError(f"no {MANIFEST_NAME} under {path}")
    names = ", ".join(p.name for p in found)
    raise DatasetError(f"{path} holds several datasets ({names}); pass one of them")


def read_dataset(path, verify: bool = True) -> Dataset:
    ddir = find_dataset_dir(path)
    manifest = json.loads((ddir / MANIFEST_NAME).read_text())
    if manifest.get("version") != MANIFEST_VERSION:
        raise DatasetError(f"unsupported manifest version {manifest.get('version')!r}")
    traces = []
    for entry in manifest["traces"]:
        fpath = ddir / entry["path"]
        if verify:
            digest = hashlib.sha256(fpath.read_bytes()).hexdigest()
            if digest != entry["sha256"]:
                raise DatasetError(f"{fpath}: checksum mismatch")
        meta = TraceMeta(
            subject_id=int(entry["subject_id"]),
            gesture=entry["gesture"],
            distance_cm=float(entry["distance_cm"]),
            source=entry["source"],
            lighting=entry["lighting"],
            seed=int(entry.get("seed", 0)),
            rep=int(entry.get("rep", 0)),
        )
        traces.append(read_trace_csv(fpath, meta))
    return Dataset(tuple(traces), info={"dir": str(ddir), "manifest_checksum": manifest["checksum"]})

