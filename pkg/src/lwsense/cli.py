"""Command-line entry point: ``lwsense <command> ...``.

Exit status is 0 on success, 1 on a domain error (reported as JSON on
stderr) and 2 on a usage error. ``--seed`` falls back to ``$LWS_SEED``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .classify import DEFAULT_K, load_model, predict, save_model, train_knn
from .errors import DatasetError, LwsError
from .evaluate import ablation_run, ablation_table, evaluate, payload_digest, power_spectrum
from .pipeline import PipelineConfig, preprocess, preprocess_all
from .segment import DEFAULT_FACTOR, detect_gesture, trim
from .synth import PRESETS, DatasetSpec, get_preset, synth_dataset
from .types import (
    Trace,
    format_volts,
    read_dataset,
    read_trace_csv,
    validate_trace,
    write_dataset,
    write_trace_csv,
)
from .wavelet import MODES, RULES, WAVELETS, denoise

log = logging.getLogger("lwsense")


def _default_seed() -> int:
    raw = os.environ.get("LWS_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"LWS_SEED must be an integer, got {raw!r}") from None


def _emit(args, human: str, doc) -> None:
    print(json.dumps(doc, sort_keys=True) if args.json else human)


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _pipeline_from_args(args) -> PipelineConfig:
    return PipelineConfig(
        denoise=not args.no_denoise,
        wavelet=args.wavelet,
        levels=args.levels,
        rule=args.rule,
        mode=args.mode,
        level_dependent=not args.global_threshold,
        factor=args.factor,
        align=args.align,
        standardize=not args.no_standardize,
        k=args.k,
    )


# -- commands --------------------------------------------------------------

def cmd_synth(args) -> int:
    spec = DatasetSpec(get_preset(args.preset), args.subjects, args.reps, args.seed)
    ds = synth_dataset(spec)
    manifests = write_dataset(ds, args.out, extra={"preset": args.preset, "seed": args.seed,
                                                   "subjects": args.subjects, "reps": args.reps})
    doc = {"preset": args.preset, "seed": args.seed, "n_traces": len(ds),
           "manifests": [str(m) for m in manifests], "checksum": ds.checksum}
    _emit(args, f"wrote {len(ds)} traces to {manifests[0].parent}", doc)
    return 0


def _denoise_cfg(args):
    return PipelineConfig(wavelet=args.wavelet, levels=args.levels, rule=args.rule, mode=args.mode,
                          level_dependent=not args.global_threshold).denoise_config()


def cmd_denoise(args) -> int:
    trace = read_trace_csv(args.input)
    clean = denoise(trace, _denoise_cfg(args))
    write_trace_csv(clean, args.output)
    if args.spectrum_before_after:
        f, before = power_spectrum(trace)
        _, after = power_spectrum(clean)
        _write_rows(args.spectrum_before_after, ["freq_hz", "before", "after"],
                    [[f"{fi:g}", format_volts(b), format_volts(a)] for fi, b, a in zip(f, before, after)])
    doc = {"input": args.input, "output": args.output, "config": _denoise_cfg(args).__dict__,
           "violations": list(validate_trace(trace).violations)}
    _emit(args, f"denoised {args.input} -> {args.output}", doc)
    return 0


def cmd_segment(args) -> int:
    trace = read_trace_csv(args.input)
    if args.denoise:
        trace = denoise(trace, _denoise_cfg(args))
    bounds = detect_gesture(trace, args.factor)
    if args.emit_trimmed:
        seg = trim(trace, bounds)
        write_trace_csv(Trace(seg, trace.meta, trace.sample_rate), args.emit_trimmed)
    print(json.dumps(bounds.to_json(), sort_keys=True))
    return 0


def _feature_rows(args, ds, cfg):
    segs = [s.values for s in preprocess_all(ds.traces, cfg)]
    featurizer = cfg.featurizer().fit(segs, ds.labels)
    if args.len != "auto":
        featurizer.length = int(args.len)
        if cfg.align != "zeropad":
            raise LwsError("--len is only adjustable with --align zeropad")
    return featurizer, featurizer.transform(segs)


def cmd_featurize(args) -> int:
    ds = read_dataset(args.data)
    cfg = _pipeline_from_args(args)
    featurizer, X = _feature_rows(args, ds, cfg)
    L = X.shape[1]
    rows = [[lab.value] + [format_volts(v) for v in row] for lab, row in zip(ds.labels, X)]
    _write_rows(args.out, ["label"] + [f"x{i}" for i in range(L)], rows)
    _emit(args, f"wrote {len(rows)} x {L} features to {args.out}",
          {"rows": len(rows), "length": L, "out": args.out, "config": cfg.to_json()})
    return 0


def cmd_train(args) -> int:
    ds = read_dataset(args.data)
    cfg = _pipeline_from_args(args)
    if cfg.align != "zeropad":
        raise LwsError("train supports --align zeropad only (templates are not persisted)")
    segs = [s.values for s in preprocess_all(ds.traces, cfg)]
    featurizer = cfg.featurizer().fit(segs)
    model = train_knn(featurizer.transform(segs), ds.labels, cfg.k)
    save_model(model, args.out, pipeline=cfg.to_json())
    _emit(args, f"trained k={model.k} on {len(model)} vectors of length {model.length} -> {args.out}",
          {"k": model.k, "rows": len(model), "L": model.length, "out": args.out})
    return 0


def cmd_predict(args) -> int:
    model = load_model(args.model)
    doc = json.loads(Path(args.model).read_text())
    cfg = PipelineConfig.from_json(doc.get("pipeline", {}))
    featurizer = cfg.featurizer()
    featurizer.length = model.length
    results = []
    for path in args.inputs:
        seg = preprocess(read_trace_csv(path), cfg)
        row = featurizer.transform([seg.values])[0]
        label, votes = predict(model, row)
        results.append({"input": path, "label": label.value,
                        "votes": {k.value: v for k, v in sorted(votes.items())},
                        "gesture_detected": seg.detected})
    human = "\n".join(f"{r['input']}: {r['label']}" for r in results)
    _emit(args, human, results)
    return 0


def cmd_eval(args) -> int:
    ds = read_dataset(args.data)
    cfg = _pipeline_from_args(args)
    report = evaluate(ds, cfg, args.protocol, args.seed, not args.no_stratify)
    body = report.to_json()
    body["payload"]["dataset_checksum"] = ds.info.get("manifest_checksum", ds.checksum)
    body["payload_sha256"] = payload_digest(body["payload"])
    body["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(body, indent=1, sort_keys=True) + "\n"
    Path(args.out).write_text(text)
    if args.csv:
        Path(args.csv).write_text(report.confusion.to_csv())
    human = (f"{report.protocol}: mean accuracy {report.mean_accuracy:.4f} "
             f"(SD {report.sd_accuracy:.4f}) over {len(report.fold_accuracies)} folds")
    _emit(args, human, body)
    return 0


def cmd_spectrum(args) -> int:
    trace = read_trace_csv(args.input)
    freqs, mag = power_spectrum(trace)
    rows = [[f"{f:g}", format_volts(m)] for f, m in zip(freqs, mag)]
    if args.out:
        _write_rows(args.out, ["freq_hz", "magnitude"], rows)
    peak = float(freqs[1:][np.argmax(mag[1:])]) if len(freqs) > 1 else 0.0
    doc = {"dominant_hz": peak, "bins": len(freqs), "out": args.out}
    if args.json or args.out:
        _emit(args, f"dominant bin {peak:g} Hz", doc)
    else:
        print("freq_hz,magnitude")
        print("\n".join(",".join(r) for r in rows))
    return 0


def cmd_ablate(args) -> int:
    ds = read_dataset(args.data)
    base = _pipeline_from_args(args)
    rows = ablation_run(ds, None, base, args.protocol, args.seed, not args.no_stratify)
    table = ablation_table(rows)
    if args.out:
        Path(args.out).write_text(table)
    doc = [{"toggles": t, **r.payload()} for t, r in rows]
    _emit(args, table.rstrip(), doc)
    return 0


# -- parser ----------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _denoise_opts() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--wavelet", choices=sorted(WAVELETS), default="db4")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--rule", choices=RULES, default="rigrsure")
    p.add_argument("--mode", choices=MODES, default="soft")
    p.add_argument("--global-threshold", action="store_true",
                   help="one threshold for all levels instead of per-level")
    return p


def _pipeline_opts() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, parents=[_denoise_opts()])
    p.add_argument("--factor", type=float, default=DEFAULT_FACTOR)
    p.add_argument("--align", choices=["zeropad", "dtw-to-template"], default="zeropad")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--no-denoise", action="store_true")
    p.add_argument("--no-standardize", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common, pipe, den = _common(), _pipeline_opts(), _denoise_opts()
    seed_default = _default_seed()
    parser = argparse.ArgumentParser(prog="lwsense", description="Light-wave gesture recognition toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--preset", choices=sorted(PRESETS), default="ir20")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--subjects", type=int, default=5)
    p.add_argument("--reps", type=int, default=24)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("denoise", parents=[common, den], help="wavelet-denoise one trace CSV")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--spectrum-before-after", metavar="CSV")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("segment", parents=[common, den], help="detect gesture bounds in one trace")
    p.add_argument("input")
    p.add_argument("--factor", type=float, default=DEFAULT_FACTOR)
    p.add_argument("--denoise", action="store_true", help="denoise before detecting")
    p.add_argument("--emit-trimmed", metavar="CSV")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("featurize", parents=[common, pipe], help="write the feature matrix of a dataset")
    p.add_argument("data")
    p.add_argument("--len", default="auto")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", parents=[common, pipe], help="train and save a KNN model")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="classify trace CSVs with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("inputs", nargs="+")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", parents=[common, pipe], help="cross-validate on a dataset")
    p.add_argument("data")
    p.add_argument("--protocol", choices=["kfold10", "loso"], default="kfold10")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--no-stratify", action="store_true", help="plain random folds")
    p.add_argument("--out", default="report.json")
    p.add_argument("--csv", help="write the averaged confusion matrix as CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("spectrum", parents=[common], help="magnitude spectrum of one trace")
    p.add_argument("input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("ablate", parents=[common, pipe], help="denoise/standardize/align ablation grid")
    p.add_argument("data")
    p.add_argument("--protocol", choices=["kfold10", "loso"], default="kfold10")
    p.add_argument("--seed", type=int, default=seed_default)
    p.add_argument("--no-stratify", action="store_true", help="plain random folds")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ablate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LwsError, DatasetError, OSError, ValueError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(err), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
