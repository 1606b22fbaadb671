"""Compare the compiled and pure-numpy DTW kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Also times one dtw-to-template cross-validation run per backend.
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from lwsense import _dtw_py, kernels

SIZES = [(50, 50), (150, 140), (300, 280), (600, 600)]


def time_kernel(fn, a, b, repeat):
    timer = timeit.Timer(lambda: fn(a, b))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def kernel_table(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for n, m in SIZES:
        a, b = rng.standard_normal(n), rng.standard_normal(m)
        row = {"n": n, "m": m, "python_s": time_kernel(_dtw_py.dtw_path, a, b, repeat)}
        if kernels.compiled_backend is not None:
            ext = kernels.compiled_backend
            row["cython_s"] = time_kernel(ext.dtw_path, a, b, repeat)
            row["speedup"] = row["python_s"] / row["cython_s"]
            row["identical"] = bool(np.array_equal(ext.dtw_path(a, b)[1], _dtw_py.dtw_path(a, b)[1]))
        rows.append(row)
    return rows


PIPELINE = """
import time
from lwsense import PipelineConfig, cross_validate, preset_dataset, BACKEND
ds = preset_dataset("ir20", seed=1)
t0 = time.perf_counter()
acc = cross_validate(ds, PipelineConfig(align="dtw-to-template"), 10, 1).mean_accuracy
print(BACKEND, time.perf_counter() - t0, acc)
"""


def pipeline_times():
    out = {}
    for pure in ("0", "1"):
        env = dict(os.environ, LWS_PURE_PYTHON=pure)
        res = subprocess.run([sys.executable, "-c", PIPELINE], env=env, capture_output=True, text=True, check=True)
        backend, secs, acc = res.stdout.split()
        out[backend] = {"seconds": float(secs), "accuracy": float(acc)}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--skip-pipeline", action="store_true")
    args = ap.parse_args()
    rows = kernel_table(args.repeat)
    pipe = {} if args.skip_pipeline else pipeline_times()
    if args.json:
        print(json.dumps({"kernels": rows, "pipeline": pipe}, indent=1))
        return
    print(f"compiled backend available: {kernels.compiled_backend is not None}")
    print(f"{'n x m':>10} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for r in rows:
        cy = f"{r['cython_s'] * 1e3:10.3f}" if "cython_s" in r else f"{'-':>10}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'-':>8}"
        print(f"{r['n']:>4} x {r['m']:<4} {r['python_s'] * 1e3:10.3f} {cy} {sp}")
    for backend, res in pipe.items():
        print(f"dtw-to-template 10-fold on ir20 [{backend}]: {res['seconds']:.1f} s, accuracy {res['accuracy']:.4f}")


if __name__ == "__main__":
    main()
