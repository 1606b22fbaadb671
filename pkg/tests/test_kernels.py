import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from oracles import dtw_enumerate
from lwsense import _dtw_py, kernels

compiled = pytest.mark.skipif(kernels.compiled_backend is None, reason="extension not built")


def pairs(count, lo=1, hi=40, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield rng.standard_normal(rng.integers(lo, hi)), rng.standard_normal(rng.integers(lo, hi))


def test_python_backend_matches_enumeration():
    for a, b in pairs(60, 1, 6, seed=1):
        assert _dtw_py.dtw_distance(a, b) == dtw_enumerate(a.tolist(), b.tolist())


@compiled
def test_backends_bit_identical():
    ext = kernels.compiled_backend
    for a, b in pairs(50, seed=2):
        assert ext.dtw_distance(a, b) == _dtw_py.dtw_distance(a, b)
        assert np.array_equal(ext.dtw_accumulate(a, b), _dtw_py.dtw_accumulate(a, b))
        d1, p1 = ext.dtw_path(a, b)
        d2, p2 = _dtw_py.dtw_path(a, b)
        assert d1 == d2 and np.array_equal(p1, p2)


@compiled
def test_ties_broken_identically():
    ext = kernels.compiled_backend
    rng = np.random.default_rng(3)
    for _ in range(50):
        a = rng.integers(0, 3, rng.integers(1, 12)).astype(float)
        b = rng.integers(0, 3, rng.integers(1, 12)).astype(float)
        assert np.array_equal(ext.dtw_path(a, b)[1], _dtw_py.dtw_path(a, b)[1])


def test_accumulate_layout():
    P = kernels.dtw_accumulate(np.array([0.0, 1.0]), np.array([1.0]))
    assert P.shape == (3, 2)
    assert P[0, 0] == 0 and np.isinf(P[0, 1]) and np.isinf(P[1, 0])
    assert P[2, 1] == 1.0


def test_env_var_forces_fallback():
    code = "import lwsense.kernels as k; print(k.BACKEND)"
    env = dict(os.environ, LWS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    env["LWS_PURE_PYTHON"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("cython" if kernels.compiled_backend else "python")
    importlib.reload(kernels)
