"""Backend selection for the DTW hot loop.

The compiled extension is used when it imports; set ``LWS_PURE_PYTHON=1`` to
force the numpy fallback. ``BACKEND`` names the active implementation;
``compiled_backend`` is the extension module whenever it is built, so both
can still be compared with the fallback forced.
"""

import os

from . import _dtw_py

python_backend = _dtw_py

try:
    from . import _dtw_ext as compiled_backend
except ImportError:
    compiled_backend = None

_forced = os.environ.get("LWS_PURE_PYTHON", "") not in ("", "0")
_active = python_backend if _forced or compiled_backend is None else compiled_backend
BACKEND = "python" if _active is python_backend else "cython"

dtw_distance = _active.dtw_distance
dtw_accumulate = _active.dtw_accumulate
dtw_path = _active.dtw_path
