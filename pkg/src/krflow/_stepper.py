"""Backend selection for the stepping kernel.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is missing or KRFLOW_FORCE_PYTHON=1 is set.  Both expose
make_workspace(r, dx, ndim) with identical semantics.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("KRFLOW_FORCE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

OK = _kernels_py.OK
UNSTABLE = _kernels_py.UNSTABLE
BLOWUP = _kernels_py.BLOWUP

make_workspace = _impl.make_workspace


def backend_name() -> str:
    return BACKEND
