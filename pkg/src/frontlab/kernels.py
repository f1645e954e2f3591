"""Grid kernels: the compiled extension when available, else pure Python.

Set ``FRONTLAB_PURE=1`` to force the pure-Python implementation.
"""
from __future__ import annotations

import os

from . import _kernels_py as _py

if os.environ.get("FRONTLAB_PURE", "") not in ("", "0"):
    _impl = _py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _py

BACKEND = "compiled" if _impl is not _py else "python"

crossing_segments = _impl.crossing_segments
edge_keys = _impl.edge_keys
link_segments = _impl.link_segments
subcomplex_euler = _impl.subcomplex_euler
