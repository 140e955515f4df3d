"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set FIELDPLACE_PURE=1 to force the fallback (used by the kernel benchmark and
for debugging).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("FIELDPLACE_PURE", "0") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

IMPL = _impl.IMPL
HAVE_EXT = IMPL == "cython"

scatter_rects = _impl.scatter_rects
gather_bilinear3 = _impl.gather_bilinear3
lse_wirelength_grad = _impl.lse_wirelength_grad
hpwl_total = _impl.hpwl_total
