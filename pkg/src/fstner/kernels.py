"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
``FSTNER_PURE_PYTHON=1`` forces the pure-Python fallback (useful for
benchmarking and for debugging the kernels themselves).
"""

import os

from fstner import _pykernels

if os.environ.get("FSTNER_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from fstner import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
apply_rule = _impl.apply_rule
score_rule = _impl.score_rule
fst_run = _impl.fst_run
