"""Kernel dispatch: compiled extension when importable, numpy fallback otherwise.

Set ``PHOTONPATHS_PURE=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("PHOTONPATHS_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "numpy"

path_sum = _impl.path_sum
sample_outcomes = _impl.sample_outcomes
tally_pairs = _impl.tally_pairs
