"""Kernel backend selection.

The compiled extension is preferred when importable; setting
``CONFINE_SIM_PURE=1`` in the environment forces the pure-NumPy fallback.
Both backends implement the same three operations with the same per-element
arithmetic order, so swapping them changes timings, not physics.
"""

from __future__ import annotations

import os

from . import pure as _pure

if os.environ.get("CONFINE_SIM_PURE") == "1":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure"

weighted_sz_sum = _impl.weighted_sz_sum
pair_zz_sum = _impl.pair_zz_sum
apply_x_rotations = _impl.apply_x_rotations

__all__ = ["BACKEND", "weighted_sz_sum", "pair_zz_sum", "apply_x_rotations"]
