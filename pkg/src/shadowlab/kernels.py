"""Dispatch layer selecting the compiled integer kernels when safe.

The compiled core accumulates in 128 bits, so it is only used when every
entry is small enough that all Bareiss intermediates (which are minors of
the input) stay below 2**62; the caps below come from the Hadamard bound
n**(n/2) * M**n < 2**62. Larger inputs fall back to the pure Python
kernels, which work on arbitrary precision integers.

Set SHADOWLAB_PURE=1 to force the pure implementation.
"""

import os

from . import _kernels_py as _py

_compiled = None
if os.environ.get("SHADOWLAB_PURE") != "1":
    try:
        from . import _core as _compiled
    except ImportError:
        _compiled = None

USING_COMPILED = _compiled is not None

# max |entry| admissible per elimination size
_CAPS = {
    0: 1 << 30,
    1: 1 << 30,
    2: 1 << 30,
    3: 1 << 19,
    4: 1 << 14,
    5: 1 << 11,
    6: 1 << 9,
    7: 1 << 7,
    8: 1 << 6,
}


def _within(rows, size):
    cap = _CAPS.get(size)
    if cap is None:
        return False
    for r in rows:
        for x in r:
            if x > cap or -x > cap:
                return False
    return True


def det_int(rows):
    if _compiled is not None and _within(rows, len(rows)):
        return _compiled.det_int(rows)
    return _py.det_int(rows)


def rank_int(rows):
    if _compiled is not None and rows and len(rows) <= 64:
        size = min(len(rows), len(rows[0]))
        if len(rows[0]) <= 12 and _within(rows, size):
            return _compiled.rank_int(rows)
    return _py.rank_int(rows)


def sign_range(points, normal, offset):
    if (
        _compiled is not None
        and len(normal) <= 12
        and -(1 << 62) < offset < (1 << 62)
        and _within([normal], 2)
        and _within(points, 2)
    ):
        return _compiled.sign_range(points, normal, offset)
    return _py.sign_range(points, normal, offset)
