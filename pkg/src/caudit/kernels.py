"""Backend selection for the enumeration kernels.

The compiled extension is used when it was built; otherwise the numpy
fallback.  Setting ``CAUDIT_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from caudit import _pykernels

MAX_STACK = 64

_compiled = None
if os.environ.get("CAUDIT_PURE_PYTHON") != "1":
    try:
        from caudit import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def available_backends():
    out = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def _pick(weights=None, depth=0):
    if _compiled is None or depth > MAX_STACK:
        return _pykernels
    if weights is not None and weights.dtype != np.int64:
        return _pykernels
    return _compiled


def evaluate_worlds(worlds, program):
    _pick().evaluate_worlds(worlds, *program)


def eval_prop(worlds, code, depth):
    return _pick(depth=depth).eval_prop(worlds, code)


def masked_sum(weights, mask):
    return int(_pick(weights).masked_sum(weights, mask))


def joint_histogram(worlds, cols, radices, weights, mask, size):
    return _pick(weights).joint_histogram(worlds, cols, radices, weights, mask, size)
