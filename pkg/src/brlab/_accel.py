"""Select the compiled kernels when available.

Set ``BRLAB_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("BRLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def _pts(points):
    return np.ascontiguousarray(points, dtype=float)


def ball_maximal(points, kind, period, values, weights, radii, impl=None):
    impl = impl or _impl
    return impl.ball_maximal(_pts(points), int(kind), np.ascontiguousarray(period, float),
                             np.ascontiguousarray(values, float),
                             np.ascontiguousarray(weights, float),
                             np.ascontiguousarray(radii, float))


def greedy_net(points, kind, period, sep, impl=None):
    impl = impl or _impl
    return impl.greedy_net(_pts(points), int(kind), np.ascontiguousarray(period, float),
                           float(sep))


def count_within(points, kind, period, radius, impl=None):
    impl = impl or _impl
    return impl.count_within(_pts(points), int(kind), np.ascontiguousarray(period, float),
                             float(radius))


def prefix_abs_max(basis, coeffs, checkpoints, impl=None):
    impl = impl or _impl
    return impl.prefix_abs_max(np.ascontiguousarray(basis, complex),
                               np.ascontiguousarray(coeffs, complex),
                               np.ascontiguousarray(checkpoints, np.intp))


def implementations():
    """Available implementations, keyed by backend name."""
    out = {"python": _kernels_py}
    if BACKEND == "cython":
        out["cython"] = _impl
    return out
