"""Backend selection for the hot loops.

The compiled extension ``hdsim._ckernels`` is used when it has been built;
otherwise, or when ``HDSIM_PURE_PYTHON=1`` is set, the NumPy versions in
``hdsim._pykernels`` are used. Both take row-major ``(n_paths, n_steps)``
increment arrays.
"""

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("HDSIM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def _c(a, dtype=float):
    return np.ascontiguousarray(a, dtype=dtype)


def euler_ito(x0, db, dw, dt, alpha, eps, cap=np.inf, impl=None):
    """Euler-Maruyama for the Ito form. Returns ``(paths, first_bad_index)``."""
    impl = impl or _impl
    return impl.euler_ito(float(x0), _c(db), _c(dw), float(dt), float(alpha), float(eps), float(cap))


def heun_strat(x0, db, dw, alpha, eps, impl=None):
    impl = impl or _impl
    return impl.heun_strat(float(x0), _c(db), _c(dw), float(alpha), float(eps))


def skew_walk(j0, u, p_up, impl=None):
    impl = impl or _impl
    return impl.skew_walk(int(j0), _c(u), float(p_up))
