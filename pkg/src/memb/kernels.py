"""Backend selection for the hot loops.

The compiled ``_ckernels`` extension is used when it was built; otherwise the
numpy fallback in ``_pykernels``. Set ``MEMB_PURE_PYTHON=1`` to force the
fallback.
"""
import os

import numpy as np

from . import _pykernels

if os.environ.get("MEMB_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def _c(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def closure_mask(mul, gens, impl=None):
    """Boolean mask of the subgroup generated by ``gens`` in the table ``mul``."""
    impl = impl or _impl
    return impl.closure_mask(_c(mul), _c(np.asarray(gens, dtype=np.int64).reshape(-1))).astype(bool)


def fq_rref(m, tables, impl=None):
    """Return ``(R, pivots)`` with R the reduced row echelon form of ``m``."""
    impl = impl or _impl
    r = _c(m).copy()
    add, mul, neg, inv = tables
    pivots = impl.fq_rref(r, add, mul, neg, inv)
    return r, list(pivots)


def fq_matmul(a, b, tables, impl=None):
    impl = impl or _impl
    add, mul, _, _ = tables
    return impl.fq_matmul(_c(a), _c(b), add, mul)
