"""Kernel backend selection.

The hot kernels (cyclic Jacobi eigensolver, Cholesky) exist twice: a Cython
extension (``corrgen._kernels``) and a NumPy fallback
(``corrgen._kernels_py``). The extension is preferred; set
``CORRGEN_PURE_PYTHON=1`` to force the fallback, e.g. for benchmarking.
"""

import os
import warnings

from corrgen import _kernels_py

if os.environ.get("CORRGEN_PURE_PYTHON", "") == "1":
    _impl = _kernels_py
else:
    try:
        from corrgen import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on build environment
        warnings.warn(
            "corrgen._kernels extension not built; falling back to the slow "
            "NumPy kernels (pip install -e . --no-build-isolation to build)",
            RuntimeWarning,
            stacklevel=2,
        )
        _impl = _kernels_py

BACKEND = _impl.BACKEND_NAME
jacobi_eigh = _impl.jacobi_eigh
cholesky_lower = _impl.cholesky_lower
