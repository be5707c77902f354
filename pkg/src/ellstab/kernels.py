"""Select the compiled numeric kernel when it is importable.

Set ``ELLSTAB_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("ELLSTAB_PURE_PYTHON"):
        raise ImportError("pure-python kernel forced")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def term_products(term_index, kinds, xs, sqrts, powers, nterms, q, trunc, backend=None):
    """Per-term (numerator, denominator) products of theta/phi/hat factor values.

    ``kinds`` uses 0 for theta, 1 for the pochhammer symbol and 2 for
    ``x^(1/2) - x^(-1/2)``.
    """
    backend = backend or BACKEND
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available")
        return _compiled.term_products(
            np.asarray(term_index, dtype=np.int64),
            np.asarray(kinds, dtype=np.int64),
            np.asarray(xs, dtype=np.complex128),
            np.asarray(sqrts, dtype=np.complex128),
            np.asarray(powers, dtype=np.int64),
            int(nterms), complex(q), int(trunc),
        )
    return _kernels_py.term_products(term_index, kinds, xs, sqrts, powers, nterms, complex(q), int(trunc))
