# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled truncated-product kernels for numeric theta evaluation."""

import numpy as np


cdef double complex _phi(double complex x, double complex q, int trunc) nogil:
    cdef double complex acc = 1.0
    cdef double complex qi = 1.0
    cdef int i
    for i in range(trunc + 1):
        acc = acc * (1.0 - x * qi)
        qi = qi * q
    return acc


def term_products(long[:] term_index, long[:] kinds, double complex[:] xs,
                  double complex[:] sqrts, long[:] powers, int nterms,
                  double complex q, int trunc):
    """Return (numerators, denominators) of the factor products of each term."""
    num_arr = np.ones(nterms, dtype=np.complex128)
    den_arr = np.ones(nterms, dtype=np.complex128)
    cdef double complex[:] num = num_arr
    cdef double complex[:] den = den_arr
    cdef Py_ssize_t n = xs.shape[0]
    cdef Py_ssize_t k
    cdef long p, j
    cdef double complex val, x, s
    with nogil:
        for k in range(n):
            x = xs[k]
            s = sqrts[k]
            if kinds[k] == 0:
                val = (s - 1.0 / s) * _phi(q * x, q, trunc) * _phi(q / x, q, trunc)
            elif kinds[k] == 1:
                val = _phi(x, q, trunc)
            else:
                val = s - 1.0 / s
            p = powers[k]
            if p > 0:
                for j in range(p):
                    num[term_index[k]] = num[term_index[k]] * val
            else:
                for j in range(-p):
                    den[term_index[k]] = den[term_index[k]] * val
    return num_arr, den_arr
