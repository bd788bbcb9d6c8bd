# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled coefficient kernels for truncated series over F_p.

Same contract as charp._kernel_py: vectors are Python lists of ints reduced
mod p, lowest exponent first.
"""

from libc.stdlib cimport free, malloc

BACKEND = "c"


cdef long* _to_buf(list a) except NULL:
    cdef Py_ssize_t n = len(a)
    cdef long* buf = <long*> malloc(n * sizeof(long) if n else sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(n):
        buf[i] = a[i]
    return buf


def mul(list a, list b, int p, nmax=None):
    """Truncated product of coefficient vectors: first nmax coefficients of a*b."""
    cdef Py_ssize_t na = len(a), nb = len(b)
    if na == 0 or nb == 0:
        return []
    cdef Py_ssize_t n = na + nb - 1
    if nmax is not None:
        if <Py_ssize_t> nmax < n:
            n = <Py_ssize_t> nmax
    if n <= 0:
        return []
    cdef long* pa = _to_buf(a)
    cdef long* pb = _to_buf(b)
    cdef long* out = <long*> malloc(n * sizeof(long))
    if out == NULL:
        free(pa)
        free(pb)
        raise MemoryError()
    cdef Py_ssize_t i, j, hi
    cdef long acc
    # accumulate in a long; flush mod p inside the loop to avoid overflow
    cdef long cap = (<long> 1 << 62) // (p * <long> p) - 1
    for i in range(n):
        acc = 0
        j = i - nb + 1
        if j < 0:
            j = 0
        hi = i
        if hi > na - 1:
            hi = na - 1
        if hi - j > cap:
            # unreachable at realistic sizes, kept for safety
            while j <= hi:
                acc = (acc + pa[j] * pb[i - j]) % p
                j += 1
        else:
            while j <= hi:
                acc += pa[j] * pb[i - j]
                j += 1
        out[i] = acc % p
    result = [out[i] for i in range(n)]
    free(pa)
    free(pb)
    free(out)
    return result


def inv(list a, int p, Py_ssize_t n):
    """First n coefficients of 1/a for a unit series (a[0] != 0 mod p)."""
    cdef Py_ssize_t na = len(a)
    if na == 0 or a[0] % p == 0:
        raise ZeroDivisionError("series has no invertible leading coefficient")
    if n <= 0:
        return []
    cdef long* pa = _to_buf(a)
    cdef long* x = <long*> malloc(n * sizeof(long))
    if x == NULL:
        free(pa)
        raise MemoryError()
    cdef long a0inv = 1
    cdef long base = pa[0] % p, e = p - 2
    while e:
        if e & 1:
            a0inv = (a0inv * base) % p
        base = (base * base) % p
        e >>= 1
    x[0] = a0inv
    cdef Py_ssize_t k, j, hi
    cdef long acc
    for k in range(1, n):
        acc = 0
        hi = k if k < na - 1 else na - 1
        for j in range(1, hi + 1):
            acc = (acc + pa[j] * x[k - j]) % p
        x[k] = (-(a0inv * acc)) % p
        if x[k] < 0:
            x[k] += p
    result = [x[k] for k in range(n)]
    free(pa)
    free(x)
    return result
