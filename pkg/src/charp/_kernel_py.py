"""Pure-Python coefficient kernels for truncated series over F_p.

Coefficient vectors are plain lists of ints reduced mod p, lowest exponent
first.  Multiplication packs each vector into one big integer with 32-bit
limbs, so the whole convolution runs inside CPython's long multiplication;
a single limb of the product is bounded by min(len) * (p-1)**2, so no carry
can cross a limb boundary as long as that stays below 2**32.  For primes too
large for the packed bound we fall back to a schoolbook loop.
"""

from array import array

BACKEND = "python"

_LIMB_BITS = 32
_LIMB_BYTES = 4


def _pack(vec):
    return int.from_bytes(array("I", vec).tobytes(), "little")


def _unpack(n, count, p):
    raw = n.to_bytes(count * _LIMB_BYTES, "little")
    return [x % p for x in array("I", raw)]


def mul(a, b, p, nmax=None):
    """Truncated product of coefficient vectors: first nmax coefficients of a*b."""
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if nmax is not None:
        n = min(n, nmax)
    if n <= 0:
        return []
    if min(len(a), len(b)) * (p - 1) * (p - 1) < (1 << _LIMB_BITS):
        prod = _pack(a) * _pack(b)
        prod &= (1 << (_LIMB_BITS * n)) - 1
        return _unpack(prod, n, p)
    # large-prime fallback: plain truncated convolution
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        for j, bj in enumerate(b):
            k = i + j
            if k >= n:
                break
            out[k] = (out[k] + ai * bj) % p
    return out


def inv(a, p, n):
    """First n coefficients of 1/a for a unit series (a[0] != 0 mod p).

    Newton iteration x -> x*(2 - a*x), doubling the certified length each
    round; every step reuses the packed multiplication above.
    """
    if not a or a[0] % p == 0:
        raise ZeroDivisionError("series has no invertible leading coefficient")
    if n <= 0:
        return []
    x = [pow(a[0], p - 2, p)]
    while len(x) < n:
        m = min(2 * len(x), n)
        ax = mul(a[:m], x, p, m)
        t = [(-c) % p for c in ax]
        t[0] = (t[0] + 2) % p
        x = mul(x, t, p, m)
        if len(x) < m:
            x = x + [0] * (m - len(x))
    return x[:n]
