"""Exact residue arithmetic mod p and truncated Laurent series over F_p.

An element of F_p((t)) is stored as a window of certified coefficients:
everything from ``vmin`` up to (but excluding) ``known_to`` is known exactly,
everything at or above ``known_to`` is unknown.  ``known_to is None`` means
the element is an exact Laurent polynomial with no truncation at all.

Windows only ever shrink through leading-term cancellation in sums, so a
value whose window came out empty is "zero up to the horizon", which is a
different thing from the exact zero (empty support).  Valuation queries on
the former raise :class:`UncertifiedLeadingTerm` so that drivers can enlarge
the window and recompute; the latter has valuation +infinity.

All elements are immutable and every operation is pure, so values can be
shared freely across threads.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

from . import _backend
from .errors import UncertifiedLeadingTerm

INF = math.inf


def val_p(n: int, p: int) -> int:
    """Largest e with p**e dividing n, for n >= 1."""
    if n < 1:
        raise ValueError(f"val_p needs n >= 1, got {n}")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def val_p_ext(n: int, p: int):
    """val_p extended by the convention val_p(0) = +infinity."""
    return INF if n == 0 else val_p(n, p)


class PrimeContext:
    """The ambient prime together with the t-precision budget.

    default_window is the width (number of certified t-coefficients) used by
    fresh computations; escalation doubles it up to max_window.
    """

    __slots__ = ("p", "default_window", "max_window")

    def __init__(self, p: int, default_window: int = 64, max_window: int = 8192):
        if p < 3 or not _is_prime(p):
            raise ValueError(f"p must be an odd prime >= 3, got {p}")
        if not (0 < default_window <= max_window):
            raise ValueError("need 0 < default_window <= max_window")
        self.p = p
        self.default_window = default_window
        self.max_window = max_window

    def __repr__(self):
        return f"PrimeContext(p={self.p}, default_window={self.default_window}, max_window={self.max_window})"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class LaurentElement:
    """A certified window of a Laurent series over F_p.

    Stored coefficients cover exponents [vmin, vmin + len(coeffs)); the
    leading and trailing stored coefficients are nonzero (or the store is
    empty).  Exponents from the end of the store up to known_to are known to
    be zero; from known_to on, nothing is claimed.
    """

    __slots__ = ("p", "vmin", "coeffs", "known_to")

    def __init__(self, p, vmin, coeffs, known_to=None):
        # normalize: strip leading/trailing zeros, clip to the window
        i = 0
        n = len(coeffs)
        while i < n and coeffs[i] == 0:
            i += 1
        vmin += i
        j = n
        while j > i and coeffs[j - 1] == 0:
            j -= 1
        coeffs = list(coeffs[i:j])
        if known_to is not None and coeffs and vmin + len(coeffs) > known_to:
            coeffs = coeffs[: max(known_to - vmin, 0)]
            while coeffs and coeffs[-1] == 0:
                coeffs.pop()
        if not coeffs:
            vmin = 0
        self.p = p
        self.vmin = vmin
        self.coeffs = tuple(coeffs)
        self.known_to = known_to

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, p):
        return cls(p, 0, ())

    @classmethod
    def one(cls, p):
        return cls(p, 0, (1,))

    @classmethod
    def t_power(cls, p, e, c=1):
        return cls(p, e, (c % p,))

    @classmethod
    def from_terms(cls, p, terms):
        """Exact element from a mapping exponent -> integer coefficient."""
        terms = {e: c % p for e, c in terms.items() if c % p}
        if not terms:
            return cls.zero(p)
        lo = min(terms)
        hi = max(terms)
        coeffs = [0] * (hi - lo + 1)
        for e, c in terms.items():
            coeffs[e - lo] = c
        return cls(p, lo, coeffs)

    @classmethod
    def zero_up_to(cls, p, known_to):
        """Element known to vanish below known_to, unknown beyond."""
        return cls(p, 0, (), known_to)

    # -- predicates --------------------------------------------------------

    @property
    def exact(self):
        return self.known_to is None

    def is_exact_zero(self):
        return self.exact and not self.coeffs

    def is_zero_within_window(self):
        """No nonzero coefficient anywhere in the certified range."""
        return not self.coeffs

    def has_certified_leading_term(self):
        return bool(self.coeffs)

    # -- valuation ---------------------------------------------------------

    def val_t(self):
        """Exponent of the leading coefficient; +inf for the exact zero."""
        if self.coeffs:
            return self.vmin
        if self.exact:
            return INF
        raise UncertifiedLeadingTerm(
            f"zero up to t^{self.known_to}; larger window needed"
        )

    def val_t_lb(self):
        """Certified lower bound on val_t (never raises)."""
        if self.coeffs:
            return self.vmin
        if self.exact:
            return INF
        return self.known_to

    # -- arithmetic --------------------------------------------------------

    def _known(self):
        return INF if self.known_to is None else self.known_to

    def _start(self):
        # earliest exponent at which this element could be nonzero
        if self.coeffs:
            return self.vmin
        return self._known()

    def __add__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        p = self.p
        known = min(self._known(), other._known())
        if not self.coeffs and not other.coeffs:
            if known == INF:
                return LaurentElement.zero(p)
            return LaurentElement.zero_up_to(p, known)
        parts = [x for x in (self, other) if x.coeffs]
        lo = min(x.vmin for x in parts)
        hi = max(x.vmin + len(x.coeffs) for x in parts)
        if known != INF:
            hi = min(hi, known)
        out = [0] * max(hi - lo, 0)
        for x in parts:
            for idx, c in enumerate(x.coeffs):
                e = x.vmin + idx
                if e < hi:
                    out[e - lo] = (out[e - lo] + c) % p
        return LaurentElement(p, lo, out, None if known == INF else known)

    def __neg__(self):
        return LaurentElement(
            self.p, self.vmin, [(-c) % self.p for c in self.coeffs], self.known_to
        )

    def __sub__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return self + (-other)

    def scale(self, c):
        """Multiply by a residue (integer mod p)."""
        c %= self.p
        if c == 0:
            if self.exact:
                return LaurentElement.zero(self.p)
            return LaurentElement.zero_up_to(self.p, self.known_to)
        return LaurentElement(
            self.p, self.vmin, [(c * a) % self.p for a in self.coeffs], self.known_to
        )

    def __mul__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        p = self.p
        if self.is_exact_zero() or other.is_exact_zero():
            return LaurentElement.zero(p)
        known = min(self._start() + other._known(), other._start() + self._known())
        if not self.coeffs or not other.coeffs:
            # zero-up-to-horizon times anything: zero up to the combined horizon
            return LaurentElement.zero_up_to(p, known)
        lo = self.vmin + other.vmin
        nmax = None if known == INF else known - lo
        out = _backend.kernel.mul(list(self.coeffs), list(other.coeffs), p, nmax)
        return LaurentElement(p, lo, out, None if known == INF else known)

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only non-negative integer powers; use inverse() for negative")
        result = LaurentElement.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def inverse(self, width=None):
        """Multiplicative inverse, certified to `width` coefficients.

        For an inexact element the width defaults to the element's own
        certified width.  Exact monomials invert exactly; any other exact
        element needs an explicit width since its inverse is an infinite
        series.
        """
        if not self.coeffs:
            if self.exact:
                raise ZeroDivisionError("inverse of exact zero")
            raise UncertifiedLeadingTerm(
                f"inverse of element that is zero up to t^{self.known_to}"
            )
        p = self.p
        if self.exact and len(self.coeffs) == 1 and width is None:
            return LaurentElement(p, -self.vmin, (pow(self.coeffs[0], p - 2, p),))
        own = None if self.known_to is None else self.known_to - self.vmin
        if width is None:
            width = own
        elif own is not None:
            width = min(width, own)
        if width is None:
            raise ValueError("width required to invert an exact non-monomial")
        out = _backend.kernel.inv(list(self.coeffs), p, width)
        return LaurentElement(p, -self.vmin, out, -self.vmin + width)

    def truncate(self, width):
        """Restrict certification to `width` coefficients past the leading term."""
        if not self.coeffs:
            return self
        cap = self.vmin + width
        if self.known_to is not None and self.known_to <= cap:
            return self
        return LaurentElement(self.p, self.vmin, self.coeffs, cap)

    # -- comparison --------------------------------------------------------

    def coefficient(self, e):
        """Certified coefficient of t^e (raises if e is past the horizon)."""
        if self.known_to is not None and e >= self.known_to:
            raise UncertifiedLeadingTerm(f"coefficient of t^{e} not certified")
        if self.coeffs and self.vmin <= e < self.vmin + len(self.coeffs):
            return self.coeffs[e - self.vmin]
        return 0

    def agrees_with(self, other):
        """Exact agreement of all coefficients on the shared certified window."""
        d = self - other
        return d.is_zero_within_window()

    def __eq__(self, other):
        if not isinstance(other, LaurentElement):
            return NotImplemented
        return (
            self.p == other.p
            and self.vmin == other.vmin
            and self.coeffs == other.coeffs
            and self.known_to == other.known_to
        )

    def __hash__(self):
        return hash((self.p, self.vmin, self.coeffs, self.known_to))

    def __repr__(self):
        if not self.coeffs:
            body = "0" if self.exact else f"O(t^{self.known_to})"
        else:
            terms = []
            for idx, c in enumerate(self.coeffs):
                if c == 0:
                    continue
                e = self.vmin + idx
                if e == 0:
                    terms.append(f"{c}")
                elif e == 1:
                    terms.append(f"{c}*t" if c != 1 else "t")
                else:
                    terms.append(f"{c}*t^{e}" if c != 1 else f"t^{e}")
            body = " + ".join(terms)
            if self.known_to is not None:
                body += f" + O(t^{self.known_to})"
        return f"<F_{self.p}((t)): {body}>"


# -- Laurent literals -------------------------------------------------------

_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-])?\s*"
    r"(?:(?P<coef>\d+)\s*(?P<star>\*)?\s*)?"
    r"(?P<t>t(?:\^(?P<exp>[+-]?\d+))?)?"
)


def parse_laurent(p: int, text: str) -> LaurentElement:
    """Parse a Laurent literal: a sum of terms ``c*t^e`` with integer c, e.

    Accepts e.g. ``1 + 4*t^-1 + t^3``, ``-t``, ``2``, ``t^2 - t``.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty Laurent literal")
    terms: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad Laurent literal {text!r} at position {pos}")
        sign, coef, star, tpart, exp = (
            m.group("sign"),
            m.group("coef"),
            m.group("star"),
            m.group("t"),
            m.group("exp"),
        )
        if coef is None and tpart is None:
            raise ValueError(f"bad Laurent literal {text!r} at position {pos}")
        if sign is None and not first:
            raise ValueError(f"missing +/- between terms in {text!r}")
        if star and tpart is None:
            raise ValueError(f"dangling '*' in Laurent literal {text!r}")
        c = int(coef) if coef is not None else 1
        if sign == "-":
            c = -c
        if tpart is None:
            e = 0
        else:
            e = int(exp) if exp is not None else 1
        terms[e] = terms.get(e, 0) + c
        pos = m.end()
        first = False
    return LaurentElement.from_terms(p, terms)


# -- the multiplier and the mu-adic valuation -------------------------------

class Multiplier:
    """lambda in 1 + t*F_p[[t]], lambda != 1, and the valuation it induces.

    In characteristic p an element of 1 + m other than 1 is automatically not
    a root of unity, so the constructor only needs to reject lambda = 1 and
    |1 - lambda| >= 1.  With mu = lambda - 1, val_mu(x) = val_t(x) / val_t(mu).
    """

    __slots__ = ("ctx", "lam", "mu", "c", "_pow_cache")

    def __init__(self, ctx: PrimeContext, lam: LaurentElement):
        if not lam.exact:
            raise ValueError("lambda must be an exact Laurent polynomial")
        mu = lam - LaurentElement.one(ctx.p)
        if mu.is_exact_zero():
            raise ValueError("lambda = 1 is a root of unity")
        if mu.val_t() < 1:
            raise ValueError("need |1 - lambda| < 1, i.e. val_t(lambda - 1) >= 1")
        self.ctx = ctx
        self.lam = lam
        self.mu = mu
        self.c = mu.val_t()
        self._pow_cache = {0: LaurentElement.one(ctx.p), 1: lam}

    @property
    def p(self):
        return self.ctx.p

    def pow(self, s: int) -> LaurentElement:
        """Exact lambda**s (memoized; exponents stay modest at desk scale)."""
        if s < 0:
            raise ValueError("negative lambda powers are not needed")
        cache = self._pow_cache
        if s in cache:
            return cache[s]
        half = self.pow(s // 2)
        result = half * half
        if s & 1:
            result = result * self.lam
        cache[s] = result
        return result

    def one_minus_pow(self, s: int) -> LaurentElement:
        """Exact 1 - lambda**s, self-checked against val_mu = p^{val_p(s)}."""
        if s < 1:
            raise ValueError("need s >= 1")
        out = LaurentElement.one(self.p) - self.pow(s)
        expected = self.c * self.p ** val_p(s, self.p)
        if out.val_t() != expected:
            raise AssertionError(
                f"val_t(1 - lambda^{s}) = {out.val_t()}, expected {expected}"
            )
        return out

    # valuations ------------------------------------------------------------

    def val_mu(self, x: LaurentElement):
        """val_mu(x) as an exact Fraction, +inf for the exact zero.

        Raises UncertifiedLeadingTerm when x is zero only up to its horizon.
        """
        v = x.val_t()
        return INF if v is INF else Fraction(v, self.c)

    def val_mu_lb(self, x: LaurentElement):
        """Certified lower bound on val_mu (exact when the leading term is)."""
        v = x.val_t_lb()
        return INF if v is INF else Fraction(v, self.c)

    def is_similar(self, a: LaurentElement, b: LaurentElement) -> bool:
        """Same leading behavior: val_mu(a) < val_mu(a - b).

        Note the exact zero is not similar to itself.
        """
        va = self.val_mu(a)
        if va is INF:
            return False
        lb = self.val_mu_lb(a - b)
        if lb > va:
            return True
        # the difference has a certified leading term at or below val(a)
        if (a - b).has_certified_leading_term():
            return False
        raise UncertifiedLeadingTerm("difference not certified deep enough")


def make_lambda(ctx: PrimeContext, spec: str | LaurentElement | None = None) -> Multiplier:
    """Build the multiplier from a Laurent literal (default ``1 + t``)."""
    if spec is None:
        lam = LaurentElement.from_terms(ctx.p, {0: 1, 1: 1})
    elif isinstance(spec, LaurentElement):
        lam = spec
    else:
        lam = parse_laurent(ctx.p, spec)
    return Multiplier(ctx, lam)
