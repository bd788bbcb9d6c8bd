"""The coefficient recurrence and its level sums.

Everything here is organized around one kernel quantity: for a window (r, s)
the normalized multinomial sum

    Phi(r, s) = (1 / (lambda * (1 - lambda^s))) * sum over multi-indices of
                binom(r+1; alpha)_p * a^alpha,

and the level-k sums phi_k(r, s), which add up products of Phi over chains
from r to s whose interior avoids multiples of p^k.  Chain sets grow like
2^(s-r-1), so phi_k is computed by an O((s-r)^2)-edge interval dynamic
program over admissible points; explicit enumeration only appears in tests.

A LevelTable owns all memoized values for one map at one working window.
Escalation (doubling the window after an uncertified valuation query) wipes
the table; inserts are idempotent, so concurrent reads are harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .combinat import Chain, degree_solutions, multinomial_residue
from .errors import (
    DegenerateLinearMap,
    DivisibilityViolation,
    PrecisionExhausted,
    UncertifiedLeadingTerm,
)
from .field import (
    LaurentElement,
    Multiplier,
    PrimeContext,
    make_lambda,
    parse_laurent,
    val_p,
    val_p_ext,
)

INF = math.inf


class DynamicalSeries:
    """The map f(z) = z*(lambda + sum_i a_i z^i) with finitely many a_i.

    Derived data: u = gcd of the support {i : a_i != 0} and tau = val_p(u).
    By convention a_0 = lambda.  The degenerate f = lambda*z can be built,
    but u/tau (and everything downstream) reject it.
    """

    def __init__(self, ctx: PrimeContext, multiplier: Multiplier, coeffs: dict[int, LaurentElement]):
        self.ctx = ctx
        self.multiplier = multiplier
        clean: dict[int, LaurentElement] = {}
        for i, a in sorted(coeffs.items()):
            if i < 1:
                raise ValueError(f"coefficient index must be >= 1, got {i}")
            if not a.exact:
                raise ValueError(f"a_{i} must be an exact Laurent polynomial")
            if a.is_exact_zero():
                continue
            clean[i] = a
        self.coeffs = clean
        self.support = tuple(sorted(clean))
        self._table = None

    @classmethod
    def from_spec(cls, p, coeffs, lam=None, default_window=64, max_window=8192):
        """Convenience builder: coeffs maps i to an int, Laurent literal or
        LaurentElement; lam is a Laurent literal (default 1 + t)."""
        ctx = PrimeContext(p, default_window, max_window)
        mult = make_lambda(ctx, lam)
        table = {}
        for i, v in coeffs.items():
            if isinstance(v, LaurentElement):
                table[i] = v
            elif isinstance(v, int):
                table[i] = LaurentElement.from_terms(p, {0: v})
            else:
                table[i] = parse_laurent(p, v)
        return cls(ctx, mult, table)

    @property
    def p(self):
        return self.ctx.p

    @property
    def lam(self):
        return self.multiplier.lam

    @property
    def u(self):
        if not self.support:
            raise DegenerateLinearMap("f = lambda*z has empty support")
        return math.gcd(*self.support)

    @property
    def tau(self):
        return val_p(self.u, self.p)

    def a(self, i):
        """Coefficient a_i, with a_0 = lambda."""
        if i == 0:
            return self.multiplier.lam
        return self.coeffs.get(i, LaurentElement.zero(self.p))

    def table(self):
        """The map's default LevelTable (created lazily, shared)."""
        if self._table is None:
            self._table = LevelTable(self)
        return self._table

    def __repr__(self):
        parts = " + ".join(f"a{i}*z^{i + 1}" for i in self.support)
        return f"<f(z) = lambda*z + {parts} over F_{self.p}((t))>"


class LevelTable:
    """Memoized Phi / phi_k values for one map at one working window."""

    def __init__(self, f: DynamicalSeries, window: int | None = None):
        self.f = f
        self.window = window if window is not None else f.ctx.default_window
        self._reset()

    def _reset(self):
        self._num = {}        # (r, s) -> numerator of Phi
        self._phi = {}        # (k, r, s) -> phi_k(r, s)
        self._dp = {}         # (k, r) -> {"g": {x: value}, "hi": int}
        self._invpref = {}    # s -> 1 / (lambda * (1 - lambda^s)), width window
        self._psi_pref = {}   # (k, s) -> psi rescaling factor, width window
        self._pow_win = {}    # (i, e) -> window-truncated power of a_i (i=0: lambda)
        self._gap = {}        # s - r -> per-solution data shared across windows
        self._gap_prod = {}   # (s - r, entries) -> coefficient-power product

    def escalate(self):
        """Double the window and drop every cached value.

        Raises PrecisionExhausted once the cap is hit, which is the honest
        end state for a query whose value cannot be certified.
        """
        if self.window * 2 > self.f.ctx.max_window:
            raise PrecisionExhausted(
                f"window cap {self.f.ctx.max_window} reached (at {self.window})"
            )
        self.window *= 2
        self._reset()

    # -- cached building blocks ---------------------------------------------

    def _pow_window(self, i: int, e: int) -> LaurentElement:
        """a_i**e (a_0 = lambda), exact when small, else width-window certified."""
        key = (i, e)
        got = self._pow_win.get(key)
        if got is None:
            base = self.f.a(i)
            span = len(base.coeffs)
            if span == 1 or (span - 1) * e < 4 * self.window:
                got = base**e
            else:
                got = base.truncate(self.window) ** e
            self._pow_win[key] = got
        return got

    def _inv_prefactor(self, s: int) -> LaurentElement:
        got = self._invpref.get(s)
        if got is None:
            mult = self.f.multiplier
            denom = mult.lam * mult.one_minus_pow(s)
            got = denom.inverse(self.window)
            self._invpref[s] = got
        return got

    def _gap_solutions(self, d: int):
        """Per-gap data shared by every window with s - r = d: for each
        degree solution, its weight, the exact valuation floor of its
        coefficient product, and the parts fed to the multinomial.  The
        products themselves are built lazily (most solutions never survive
        the window pruning)."""
        got = self._gap.get(d)
        if got is None:
            avals = {i: a.val_t() for i, a in self.f.coeffs.items()}
            got = []
            for weight, _slots, entries in degree_solutions(tuple(self.f.support), d):
                tval = sum(v * avals[i] for i, v in entries)
                got.append((weight, tval, entries, [v for _i, v in entries]))
            self._gap[d] = got
        return got

    def _solution_product(self, d: int, entries) -> LaurentElement:
        key = (d, entries)
        got = self._gap_prod.get(key)
        if got is None:
            got = None
            for i, v in entries:
                factor = self._pow_window(i, v)
                got = factor if got is None else got * factor
            if got is None:
                got = LaurentElement.one(self.f.p)
            self._gap_prod[key] = got
        return got

    def numerator(self, r: int, s: int) -> LaurentElement:
        """The multinomial sum of Phi(r, s), before the 1/(lambda(1-lambda^s))
        factor.  Exact zero when the window has no multi-indices or all
        residues vanish; those are the structural zeros that make slopes
        +infinity, as opposed to precision accidents.

        Solutions whose valuation floor lies beyond the working window of
        the leading one cannot contribute certified coefficients; they are
        skipped and recorded as a horizon instead (so the window, not the
        value, shrinks; escalation recovers them when it matters)."""
        key = (r, s)
        got = self._num.get(key)
        if got is not None:
            return got
        p = self.f.p
        feasible = [
            sol for sol in self._gap_solutions(s - r) if sol[0] <= r + 1
        ]
        if not feasible:
            out = LaurentElement.zero(p)
            self._num[key] = out
            return out
        vfloor = min(tv for _w, tv, _pr, _pa in feasible)
        cap = vfloor + self.window
        dropped = []
        terms = []
        for weight, tval, entries, parts in feasible:
            if tval >= cap:
                dropped.append((weight, tval, parts))
                continue
            alpha0 = r + 1 - weight
            c = multinomial_residue(r + 1, [alpha0] + parts, p)
            if c == 0:
                continue
            term = self._solution_product(s - r, entries).scale(c)
            if alpha0:
                term = term * self._pow_window(0, alpha0)
            terms.append(term)
        horizon = None
        if not terms and dropped:
            # nothing certified below the pruned region: residues there are
            # cheap and decide between a structural zero and a horizon zero
            for weight, tval, parts in dropped:
                if multinomial_residue(r + 1, [r + 1 - weight] + parts, p):
                    horizon = tval if horizon is None else min(horizon, tval)
            dropped = [] if horizon is None else dropped
        elif dropped:
            horizon = min(tval for _w, tval, _pa in dropped)
        if not terms:
            out = (
                LaurentElement.zero(p)
                if not dropped
                else LaurentElement.zero_up_to(p, horizon)
            )
        else:
            out = terms[0]
            for term in terms[1:]:
                out = out + term
            if horizon is not None:
                out = LaurentElement(p, out.vmin, out.coeffs, min(out._known(), horizon))
        self._num[key] = out
        return out

    def Phi(self, r: int, s: int) -> LaurentElement:
        """The recurrence kernel on the raw window (r, s)."""
        num = self.numerator(r, s)
        if num.is_exact_zero():
            return num
        return num * self._inv_prefactor(s)

    # -- level sums by interval DP -------------------------------------------

    def _interior_ok(self, k, x):
        if k == INF:
            return True
        return x % (self.f.p ** int(k)) != 0

    def _node_value(self, g, x):
        """Sum over admissible y < x of g[y] * Phi(u*y, u*x).

        The products are merged into one buffer in a single pass; rebuilding
        the accumulator element per term would dominate the whole DP.
        """
        u = self.f.u
        p = self.f.p
        terms = []
        for y, gy in g.items():
            if y >= x or gy.is_exact_zero():
                continue
            num = self.numerator(u * y, u * x)
            if num.is_exact_zero():
                continue
            terms.append(gy * num)
        if not terms:
            return LaurentElement.zero(p)
        known = min(t._known() for t in terms)
        stored = [t for t in terms if t.coeffs]
        if not stored:
            acc = (
                LaurentElement.zero(p)
                if known == INF
                else LaurentElement.zero_up_to(p, known)
            )
        else:
            lo = min(t.vmin for t in stored)
            hi = max(t.vmin + len(t.coeffs) for t in stored)
            if known != INF:
                hi = min(hi, known)
            out = [0] * max(hi - lo, 0)
            for t in stored:
                base = t.vmin - lo
                for idx, c in enumerate(t.coeffs):
                    if base + idx < len(out):
                        out[base + idx] = (out[base + idx] + c) % p
            acc = LaurentElement(p, lo, out, None if known == INF else known)
        if acc.is_exact_zero():
            return acc
        return acc * self._inv_prefactor(u * x)

    def phi(self, k, r: int, s: int) -> LaurentElement:
        """Level-k chain sum on (r, s), by DP over admissible points.

        The per-(k, r) DP state is shared between targets, so sampling many
        s values against one base point costs one quadratic sweep total.
        """
        if not (0 <= r < s):
            raise ValueError(f"need 0 <= r < s, got ({r}, {s})")
        key = (k, r, s)
        got = self._phi.get(key)
        if got is not None:
            return got
        st = self._dp.get((k, r))
        if st is None:
            st = {"g": {r: LaurentElement.one(self.f.p)}, "hi": r}
            self._dp[(k, r)] = st
        g = st["g"]
        for x in range(st["hi"] + 1, s):
            if self._interior_ok(k, x):
                g[x] = self._node_value(g, x)
        if st["hi"] < s - 1:
            st["hi"] = s - 1
        if s in g:
            val = g[s]
        else:
            val = self._node_value(g, s)
            if self._interior_ok(k, s) and st["hi"] == s - 1:
                g[s] = val
                st["hi"] = s
        self._phi[key] = val
        return val

    def _psi_prefactor(self, k: int, s: int) -> LaurentElement:
        key = (k, s)
        got = self._psi_pref.get(key)
        if got is None:
            f = self.f
            mult = f.multiplier
            us = f.u * s
            denom = mult.one_minus_pow(f.p ** (k + f.tau)) * mult.pow(us - 1)
            got = mult.one_minus_pow(us) * denom.inverse(self.window)
            self._psi_pref[key] = got
        return got

    def psi(self, k: int, r: int, s: int) -> LaurentElement:
        """phi_k rescaled so that its valuation over (s - r) is the Newton
        slope; the rescaling is valuation-neutral exactly when val_p(s) = k."""
        ph = self.phi(k, r, s)
        if ph.is_exact_zero():
            return ph
        return ph * self._psi_prefactor(k, s)


def run_certified(table: LevelTable, thunk):
    """Run thunk, enlarging the table's window until its valuation queries
    certify (or the cap raises PrecisionExhausted)."""
    while True:
        try:
            return thunk()
        except UncertifiedLeadingTerm:
            table.escalate()


def _tbl(f: DynamicalSeries, table: LevelTable | None) -> LevelTable:
    return table if table is not None else f.table()


# -- module-level operations -------------------------------------------------

def Phi(f: DynamicalSeries, r: int, s: int, table: LevelTable | None = None) -> LaurentElement:
    return _tbl(f, table).Phi(r, s)


def Phi_chain(f: DynamicalSeries, beta: Chain, table: LevelTable | None = None) -> LaurentElement:
    """Product of Phi over consecutive chain pairs, scaled by u."""
    t = _tbl(f, table)
    u = f.u
    out = LaurentElement.one(f.p)
    for b0, b1 in beta.pairs():
        step = t.Phi(u * b0, u * b1)
        if step.is_exact_zero():
            return LaurentElement.zero(f.p)
        out = out * step
    return out


def phi_k(f: DynamicalSeries, k, r: int, s: int, table: LevelTable | None = None) -> LaurentElement:
    return _tbl(f, table).phi(k, r, s)


def psi_k(f: DynamicalSeries, k: int, r: int, s: int, table: LevelTable | None = None) -> LaurentElement:
    return _tbl(f, table).psi(k, r, s)


def _chain_sum(r: int, s: int, interior_ok, edge, zero, one):
    """Generic interval DP: sum over increasing chains r -> s with admissible
    interiors of the product of edge values."""
    g = {r: one}
    for x in range(r + 1, s + 1):
        target = x == s
        if not target and not interior_ok(x):
            continue
        acc = zero
        for y, gy in g.items():
            if gy.is_exact_zero():
                continue
            w = edge(y, x)
            if w.is_exact_zero():
                continue
            acc = acc + gy * w
        if target:
            return acc
        g[x] = acc
    raise AssertionError("unreachable: target s never visited")


def phi_k_via_recursion(
    f: DynamicalSeries, k_prime, k: int, r: int, s: int, table: LevelTable | None = None
) -> LaurentElement:
    """Evaluate phi_{k'}(r, s) through the coarser level-k grid:
    chains on (r/p^k, s/p^k) at level k' - k, with phi_k edge weights.

    Must equal phi_k(f, k_prime, r, s); exercised as a cross-check of the DP.
    """
    t = _tbl(f, table)
    p = f.p
    if k < 0 or k > min(val_p_ext(r, p), val_p_ext(s, p)) or (k_prime != INF and k > k_prime):
        raise DivisibilityViolation(
            f"level {k} does not divide the grid ({r}, {s}) or exceeds {k_prime}"
        )
    q = p**k
    level = INF if k_prime == INF else k_prime - k
    zero = LaurentElement.zero(p)
    one = LaurentElement.one(p)

    def interior_ok(x):
        return level == INF or x % (p ** int(level)) != 0

    return _chain_sum(
        r // q,
        s // q,
        interior_ok,
        lambda y, x: t.phi(k, y * q, x * q),
        zero,
        one,
    )


@dataclass(frozen=True)
class ConjugacyPrefix:
    """The first coefficients b_0..b_N of the normalized conjugacy
    h(z) = z * sum b_n z^n; b_0 = 1 and b_n = 0 whenever u does not divide n."""

    coefficients: tuple[LaurentElement, ...]

    def __getitem__(self, n):
        return self.coefficients[n]

    def __len__(self):
        return len(self.coefficients)


def b_coeffs(f: DynamicalSeries, N: int, table: LevelTable | None = None) -> ConjugacyPrefix:
    """Conjugacy coefficients by the triangular recurrence
    b_n = sum_{l < n} b_l * Phi(l, n), b_0 = 1."""
    if N < 0:
        raise ValueError("need N >= 0")
    t = _tbl(f, table)
    p = f.p
    u = f.u if f.support else 0
    b = [LaurentElement.one(p)]
    zero = LaurentElement.zero(p)
    for n in range(1, N + 1):
        if u == 0 or n % u:
            b.append(zero)
            continue
        acc = zero
        for l in range(0, n, u):
            if b[l].is_exact_zero():
                continue
            step = t.Phi(l, n)
            if step.is_exact_zero():
                continue
            acc = acc + b[l] * step
        b.append(acc)
    return ConjugacyPrefix(tuple(b))


def b_via_structure(f: DynamicalSeries, n: int, k: int, table: LevelTable | None = None) -> LaurentElement:
    """b_n evaluated through the level-k grid structure: chains on
    (0, n/(u p^k)) with phi_k edge weights.  Equals b_coeffs(f, n)[n]."""
    if n < 1:
        raise ValueError("need n >= 1")
    t = _tbl(f, table)
    p = f.p
    u = f.u
    if n % u:
        return LaurentElement.zero(p)
    m = n // u
    if k < 0 or k > val_p_ext(m, p):
        raise DivisibilityViolation(
            f"level {k} exceeds val_p({n}/{u}) = {val_p_ext(m, p)}"
        )
    q = p**k
    zero = LaurentElement.zero(p)
    one = LaurentElement.one(p)
    return _chain_sum(
        0,
        m // q,
        lambda x: True,
        lambda y, x: t.phi(k, y * q, x * q),
        zero,
        one,
    )


def conjugacy_residual(f: DynamicalSeries, N: int, table: LevelTable | None = None) -> list[LaurentElement]:
    """Coefficients of z^2..z^(N+1) in h(f(z)) - lambda*h(z), where h is built
    from b_coeffs.  All must vanish on their certified windows: this checks
    the recurrence against the conjugacy equation it came from, by direct
    truncated composition rather than by the recurrence itself."""
    if N < 1:
        raise ValueError("need N >= 1")
    t = _tbl(f, table)
    p = f.p
    b = b_coeffs(f, N, t).coefficients
    top = N + 1  # highest tracked power of z
    zero = LaurentElement.zero(p)

    # f(z) as a z-polynomial, clipped at z^top
    fz = [zero] * (top + 1)
    fz[1] = f.lam
    for i, a in f.coeffs.items():
        if i + 1 <= top:
            fz[i + 1] = a

    def zmul(a_vec, b_vec):
        out = [zero] * (top + 1)
        for i, ai in enumerate(a_vec):
            if ai.is_exact_zero():
                continue
            for j, bj in enumerate(b_vec):
                if i + j > top:
                    break
                if bj.is_exact_zero():
                    continue
                out[i + j] = out[i + j] + ai * bj
        return out

    hf = [zero] * (top + 1)
    fpow = [zero] * (top + 1)
    fpow[0] = LaurentElement.one(p)
    for m in range(0, N + 1):
        fpow = zmul(fpow, fz)  # f(z)^(m+1)
        if b[m].is_exact_zero():
            continue
        for j in range(top + 1):
            if not fpow[j].is_exact_zero():
                hf[j] = hf[j] + b[m] * fpow[j]

    out = []
    for j in range(2, top + 1):
        lh = f.lam * b[j - 1] if j - 1 <= N else zero
        out.append(hf[j] - lh)
    return out
