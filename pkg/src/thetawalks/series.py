"""Truncated Puiseux series on a 1/D exponent grid over a pluggable ring.

A series is a dense coefficient vector ``c[0..N]`` with ``c[j]`` multiplying
``x**((v+j)/D)``, plus a truncation order ``O`` (a Fraction, or None for an
exact polynomial): terms with exponent >= O are unknown, and reading them is
an error rather than a silent zero.

All operations are pure; results always carry the pessimistic truncation
order of their inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction


class TruncationError(Exception):
    """Requested data lies at or beyond the truncation order."""


class RingMismatchError(TypeError):
    """Operands live over different coefficient rings."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"exponent must be rational, got {x!r}")


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _slots(order: Fraction, D: int, v: int) -> int:
    """Number of stored slots for exponents (v+j)/D strictly below `order`."""
    lim = order * D - v
    n = math.ceil(lim)
    if n == lim:
        n = int(lim)
    return max(int(n), 0)


class PuiseuxSeries:
    __slots__ = ("ring", "D", "v", "coeffs", "order")

    def __init__(self, ring, D: int, v: int, coeffs, order, normalize: bool = True):
        self.ring = ring
        self.D = int(D)
        self.v = int(v)
        self.coeffs = list(coeffs)
        self.order = None if order is None else _frac(order)
        if normalize:
            self._normalize()

    # ------------------------------------------------------------------ util

    def _normalize(self):
        ring = self.ring
        cs = self.coeffs
        if self.order is not None and cs:
            cs = cs[: _slots(self.order, self.D, self.v)]
        while cs and ring.is_zero(cs[-1]):
            cs.pop()
        if cs:
            if ring.exact:
                lead = 0
                while lead < len(cs) and ring.is_zero(cs[lead]):
                    lead += 1
                cs = cs[lead:]
                self.v += lead
            else:
                scale = max(abs(c) for c in cs)
                if scale == 0:
                    cs = []
                else:
                    lead = 0
                    while lead < len(cs) and ring.is_negligible(cs[lead], scale):
                        lead += 1
                    cs = cs[lead:]
                    self.v += lead
                    while cs and ring.is_negligible(cs[-1], scale):
                        cs.pop()
        if not cs:
            self.v = 0
            self.coeffs = []
            return
        # reduce the grid when every populated index allows it
        if self.D > 1:
            g = math.gcd(self.D, self.v)
            for j, c in enumerate(cs):
                if g == 1:
                    break
                if not ring.is_zero(c):
                    g = math.gcd(g, self.v + j)
            if g > 1:
                cs = cs[::g]
                self.v //= g
                self.D //= g
        self.coeffs = cs

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def valuation(self) -> Fraction:
        """Exponent of the leading term (0 for the zero series)."""
        if not self.coeffs:
            return Fraction(0)
        return Fraction(self.v, self.D)

    def leading_coefficient(self):
        if not self.coeffs:
            return self.ring.zero
        return self.coeffs[0]

    def terms(self):
        return [(Fraction(self.v + j, self.D), c) for j, c in enumerate(self.coeffs)
                if not self.ring.is_zero(c)]

    def exponents(self):
        return [e for e, _ in self.terms()]

    def _retick(self, new_D: int):
        """(v, coeffs) re-expressed on grid denominator new_D (a multiple of D)."""
        k = new_D // self.D
        if k == 1:
            return self.v, self.coeffs
        ring = self.ring
        if not self.coeffs:
            return self.v * k, []
        out = [ring.zero] * ((len(self.coeffs) - 1) * k + 1)
        for j, c in enumerate(self.coeffs):
            out[j * k] = c
        return self.v * k, out

    def truncate(self, order) -> "PuiseuxSeries":
        return PuiseuxSeries(self.ring, self.D, self.v, self.coeffs,
                             _min_order(self.order, _frac(order)))

    def truncate_if(self, order) -> "PuiseuxSeries":
        if order is None:
            return self
        return self.truncate(order)

    def with_order(self, order) -> "PuiseuxSeries":
        return PuiseuxSeries(self.ring, self.D, self.v, self.coeffs,
                             None if order is None else _frac(order))

    # ------------------------------------------------------------ arithmetic

    def _check_ring(self, other: "PuiseuxSeries"):
        if self.ring is not other.ring:
            raise RingMismatchError(
                f"series over {self.ring.name} and {other.ring.name}; promote explicitly")

    def __add__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_ring(other)
        ring = self.ring
        order = _min_order(self.order, other.order)
        if self.is_zero():
            return PuiseuxSeries(ring, other.D, other.v, other.coeffs, order)
        if other.is_zero():
            return PuiseuxSeries(ring, self.D, self.v, self.coeffs, order)
        D = math.lcm(self.D, other.D)
        va, ca = self._retick(D)
        vb, cb = other._retick(D)
        v = min(va, vb)
        n = max(va + len(ca), vb + len(cb)) - v
        out = [ring.zero] * n
        out[va - v : va - v + len(ca)] = ca
        for j, c in enumerate(cb):
            out[vb - v + j] = ring.add(out[vb - v + j], c)
        return PuiseuxSeries(ring, D, v, out, order)

    def __neg__(self):
        return PuiseuxSeries(self.ring, self.D, self.v,
                             [self.ring.neg(c) for c in self.coeffs], self.order,
                             normalize=False)

    def __sub__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check_ring(other)
        ring = self.ring
        order = None
        if self.order is not None:
            order = self.order + other.valuation
        if other.order is not None:
            order = _min_order(order, other.order + self.valuation)
        if self.is_zero() or other.is_zero():
            return ps_zero(ring, order)
        D = math.lcm(self.D, other.D)
        va, ca = self._retick(D)
        vb, cb = other._retick(D)
        v = va + vb
        n = len(ca) + len(cb) - 1
        if order is not None:
            n = min(n, _slots(order, D, v))
        out = [ring.zero] * n
        for i, a in enumerate(ca):
            if i >= n or ring.is_zero(a):
                continue
            for j in range(min(len(cb), n - i)):
                b = cb[j]
                if not ring.is_zero(b):
                    out[i + j] = ring.add(out[i + j], ring.mul(a, b))
        return PuiseuxSeries(ring, D, v, out, order)

    def scale(self, c) -> "PuiseuxSeries":
        """Multiply by a ring scalar."""
        ring = self.ring
        return PuiseuxSeries(ring, self.D, self.v,
                             [ring.mul(c, x) for x in self.coeffs], self.order)

    def shift(self, alpha) -> "PuiseuxSeries":
        """Multiply by the monomial x**alpha."""
        alpha = _frac(alpha)
        D = math.lcm(self.D, alpha.denominator)
        v, cs = self._retick(D)
        order = None if self.order is None else self.order + alpha
        return PuiseuxSeries(self.ring, D, v + int(alpha * D), cs, order)

    def stretch(self, ratio) -> "PuiseuxSeries":
        """Substitute x = y^{1/ratio}: every exponent e becomes e*ratio.

        With ratio = 1/2 this rewrites an even series in x as a series in
        y = x^2 (exponents are halved)."""
        ratio = _frac(ratio)
        if ratio <= 0:
            raise ValueError("stretch ratio must be positive")
        order = None if self.order is None else self.order * ratio
        return ps_from_terms(self.ring, [(e * ratio, c) for e, c in self.terms()],
                             order=order)

    def inverse(self) -> "PuiseuxSeries":
        ring = self.ring
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero series")
        val = self.valuation
        order = None if self.order is None else self.order - 2 * val
        if self.order is None:
            if len(self.coeffs) > 1:
                raise ValueError("exact inverse of a non-monomial needs a truncation order")
            return ps_monomial(ring, ring.inv(self.coeffs[0]), -val)
        inv0 = ring.inv(self.coeffs[0])
        n = max(_slots(order, self.D, -self.v), 1)
        out = [ring.zero] * n
        out[0] = inv0
        cs = self.coeffs
        for k in range(1, n):
            acc = ring.zero
            for j in range(1, min(k, len(cs) - 1) + 1):
                cj = cs[j]
                if not ring.is_zero(cj):
                    acc = ring.add(acc, ring.mul(cj, out[k - j]))
            out[k] = ring.neg(ring.mul(inv0, acc))
        return PuiseuxSeries(ring, self.D, -self.v, out, order)

    def __truediv__(self, other):
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * other.inverse()

    def diff(self) -> "PuiseuxSeries":
        ring = self.ring
        out = [ring.mul(c, ring.from_fraction(Fraction(self.v + j, self.D)))
               for j, c in enumerate(self.coeffs)]
        order = None if self.order is None else self.order - 1
        return PuiseuxSeries(ring, self.D, self.v - self.D, out, order)

    def coeff(self, alpha):
        """Coefficient of x**alpha; raises TruncationError at/above the order."""
        alpha = _frac(alpha)
        if self.order is not None and alpha >= self.order:
            raise TruncationError(f"coefficient at {alpha} is beyond truncation {self.order}")
        idx = alpha * self.D - self.v
        if idx.denominator != 1:
            return self.ring.zero
        idx = int(idx)
        if idx < 0 or idx >= len(self.coeffs):
            return self.ring.zero
        return self.coeffs[idx]

    # ------------------------------------------------------- transcendental

    def pow(self, e) -> "PuiseuxSeries":
        """Raise to a rational power via the binomial series about the leading term."""
        e = _frac(e)
        ring = self.ring
        if self.is_zero():
            if e > 0:
                return ps_zero(ring, None if self.order is None else self.order * e)
            raise ZeroDivisionError("nonpositive power of the zero series")
        if e == 0:
            return ps_one(ring)
        if e.denominator == 1:
            n = e.numerator
            base = self if n > 0 else self.inverse()
            n = abs(n)
            out = None
            while n:
                if n & 1:
                    out = base if out is None else out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        c0 = self.coeffs[0]
        val = self.valuation
        root = ring.nth_root(c0, e.denominator)
        num = e.numerator
        if num < 0:
            root = ring.inv(root)
            num = -num
        lead = ring.one
        for _ in range(num):
            lead = ring.mul(lead, root)
        rel = self.shift(-val).scale(ring.inv(c0))
        r = rel - ps_one(ring, order=rel.order)
        order = None if self.order is None else (e - 1) * val + self.order
        out = _binomial_series(r, e)
        return out.scale(lead).shift(e * val).truncate_if(order)

    def sqrt(self) -> "PuiseuxSeries":
        return self.pow(Fraction(1, 2))

    def log(self) -> "PuiseuxSeries":
        """log of a series with leading term 1*x^0 (factor monomials first)."""
        ring = self.ring
        if self.is_zero() or self.valuation != 0 or not _is_one(ring, self.coeffs[0]):
            raise ValueError("ps_log needs leading term 1*x^0; factor the monomial first")
        r = self - ps_one(ring, order=self.order)
        if r.is_zero():
            return ps_zero(ring, self.order)
        kmax = _nilpotency(r)
        acc = ps_zero(ring, self.order)
        for k in range(kmax, 0, -1):
            acc = acc + ps_const(ring, ring.from_fraction(Fraction((-1) ** (k + 1), k)))
            if k > 1:
                acc = acc * r
        return (acc * r).truncate_if(self.order)

    def exp(self) -> "PuiseuxSeries":
        ring = self.ring
        if self.is_zero():
            return ps_one(ring, order=self.order)
        if self.valuation <= 0:
            raise ValueError("ps_exp needs strictly positive valuation")
        kmax = _nilpotency(self)
        acc = ps_zero(ring, self.order)
        for k in range(kmax, 0, -1):
            acc = acc + ps_const(ring, ring.from_fraction(Fraction(1, math.factorial(k))))
            if k > 1:
                acc = acc * self
        return (acc * self + ps_one(ring, order=self.order)).truncate_if(self.order)

    def compose(self, inner: "PuiseuxSeries") -> "PuiseuxSeries":
        """self(inner); inner must have positive valuation unless self is polynomial."""
        ring = self.ring
        self._check_ring(inner)
        if inner.is_zero():
            if self.v < 0:
                raise ZeroDivisionError("compose with zero inner and negative valuation")
            c = self.coeff(Fraction(0)) if (self.order is None or self.order > 0) else ring.zero
            return ps_const(ring, c, order=None if self.order is None else inner.order)
        w = inner.valuation
        if w <= 0 and self.order is not None:
            raise ValueError("inner series must have positive valuation")
        order = None
        if self.order is not None:
            order = self.order * w
        if inner.order is not None:
            # error from the inner truncation enters through d(g^alpha), so the
            # smallest NONZERO outer exponent controls it; a constant term has
            # no inner dependence at all.
            alphas = [e for e in self.exponents() if e != 0]
            if alphas:
                order = _min_order(order, inner.order + (min(alphas) - 1) * w)
        if self.is_zero():
            return ps_zero(ring, order)
        p = inner.pow(Fraction(1, self.D)) if self.D > 1 else inner
        tail_order = None if order is None else order - Fraction(self.v, self.D) * w
        acc = ps_const(ring, self.coeffs[-1], order=tail_order)
        for j in range(len(self.coeffs) - 2, -1, -1):
            acc = acc * p
            if not ring.is_zero(self.coeffs[j]):
                acc = acc + ps_const(ring, self.coeffs[j], order=acc.order)
            acc = acc.truncate_if(tail_order)
        if self.v:
            pv = p.pow(self.v) if self.v > 0 else p.inverse().pow(-self.v)
            acc = acc * pv
        return acc.truncate_if(order)

    # ------------------------------------------------------------- helpers

    def evaluate(self, x, prec: int = 128):
        """Numeric evaluation at x (mpmath), for cross-checks."""
        import mpmath as mp
        with mp.workprec(prec):
            x = mp.mpc(x)
            tot = mp.mpc(0)
            for j, c in enumerate(self.coeffs):
                e = Fraction(self.v + j, self.D)
                tot += self.ring.to_mpc(c, prec) * x ** (mp.mpf(e.numerator) / e.denominator)
            return tot

    def map_coefficients(self, ring, fn) -> "PuiseuxSeries":
        return PuiseuxSeries(ring, self.D, self.v, [fn(c) for c in self.coeffs], self.order)

    def to_json(self) -> dict:
        return {
            "ring": self.ring.name,
            "grid": self.D,
            "valuation": self.v,
            "order": None if self.order is None else str(self.order),
            "coeffs": [self.ring.to_json(c) for c in self.coeffs],
        }

    def __repr__(self) -> str:
        parts = []
        for j, c in enumerate(self.coeffs):
            if self.ring.is_zero(c):
                continue
            parts.append(f"({c})*x^({Fraction(self.v + j, self.D)})")
            if len(parts) >= 6:
                parts.append("...")
                break
        body = " + ".join(parts) if parts else "0"
        tail = "" if self.order is None else f" + O(x^({self.order}))"
        return f"<PuiseuxSeries {body}{tail}>"


# ---------------------------------------------------------------- builders

def ps_zero(ring, order=None) -> PuiseuxSeries:
    return PuiseuxSeries(ring, 1, 0, [], order, normalize=False)


def ps_const(ring, c, order=None) -> PuiseuxSeries:
    return PuiseuxSeries(ring, 1, 0, [c], order)


def ps_one(ring, order=None) -> PuiseuxSeries:
    return ps_const(ring, ring.one, order)


def ps_monomial(ring, coeff, exponent, order=None) -> PuiseuxSeries:
    e = _frac(exponent)
    return PuiseuxSeries(ring, e.denominator, e.numerator, [coeff], order)


def ps_x(ring, order=None) -> PuiseuxSeries:
    return ps_monomial(ring, ring.one, 1, order)


def ps_from_terms(ring, terms, order=None) -> PuiseuxSeries:
    """Build a series from (exponent, coefficient) pairs."""
    terms = [(_frac(e), c) for e, c in terms]
    if order is not None:
        terms = [(e, c) for e, c in terms if e < order]
    if not terms:
        return ps_zero(ring, order)
    D = 1
    for e, _ in terms:
        D = math.lcm(D, e.denominator)
    idx = [int(e * D) for e, _ in terms]
    v = min(idx)
    out = [ring.zero] * (max(idx) - v + 1)
    for (_, c), i in zip(terms, idx):
        out[i - v] = ring.add(out[i - v], c)
    return PuiseuxSeries(ring, D, v, out, order)


def _is_one(ring, c) -> bool:
    return ring.is_zero(ring.sub(c, ring.one))


def _nilpotency(r: PuiseuxSeries) -> int:
    """Smallest k with r^k vanishing to the truncation order (r has val>0)."""
    if r.is_zero():
        return 1
    if r.order is None:
        raise ValueError("series transcendental functions need a finite truncation order")
    val = r.valuation
    if val <= 0:
        raise ValueError("argument must have positive valuation")
    return max(1, math.ceil((r.order - val) / val) + 1)


def _binomial_series(r: PuiseuxSeries, e: Fraction) -> PuiseuxSeries:
    """(1+r)^e for a series r of positive valuation."""
    ring = r.ring
    if r.is_zero():
        return ps_one(ring, order=r.order)
    kmax = _nilpotency(r)
    bins = [Fraction(1)]
    for k in range(1, kmax + 1):
        bins.append(bins[-1] * (e - k + 1) / k)
    acc = ps_zero(ring, r.order)
    for k in range(kmax, 0, -1):
        acc = acc + ps_const(ring, ring.from_fraction(bins[k]))
        if k > 1:
            acc = acc * r
    return acc * r + ps_one(ring, order=r.order)


# ------------------------------------------------------------- module API

def ps_add(a, b):
    return a + b


def ps_mul(a, b):
    return a * b


def ps_inv(a):
    return a.inverse()


def ps_pow(a, e):
    return a.pow(e)


def ps_log(a):
    return a.log()


def ps_exp(a):
    return a.exp()


def ps_diff(a):
    return a.diff()


def ps_coeff(a, alpha):
    return a.coeff(alpha)


def ps_compose(outer, inner):
    return outer.compose(inner)


def ps_reversion(a: PuiseuxSeries, rescale=None) -> PuiseuxSeries:
    """Compositional inverse g with a(g(y)) = y + O(y^...).

    `rescale`, when given, asserts the expected leading exponent of `a` (the
    declared reversion grid); the algorithm is Newton iteration on series.
    """
    ring = a.ring
    if a.is_zero():
        raise ValueError("cannot revert the zero series")
    w = a.valuation
    if rescale is not None and _frac(rescale) != w:
        raise ValueError(f"declared rescaling exponent {rescale} != valuation {w}")
    if w <= 0:
        raise ValueError("reversion needs positive leading exponent")
    if a.order is None:
        raise ValueError("reversion needs a truncated series (set an order)")
    c0 = a.leading_coefficient()
    inv_w = 1 / w
    croot = ring.nth_root(ring.inv(c0), inv_w.denominator)
    lead = ring.one
    for _ in range(inv_w.numerator):
        lead = ring.mul(lead, croot)
    # a perturbation of g at exponent E shifts a(g) at E + (1 - 1/w), so the
    # coefficients of g are determined only for E < (O_a + 1)/w - 1
    target = min(a.order * inv_w, (a.order + 1) * inv_w - 1)
    g = ps_monomial(ring, lead, inv_w, order=target)
    yvar = ps_x(ring)  # exact: the full information of a(g) drives the update
    da = a.diff()
    slots = max(2, _slots(target, a.D * inv_w.denominator * 2, 0))
    for _ in range(slots.bit_length() + 3):
        err = a.compose(g) - yvar
        if err.is_zero():
            break
        g = g - err * da.compose(g).inverse()
        g = g.with_order(target)
    return g.with_order(target)


def lagrange_reversion(a: PuiseuxSeries, n_terms: int) -> PuiseuxSeries:
    """Independent oracle: classical Lagrange inversion for a = x + c2 x^2 + ...

    Only for ordinary power series (D == 1, valuation 1, unit leading
    coefficient); tests use it as the second route for ps_reversion.
    """
    ring = a.ring
    if a.valuation != 1 or a.D != 1 or not _is_one(ring, a.leading_coefficient()):
        raise ValueError("lagrange_reversion expects a = x + O(x^2) on the integer grid")
    x_over_a = ps_x(ring, order=a.order) * a.inverse()
    terms = []
    p = ps_one(ring, order=_frac(n_terms + 1))
    for n in range(1, n_terms + 1):
        p = (p * x_over_a).truncate(n_terms + 1)
        cn = p.coeff(n - 1)
        terms.append((Fraction(n), ring.mul(cn, ring.from_fraction(Fraction(1, n)))))
    return ps_from_terms(ring, terms, order=Fraction(n_terms + 1))


def ps_promote(a: PuiseuxSeries, ring, prec: int = 256) -> PuiseuxSeries:
    """Convert an exact-ring series into a float/complex ring."""
    return a.map_coefficients(ring, lambda c: a.ring.to_mpc(c, prec))


def ps_sin(a: PuiseuxSeries) -> PuiseuxSeries:
    """sin of a series with positive valuation."""
    ring = a.ring
    if a.is_zero():
        return ps_zero(ring, a.order)
    if a.valuation <= 0:
        raise ValueError("ps_sin needs positive valuation")
    kmax = _nilpotency(a)
    a2 = a * a
    acc = ps_zero(ring, a.order)
    ks = [k for k in range(1, kmax + 1, 2)]
    for k in reversed(ks):
        coef = Fraction((-1) ** (k // 2), math.factorial(k))
        acc = acc + ps_const(ring, ring.from_fraction(coef))
        if k > 1:
            acc = acc * a2
    return acc * a


def ps_cos(a: PuiseuxSeries) -> PuiseuxSeries:
    """cos of a series with positive valuation."""
    ring = a.ring
    if a.is_zero():
        return ps_one(ring, a.order)
    if a.valuation <= 0:
        raise ValueError("ps_cos needs positive valuation")
    kmax = _nilpotency(a) + 1
    a2 = a * a
    acc = ps_zero(ring, a.order)
    ks = [k for k in range(0, kmax + 1, 2)]
    for k in reversed(ks):
        coef = Fraction((-1) ** (k // 2), math.factorial(k))
        acc = acc + ps_const(ring, ring.from_fraction(coef))
        if k > 0:
            acc = acc * a2
    return acc.truncate_if(a.order)


def ps_pow_scalar(a: PuiseuxSeries, e) -> PuiseuxSeries:
    """a**e for a ring-scalar exponent e; a must have valuation 0.

    Used for real (irrational) exponents like pi/(2 beta0): the exponent
    cannot shift the rational exponent grid, so the leading exponent of `a`
    has to be 0 (the caller handles monomial prefactors separately).
    """
    ring = a.ring
    if a.is_zero():
        raise ZeroDivisionError("scalar power of the zero series")
    if a.valuation != 0:
        raise ValueError("ps_pow_scalar needs valuation 0 (factor monomials first)")
    c0 = a.coeffs[0]
    import mpmath as mp
    with mp.workprec(getattr(ring, "prec", 128)):
        lead = mp.power(c0, e)
    rel = a.scale(ring.inv(c0))
    r = rel - ps_one(ring, order=rel.order)
    if r.is_zero():
        return ps_const(ring, lead, order=a.order)
    kmax = _nilpotency(r)
    # binomials binom(e, k) with a scalar e
    bins = [ring.one]
    for k in range(1, kmax + 1):
        factor = ring.mul(ring.sub(e if not isinstance(e, int) else ring.from_int(e),
                                   ring.from_int(k - 1)),
                          ring.from_fraction(Fraction(1, k)))
        bins.append(ring.mul(bins[-1], factor))
    acc = ps_zero(ring, r.order)
    for k in range(kmax, 0, -1):
        acc = acc + ps_const(ring, bins[k])
        if k > 1:
            acc = acc * r
    out = acc * r + ps_one(ring, order=r.order)
    return out.scale(lead)


class SeriesRing:
    """Puiseux series as coefficients: the nesting ring for bivariate work.

    Elements are PuiseuxSeries over `inner`; the outer series code only uses
    the ring protocol, so two-variable series are just series-over-series.
    Exactness is declared so the outer normalisation relies on each inner
    series' own zero test.
    """

    exact = True

    def __init__(self, inner, order=None, name: str = "series"):
        self.inner = inner
        self.order = order
        self.name = f"{name}({inner.name})"
        self.zero = ps_zero(inner, None)
        self.one = ps_one(inner, None)

    def from_int(self, n: int):
        return ps_const(self.inner, self.inner.from_int(n))

    def from_fraction(self, fr):
        return ps_const(self.inner, self.inner.from_fraction(fr))

    def const(self, c):
        """Lift an inner-ring scalar to a constant series."""
        return ps_const(self.inner, c)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.inverse()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def nth_root(self, a, n: int):
        return a.pow(Fraction(1, n))

    def to_mpc(self, a, prec: int = 128):
        raise TypeError("nested series coefficients have no scalar value")

    def to_json(self, a):
        return a.to_json()
