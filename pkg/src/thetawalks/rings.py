"""Coefficient rings for truncated series arithmetic.

Three interchangeable backends:

* :class:`RationalRing` -- exact rationals (gmpy2.mpq).
* :class:`CyclotomicRing` -- exact elements of Q(zeta) with zeta = e^{i pi/12},
  i.e. the 24th cyclotomic field.  This is large enough for every exact
  unit-circle factor the theta machinery needs (i, e^{i pi/3}, sqrt(2),
  sqrt(3) and friends).
* :class:`ComplexRing` -- arbitrary-precision complex floats (mpmath), with
  the working precision carried by the ring instance.

A ring is a small strategy object; series code only goes through the ring
API, so exact and float pipelines share all series code.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
import mpmath as mp
from gmpy2 import mpq

# zeta = e^{i pi / 12}, a primitive 24th root of unity.
# Minimal polynomial: x^8 - x^4 + 1, so zeta^8 = zeta^4 - 1.
_CYC_DEG = 8


def _as_mpq(x) -> mpq:
    if isinstance(x, (int, type(mpq(0)))):
        return mpq(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


class Cyc:
    """An element of Q(zeta_24), stored as 8 rational coordinates on 1..zeta^7."""

    __slots__ = ("c",)

    def __init__(self, coords):
        self.c = tuple(coords)

    @staticmethod
    def from_rational(r) -> "Cyc":
        return Cyc((_as_mpq(r),) + (mpq(0),) * 7)

    @staticmethod
    def root_of_unity(k: int) -> "Cyc":
        """zeta^k for any integer k (zeta = e^{i pi/12})."""
        k %= 24
        coords = [mpq(0)] * _CYC_DEG
        sign = 1
        if k >= 12:  # zeta^12 = -1
            k -= 12
            sign = -1
        if k < 8:
            coords[k] = mpq(sign)
        else:  # zeta^8 = zeta^4 - 1, zeta^{8+j} = zeta^{4+j} - zeta^j for j<4
            j = k - 8
            coords[4 + j] = mpq(sign)
            coords[j] = mpq(-sign)
        return Cyc(coords)

    def __add__(self, other: "Cyc") -> "Cyc":
        return Cyc(a + b for a, b in zip(self.c, other.c))

    def __sub__(self, other: "Cyc") -> "Cyc":
        return Cyc(a - b for a, b in zip(self.c, other.c))

    def __neg__(self) -> "Cyc":
        return Cyc(-a for a in self.c)

    def __mul__(self, other: "Cyc") -> "Cyc":
        a, b = self.c, other.c
        prod = [mpq(0)] * (2 * _CYC_DEG - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        # reduce with zeta^8 = zeta^4 - 1
        for i in range(2 * _CYC_DEG - 2, _CYC_DEG - 1, -1):
            ci = prod[i]
            if ci:
                prod[i - 4] += ci
                prod[i - 8] -= ci
                prod[i] = mpq(0)
        return Cyc(prod[:_CYC_DEG])

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.c)

    def inv(self) -> "Cyc":
        """Inverse via extended Euclid in Q[x]/(x^8 - x^4 + 1)."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero cyclotomic element")
        # g = x^8 - x^4 + 1
        g = [mpq(1), mpq(0), mpq(0), mpq(0), mpq(-1), mpq(0), mpq(0), mpq(0), mpq(1)]
        a = list(self.c)

        def deg(p):
            for i in range(len(p) - 1, -1, -1):
                if p[i]:
                    return i
            return -1

        def polydivmod(num, den):
            num = list(num)
            dd = deg(den)
            lead = den[dd]
            quo = [mpq(0)] * (max(deg(num) - dd + 1, 1))
            while deg(num) >= dd:
                dn = deg(num)
                f = num[dn] / lead
                quo[dn - dd] = f
                for i in range(dd + 1):
                    num[dn - dd + i] -= f * den[i]
            return quo, num

        # extended gcd of a and g
        r0, r1 = g, a
        s0, s1 = [mpq(0)], [mpq(1)]
        while deg(r1) > 0:
            q, r = polydivmod(r0, r1)
            r0, r1 = r1, r
            # s_new = s0 - q*s1
            s_new = list(s0) + [mpq(0)] * max(0, deg(q) + deg(s1) + 1 - len(s0))
            for i, qi in enumerate(q):
                if qi:
                    for j, sj in enumerate(s1):
                        if sj:
                            if i + j >= len(s_new):
                                s_new += [mpq(0)] * (i + j - len(s_new) + 1)
                            s_new[i + j] -= qi * sj
            s0, s1 = s1, s_new
        if deg(r1) != 0:
            raise ZeroDivisionError("element not invertible (should not happen in a field)")
        c = r1[0]
        out = [si / c for si in s1] + [mpq(0)] * _CYC_DEG
        # reduce mod g just in case
        _, rem = polydivmod(out, g)
        rem += [mpq(0)] * (_CYC_DEG - len(rem))
        return Cyc(rem[:_CYC_DEG])

    def rational_part(self):
        """Return self as an exact rational, or None if not rational."""
        if any(a for a in self.c[1:]):
            return None
        return self.c[0]

    def to_mpc(self, prec: int = 128) -> mp.mpc:
        with mp.workprec(prec + 16):
            z = mp.exp(mp.mpc(0, mp.pi / 12))
            return mp.mpc(sum(mp.mpf(a.numerator) / mp.mpf(a.denominator) * z ** k
                              for k, a in enumerate(self.c)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Cyc) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self) -> str:
        terms = [f"{a}*z^{k}" for k, a in enumerate(self.c) if a]
        return "Cyc(" + (" + ".join(terms) if terms else "0") + ")"


# sqrt(2) = zeta^3 + zeta^{-3} = zeta^3 - zeta^9(... expressed on the basis)
_SQRT2 = Cyc.root_of_unity(3) + Cyc.root_of_unity(-3)
_SQRT3 = Cyc.root_of_unity(2) + Cyc.root_of_unity(-2)
_I = Cyc.root_of_unity(6)


class RationalRing:
    """Exact rational coefficients."""

    name = "rational"
    exact = True

    zero = mpq(0)
    one = mpq(1)

    def from_int(self, n: int):
        return mpq(n)

    def from_fraction(self, fr):
        return _as_mpq(fr)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def nth_root(self, a, n: int):
        """Exact n-th root, or raise ValueError if it does not exist in Q."""
        if n == 1:
            return a
        if a < 0 and n % 2 == 0:
            raise ValueError("even root of a negative rational")
        sign = -1 if a < 0 else 1
        num, den = abs(a.numerator), a.denominator
        rn, exact_n = gmpy2.iroot(num, n)
        rd, exact_d = gmpy2.iroot(den, n)
        if not (exact_n and exact_d):
            raise ValueError(f"{a} has no exact {n}-th root in Q")
        return sign * mpq(rn, rd)

    def to_mpc(self, a, prec: int = 128):
        with mp.workprec(prec + 16):
            return mp.mpc(mp.mpf(a.numerator) / mp.mpf(a.denominator))

    def to_json(self, a) -> str:
        return str(a)

    def from_json(self, s):
        return mpq(s)


class CyclotomicRing:
    """Exact coefficients in Q(zeta_24): rationals, i, e^{i pi/3}, sqrt 2, sqrt 3, ..."""

    name = "cyclotomic"
    exact = True

    zero = Cyc.from_rational(0)
    one = Cyc.from_rational(1)
    i = _I
    sqrt2 = _SQRT2
    sqrt3 = _SQRT3

    def from_int(self, n: int):
        return Cyc.from_rational(n)

    def from_fraction(self, fr):
        return Cyc.from_rational(_as_mpq(fr))

    def root_of_unity_24(self, k: int):
        return Cyc.root_of_unity(k)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return a.inv()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def nth_root(self, a, n: int):
        """n-th root for the cases the pipelines need: square roots of
        rational multiples of 1, 2, 3, 6 (times a sign), plus n-th roots that
        already are rational powers.  Raises ValueError otherwise."""
        r = a.rational_part()
        if r is not None and n == 1:
            return a
        if r is None:
            raise ValueError("nth_root only supported for rational cyclotomic elements")
        if n != 2:
            # exact rational root if it exists
            root = RationalRing().nth_root(r, n)
            return Cyc.from_rational(root)
        neg = r < 0
        r = abs(r)
        num, den = r.numerator, r.denominator
        # squarefree split of num/den
        r_scaled = mpq(num * den, den * den)  # = r with square denominator
        m = num * den
        sq, exact = gmpy2.iroot(m, 2)
        if exact:
            base, free = mpq(sq, den), 1
        else:
            free = 1
            for p in (2, 3):
                while m % (p * p) == 0:
                    m //= p * p
                if m % p == 0:
                    free *= p
                    m //= p
            sq, exact = gmpy2.iroot(m, 2)
            if not exact:
                raise ValueError(f"sqrt of {r} leaves Q(zeta_24)")
            base = mpq(sq, den)
        out = Cyc.from_rational(base)
        if free == 2:
            out = out * _SQRT2
        elif free == 3:
            out = out * _SQRT3
        elif free == 6:
            out = out * _SQRT2 * _SQRT3
        if neg:
            out = out * _I
        return out

    def is_zero_exact(self, a) -> bool:
        return a.is_zero()

    def to_mpc(self, a, prec: int = 128):
        return a.to_mpc(prec)

    def to_json(self, a) -> str:
        return ";".join(str(x) for x in a.c)

    def from_json(self, s):
        return Cyc(mpq(x) for x in s.split(";"))


class ComplexRing:
    """Arbitrary-precision complex coefficients at a fixed working precision.

    Instances are interned by precision so series built independently at the
    same precision share one ring object.
    """

    name = "complex"
    exact = False
    _cache: dict = {}

    def __new__(cls, prec: int = 256):
        inst = cls._cache.get(int(prec))
        if inst is None:
            inst = super().__new__(cls)
            cls._cache[int(prec)] = inst
        return inst

    def __init__(self, prec: int = 256):
        if getattr(self, "_ready", False):
            return
        self.prec = int(prec)
        # coefficients smaller than this relative to a series' scale are noise
        self.eps = mp.mpf(2) ** (-(self.prec - 24))
        with mp.workprec(self.prec):
            self.zero = mp.mpc(0)
            self.one = mp.mpc(1)
        self._ready = True

    def from_int(self, n: int):
        with mp.workprec(self.prec):
            return mp.mpc(n)

    def from_fraction(self, fr):
        fr = _as_mpq(fr) if not isinstance(fr, Fraction) else fr
        with mp.workprec(self.prec):
            return mp.mpc(mp.mpf(fr.numerator) / mp.mpf(fr.denominator))

    def from_mpf(self, x):
        # mpc() re-rounds its argument at the ambient context precision
        with mp.workprec(self.prec):
            return mp.mpc(x)

    def add(self, a, b):
        with mp.workprec(self.prec):
            return a + b

    def sub(self, a, b):
        with mp.workprec(self.prec):
            return a - b

    def mul(self, a, b):
        with mp.workprec(self.prec):
            return a * b

    def neg(self, a):
        # mpmath re-rounds unary minus at the ambient context precision
        with mp.workprec(self.prec):
            return -a

    def inv(self, a):
        with mp.workprec(self.prec):
            return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def is_negligible(self, a, scale) -> bool:
        return abs(a) <= self.eps * scale

    def nth_root(self, a, n: int):
        with mp.workprec(self.prec):
            return a ** (mp.mpf(1) / n)

    def to_mpc(self, a, prec: int = 0):
        return a

    def to_json(self, a) -> str:
        with mp.workprec(self.prec):
            return mp.nstr(mp.re(a), 40) + "," + mp.nstr(mp.im(a), 40)

    def from_json(self, s):
        re_s, im_s = s.split(",")
        with mp.workprec(self.prec):
            return mp.mpc(mp.mpf(re_s), mp.mpf(im_s))


QQ = RationalRing()
CYC = CyclotomicRing()
