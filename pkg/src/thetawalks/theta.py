"""Jacobi theta machinery: exact q-series, numeric evaluation, nome duality.

The theta function used throughout is the odd one,

    theta(z | tau) = sum_{n>=0} (-1)^n q^{(n+1/2)^2} (e^{i(2n+1)z} - e^{-i(2n+1)z}),
    q = e^{i pi tau},

i.e. ``i * theta_1`` in the classical normalisation.  Arguments are restricted
to the form z = u*pi + v*pi*tau with rational u, v (plus a nome scale s for
theta(. | s*tau)), which makes e^{iz} an exact root of unity times an exact
power of the nome, so theta becomes an exact Puiseux series in q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .rings import CYC, ComplexRing, CyclotomicRing
from .series import PuiseuxSeries, ps_from_terms


@dataclass(frozen=True)
class NomeArgument:
    """z = u*pi + v*pi*tau, evaluated in theta(. | s*tau) (nome q**s)."""

    u: Fraction = Fraction(0)
    v: Fraction = Fraction(0)
    s: Fraction = Fraction(1)
    hat: bool = False  # tau refers to the dual nome's modulus (bookkeeping only)

    def __post_init__(self):
        for name in ("u", "v", "s"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.s <= 0:
            raise ValueError("nome scale must be positive")


def _unit_factor(ring, u: Fraction, k: int):
    """e^{i * u * pi * k} as a ring element."""
    w = u * k  # e^{i pi w}
    if isinstance(ring, CyclotomicRing):
        ww = 12 * w
        if ww.denominator != 1:
            raise ValueError(
                f"unit factor e^(i pi {w}) is not a 24th root of unity; use the float ring")
        return ring.root_of_unity_24(int(ww))
    with mp.workprec(ring.prec):
        return mp.exp(mp.mpc(0, mp.pi) * (mp.mpf(w.numerator) / w.denominator))


def _i_power(ring, d: int):
    if isinstance(ring, CyclotomicRing):
        return ring.root_of_unity_24(6 * d)
    with mp.workprec(ring.prec):
        return mp.mpc(0, 1) ** d


def theta_q_series(arg: NomeArgument, d: int = 0, N=Fraction(10), ring=CYC) -> PuiseuxSeries:
    """d-th z-derivative of theta at `arg`, as a Puiseux series in the base nome.

    Exponents are s*(n+1/2)^2 +- (2n+1)*v; term coefficients are exact roots
    of unity (cyclotomic ring) or high-precision complex numbers.
    """
    N = Fraction(N)
    if N <= 0:
        raise ValueError("truncation order must be positive")
    u, v, s = arg.u, arg.v, arg.s
    ip = _i_power(ring, d)        # i^d
    im = _i_power(ring, 3 * d)    # (-i)^d
    terms = []
    n = 0
    while True:
        k = 2 * n + 1
        base = s * Fraction(k * k, 4)
        ep = base + k * v
        em = base - k * v
        low = base - k * abs(v)
        if low >= N and Fraction(k) > 2 * abs(v) / s:
            break
        sign_kd = ring.from_int((-1) ** n * k ** d)
        # (i k)^d e^{ikz} - (-i k)^d e^{-ikz}, with e^{+-ikz} = e^{+-ikupi} q^{+-kv}
        if ep < N:
            terms.append((ep, ring.mul(sign_kd, ring.mul(ip, _unit_factor(ring, u, k)))))
        if em < N:
            terms.append((em, ring.neg(
                ring.mul(sign_kd, ring.mul(im, _unit_factor(ring, u, -k))))))
        n += 1
        if n > 100000:
            raise RuntimeError("theta series did not reach the truncation order")
    return ps_from_terms(ring, terms, order=N)


def theta_numeric(z, tau, d: int = 0, prec: int = 256):
    """Direct summation of the defining series; requires Im(tau) > 0."""
    with mp.workprec(prec):
        z, tau = mp.mpc(z), mp.mpc(tau)
        if mp.im(tau) <= 0:
            raise ValueError("theta_numeric needs Im(tau) > 0")
        q = mp.exp(mp.mpc(0, 1) * mp.pi * tau)
        tot = mp.mpc(0)
        n = 0
        floor_n = 8 + abs(mp.im(z)) / (mp.pi * mp.im(tau))
        while True:
            k = 2 * n + 1
            term = (-1) ** n * q ** (mp.mpf(k * k) / 4) * (
                (mp.mpc(0, k)) ** d * mp.exp(mp.mpc(0, k) * z)
                - (mp.mpc(0, -k)) ** d * mp.exp(mp.mpc(0, -k) * z))
            tot += term
            if n > floor_n and abs(term) < mp.mpf(2) ** (-prec - 16) * (1 + abs(tot)):
                break
            n += 1
            if n > 10 ** 7:
                raise RuntimeError("theta_numeric did not converge")
        return tot


def theta_numeric_q(z, q, d: int = 0, prec: int = 256):
    """Same, parametrised by the nome q (0 < |q| < 1)."""
    with mp.workprec(prec):
        q = mp.mpc(q)
        tau = mp.log(q) / (mp.mpc(0, 1) * mp.pi)
        return theta_numeric(z, tau, d, prec)


def jacobi_dual(q, prec: int = 256):
    """The dual nome: log(q) log(qhat) = pi^2, an involution on (0,1)."""
    with mp.workprec(prec):
        q = mp.mpf(q)
        if not 0 < q < 1:
            raise ValueError("jacobi_dual needs q in (0,1)")
        return mp.exp(mp.pi ** 2 / mp.log(q))


def jacobi_identity_check(z, q, prec: int = 256):
    """|LHS - RHS| of the modular identity

        theta(z, q) = sqrt(log(qhat)/pi) * exp(log(qhat) z^2/pi^2)
                      * theta((i/pi) log(qhat) z, qhat),

    with the principal branch of the square root (for 0<qhat<1 this equals
    i*sqrt(-log(qhat)/pi); the sign under the radical matters)."""
    with mp.workprec(prec):
        z = mp.mpc(z)
        qhat = jacobi_dual(q, prec)
        lq = mp.log(qhat)
        lhs = theta_numeric_q(z, q, 0, prec)
        rhs = mp.sqrt(lq / mp.pi) * mp.exp(lq * z ** 2 / mp.pi ** 2) * \
            theta_numeric_q(mp.mpc(0, 1) / mp.pi * lq * z, qhat, 0, prec)
        return abs(lhs - rhs)


def agm(a, b, prec: int = 256):
    """Arithmetic-geometric mean of positive reals."""
    with mp.workprec(prec + 16):
        a, b = mp.mpf(a), mp.mpf(b)
        if a <= 0 or b <= 0:
            raise ValueError("agm needs positive arguments")
        while abs(a - b) > mp.mpf(2) ** (-prec - 8) * abs(a):
            a, b = (a + b) / 2, mp.sqrt(a * b)
        return (a + b) / 2


def elliptic_K(k, prec: int = 256):
    """Complete elliptic integral K(k) = pi / (2 AGM(1, sqrt(1-k^2)))."""
    with mp.workprec(prec + 16):
        k = mp.mpf(k)
        if not 0 <= k < 1:
            raise ValueError("elliptic_K needs 0 <= k < 1")
        return mp.pi / (2 * agm(mp.mpf(1), mp.sqrt(1 - k ** 2), prec))


def nome_from_modulus(k, prec: int = 256):
    """q = exp(-pi K(sqrt(1-k^2)) / K(k)) for the elliptic modulus k in (0,1)."""
    with mp.workprec(prec + 16):
        k = mp.mpf(k)
        if not 0 < k < 1:
            raise ValueError("nome_from_modulus needs 0 < k < 1")
        kp = mp.sqrt(1 - k ** 2)
        return mp.exp(-mp.pi * elliptic_K(kp, prec) / elliptic_K(k, prec))


# ----------------------------------------------------------------- step sets

@dataclass(frozen=True)
class StepSet:
    """Weighted small steps: (dx, dy, weight) with dx, dy in {-1,0,1}."""

    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        steps = []
        for dx, dy, w in self.steps:
            if dx not in (-1, 0, 1) or dy not in (-1, 0, 1):
                raise ValueError("only small steps are supported")
            if (dx, dy) in seen:
                raise ValueError(f"duplicate step {(dx, dy)}")
            w = Fraction(w)
            if w <= 0:
                raise ValueError("weights must be positive")
            seen.add((dx, dy))
            steps.append((dx, dy, w))
        if not steps:
            raise ValueError("a step set needs at least one step")
        object.__setattr__(self, "steps", tuple(steps))

    @staticmethod
    def kreweras() -> "StepSet":
        return StepSet(((-1, 0, 1), (0, -1, 1), (1, 1, 1)))

    @staticmethod
    def amodel(a) -> "StepSet":
        return StepSet(((0, 1, 1), (1, 0, 1), (0, -1, 1), (-1, 0, 1), (1, 1, Fraction(a))))

    @staticmethod
    def simple() -> "StepSet":
        return StepSet(((0, 1, 1), (1, 0, 1), (0, -1, 1), (-1, 0, 1)))

    def weight_sum(self) -> Fraction:
        return sum(w for _, _, w in self.steps)


@dataclass(frozen=True)
class Kernel:
    """K(x, y) = xy (1 - t S(x, y))."""

    stepset: StepSet
    t: object  # numeric, or a PuiseuxSeries in the time variable


def _pow_any(x, n: int):
    if n == 0:
        return None
    out = x
    if n < 0:
        out = x.inverse() if isinstance(x, PuiseuxSeries) else 1 / x
        n = -n
    base, acc = out, out
    for _ in range(n - 1):
        acc = acc * base
    return acc


def step_poly_eval(stepset: StepSet, x, y):
    """S(x, y) for numeric or PuiseuxSeries inputs (x, y nonzero)."""
    from .series import ps_const

    series_mode = isinstance(x, PuiseuxSeries)
    if series_mode:
        if x.is_zero() or y.is_zero():
            raise ZeroDivisionError("step polynomial is Laurent; x, y must be nonzero")
    elif x == 0 or y == 0:
        raise ZeroDivisionError("step polynomial is Laurent; x, y must be nonzero")
    tot = None
    for dx, dy, w in stepset.steps:
        term = None
        for p in (_pow_any(x, dx), _pow_any(y, dy)):
            if p is not None:
                term = p if term is None else term * p
        if series_mode:
            wc = x.ring.from_fraction(w)
            term = ps_const(x.ring, wc) if term is None else term.scale(wc)
        else:
            wv = mp.mpf(w.numerator) / w.denominator
            term = wv if term is None else term * wv
        tot = term if tot is None else tot + term
    return tot


def kernel_eval(kernel: Kernel, x, y):
    """K(x, y) = xy(1 - t S(x, y)) in whatever arithmetic x, y, t support."""
    from .series import ps_one

    S = step_poly_eval(kernel.stepset, x, y)
    t = kernel.t
    if isinstance(x, PuiseuxSeries):
        one = ps_one(x.ring, order=S.order)
        if isinstance(t, PuiseuxSeries):
            tS = t * S
        else:  # a ring scalar
            tS = S.scale(t)
        return x * y * (one - tS)
    return x * y * (1 - t * S)
