"""The weighted {N,E,S,W,NE(a)} quadrant model: Taylor data, Jacobi-dual
critical transeries with logarithms, and leading asymptotics.

Taylor side.  With s = e^{i gamma} and U = q^2, every theta value at a
multiple of gamma reorganises as

    theta(k gamma | tau)  = -q^{1/4} s^{-k} R_k,
    R_k(U, s) = sum_n (-1)^n U^{(n^2+n)/2} (s^{-2nk} - s^{(2n+2)k}),

so the parameter relation a^2 = theta(g)^3 theta(4g)^2 / (theta(2g)^2
theta(3g)^3) becomes s^2 R_1^3 R_4^2 / (R_2^2 R_3^3) = a^2, solved for U(s)
by Newton iteration on series.  The generating function value comes from the
z -> 0 limit of

    a t X(z) Q(X(z),0) = 1/(2t) - X - 1/X - J(z),

where J carries the OPPOSITE sign to the printed closed form (the sign is
pinned numerically against the walk-counting DP, which also fixes c > 0).

Dual side.  beta = (i/pi) log(qhat) gamma solves the hatted relation
a^2 = theta(b,qh)^3 theta(4b,qh)^2/(theta(2b,qh)^2 theta(3b,qh)^3); 1/t =
-a - 1/a - theta(b)^2 theta(5b)/(a theta(3b)^3) is exact; X and J transform
into nome-qhat and nome-qhat^{pi/beta} theta ratios.  All dual work runs in
two-variable series (w = zhat over qhat-series coefficients), graded by
powers of Qh = qhat^{pi/beta}; rewriting Qh^p = qhat^{p pi/beta0} exp(p *
eps(qhat^2) log qhat) is where the logarithms enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .rings import ComplexRing
from .series import (
    PuiseuxSeries,
    SeriesRing,
    ps_const,
    ps_cos,
    ps_monomial,
    ps_one,
    ps_pow_scalar,
    ps_reversion,
    ps_sin,
    ps_x,
    ps_zero,
)
from .transeries import ExponentLattice, TranseriesExpansion

F = Fraction


def _to_mpf(a):
    """Coerce int/str/Fraction/mpf model weights to mpf at working precision."""
    if isinstance(a, Fraction):
        return mp.mpf(a.numerator) / a.denominator
    return mp.mpf(a)


# ------------------------------------------------------------ scalar params

@dataclass
class ModelParams:
    a: mp.mpf
    k: mp.mpf
    beta0: mp.mpf
    t_c: mp.mpf
    rho: mp.mpf
    C: mp.mpf
    kappa: mp.mpf          # leading coefficient of qhat^2 in (1 - t/t_c)
    beta1: mp.mpf | None = None
    beta2: mp.mpf | None = None
    prec: int = 256


@dataclass
class ParamTriple:
    q: mp.mpf
    gamma_ratio: mp.mpf     # gamma/(pi tau), in (1/4, 1/3)
    c: mp.mpf
    residual: mp.mpf


def am_k_from_a(a, prec: int = 256):
    """The unique k in (0,1) with a k^3 = 1 - k^2 (bracketed bisection + Newton)."""
    with mp.workprec(prec + 16):
        a = _to_mpf(a)
        if a <= 0:
            raise ValueError("a must be positive")
        lo, hi = mp.mpf(0), mp.mpf(1)
        f = lambda x: a * x ** 3 + x ** 2 - 1
        for _ in range(60):
            mid = (lo + hi) / 2
            if f(mid) < 0:
                lo = mid
            else:
                hi = mid
        x = (lo + hi) / 2
        for _ in range(int(math.log2(prec)) + 4):
            x = x - f(x) / (3 * a * x ** 2 + 2 * x)
        if abs(f(x)) > mp.mpf(2) ** (-prec + 8):
            raise ArithmeticError("Newton for k did not meet the residual bound")
        return x


def am_params(a, prec: int = 256) -> ModelParams:
    with mp.workprec(prec + 16):
        a = _to_mpf(a)
        k = am_k_from_a(a, prec)
        beta0 = mp.acos((k ** 2 - 1) / 2) / 2
        t_c = k / (k ** 2 + 3)
        rho = mp.pi / (2 * beta0)
        kappa = (k ** 2 + 3) / ((k ** 2 + 1) ** 2 * (3 - k ** 2) ** 3)
        C = (2 * mp.pi * k * (3 + k ** 2) * mp.sqrt(3 + 2 * k ** 2 - k ** 4)
             / (beta0 * (1 - k ** 2) * mp.gamma(-rho))) * kappa ** rho
        return ModelParams(a=a, k=k, beta0=beta0, t_c=t_c, rho=rho, C=C,
                           kappa=kappa, prec=prec)


def am_saddle(a, prec: int = 256):
    """Saddle of the step polynomial: x0 = y0 = k, theta = 2 beta0."""
    with mp.workprec(prec + 16):
        p = am_params(a, prec)
        k = p.k
        S = lambda x, y: x + y + 1 / x + 1 / y + p.a * x * y
        h = mp.mpf(2) ** (-prec // 3)
        gx = (S(k + h, k) - S(k - h, k)) / (2 * h)
        gy = (S(k, k + h) - S(k, k - h)) / (2 * h)
        if max(abs(gx), abs(gy)) > mp.mpf(2) ** (-prec // 3):
            raise ArithmeticError("saddle gradient check failed")
        # theta = arccos(-S_xy / sqrt(S_xx S_yy)) at (k, k)
        sxx = 2 / k ** 3
        sxy = p.a
        theta = mp.acos(-sxy / sxx)
        if abs(theta - 2 * p.beta0) > mp.mpf(2) ** (-prec + 8):
            raise ArithmeticError("saddle angle does not equal 2 beta0")
        return k, k, theta


# ------------------------------------------------ Taylor side series-in-s

@dataclass
class TaylorSide:
    """Series caches for one value of a (everything in powers of s)."""

    a_val: mp.mpf
    ring: ComplexRing
    N: Fraction
    U: PuiseuxSeries          # q^2 as a series in s
    q: PuiseuxSeries
    c: PuiseuxSeries
    t: PuiseuxSeries
    prec: int


def _Rk(U: PuiseuxSeries, k: int, N: Fraction, deriv: bool = False) -> PuiseuxSeries:
    """R_k = sum_n (-1)^n U^{(n^2+n)/2}(s^{-2nk} - s^{(2n+2)k}) (or d/dU)."""
    ring = U.ring
    out = ps_zero(ring, N)
    n = 0
    valU = U.valuation
    while True:
        e = F(n * n + n, 2)
        base_val = valU * e - 2 * n * k
        if base_val >= N and n > 0:
            break
        if deriv and e == 0:
            n += 1
            continue
        Ue = U.pow(int(e)) if not deriv else U.pow(int(e) - 1).scale(
            ring.from_fraction(e))
        sgn = ring.from_int((-1) ** n)
        piece = (ps_monomial(ring, sgn, -2 * n * k, order=N)
                 - ps_monomial(ring, sgn, (2 * n + 2) * k, order=N))
        out = out + (Ue * piece).truncate(N)
        n += 1
        if n > 200:
            raise RuntimeError("R_k did not converge")
    return out.truncate(N)


def _Gkd(U: PuiseuxSeries, k: int, d: int, N: Fraction) -> PuiseuxSeries:
    """theta^{(d)}(k gamma) / q^{1/4} = sum_n (-1)^n U^{(n^2+n)/2}
    [(i kk)^d s^{kk k} - (-i kk)^d s^{-kk k}], kk = 2n+1."""
    ring = U.ring
    with mp.workprec(ring.prec):
        i_c = mp.mpc(0, 1)
    out = ps_zero(ring, N)
    n = 0
    valU = U.valuation
    while True:
        e = F(n * n + n, 2)
        kk = 2 * n + 1
        if valU * e - kk * abs(k) >= N and n > 0:
            break
        Ue = U.pow(int(e))
        with mp.workprec(ring.prec):
            cp = (-1) ** n * (i_c * kk) ** d
            cm = (-1) ** n * (-i_c * kk) ** d
        piece = (ps_monomial(ring, ring.from_mpf(cp), kk * k, order=N)
                 - ps_monomial(ring, ring.from_mpf(cm), -kk * k, order=N))
        out = out + (Ue * piece).truncate(N)
        n += 1
        if n > 200:
            raise RuntimeError("G_kd did not converge")
    return out.truncate(N)


def am_q_of_s(a, N: int = 46, prec: int = 256) -> TaylorSide:
    """Solve the parameter relation for q(s) (Newton on U = q^2), then build
    c(s) and t(s); the consistency of the a c^3 relation is asserted."""
    N = F(N)
    ring = ComplexRing(prec)
    with mp.workprec(prec + 16):
        a_val = _to_mpf(a)
        if a_val <= 0:
            raise ValueError("a must be positive")
        a2 = ring.from_mpf(a_val ** 2)
    U = ps_monomial(ring, ring.from_mpf(a_val), 7, order=F(8))
    # Newton, doubling the resolved order each pass
    while True:
        cur_order = U.order
        work = min(N, (cur_order - 7) * 2 + 8)
        U = U.with_order(work)
        R1 = _Rk(U, 1, work)
        R2 = _Rk(U, 2, work)
        R3 = _Rk(U, 3, work)
        R4 = _Rk(U, 4, work)
        H = (R1.pow(3) * R4 * R4) / (R2 * R2 * R3.pow(3))
        Fs = H.shift(2) - ps_const(ring, a2, order=work + 7)
        if Fs.is_zero() and work >= N:
            break
        dH = H * ((_Rk(U, 1, work, True) * R1.inverse()).scale(ring.from_int(3))
                  + (_Rk(U, 4, work, True) * R4.inverse()).scale(ring.from_int(2))
                  - (_Rk(U, 2, work, True) * R2.inverse()).scale(ring.from_int(2))
                  - (_Rk(U, 3, work, True) * R3.inverse()).scale(ring.from_int(3)))
        U = (U - Fs * dH.shift(2).inverse()).with_order(work)
        if work >= N and (Fs.is_zero() or Fs.valuation >= N):
            break
    U = U.with_order(N)
    q = U.pow(F(1, 2))
    # c = s^{-1} sqrt(R3/R1); branch fixed by a c^3 = -theta(4g)/theta(2g) > 0
    R1 = _Rk(U, 1, N)
    R2 = _Rk(U, 2, N)
    R3 = _Rk(U, 3, N)
    R4 = _Rk(U, 4, N)
    c = (R3 * R1.inverse()).pow(F(1, 2)).shift(-1)
    resid = c.pow(3).scale(ring.from_mpf(a_val)) + (R4 * R2.inverse()).shift(-2)
    _assert_tiny(resid, prec, "a c^3 = -theta(4g)/theta(2g) consistency")
    # t = c / (c/t),  c/t = (2 s^{-2}/D0)(2 Rt1 R2 / R1 - Rt2)
    D0 = _Gkd(U, 0, 1, N).scale(ring.inv(ring.from_mpf(mp.mpc(0, 1))))
    Rt1 = _Gkd(U, 1, 1, N).scale(ring.inv(ring.from_mpf(mp.mpc(0, 1)))).shift(1)
    Rt2 = _Gkd(U, 2, 1, N).scale(ring.inv(ring.from_mpf(mp.mpc(0, 1)))).shift(2)
    c_over_t = ((Rt1 * R2 * R1.inverse()).scale(ring.from_int(2)) - Rt2).scale(
        ring.from_int(2)) * D0.inverse()
    c_over_t = c_over_t.shift(-2)
    t = c * c_over_t.inverse()
    return TaylorSide(a_val=a_val, ring=ring, N=N, U=U, q=q, c=c, t=t, prec=prec)


def _assert_tiny(series: PuiseuxSeries, prec: int, what: str, slack: int = 3):
    import mpmath as mp
    bad = [c for _, c in series.terms() if abs(c) > mp.mpf(2) ** (-(prec // slack))]
    if bad:
        raise ArithmeticError(f"{what} failed: residual {bad[0]}")


def _chop_val(series: PuiseuxSeries, min_exponent, prec: int, what: str) -> PuiseuxSeries:
    """Drop residual coefficients below `min_exponent` (asserting they are noise)."""
    import mpmath as mp
    from .series import ps_from_terms
    keep, bad = [], []
    for e, c in series.terms():
        if e < F(min_exponent):
            if abs(c) > mp.mpf(2) ** (-(prec // 3)):
                bad.append((e, c))
        else:
            keep.append((e, c))
    if bad:
        raise ArithmeticError(f"{what}: non-negligible coefficient below "
                              f"{min_exponent}: {bad[0]}")
    return ps_from_terms(series.ring, keep, order=series.order)


def am_t_c_of_s(a, N: int = 46, prec: int = 256):
    side = am_q_of_s(a, N, prec)
    return side.t, side.c


def am_Q00_taylor(a, N_t: int = 24, prec: int = 256,
                  side: TaylorSide | None = None) -> PuiseuxSeries:
    """Q(0,0) as a t-series, via the z->0 limit on the Taylor side."""
    if side is None:
        side = am_q_of_s(a, max(2 * (N_t + 4), 30), prec)
    ring, U, N = side.ring, side.U, side.N

    # X(z)/z;  X = c theta(z) theta(z+g) / (theta(z-g) theta(z+2g))
    def taylor(k, L):
        fact = 1
        cs = []
        for d in range(L + 1):
            if d > 1:
                fact *= d
            cs.append(_Gkd(U, k, d, N).scale(ring.from_fraction(F(1, fact))))
        return _Poly(cs)

    def odd_over_z(k, L):
        fact = 1
        cs = []
        for d in range(1, L + 2):
            fact *= d
            cs.append(_Gkd(U, k, d, N).scale(ring.from_fraction(F(1, fact))))
        return _Poly(cs)

    L = 2
    x_over_z = (odd_over_z(0, L) * taylor(1, L)) / (taylor(-1, L) * taylor(2, L))
    x_over_z = _Poly([side.c * p for p in x_over_z.c])
    # z J(z), J = + theta_s'(0) theta(2g) theta_s(z+pi/2) / (c theta_s(pi/2)
    #             theta'(0) theta_s(z));  nome-s thetas via theta_q_series
    from .theta import NomeArgument, theta_q_series

    def theta_s(u, d):
        return theta_q_series(NomeArgument(u=u), d, N, ring)

    def s_taylor(u, L):
        fact = 1
        cs = []
        for d in range(L + 1):
            if d > 1:
                fact *= d
            cs.append(theta_s(u, d).scale(ring.from_fraction(F(1, fact))))
        return _Poly(cs)

    def s_odd_over_z(L):
        fact = 1
        cs = []
        for d in range(1, L + 2):
            fact *= d
            cs.append(theta_s(F(0), d).scale(ring.from_fraction(F(1, fact))))
        return _Poly(cs)

    num = s_taylor(F(1, 2), L)
    den = s_odd_over_z(L)
    CJ = (theta_s(F(0), 1).shift(F(-1, 4)) * _Gkd(U, 2, 0, N)) * \
        (side.c * theta_s(F(1, 2), 0).shift(F(-1, 4)) * _Gkd(U, 0, 1, N)).inverse()
    zJ = num / den
    zJ = _Poly([(CJ * p).shift(F(-1, 4) + F(1, 4)) for p in zJ.c])

    from .kreweras import _q00_from_limit

    at = side.t.scale(ring.from_mpf(side.a_val))
    q00_s, (chk_pole, chk_const) = _q00_from_limit(x_over_z, zJ, side.t, at,
                                                   minus_x=True)
    _assert_tiny(chk_pole, side.prec, "z^-1 consistency (weighted model)")
    _assert_tiny(chk_const, side.prec, "z^0 consistency (weighted model)")
    # imaginary garbage should vanish: Q00 is a real series in s
    # convert to a t-series: revert t(s), compose
    s_of_t = ps_reversion(side.t, rescale=F(1))
    q00_t = q00_s.compose(s_of_t)
    return q00_t.truncate(F(N_t) + 1)


class _Poly:
    """Tiny z-Taylor helper (same shape as the Kreweras one, series coeffs)."""

    def __init__(self, coeffs):
        self.c = list(coeffs)

    def __mul__(self, other):
        L = max(len(self.c), len(other.c))
        out = [None] * L
        for i, a in enumerate(self.c):
            for j, b in enumerate(other.c):
                if i + j < L:
                    p = a * b
                    out[i + j] = p if out[i + j] is None else out[i + j] + p
        ring = self.c[0].ring
        return _Poly([ps_zero(ring) if x is None else x for x in out])

    def inverse(self):
        b0 = self.c[0].inverse()
        out = [b0]
        for k in range(1, len(self.c)):
            acc = None
            for j in range(1, k + 1):
                if j < len(self.c):
                    term = self.c[j] * out[k - j]
                    acc = term if acc is None else acc + term
            out.append(-(b0 * acc))
        return _Poly(out)

    def __truediv__(self, other):
        return self * other.inverse()


# --------------------------------------------------------- numeric triple

def am_solve_params_numeric(a, t, prec: int = 256,
                            guess: tuple | None = None) -> ParamTriple:
    """Solve the three theta relations for (q, gamma/(pi tau), c) at numeric t."""
    from .theta import theta_numeric_q

    with mp.workprec(prec + 32):
        a = _to_mpf(a)
        t = mp.mpf(t)
        p = am_params(a, prec)
        if not 0 < t < p.t_c:
            raise ValueError(f"t must lie in (0, t_c) = (0, {p.t_c})")

        def th(z, q, d=0):
            return theta_numeric_q(z, q, d, prec + 32)

        def equations(q, v):
            tau = mp.log(q) / (1j * mp.pi)
            g = v * mp.pi * tau
            c = mp.sqrt(th(3 * g, q) / th(g, q))
            if mp.re(a * c ** 3 / (-th(4 * g, q) / th(2 * g, q))) < 0:
                c = -c
            f1 = th(g, q) ** 3 * th(4 * g, q) ** 2 / (
                th(2 * g, q) ** 2 * th(3 * g, q) ** 3) - a ** 2
            ct = 4 * th(g, q, 1) * th(2 * g, q) / (th(0, q, 1) * th(g, q)) \
                - 2 * th(2 * g, q, 1) / th(0, q, 1)
            f2 = c / ct - t
            return mp.re(f1), mp.re(f2), mp.re(c)

        if guess is None:
            u = 1 - t / p.t_c
            if u < mp.mpf("0.2"):
                # dual-side start: qhat^2 ~ kappa u, beta = beta0 + ...
                qhat = mp.sqrt(p.kappa * u)
                q0 = mp.exp(mp.pi ** 2 / mp.log(qhat))
                v0 = p.beta0 / mp.pi
            else:
                s0 = t * (1 + 2 * t)   # crude inversion of t(s) = s + O(s^2)
                q0 = mp.sqrt(a) * s0 ** mp.mpf("3.5")
                v0 = mp.log(s0) / mp.log(q0)
        else:
            q0, v0 = guess
        sol = mp.findroot(lambda q, v: equations(q, v)[:2], (q0, v0))
        q, v = mp.mpf(sol[0]), mp.mpf(sol[1])
        f1, f2, c = equations(q, v)
        resid = abs(f1) + abs(f2)
        if resid > mp.mpf(2) ** (-prec + 16):
            raise ArithmeticError(f"triple solve residual {mp.nstr(resid, 5)} "
                                  f"too large at t={mp.nstr(t, 8)}")
        return ParamTriple(q=q, gamma_ratio=v, c=c, residual=resid)


# ------------------------------------------------------------- dual side

@dataclass
class DualSide:
    """qhat-side series caches: beta(qhat), t(qhat), d(qhat), u <-> qhat^2."""

    a_val: mp.mpf
    params: ModelParams
    ring: ComplexRing
    N2: Fraction                 # truncation in qhat
    dbeta: PuiseuxSeries         # beta - beta0, even series in qhat
    t: PuiseuxSeries             # t(qhat), even
    d: PuiseuxSeries             # d(qhat), even
    y_of_u: PuiseuxSeries        # qhat^2 as a series in u = 1 - t/t_c
    h_of_u: PuiseuxSeries        # y/(kappa u): 1 + O(u)
    prec: int

    @property
    def beta1(self):
        return mp.re(self.dbeta.coeff(F(2)))

    @property
    def beta2(self):
        return mp.re(self.dbeta.coeff(F(4)))


def _sin_d(d: int, x):
    """d-th derivative of sin at the scalar x."""
    return mp.sin(x + d * mp.pi / 2)


def _theta_beta_poly(ring, beta0, k: int, N2: Fraction, M: int):
    """C_k(delta) = theta(k(beta0+delta), qhat)/(2i qhat^{1/4}) as a
    delta-polynomial (degree M) with qhat-series coefficients."""
    cs = []
    fact = 1
    for d in range(M + 1):
        if d > 1:
            fact *= d
        terms = []
        n = 0
        while F(n * n + n) < N2:
            kk = 2 * n + 1
            with mp.workprec(ring.prec):
                val = (-1) ** n * mp.mpf(kk * k) ** d * _sin_d(d, kk * k * beta0) / fact
            terms.append((F(n * n + n), ring.from_mpf(val)))
            n += 1
        from .series import ps_from_terms
        cs.append(ps_from_terms(ring, terms, order=N2))
    return _Poly(cs)


def _poly_eval(poly: _Poly, x: PuiseuxSeries) -> PuiseuxSeries:
    out = poly.c[-1]
    for c in reversed(poly.c[:-1]):
        out = out * x + c
    return out


def _poly_diff(poly: _Poly) -> _Poly:
    return _Poly([p.scale(p.ring.from_int(d + 1))
                  for d, p in enumerate(poly.c[1:])])


def am_beta_series(a, N2: int = 12, prec: int = 256) -> PuiseuxSeries:
    """beta(qhat) - beta0 as an even qhat-series (solves the hatted relation)."""
    N2 = F(N2)
    ring = ComplexRing(prec)
    p = am_params(a, prec)
    M = 6
    C = {k: _theta_beta_poly(ring, p.beta0, k, N2, M) for k in (1, 2, 3, 4)}
    Fp = (C[1] * C[1] * C[1] * C[4] * C[4]) / (C[2] * C[2] * C[3] * C[3] * C[3])
    dFp = _poly_diff(Fp)
    with mp.workprec(prec + 16):
        a2 = ring.from_mpf(_to_mpf(a) ** 2)
    delta = ps_zero(ring, F(2))
    work = F(2)
    schedule = []
    while work < N2:
        work = min(N2, work * 2)
        schedule.append(work)
    schedule += [N2, N2]
    for work in schedule:
        delta = delta.with_order(work)
        val = _poly_eval(_Poly([c.truncate(work) for c in Fp.c]), delta)
        resid = val - ps_const(ring, a2, order=work)
        if resid.is_zero():
            continue
        dval = _poly_eval(_Poly([c.truncate(work) for c in dFp.c]), delta)
        delta = (delta - resid * dval.inverse()).with_order(work)
    return _chop_val(delta.with_order(N2), 2, prec, "beta series")


def _theta_at_mbeta(ring, beta0, dbeta: PuiseuxSeries, m: int, d: int,
                    N2: Fraction) -> PuiseuxSeries:
    """theta^{(d)}(m beta(qhat), qhat) / (2i qhat^{1/4}) as a qhat-series."""
    from .series import ps_from_terms

    out = ps_zero(ring, N2)
    n = 0
    while F(n * n + n) < N2:
        kk = 2 * n + 1
        h = dbeta.scale(ring.from_int(kk * m))
        with mp.workprec(ring.prec):
            A = mp.mpf(kk * m) * beta0 + d * mp.pi / 2
            sA = ring.from_mpf(mp.sin(A))
            cA = ring.from_mpf(mp.cos(A))
            pref = ring.from_mpf((-1) ** n * mp.mpf(kk) ** d)
        if h.is_zero():
            osc = ps_const(ring, sA, order=N2)
        else:
            osc = ps_cos(h).scale(sA) + ps_sin(h).scale(cA)
        mono = ps_monomial(ring, pref, F(n * n + n), order=N2)
        out = out + mono * osc
        n += 1
    return out.truncate(N2)


def am_dual_side(a, N2: int = 12, prec: int = 256) -> DualSide:
    """Build the qhat-side caches for one a."""
    N2 = F(N2)
    ring = ComplexRing(prec)
    p = am_params(a, prec)
    dbeta = am_beta_series(a, int(N2), prec)
    th = lambda m, d=0: _theta_at_mbeta(ring, p.beta0, dbeta, m, d, N2)
    # 1/t = -a - 1/a - (1/a) theta(b)^2 theta(5b) / theta(3b)^3  (exact display)
    with mp.workprec(prec + 16):
        av = mp.mpf(a)
        const = ring.from_mpf(-av - 1 / av)
        inv_a = ring.from_mpf(1 / av)
    t1, t5, t3 = th(1), th(5), th(3)
    inv_t = ps_const(ring, const, order=N2) - \
        (t1 * t1 * t5 * t3.pow(3).inverse()).scale(inv_a)
    t_series = inv_t.inverse()
    d_series = (th(3) * th(1).inverse()).pow(F(1, 2))
    # u(qhat) = 1 - t/t_c, then y(u) with y = qhat^2
    with mp.workprec(prec + 16):
        inv_tc = ring.from_mpf(1 / p.t_c)
    u_of_qhat = ps_one(ring, N2) - t_series.scale(inv_tc)
    y_of_u = ps_reversion(u_of_qhat.stretch(F(1, 2)), rescale=F(1))
    kappa_c = y_of_u.leading_coefficient()
    h_of_u = y_of_u.shift(F(-1)).scale(ring.inv(kappa_c))
    return DualSide(a_val=mp.mpf(a), params=p, ring=ring, N2=N2, dbeta=dbeta,
                    t=t_series, d=d_series, y_of_u=y_of_u, h_of_u=h_of_u,
                    prec=prec)


def am_t_of_qhat(a, N2: int = 12, prec: int = 256) -> PuiseuxSeries:
    return am_dual_side(a, N2, prec).t


def am_qhat2_of_t(a, N2: int = 12, prec: int = 256) -> PuiseuxSeries:
    """qhat^2 as a series in u = 1 - t/t_c (leading coefficient kappa)."""
    return am_dual_side(a, N2, prec).y_of_u


def am_d_series(a, N2: int = 12, prec: int = 256) -> PuiseuxSeries:
    return am_dual_side(a, N2, prec).d


# ------------------------------------------- dual X, J and the transeries

class _QGraded:
    """Polynomials in Qh = qhat^{pi/beta} with nested (w over qhat) series."""

    def __init__(self, parts: dict, P: int):
        self.parts = {p: v for p, v in parts.items() if p <= P}
        self.P = P

    def __mul__(self, other):
        out = {}
        for p1, v1 in self.parts.items():
            for p2, v2 in other.parts.items():
                if p1 + p2 <= self.P:
                    prod = v1 * v2
                    out[p1 + p2] = out[p1 + p2] + prod if p1 + p2 in out else prod
        return _QGraded(out, self.P)

    def inverse(self):
        inv0 = self.parts[0].inverse()
        out = {0: inv0}
        for p in range(1, self.P + 1):
            acc = None
            for j in range(1, p + 1):
                if j in self.parts:
                    term = self.parts[j] * out[p - j]
                    acc = term if acc is None else acc + term
            out[p] = -(inv0 * acc) if acc is not None else None
            if out[p] is None:
                del out[p]
        return _QGraded(out, self.P)

    def __add__(self, other):
        out = dict(self.parts)
        for p, v in other.parts.items():
            out[p] = out[p] + v if p in out else v
        return _QGraded(out, self.P)

    def __neg__(self):
        return _QGraded({p: -v for p, v in self.parts.items()}, self.P)

    def map(self, fn):
        return _QGraded({p: fn(v) for p, v in self.parts.items()}, self.P)


@dataclass
class DualFunctions:
    """X(w,qhat) and the Q-graded J(w,qhat,Qh), w = (i/pi) log(qhat) z."""

    side: DualSide
    nring: SeriesRing
    x_of_w: PuiseuxSeries        # nested: w-series over qhat-series
    J: _QGraded                  # Q-graded nested w-Laurent
    L: int                       # w-order
    P: int                       # Q-degree


def am_X_J_hat(a, L: int = 10, P: int = 2, N2: int = 12,
               prec: int = 256, side: DualSide | None = None) -> DualFunctions:
    """The dual parametrisation as two-variable series.

    X(w) = d * theta(w) theta(w+beta) / (theta(w-beta) theta(w+2beta)) over
    the qhat nome, and J as a polynomial in Qh = qhat^{pi/beta} whose
    coefficients are w-Laurent series; w is the Jacobi-oriented variable
    (i/pi) log(qhat) z.  All 2i and quarter-power nome prefactors cancel in
    the ratios and are dropped from the builders.
    """
    side = side or am_dual_side(a, N2, prec)
    ring = side.ring
    N2 = side.N2
    p = side.params
    nring = SeriesRing(ring)
    Lw = F(L)

    from .series import ps_from_terms

    def wser(pairs):
        return ps_from_terms(nring, [(F(d), c) for d, c in pairs.items()],
                             order=Lw)

    def scale_nested(ws, scalar):
        return PuiseuxSeries(nring, ws.D, ws.v,
                             [c.scale(scalar) for c in ws.coeffs], ws.order)

    def mul_inner(ws, inner_series):
        return PuiseuxSeries(nring, ws.D, ws.v,
                             [c * inner_series for c in ws.coeffs], ws.order)

    th = lambda m, d=0: _theta_at_mbeta(ring, p.beta0, side.dbeta, m, d, N2)

    def T(m):
        """theta(w + m beta, qhat)/(2i qhat^{1/4}) as a nested w-Taylor."""
        fact = 1
        pairs = {}
        for d in range(L + 1):
            if d > 1:
                fact *= d
            pairs[d] = th(m, d).scale(ring.from_fraction(F(1, fact)))
        return wser(pairs)

    def T0_over_w():
        fact = 1
        pairs = {}
        for d in range(1, L + 2):
            fact *= d
            pairs[d - 1] = th(0, d).scale(ring.from_fraction(F(1, fact)))
        return wser(pairs)

    x_over_w = T0_over_w() * T(1) * (T(-1) * T(2)).inverse()
    x_of_w = mul_inner(x_over_w, side.d).shift(F(1))

    # ---- J, graded by powers of Qh
    P_Q = P
    with mp.workprec(prec):
        pi_c = ring.from_mpf(+mp.pi)
    pib = (ps_const(ring, pi_c, order=N2) *
           (ps_const(ring, ring.from_mpf(p.beta0), order=N2)
            + side.dbeta).inverse())
    pib_pows = [ps_one(ring, N2)]
    for _ in range(L + 1):
        pib_pows.append(pib_pows[-1] * pib)

    def E(j):
        """e^{i j pi w / beta} as a nested w-series."""
        pairs = {}
        fact = 1
        for d in range(L + 1):
            if d > 1:
                fact *= d
            with mp.workprec(prec):
                scal = ring.from_mpf((mp.mpc(0, 1) * j) ** d / fact)
            pairs[d] = pib_pows[d].scale(scal)
        return wser(pairs)

    def sinser(j):
        """sin(j pi w / beta) as a nested w-series."""
        pairs = {}
        for d in range(1, L + 2, 2):
            with mp.workprec(prec):
                scal = ring.from_mpf(mp.mpf(j) ** d * (-1) ** (d // 2)
                                     / mp.factorial(d))
            pairs[d] = pib_pows[d].scale(scal)
        return wser(pairs)

    def qconst(c):
        return ps_const(nring, ps_const(ring, c, order=N2), order=Lw)

    # theta(pi w/beta - pi tau_Q/2, Q) Q^{1/4}
    #   = sum_n (-1)^n [Q^{n^2} e^{i(2n+1) pi w/beta} - Q^{(n+1)^2} e^{-...}]
    parts_num = {}
    n = 0
    while n * n <= P_Q:
        sgn = ring.from_int((-1) ** n)
        parts_num[n * n] = (parts_num.get(n * n, ps_zero(nring, Lw))
                            + scale_nested(E(2 * n + 1), sgn))
        if (n + 1) ** 2 <= P_Q:
            parts_num[(n + 1) ** 2] = (
                parts_num.get((n + 1) ** 2, ps_zero(nring, Lw))
                + scale_nested(E(-(2 * n + 1)), ring.neg(sgn)))
        n += 1
    num_theta = _QGraded(parts_num, P_Q)

    # theta'(0, Q)/(2i Q^{1/4}) = sum (-1)^n (2n+1) Q^{n^2+n}
    parts = {}
    n = 0
    while n * n + n <= P_Q:
        parts[n * n + n] = qconst(ring.from_int((-1) ** n * (2 * n + 1)))
        n += 1
    thp0_Q = _QGraded(parts, P_Q)

    # theta(-pi tau_Q/2, Q) Q^{1/4} = sum (-1)^n [Q^{n^2} - Q^{(n+1)^2}]
    parts = {}
    n = 0
    while n * n <= P_Q:
        sgn = ring.from_int((-1) ** n)
        parts[n * n] = parts.get(n * n, ps_zero(nring, Lw)) + qconst(sgn)
        if (n + 1) ** 2 <= P_Q:
            parts[(n + 1) ** 2] = (parts.get((n + 1) ** 2, ps_zero(nring, Lw))
                                   + qconst(ring.neg(sgn)))
        n += 1
    th_half_Q = _QGraded(parts, P_Q)

    # theta(pi w/beta, Q)/(2i Q^{1/4}) = sum (-1)^n Q^{n^2+n} sin((2n+1) pi w/beta)
    parts = {}
    n = 0
    while n * n + n <= P_Q:
        parts[n * n + n] = scale_nested(sinser(2 * n + 1),
                                        ring.from_int((-1) ** n))
        n += 1
    den_theta = _QGraded(parts, P_Q)

    # S0 = (pi/(beta d)) theta(2 beta, qhat)/theta'(0, qhat)
    thp0_qhat = _theta_at_mbeta(ring, p.beta0, side.dbeta, 0, 1, N2)
    S0 = pib * side.d.inverse() * th(2) * thp0_qhat.inverse()

    J = num_theta * thp0_Q * _QGraded({0: mul_inner(E(-1), S0)}, P_Q)
    J = J * (th_half_Q * den_theta).inverse()
    return DualFunctions(side=side, nring=nring, x_of_w=x_of_w, J=J, L=L, P=P_Q)


# -------------------------------------------------------- critical series

@dataclass
class CriticalExpansion:
    """Q(x,0) at the critical point:

        A(x, u) + sum_{k,l,m} u^{l + (k+1) rho} log(u)^m P_{k,l,m}(x),

    u = 1 - t/t_c.  P holds x-series keyed by (k, l, m); A holds the analytic
    part keyed by l.  Every emitted term satisfies m <= l (the log powers are
    produced by expanding qhat^{pi/beta} around qhat^{pi/beta0})."""

    params: ModelParams
    ring: ComplexRing
    P: dict
    A: dict
    x_order: int
    u_order: Fraction
    lattice: ExponentLattice

    def P_coeff(self, k: int, l: int, m: int, j: int = 0):
        """[x^j] P_{k,l,m}, zero when the term was not emitted."""
        ser = self.P.get((k, l, m))
        if ser is None:
            return self.ring.zero
        return ser.coeff(F(j))

    def transeries(self, j: int = 0) -> TranseriesExpansion:
        """The expansion of [x^j] Q(x,0) as a TranseriesExpansion in u."""
        terms = {}
        for (k, l, m), ser in self.P.items():
            c = ser.coeff(F(j))
            if not self.ring.is_zero(c):
                terms[(F(l), k + 1, m)] = c
        for l, ser in self.A.items():
            c = ser.coeff(F(j))
            if not self.ring.is_zero(c):
                terms[(F(l), 0, 0)] = c
        return TranseriesExpansion(self.ring, self.lattice, terms,
                                   order=float(self.u_order))

    def evaluate_q00(self, t, prec: int | None = None):
        """Numeric Q(0,0) near t_c: analytic part plus explicit log terms."""
        prec = prec or self.ring.prec
        with mp.workprec(prec):
            u = 1 - mp.mpf(t) / self.params.t_c
            return self.transeries(0).evaluate(u, prec)


def am_critical_transeries(a, K: int = 2, L: int = 2, x_order: int = 6,
                           N2: int = 14, prec: int = 256,
                           dual: DualFunctions | None = None) -> CriticalExpansion:
    """Assemble Eq-(3.9)-style data: P_{k,l,m}(x) for k <= K, l as far as the
    qhat-order allows (at least L), logs made explicit.

    The route: revert X(w), substitute into the Q-graded J, divide by a t x,
    then rewrite Qh^p = qhat^{p pi/beta} as y^{p rho} exp(p eps(y) log y)
    with y = qhat^2 and change variables y -> kappa u h(u).
    """
    wL = max(x_order + 3, 6)
    dual = dual or am_X_J_hat(a, L=wL, P=K + 1, N2=N2, prec=prec)
    side = dual.side
    ring = side.ring
    nring = dual.nring
    p_model = side.params
    N2v = side.N2

    # w(x) and J(w(x)) per Q-power
    w_of_x = ps_reversion(dual.x_of_w)
    Jx = {p: J.compose(w_of_x) for p, J in dual.J.parts.items()}

    xs_order = w_of_x.order
    xvar = ps_x(nring, order=xs_order)
    at = side.t.scale(ring.from_mpf(side.a_val))
    at_c = ps_const(nring, at, order=xs_order)
    inv_atx = (at_c * xvar).inverse()

    half_inv_t = ps_const(nring, side.t.inverse().scale(ring.from_fraction(F(1, 2))),
                          order=xs_order)
    B0 = half_inv_t - xvar - xvar.inverse() - Jx[0]
    Q_parts = {0: B0 * inv_atx}
    for p in range(1, K + 2):
        if p in Jx:
            Q_parts[p] = -(Jx[p] * inv_atx)

    # the z->0 identities make Q_0 regular: x^{-2}, x^{-1} coefficients are noise
    def chop_x(ser, what):
        out = []
        import mpmath as _mp
        scale = max((max((abs(c) for _, c in inner.terms()), default=_mp.mpf(0))
                     for _, inner in ser.terms()), default=_mp.mpf(1))
        for e, inner in ser.terms():
            keep = [(ei, ci) for ei, ci in inner.terms()
                    if abs(ci) > _mp.mpf(2) ** (-(prec // 2)) * (1 + scale)]
            from .series import ps_from_terms
            inner2 = ps_from_terms(ring, keep, order=inner.order)
            if e < 0 and not inner2.is_zero():
                raise ArithmeticError(f"{what}: x^{e} coefficient did not cancel")
            if e >= 0 and not inner2.is_zero():
                out.append((e, inner2))
        from .series import ps_from_terms
        return ps_from_terms(nring, out, order=ser.order)

    Q_parts = {p: chop_x(v, f"Q-part {p}") for p, v in Q_parts.items()}

    # ---- emission to the u variable
    with mp.workprec(prec + 16):
        rho = p_model.rho
        kappa = mp.re(side.y_of_u.leading_coefficient())
        ln_kappa = ring.from_mpf(mp.log(kappa))
    y_of_u = side.y_of_u
    h_of_u = side.h_of_u
    uord = y_of_u.order
    H = h_of_u.log()
    # eps(y) = pi/(2 beta) - rho as a y-series
    with mp.workprec(prec + 16):
        half_pi = ring.from_mpf(mp.pi / 2)
    eps_q = (ps_const(ring, half_pi, order=N2v) *
             (ps_const(ring, ring.from_mpf(p_model.beta0), order=N2v)
              + side.dbeta).inverse()) - ps_const(ring, ring.from_mpf(rho),
                                                  order=N2v)
    eps_q = _chop_val(eps_q, 2, prec, "pi/(2 beta) - rho")
    eps_u = eps_q.stretch(F(1, 2)).compose(y_of_u)

    def to_u(inner):
        return inner.stretch(F(1, 2)).compose(y_of_u)

    lattice = ExponentLattice(rho_num=rho, name="rho")
    P_out: dict = {}
    A_out: dict = {}
    m_max = int(uord) + 1

    for p, Qp in Q_parts.items():
        # x-series with u-series coefficients
        xcoeffs = [(e, to_u(inner)) for e, inner in Qp.terms()]
        if p == 0:
            for e, g in xcoeffs:
                for l, c in g.terms():
                    A_out.setdefault(int(l), {})[e] = c
            continue
        with mp.workprec(prec + 16):
            kap_p = ring.from_mpf(mp.power(kappa, p * rho))
            p_rho = ring.from_mpf(p * rho)
        base = ps_pow_scalar(h_of_u, p_rho).scale(kap_p)
        pe = eps_u.scale(ring.from_int(p))
        pe_pow = ps_one(ring, uord)
        fact = 1
        for m in range(0, m_max + 1):
            if m > 0:
                fact *= m
                pe_pow = pe_pow * pe
                if pe_pow.is_zero():
                    break
            coeff_m = base * pe_pow.scale(ring.from_fraction(F(1, fact)))
            # (log y)^m = sum_r binom(m,r) (log u)^r (ln kappa + H)^{m-r}
            for r in range(0, m + 1):
                other = _pow_series(ps_const(ring, ln_kappa, order=uord) + H,
                                    m - r, ring, uord)
                scal = ring.from_int(math.comb(m, r))
                mult = coeff_m * other.scale(scal)
                for e, g in xcoeffs:
                    prod = g * mult
                    for l, c in prod.terms():
                        slot = P_out.setdefault((p - 1, int(l), r), {})
                        slot[e] = ring.add(slot.get(e, ring.zero), c)

    from .series import ps_from_terms

    def pack(d, order):
        return {k: ps_from_terms(ring, list(v.items()), order=F(x_order) + 1)
                for k, v in d.items()}

    P_ser = pack(P_out, None)
    A_ser = pack(A_out, None)
    # drop noise-level series
    def significant(ser_map):
        out = {}
        import mpmath as _mp
        scale = max((max((abs(c) for _, c in s.terms()), default=_mp.mpf(0))
                     for s in ser_map.values()), default=_mp.mpf(1))
        for key, s in ser_map.items():
            keep = [(e, c) for e, c in s.terms()
                    if abs(c) > _mp.mpf(2) ** (-(prec // 2)) * (1 + scale)]
            if keep:
                out[key] = ps_from_terms(ring, keep, order=s.order)
        return out

    return CriticalExpansion(params=p_model, ring=ring, P=significant(P_ser),
                             A=significant(A_ser), x_order=x_order,
                             u_order=uord, lattice=lattice)


def _pow_series(base: PuiseuxSeries, n: int, ring, order) -> PuiseuxSeries:
    if n == 0:
        return ps_one(ring, order)
    out = base
    for _ in range(n - 1):
        out = out * base
    return out


# --------------------------------------------------- asymptotics, harmonics

def am_harmonic_gf_coeffs(a, jmax: int = 8, prec: int = 256,
                          dual: DualFunctions | None = None) -> list:
    """V(j) = [x^{j+1}] sin(pi zhat / beta0), oriented so that V(0) > 0.

    This is the generating sequence of the positive harmonic function; in
    the a -> 0 limit V(j) -> 4(j+1)."""
    wL = jmax + 3
    dual = dual or am_X_J_hat(a, L=wL, P=1, N2=4, prec=prec)
    side = dual.side
    ring = side.ring
    p = side.params
    # qhat = 0 part of X(w), as a plain series
    x0 = ps_from_terms_plain(dual.x_of_w, ring)
    w_of_x = ps_reversion(x0)
    with mp.workprec(prec):
        arg = w_of_x.scale(ring.from_mpf(mp.pi / p.beta0))
    sinser = ps_sin(arg)
    out = []
    for j in range(jmax + 1):
        out.append(ring.neg(sinser.coeff(F(j + 1))))
    if not mp.re(out[0]) > 0:
        raise ArithmeticError("leading harmonic value must be positive")
    return out


def ps_from_terms_plain(nested: PuiseuxSeries, ring) -> PuiseuxSeries:
    """Extract the inner-constant (qhat^0) part of a nested series."""
    from .series import ps_from_terms
    terms = []
    for e, inner in nested.terms():
        c = inner.coeff(F(0))
        if not ring.is_zero(c):
            terms.append((e, c))
    return ps_from_terms(ring, terms, order=nested.order)


def am_leading_asymptotics(a, j: int, n: int, prec: int = 256,
                           V: list | None = None):
    """Predicted [x^j][t^n] Q(x,0) ~ C V(j) n^{-1-rho} t_c^{-n}."""
    if j < 0 or n < 1:
        raise ValueError("need j >= 0 and n >= 1")
    p = am_params(a, prec)
    if V is None:
        V = am_harmonic_gf_coeffs(a, jmax=j, prec=prec)
    with mp.workprec(prec):
        return p.C * mp.re(V[j]) * mp.mpf(n) ** (-1 - p.rho) * p.t_c ** (-n)


def am_q_trajectory(a, ts, prec: int = 256) -> list:
    """Solve the parameter triple along a t-grid with warm-started continuation.

    Returns a list of ParamTriple; the grid may approach t_c arbitrarily
    closely (the dual-series start keeps the Newton solver in basin)."""
    out = []
    guess = None
    p = am_params(a, prec)
    for t in ts:
        with mp.workprec(prec + 32):
            u = 1 - mp.mpf(t) / p.t_c
            if guess is not None and u > mp.mpf("0.2"):
                trip = am_solve_params_numeric(a, t, prec, guess=guess)
            else:
                trip = am_solve_params_numeric(a, t, prec)
        out.append(trip)
        guess = (trip.q, trip.gamma_ratio)
    return out
