"""The Kreweras pipeline: Taylor data at t=0, Jacobi-dual data at t=1/3.

Everything is assembled from theta q-series.  The generating function value
comes from the z -> 0 limit of the parametrised boundary equation

    t X(z) Q(X(z), 0) = 1/(2t) - 1/X(z) - J(z),

expanded to first order in z; the critical expansion uses the exact same
limit with every ingredient replaced by its modular (qhat-) counterpart:

    X:      theta(zh) theta(zh - pi/3) / (theta(zh + pi/3) theta(zh - 2pi/3)),
    t:      theta'(0, qhat) / (6 theta'(pi/3, qhat)),
    J:      a ratio of nome-qhat^3 thetas, one argument shifted by the
            half period -pi*tauhat3/2 (the "(3i/2) log qhat" argument).

The decoupling constant in J carries e^{+4i gamma/3} = q^{4/9}; the numeric
validation of the whole chain (against both the algebraic closed form and
the walk-counting DP) pins this sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .rings import CYC, ComplexRing
from .series import PuiseuxSeries, ps_const, ps_one, ps_reversion, ps_zero
from .theta import NomeArgument, theta_q_series

F = Fraction

GAMMA = NomeArgument(v=F(1, 3))          # gamma = pi tau / 3
T_CRIT = F(1, 3)


# ---------------------------------------------------------------- utilities

def _theta(ctx, u, v, s, d, extra=F(0)):
    return theta_q_series(NomeArgument(u=u, v=v, s=s), d, ctx.N_q + extra, ctx.ring)


class _ZPoly:
    """Short z-polynomials with Puiseux-series coefficients (z-Taylor data)."""

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
        return _ZPoly([ps_zero(ring) if x is None else x for x in out])

    def inverse(self):
        a0 = self.c[0]
        b0 = a0.inverse()
        out = [b0]
        for k in range(1, len(self.c)):
            acc = None
            for j in range(1, k + 1):
                term = self.c[j] * out[k - j] if j < len(self.c) else None
                if term is not None:
                    acc = term if acc is None else acc + term
            out.append(-(b0 * acc))
        return _ZPoly(out)

    def __truediv__(self, other):
        return self * other.inverse()


def _taylor(ctx, u, v, s, L, extra=F(0)):
    """z-Taylor of theta(z0 + z | s*tau) to degree L, as a _ZPoly."""
    fact = 1
    cs = []
    for d in range(L + 1):
        if d > 1:
            fact *= d
        cs.append(_theta(ctx, u, v, s, d, extra).scale(
            ctx.ring.from_fraction(F(1, fact))))
    return _ZPoly(cs)


def _odd_taylor_over_z(ctx, u, v, s, L, extra=F(0)):
    """theta(z0 + z)/z for z0 a lattice zero (theta odd there): degree-L poly."""
    fact = 1
    cs = []
    for d in range(1, L + 2):
        fact *= d
        cs.append(_theta(ctx, u, v, s, d, extra).scale(
            ctx.ring.from_fraction(F(1, fact))))
    return _ZPoly(cs)


# ------------------------------------------------------------------ context

@dataclass
class KrewerasContext:
    """Shared truncation orders, ring mode and series caches for section-2 ops."""

    N_q: Fraction = F(12)         # truncation of theta q-series work
    N_t: Fraction = F(34)         # truncation of t-side results
    mode: str = "exact"           # "exact" (cyclotomic) or "float"
    precision: int = 256
    _cache: dict = field(default_factory=dict)

    def __post_init__(self):
        self.N_q = F(self.N_q)
        self.N_t = F(self.N_t)
        if self.mode == "exact":
            self.ring = CYC
        elif self.mode == "float":
            self.ring = ComplexRing(self.precision)
        else:
            raise ValueError("mode must be 'exact' or 'float'")

    def cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]


# ------------------------------------------------------- Taylor side (t=0)

def kw_t_of_q(ctx: KrewerasContext) -> PuiseuxSeries:
    """t as a q-series: q^{-1/9} theta'(0|tau) / (4i theta(gamma) + 6 theta'(gamma))."""
    def build():
        ring = ctx.ring
        num = _theta(ctx, F(0), F(0), F(1), 1)
        th_g = _theta(ctx, F(0), F(1, 3), F(1), 0)
        th_g1 = _theta(ctx, F(0), F(1, 3), F(1), 1)
        four_i = ring.mul(ring.from_int(4), _ring_i(ring))
        den = th_g.scale(four_i) + th_g1.scale(ring.from_int(6))
        return (num / den).shift(F(-1, 9))
    return ctx.cached("t_of_q", build)


def kw_q_of_t(ctx: KrewerasContext) -> PuiseuxSeries:
    """q(t) by reversion of t(q) on the t^{9/2}, step-3 grid."""
    def build():
        t_q = kw_t_of_q(ctx)
        return ps_reversion(t_q, rescale=F(2, 9)).with_order(
            min(ctx.N_t, t_q.order * F(9, 2)))
    return ctx.cached("q_of_t", build)


def _ring_i(ring):
    if ring is CYC:
        return CYC.i
    import mpmath as mp
    with mp.workprec(ring.prec):
        return mp.mpc(0, 1)


def kw_XY(ctx: KrewerasContext, z: NomeArgument):
    """The parametrisation X(z), Y(z)=X(z+gamma) as q-series (z off the poles)."""
    def X_at(za: NomeArgument) -> PuiseuxSeries:
        pieces = []
        for dv, du in [(F(0), F(0)), (F(-1, 3), F(0))]:
            pieces.append(_theta(ctx, za.u + du, za.v + dv, F(1), 0, extra=F(2)))
        den = []
        for dv in (F(1, 3), F(-2, 3)):
            den.append(_theta(ctx, za.u, za.v + dv, F(1), 0, extra=F(2)))
        for p in den:
            if p.is_zero():
                raise ValueError(f"pole argument for X at {za}")
        out = (pieces[0] * pieces[1]) / (den[0] * den[1])
        return out.shift(F(-4, 9)).truncate(ctx.N_q)
    X = X_at(z)
    Y = X_at(NomeArgument(u=z.u, v=z.v + F(1, 3), s=z.s, hat=z.hat))
    return X, Y


def kw_U(ctx: KrewerasContext, z: NomeArgument) -> PuiseuxSeries:
    """U(z) = theta(g)/theta(pi/2+g) * theta(z+pi/2+g)/theta(z+g)."""
    a = _theta(ctx, F(0), F(1, 3), F(1), 0, extra=F(2))
    b = _theta(ctx, F(1, 2), F(1, 3), F(1), 0, extra=F(2))
    c = _theta(ctx, z.u + F(1, 2), z.v + F(1, 3), F(1), 0, extra=F(2))
    d = _theta(ctx, z.u, z.v + F(1, 3), F(1), 0, extra=F(2))
    return ((a * c) / (b * d)).truncate(ctx.N_q)


def _kw_J_constant(ctx: KrewerasContext) -> PuiseuxSeries:
    """-e^{4i gamma/3} theta(2g|tau) theta'(0|tau/3) / (theta(pi/2|tau/3) theta'(0|tau))."""
    th_2g = _theta(ctx, F(0), F(2, 3), F(1), 0, extra=F(2))
    th3_0p = _theta(ctx, F(0), F(0), F(1, 3), 1, extra=F(2))
    th3_pi2 = _theta(ctx, F(1, 2), F(0), F(1, 3), 0, extra=F(2))
    th_0p = _theta(ctx, F(0), F(0), F(1), 1, extra=F(2))
    out = (th_2g * th3_0p) / (th3_pi2 * th_0p)
    return (-out).shift(F(4, 9))


def kw_J(ctx: KrewerasContext, z: NomeArgument) -> PuiseuxSeries:
    """The decoupling function J(z) as a q-series."""
    den = _theta(ctx, z.u, z.v, F(1, 3), 0, extra=F(2))
    if den.is_zero():
        raise ValueError(f"pole argument for J at {z}")
    num = _theta(ctx, z.u + F(1, 2), z.v, F(1, 3), 0, extra=F(2))
    return (_kw_J_constant(ctx) * num / den).truncate(ctx.N_q)


def kw_W(ctx: KrewerasContext, ring=None, order=None) -> PuiseuxSeries:
    """W = t(2 + W^3), the unique power series solution (fixed point)."""
    ring = ring or ctx.ring
    order = F(order) if order is not None else ctx.N_t
    t = PuiseuxSeries(ring, 1, 1, [ring.one], order)
    W = ps_zero(ring, order)
    two = ps_const(ring, ring.from_int(2), order)
    steps = int(order) + 2
    for _ in range(steps):
        W = t * (two + W * W * W)
    return W


def kw_Qx0_closed(ctx: KrewerasContext, m: int, ring=None, order=None) -> PuiseuxSeries:
    """[x^m] Q(x,0) from the algebraic closed form, as a t-series.

    Expanding sqrt(1 - x W^2) binomially in the closed form gives

        [x^m] Q(x,0) = (-1)^m (C(1/2,m+1) W^{2m+1} + C(1/2,m+2) W^{2m+4}) / t.
    """
    ring = ring or ctx.ring
    order = F(order) if order is not None else ctx.N_t
    W = kw_W(ctx, ring, order + 1)

    def binom_half(k):
        out = F(1)
        for i in range(k):
            out *= (F(1, 2) - i)
            out /= (i + 1)
        return out

    b1 = ring.from_fraction((-1) ** m * binom_half(m + 1))
    b2 = ring.from_fraction((-1) ** m * binom_half(m + 2))
    s = W.pow(2 * m + 1).scale(b1) + W.pow(2 * m + 4).scale(b2)
    return s.shift(F(-1)).truncate(order)


def _q00_from_limit(x_over_z: _ZPoly, zJ: _ZPoly, t_series: PuiseuxSeries,
                    weight: PuiseuxSeries, minus_x: bool):
    """Q(0,0) from the z -> 0 limit of  w X Q(X,0) = 1/(2t) [- X] - 1/X - J.

    `x_over_z` carries X(z)/z to degree 2, `zJ` carries z*J(z) to degree 2,
    `weight` is the prefactor w (t for Kreweras, a*t for the weighted model).
    Returns (Q00, checks) where checks are the z^{-1} and z^0 residuals.
    """
    x1, x2, x3 = x_over_z.c[0], x_over_z.c[1], x_over_z.c[2]
    jm1, j0, j1 = zJ.c[0], zJ.c[1], zJ.c[2]
    inv_x1 = x1.inverse()
    chk_pole = jm1 + inv_x1
    half = t_series.ring.from_fraction(F(1, 2))
    chk_const = t_series.inverse().scale(half) + x2 * inv_x1 * inv_x1 - j0
    num = x3 * inv_x1 * inv_x1 - (x2 * x2) * inv_x1.pow(3) - j1
    if minus_x:
        num = num - x1
    q00 = num * inv_x1 * weight.inverse()
    return q00, (chk_pole, chk_const)


def kw_Q00_q(ctx: KrewerasContext) -> PuiseuxSeries:
    """Q(0,0) as a q-series, via the z->0 limit of the boundary equation."""
    def build():
        # X(z)/z = q^{-4/9} (theta(z)/z) theta(z-g) / (theta(z+g) theta(z-2g))
        L = 2
        th0 = _odd_taylor_over_z(ctx, F(0), F(0), F(1), L, extra=F(2))
        thm = _taylor(ctx, F(0), F(-1, 3), F(1), L, extra=F(2))
        thp = _taylor(ctx, F(0), F(1, 3), F(1), L, extra=F(2))
        thm2 = _taylor(ctx, F(0), F(-2, 3), F(1), L, extra=F(2))
        x_over_z = (th0 * thm) / (thp * thm2)
        x_over_z = _ZPoly([c.shift(F(-4, 9)) for c in x_over_z.c])
        # z J(z) = C_J theta(z + pi/2 | tau/3) / (theta(z|tau/3)/z)
        num = _taylor(ctx, F(1, 2), F(0), F(1, 3), L, extra=F(2))
        den = _odd_taylor_over_z(ctx, F(0), F(0), F(1, 3), L, extra=F(2))
        CJ = _kw_J_constant(ctx)
        zJ = num / den
        zJ = _ZPoly([CJ * c for c in zJ.c])
        t_series = kw_t_of_q(ctx)
        q00, (chk_pole, chk_const) = _q00_from_limit(
            x_over_z, zJ, t_series, t_series, minus_x=False)
        _assert_small(ctx, chk_pole, "z^-1 consistency in the Q(0,0) limit")
        _assert_small(ctx, chk_const, "z^0 consistency in the Q(0,0) limit")
        return q00.truncate(ctx.N_q)
    return ctx.cached("q00_q", build)


def _assert_small(ctx, series: PuiseuxSeries, what: str):
    if ctx.ring.exact:
        if not series.is_zero():
            raise ArithmeticError(f"{what} failed: {series!r}")
    else:
        import mpmath as mp
        bad = [c for _, c in series.terms()
               if abs(c) > mp.mpf(2) ** (-(ctx.precision // 2))]
        if bad:
            raise ArithmeticError(f"{what} failed: residual {bad[0]}")


def kw_Q00_t(ctx: KrewerasContext) -> PuiseuxSeries:
    """Q(0,0) as a t-series (1 + 2t^3 + 16t^6 + ...)."""
    def build():
        q00_q = kw_Q00_q(ctx)
        q_t = kw_q_of_t(ctx)
        return q00_q.compose(q_t).truncate(ctx.N_t)
    return ctx.cached("q00_t", build)


# ------------------------------------------------ Jacobi-dual side (t=1/3)

def kw_t_of_qhat(ctx: KrewerasContext) -> PuiseuxSeries:
    """t = theta'(0,qhat) / (6 theta'(pi/3,qhat)): the dual t-relation."""
    def build():
        num = _theta(ctx, F(0), F(0), F(1), 1)
        den = _theta(ctx, F(1, 3), F(0), F(1), 1).scale(ctx.ring.from_int(6))
        return num / den
    return ctx.cached("t_of_qhat", build)


def kw_qhat_of_t(ctx: KrewerasContext) -> PuiseuxSeries:
    """qhat as a series in (1/3 - t)^{1/2} (reversion of the dual t-relation)."""
    def build():
        t_qhat = kw_t_of_qhat(ctx)
        third = ps_const(ctx.ring, ctx.ring.from_fraction(T_CRIT), order=t_qhat.order)
        delta = third - t_qhat  # even series, valuation 2
        return ps_reversion(delta, rescale=F(2))
    return ctx.cached("qhat_of_t", build)


def kw_Q00_critical_qhat(ctx: KrewerasContext) -> PuiseuxSeries:
    """Q(0,0) as a qhat-series: the dual of the z->0 limit assembly."""
    def build():
        ring = ctx.ring
        L = 2
        # X(zh)/zh = (theta(zh,qhat)/zh) theta(zh - pi/3) /
        #            (theta(zh + pi/3) theta(zh - 2pi/3))
        th0 = _odd_taylor_over_z(ctx, F(0), F(0), F(1), L, extra=F(2))
        thm = _taylor(ctx, F(-1, 3), F(0), F(1), L, extra=F(2))
        thp = _taylor(ctx, F(1, 3), F(0), F(1), L, extra=F(2))
        thm2 = _taylor(ctx, F(-2, 3), F(0), F(1), L, extra=F(2))
        x_over_z = (th0 * thm) / (thp * thm2)
        # J(zh) = C e^{-3i zh} theta(zB + 3 zh, qhat^3) / theta(3 zh, qhat^3)
        # zB = (3i/2) log qhat, i.e. the (u=0, v=-3/2, s=3) argument.
        thB = _taylor(ctx, F(0), F(-3, 2), F(3), L, extra=F(3))
        thB3 = _ZPoly([c.scale(ring.from_int(3 ** d)) for d, c in enumerate(thB.c)])
        th3z = _odd_taylor_over_z(ctx, F(0), F(0), F(3), L, extra=F(3))
        th3z3 = _ZPoly([c.scale(ring.from_int(3 ** (d + 1)))
                        for d, c in enumerate(th3z.c)])
        i_r = _ring_i(ring)
        m3i = ring.neg(ring.mul(ring.from_int(3), i_r))
        e3 = _ZPoly([ps_const(ring, ring.one, order=ctx.N_q + 3),
                     ps_const(ring, m3i, order=ctx.N_q + 3),
                     ps_const(ring, ring.mul(m3i, ring.mul(m3i, ring.from_fraction(F(1, 2)))),
                              order=ctx.N_q + 3)])
        # constant: -3 theta(2pi/3,qhat) theta'(0,qhat^3) / (thetaB(0) theta'(0,qhat))
        c_num = _theta(ctx, F(2, 3), F(0), F(1), 0, extra=F(3)) * \
            _theta(ctx, F(0), F(0), F(3), 1, extra=F(3))
        c_den = _theta(ctx, F(0), F(-3, 2), F(3), 0, extra=F(3)) * \
            _theta(ctx, F(0), F(0), F(1), 1, extra=F(3))
        CJ = -(c_num / c_den).scale(ring.from_int(3))
        zJ = (e3 * thB3) / th3z3
        zJ = _ZPoly([CJ * c for c in zJ.c])
        t_series = kw_t_of_qhat(ctx)
        q00, (chk_pole, chk_const) = _q00_from_limit(
            x_over_z, zJ, t_series, t_series, minus_x=False)
        _assert_small(ctx, chk_pole, "dual z^-1 consistency in the Q(0,0) limit")
        _assert_small(ctx, chk_const, "dual z^0 consistency in the Q(0,0) limit")
        return q00.truncate(ctx.N_q)
    return ctx.cached("q00_crit_qhat", build)


def kw_Q00_critical(ctx: KrewerasContext) -> PuiseuxSeries:
    """Q(0,0) expanded at the critical point, in powers of (1/3 - t)^{1/2}."""
    def build():
        q00_qhat = kw_Q00_critical_qhat(ctx)
        qhat_delta = kw_qhat_of_t(ctx)
        return q00_qhat.compose(qhat_delta)
    return ctx.cached("q00_critical", build)


def kw_Q00_critical_algebraic(ctx: KrewerasContext, order=F(5)) -> PuiseuxSeries:
    """Independent cross-check: expand the closed form W(6t - W)/(8 t^2)...

    ... i.e. (4W - W^4)/(8t), at t = 1/3 - delta by Newton iteration on
    W = t(2 + W^3) in Puiseux series of delta^{1/2}.  No theta functions
    are involved in this route.
    """
    ring = ctx.ring
    order = F(order)
    # each Newton step divides by fp ~ delta^{1/2}, losing half an order of
    # verifiable truncation, so work with padding
    import math
    iters = max(4, math.ceil(math.log2(float(2 * order))) + 2)
    work = order + F(iters + 2, 2)
    sqrt3 = ring.nth_root(ring.from_int(3), 2)
    d12 = PuiseuxSeries(ring, 2, 1, [ring.neg(sqrt3)], work)
    W = ps_one(ring, work) + d12
    t = ps_const(ring, ring.from_fraction(F(1, 3)), work) - \
        PuiseuxSeries(ring, 1, 1, [ring.one], work)
    two = ps_const(ring, ring.from_int(2), work)
    three = ps_const(ring, ring.from_int(3), work)
    for _ in range(iters):
        f = W - t * (two + W.pow(3))
        if f.is_zero():
            break
        fp = ps_one(ring, f.order) - t * three * W * W
        W = W - f / fp
    four = ps_const(ring, ring.from_int(4), order)
    q00 = (four * W.truncate(order + 1) - W.truncate(order + 1).pow(4)) * \
        t.inverse().scale(ring.from_fraction(F(1, 8)))
    return q00.truncate(order)


@dataclass
class TransferPrediction:
    growth_per_step: float         # mu = 3
    exponent: float                # alpha in q(0,0;3n) ~ A 27^n n^{-alpha}
    amplitude: float               # A
    terms: list                    # (half-exponent m/2, contribution constant)

    def predict(self, n3: int) -> float:
        """Predicted q(0,0;n3) for n3 a multiple of 3 (exact transfer binomials)."""
        import mpmath as mp
        n = n3 // 3
        tot = mp.mpf(0)
        with mp.workprec(96):
            for m_half, const in self.terms:
                e = mp.mpf(m_half.numerator) / m_half.denominator
                # const * [u^n] (1/27 - u)^{m/2}, summed over the odd powers
                tot += const * mp.mpf(27) ** (-e) * mp.binomial(e, n) * (-1) ** n
            return float(tot * mp.mpf(27) ** n)


def kw_transfer_asymptotics(ctx: KrewerasContext) -> TransferPrediction:
    """Coefficient asymptotics of Q(0,0) from the critical expansion.

    Q(0,0) = g(t^3) (period 3).  The critical series is re-expanded exactly
    in s = 1/27 - t^3 via delta = (1/3)(1 - (1 - 27s)^{1/3}); odd half-powers
    s^{m/2} then transfer with exact binomials,

        [u^n] (1/27 - u)^{m/2} = 27^{-m/2} binom(m/2, n) (-27)^n,

    giving the n^{-5/2} 27^n law with amplitude c_{3/2} 27^{-3/2}/Gamma(-3/2).
    """
    import mpmath as mp

    crit = kw_Q00_critical(ctx)
    ring = ctx.ring
    # delta as a series in s = 1/27 - t^3
    order = crit.order
    s_var = PuiseuxSeries(ring, 1, 1, [ring.one], order)
    inner = ps_one(ring, order) - s_var.scale(ring.from_int(27))
    delta_s = (ps_one(ring, order) - inner.pow(F(1, 3))).scale(
        ring.from_fraction(F(1, 3)))
    crit_s = crit.compose(delta_s)
    terms = []
    with mp.workprec(max(ctx.precision, 128)):
        for e, c in crit_s.terms():
            if e.denominator != 2:
                continue
            cv = ctx.ring.to_mpc(c, max(ctx.precision, 128))
            terms.append((e, float(mp.re(cv))))
        lead = terms[0]
        amp = lead[1] * mp.mpf(27) ** (-float(lead[0])) / mp.gamma(
            -mp.mpf(lead[0].numerator) / lead[0].denominator)
    return TransferPrediction(growth_per_step=3.0, exponent=float(lead[0]) + 1,
                              amplitude=float(amp), terms=terms)
