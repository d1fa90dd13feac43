"""Weighted {N,E,S,W,NE(a)} model: parameters, Taylor data, critical transeries."""

from fractions import Fraction

import mpmath as mp
import pytest

from thetawalks.amodel import (
    am_beta_series,
    am_critical_transeries,
    am_dual_side,
    am_harmonic_gf_coeffs,
    am_k_from_a,
    am_leading_asymptotics,
    am_params,
    am_q_of_s,
    am_q_trajectory,
    am_Q00_taylor,
    am_saddle,
    am_solve_params_numeric,
    am_X_J_hat,
)
from thetawalks.oracle import dp_count, series_check
from thetawalks.theta import StepSet

F = Fraction
PREC = 192


def test_k_from_a_values():
    with mp.workprec(PREC):
        assert abs(am_k_from_a(mp.sqrt(2), PREC) - 1 / mp.sqrt(2)) < mp.mpf(2) ** -180
        k1 = am_k_from_a(1, PREC)
        assert abs(k1 ** 3 + k1 ** 2 - 1) < mp.mpf(2) ** -180
        assert abs(am_k_from_a(mp.mpf("1e-8"), PREC) - 1) < 1e-7
    with pytest.raises(ValueError):
        am_k_from_a(-1)


def test_params_special_values():
    with mp.workprec(PREC):
        p = am_params(mp.sqrt(2), PREC)
        assert abs(p.t_c - mp.sqrt(2) / 7) < mp.mpf(2) ** -180
        assert abs(p.beta0 - mp.acos(mp.mpf(-1) / 4) / 2) < mp.mpf(2) ** -180
        assert 1.5 < p.rho < 2


def test_rho_monotone_in_a():
    with mp.workprec(96):
        rhos = [am_params(a, 96).rho for a in
                [mp.mpf("0.05"), mp.mpf("0.3"), 1, 2, mp.mpf(5)]]
        assert all(1.5 < r < 2 for r in rhos)
        # monotone (decreasing) in a on the sampled grid
        assert all(a > b for a, b in zip(rhos, rhos[1:]))


def test_saddle():
    with mp.workprec(PREC):
        x0, y0, theta = am_saddle(1, PREC)
        p = am_params(1, PREC)
        assert x0 == y0 == p.k
        assert abs(theta - 2 * p.beta0) < mp.mpf(2) ** -180
        # a -> 0: theta -> pi/2
        _, _, th0 = am_saddle(mp.mpf("1e-10"), PREC)
        assert abs(th0 - mp.pi / 2) < 1e-9


@pytest.mark.parametrize("a", ["0.5", "1", "3"])
def test_q_of_s_display(a):
    with mp.workprec(PREC):
        av = mp.mpf(a)
        side = am_q_of_s(av, N=14, prec=PREC)
        q = side.q
        tol = mp.mpf(10) ** -40
        assert abs(q.coeff(F(7, 2)) - mp.sqrt(av)) < tol
        want = 1 / (2 * mp.sqrt(av)) - mp.mpf(3) / 4 * av ** mp.mpf("1.5")
        assert abs(q.coeff(F(9, 2)) - want) < tol
        # t(s) has real positive leading coefficient (= 1)
        assert abs(side.t.coeff(1) - 1) < tol
        assert abs(mp.im(side.t.coeff(2))) < tol


def test_q_of_s_back_substitution():
    """Substituting q(s) back into the parameter relation returns a^2."""
    from thetawalks.amodel import _Rk

    with mp.workprec(PREC):
        side = am_q_of_s(mp.mpf("1.5"), N=14, prec=PREC)
        N = side.N
        R1, R2 = _Rk(side.U, 1, N), _Rk(side.U, 2, N)
        R3, R4 = _Rk(side.U, 3, N), _Rk(side.U, 4, N)
        H = (R1.pow(3) * R4 * R4) / (R2 * R2 * R3.pow(3))
        F_res = H.shift(2)
        for e, c in F_res.terms():
            if e == 0:
                assert abs(c - mp.mpf("2.25")) < mp.mpf(10) ** -40
            else:
                assert abs(c) < mp.mpf(10) ** -40


@pytest.mark.slow
@pytest.mark.parametrize("a", [F(1, 2), F(1), F(2)])
def test_Q00_taylor_matches_dp(a):
    q00 = am_Q00_taylor(a, N_t=20, prec=PREC)
    table = dp_count(StepSet.amodel(a), 20, backend="exact", box=21)
    rep = series_check(table, q00, 20, rel_tol=1e-35)
    assert rep.ok, rep.first_mismatch


def test_decoupling_identity_numeric():
    """a t X Q1 + a t Y Q2 = a X Y = -X - Y - 1/X - 1/Y + 1/t at sampled z."""
    with mp.workprec(PREC):
        a = mp.mpf(1)
        t = mp.mpf("0.14")
        trip = am_solve_params_numeric(a, t, PREC)
        from thetawalks.theta import theta_numeric_q

        q, v, c = trip.q, trip.gamma_ratio, trip.c
        tau = mp.log(q) / (1j * mp.pi)
        g = v * mp.pi * tau
        th = lambda z, d=0: theta_numeric_q(z, q, d, PREC)

        def X(z):
            return c * th(z) * th(z + g) / (th(z - g) * th(z + 2 * g))

        table = dp_count(StepSet.amodel(F(1)), 44, backend="exact", box=44)

        def Qx0(x):
            tot = mp.mpc(0)
            for n in range(45):
                plane = table.planes[n]
                for i in range(min(n, 44) + 1):
                    if plane[i][0]:
                        tot += plane[i][0] * x ** i * t ** n
            return tot

        for zr in ("0.35", "0.8"):
            z = mp.mpf(zr)
            Xv, Yv = X(z), X(-z)
            lhs = a * t * Xv * Qx0(Xv) + a * t * Yv * Qx0(Yv)
            mid = a * Xv * Yv
            rhs = -Xv - Yv - 1 / Xv - 1 / Yv + 1 / t
            assert abs(mid - rhs) < mp.mpf(10) ** -40
            assert abs(lhs - mid) < mp.mpf(10) ** -12  # DP truncation limited


def test_J_antisymmetry_and_prop35_residual():
    with mp.workprec(PREC):
        a = mp.mpf(1)
        t = mp.mpf("0.12")
        trip = am_solve_params_numeric(a, t, PREC)
        from thetawalks.theta import theta_numeric_q

        q, v, c = trip.q, trip.gamma_ratio, trip.c
        tau = mp.log(q) / (1j * mp.pi)
        g = v * mp.pi * tau
        s = mp.exp(1j * g)
        th = lambda z, d=0: theta_numeric_q(z, q, d, PREC)
        ths = lambda z, d=0: theta_numeric_q(z, s ** 2, d, PREC)  # nome e^{2ig}?

        # J via the (sign-corrected) closed form; nome of theta(.|gamma/pi) is e^{i gamma}
        def J(z):
            return theta_numeric_q(0, s, 1, PREC) * th(2 * g) * \
                theta_numeric_q(z + mp.pi / 2, s, 0, PREC) / (
                    c * theta_numeric_q(mp.pi / 2, s, 0, PREC) * th(0, 1)
                    * theta_numeric_q(z, s, 0, PREC))

        for zr in ("0.3", "1.1"):
            z = mp.mpf(zr)
            assert abs(J(z) + J(-z)) < mp.mpf(10) ** -45
        # I(z) = J(z) - closed form = 0: residual against the defining relation
        table = dp_count(StepSet.amodel(F(1)), 40, backend="exact", box=40)

        def Qx0(x):
            tot = mp.mpc(0)
            for n in range(41):
                plane = table.planes[n]
                for i in range(min(n, 40) + 1):
                    if plane[i][0]:
                        tot += plane[i][0] * x ** i * t ** n
            return tot

        def Xf(z):
            return c * th(z) * th(z + g) / (th(z - g) * th(z + 2 * g))

        z = mp.mpf("0.45")
        Xv = Xf(z)
        lhs = 1 / (2 * t) - a * t * Xv * Qx0(Xv) - Xv - 1 / Xv
        assert abs(lhs - J(z)) < mp.mpf(10) ** -12


def test_solve_params_grid():
    """q(t) in (0,1) with endpoint limits 0 and 1; gamma ratio in (1/4, 1/3)."""
    with mp.workprec(PREC):
        p = am_params(1, PREC)
        ts = [p.t_c * mp.mpf(j) / 12 for j in range(1, 11)]
        # 10^-40 is the deepest boundary layer resolvable at this precision
        ts += [p.t_c * (1 - mp.mpf(10) ** -e) for e in (2, 4, 8, 16, 40)]
        trips = am_q_trajectory(1, ts, PREC)
        qs = [tr.q for tr in trips]
        assert all(0 < q < 1 for q in qs)
        assert all(a < b for a, b in zip(qs, qs[1:]))  # numeric observation
        assert qs[0] < mp.mpf("1e-3")
        assert qs[-1] > mp.mpf("0.75")
        assert all(F(1, 4) < F(str(round(float(tr.gamma_ratio), 12))) < F(1, 3)
                   for tr in trips)


@pytest.mark.parametrize("a", ["0.5", "1", "3"])
def test_beta_series_closed_forms(a):
    with mp.workprec(PREC):
        av = mp.mpf(a)
        p = am_params(av, PREC)
        k, b0 = p.k, p.beta0
        db = am_beta_series(av, 8, PREC)
        beta1 = db.coeff(F(2))
        closed = mp.mpf(1) / 2 * k ** 2 * (2 * k ** 2 - 1) * (1 - k ** 2) * \
            mp.sqrt((1 + k ** 2) * (3 - k ** 2))
        assert abs(beta1 - closed) < mp.mpf(10) ** -40
        # 2cos(2 beta) qhat^2 coefficient
        got = -4 * mp.sin(2 * b0) * mp.re(beta1)
        want = -k ** 2 * (2 * k ** 2 - 1) * (k ** 2 + 1) * (k ** 2 - 3) * (k ** 2 - 1)
        assert abs(got - want) < mp.mpf(10) ** -38


def test_beta1_vanishes_at_sqrt2():
    with mp.workprec(PREC):
        db = am_beta_series(mp.sqrt(2), 8, PREC)
        assert abs(db.coeff(F(2))) < mp.mpf(10) ** -45
        assert abs(db.coeff(F(4))) > mp.mpf("1e-6")  # beta2 stays nonzero


@pytest.mark.parametrize("a", ["0.5", "1", "3"])
def test_dual_t_d_displays(a):
    with mp.workprec(PREC):
        av = mp.mpf(a)
        side = am_dual_side(av, 10, PREC)
        p, k = side.params, side.params.k
        tol = mp.mpf(10) ** -38
        assert abs(side.t.coeff(F(0)) - p.t_c) < tol
        want = -(k ** 2 + 1) ** 2 * (3 - k ** 2) ** 3 / (k ** 2 + 3) * p.t_c
        assert abs(side.t.coeff(F(2)) - want) < tol
        assert abs(side.d.coeff(F(0)) - k) < tol
        want_d2 = -k ** 3 * (k ** 2 - 3) * (k ** 2 - 1) * (k ** 2 + 1)
        assert abs(side.d.coeff(F(2)) - want_d2) < tol
        # reversion leading coefficient: qhat^2 = kappa (1 - t/t_c) + ...
        assert abs(side.y_of_u.coeff(F(1)) - p.kappa) < tol


def test_X_J_hat_displays():
    """Leading dual X against the u-form; J's qhat^{pi/beta} term; J1 form."""
    from thetawalks.series import ps_const, ps_cos, ps_one, ps_sin, ps_x

    with mp.workprec(PREC):
        a = mp.mpf(1)
        side = am_dual_side(a, 10, PREC)
        dual = am_X_J_hat(a, L=8, P=2, side=side, prec=PREC)
        ring, p = side.ring, side.params
        k, b0 = p.k, p.beta0
        N = F(8)
        w = ps_x(ring, order=N)
        cb = ring.from_mpf(mp.cos(b0))
        sb = ring.from_mpf(mp.sin(b0))
        # u-form with zhat = +w: u = cos(b0 + 2w)/cos b0 - 1
        u = (ps_cos(w.scale(ring.from_int(2))).scale(cb)
             - ps_sin(w.scale(ring.from_int(2))).scale(sb)).scale(ring.inv(cb)) \
            - ps_one(ring, N)
        k3 = ps_const(ring, ring.from_mpf(3 - k ** 2), order=N)
        xform = u.scale(ring.from_mpf(k)) * (u + k3).inverse()
        for j in range(1, 8):
            got = dual.x_of_w.coeff(F(j)).coeff(F(0))
            assert abs(got - xform.coeff(F(j))) < mp.mpf(10) ** -40
        # Q^1 coefficient of J: (4 pi/(beta0 k)) sin(2 b0) sin(pi w/b0) at qhat^0
        J1Q = dual.J.parts[1]
        for j in (1, 3, 5):
            got = J1Q.coeff(F(j)).coeff(F(0))
            want = 4 * mp.pi / (b0 * k) * mp.sin(2 * b0) * \
                (mp.pi / b0) ** j * (-1) ** (j // 2) / mp.factorial(j)
            assert abs(got - want) < mp.mpf(10) ** -38
        # J1 (qhat^2 part of the Q^0 piece) equals the closed form
        # (pi sin2b0/(b0 k sin(pi w/b0))) [ (1+k^2-k^4)(3-k^2)(1+k^2)
        #  + pi b1 w cos(pi w/b0)/(b0^2 sin(pi w/b0)) + 2 b1 cos2b0/sin2b0 - b1/b0 ]
        # verbatim in the Jacobi-oriented variable (every sign flip cancels)
        b1 = mp.re(side.dbeta.coeff(F(2)))
        arg = w.scale(ring.from_mpf(mp.pi / b0))
        sinw, cosw = ps_sin(arg), ps_cos(arg)
        inv_sin = sinw.inverse()
        bracket = ps_const(ring, ring.from_mpf(
            (1 + k ** 2 - k ** 4) * (3 - k ** 2) * (1 + k ** 2)
            + 2 * b1 * mp.cos(2 * b0) / mp.sin(2 * b0) - b1 / b0), order=N)
        bracket = bracket + (w.scale(ring.from_mpf(mp.pi * b1 / b0 ** 2))
                             * cosw * inv_sin)
        J1_closed = inv_sin.scale(
            ring.from_mpf(mp.pi * mp.sin(2 * b0) / (b0 * k))) * bracket
        J0 = dual.J.parts[0]
        for j in (-1, 0, 1, 2, 3):
            got = J0.coeff(F(j)).coeff(F(2))
            want = J1_closed.coeff(F(j))
            assert abs(got - want) < mp.mpf(10) ** -35, (j, got, want)


def test_transeries_structure_and_ratios():
    with mp.workprec(PREC):
        a = mp.mpf(1)
        crit = am_critical_transeries(a, K=1, x_order=4, N2=10, prec=PREC)
        p = crit.params
        # every emitted term has m <= l
        assert all(m <= l for (_, l, m) in crit.P)
        # P000 proportional to the harmonic generating values
        V = am_harmonic_gf_coeffs(a, jmax=3, prec=PREC)
        for j in range(4):
            got = crit.P_coeff(0, 0, 0, j)
            want = p.C * mp.gamma(-p.rho) * mp.re(V[j])
            assert abs(got - want) < mp.mpf(10) ** -30 * (1 + abs(want))
        # P011/P000 = -(pi beta1/(2 beta0^2)) kappa, independent of x
        db = am_beta_series(a, 8, PREC)
        beta1 = mp.re(db.coeff(F(2)))
        pred = -mp.pi * beta1 / (2 * p.beta0 ** 2) * p.kappa
        for j in range(3):
            r = crit.P_coeff(0, 1, 1, j) / crit.P_coeff(0, 0, 0, j)
            assert abs(r - pred) < mp.mpf(10) ** -30


def test_log_certificate_at_sqrt2():
    """beta1 = 0 at a = sqrt(2): the first log term moves to (0,2,1) and
    P011 vanishes identically; logs persist."""
    with mp.workprec(PREC):
        a = mp.sqrt(2)
        crit = am_critical_transeries(a, K=1, x_order=3, N2=10, prec=PREC)
        p000 = crit.P_coeff(0, 0, 0, 0)
        p011 = crit.P_coeff(0, 1, 1, 0)
        p021 = crit.P_coeff(0, 2, 1, 0)
        assert abs(p011) < mp.mpf(10) ** -30 * abs(p000)
        assert abs(p021) > mp.mpf(10) ** -6 * abs(p000)


@pytest.mark.slow
def test_dual_consistency_taylor_vs_critical():
    """Q(0,0) at t = 0.9 t_c: long Taylor sum vs the summed transeries."""
    with mp.workprec(PREC):
        a = mp.mpf(1)
        p = am_params(a, PREC)
        t = mp.mpf("0.9") * p.t_c
        q00 = am_Q00_taylor(a, N_t=60, prec=PREC)
        taylor_val = q00.evaluate(t, prec=PREC)
        crit = am_critical_transeries(a, K=2, x_order=2, N2=16, prec=PREC)
        crit_val = crit.evaluate_q00(t)
        assert abs(taylor_val - crit_val) / abs(crit_val) < 1e-6


def test_harmonic_limit_and_C_limit():
    with mp.workprec(PREC):
        V = am_harmonic_gf_coeffs(mp.mpf("1e-6"), jmax=3, prec=PREC)
        for j, v in enumerate(V):
            assert abs(mp.re(v) - 4 * (j + 1)) < 1e-4
        assert all(mp.re(v) > 0 for v in V)
        C = am_params(mp.mpf("1e-4"), PREC).C
        assert abs(C - 4 / mp.pi) < 1e-3


def test_leading_asymptotics_formula():
    with mp.workprec(96):
        p = am_params(1, 96)
        V = am_harmonic_gf_coeffs(1, jmax=2, prec=96)
        val = am_leading_asymptotics(1, 0, 100, prec=96, V=V)
        want = p.C * mp.re(V[0]) * mp.mpf(100) ** (-1 - p.rho) * p.t_c ** -100
        assert abs(val - want) < abs(want) * 1e-20
    with pytest.raises(ValueError):
        am_leading_asymptotics(1, -1, 10)
