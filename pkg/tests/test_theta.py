"""Theta q-series, numeric theta, nome duality, AGM, step sets."""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from thetawalks.rings import CYC, ComplexRing
from thetawalks.series import ps_promote
from thetawalks.theta import (
    Kernel,
    NomeArgument,
    StepSet,
    agm,
    elliptic_K,
    jacobi_dual,
    jacobi_identity_check,
    kernel_eval,
    nome_from_modulus,
    step_poly_eval,
    theta_numeric,
    theta_numeric_q,
    theta_q_series,
)

F = Fraction
PREC = 256


def test_theta_series_at_half_pi():
    # theta(pi/2) = 2i (q^{1/4} + q^{9/4} + q^{25/4} + ...)
    s = theta_q_series(NomeArgument(u=F(1, 2)), d=0, N=F(7), ring=CYC)
    two_i = CYC.mul(CYC.from_int(2), CYC.i)
    assert s.coeff(F(1, 4)) == two_i
    assert s.coeff(F(9, 4)) == two_i
    assert s.coeff(F(25, 4)) == two_i
    assert s.exponents() == [F(1, 4), F(9, 4), F(25, 4)]


def test_theta_series_odd_vanishes_at_zero():
    s = theta_q_series(NomeArgument(), d=0, N=F(9), ring=CYC)
    assert s.is_zero()


def test_theta_derivative_matches_finite_difference():
    """d=1 series evaluated at q=0.01 vs a finite-difference z-derivative."""
    q = mp.mpf("0.01")
    s1 = theta_q_series(NomeArgument(u=F(1, 5)), d=1, N=F(16), ring=ComplexRing(PREC))
    with mp.workprec(PREC):
        val = s1.evaluate(q, prec=PREC)
        h = mp.mpf(2) ** -60
        z0 = mp.pi / 5
        fd = (theta_numeric_q(z0 + h, q, 0, PREC) - theta_numeric_q(z0 - h, q, 0, PREC)) / (2 * h)
        assert abs(val - fd) < mp.mpf(10) ** -25


@pytest.mark.parametrize("seed", [1, 2])
def test_theta_numeric_symmetries(seed):
    rng = random.Random(seed)
    with mp.workprec(PREC):
        for _ in range(50):
            z = mp.mpc(rng.uniform(-2, 2), rng.uniform(-0.8, 0.8))
            tau = mp.mpc(rng.uniform(-0.3, 0.3), rng.uniform(0.4, 2.5))
            th = lambda w: theta_numeric(w, tau, 0, PREC)
            tol = mp.mpf(2) ** (-PREC + 40) * (1 + abs(th(z)))
            assert abs(th(mp.pi - z) - th(z)) < tol
            assert abs(th(-z) + th(z)) < tol
            quasi = -mp.exp(-mp.mpc(0, 1) * mp.pi * tau - 2j * z) * th(z)
            assert abs(th(z + mp.pi * tau) - quasi) < tol * abs(mp.exp(-2j * z)) * 10
        assert abs(theta_numeric(0, mp.mpc(0, 1), 0, PREC)) == 0


def test_eq17_exact_q_series_identities():
    """The three transformations hold coefficientwise as exact q-series."""
    for u, v in [(F(1, 3), F(1, 3)), (F(1, 2), F(-2, 3)), (F(0), F(1, 3))]:
        N = F(8)
        th = lambda uu, vv: theta_q_series(NomeArgument(u=uu, v=vv), 0, N, CYC)
        # theta(pi - z) = theta(z)
        lhs = th(1 - u, -v)
        rhs = th(u, v)
        assert (lhs - rhs).is_zero()
        # theta(-z) = -theta(z)
        assert (th(-u, -v) + th(u, v)).is_zero()
        # theta(z + pi tau) = -e^{-i pi tau - 2iz} theta(z):
        # RHS = -(q^{-1} * unit(-2u) * q^{-2v}) theta(z); both sides exact series
        lhs2 = th(u, v + 1)
        rhs2 = th(u, v).shift(F(-1) - 2 * v).scale(
            CYC.neg(CYC.root_of_unity_24(int(-24 * u) % 24)))
        assert (lhs2 - rhs2).is_zero()


def test_theta_series_vs_numeric_small_nome():
    # evaluated with guard bits so the series truncation is the only error
    work = PREC + 64
    ring = ComplexRing(work)
    for u, v in [(F(1, 2), F(0)), (F(1, 3), F(1, 3)), (F(2, 5), F(-1, 3))]:
        s = theta_q_series(NomeArgument(u=u, v=v), 0, F(95), ring)
        with mp.workprec(work):
            for qv in [mp.mpf("0.05"), mp.mpf("0.1")]:
                tau = mp.log(qv) / (1j * mp.pi)
                z = mp.pi * mp.mpf(u.numerator) / u.denominator + \
                    mp.pi * tau * mp.mpf(v.numerator) / v.denominator
                direct = theta_numeric(z, tau, 0, work)
                viaseries = s.evaluate(qv, prec=work)
                assert abs(direct - viaseries) < mp.mpf(10) ** -(PREC // 3)


def test_jacobi_dual_fixed_point_and_involution():
    with mp.workprec(PREC):
        q0 = mp.exp(-mp.pi)
        assert abs(jacobi_dual(q0, PREC) - q0) < mp.mpf(2) ** (-PREC + 8)
        q = mp.mpf("0.37")
        assert abs(jacobi_dual(jacobi_dual(q, PREC), PREC) - q) < mp.mpf(2) ** (-PREC + 16)
        qd = jacobi_dual(mp.mpf("0.01"), PREC)
        assert abs(qd - mp.exp(mp.pi ** 2 / mp.log(mp.mpf("0.01")))) == 0
    with pytest.raises(ValueError):
        jacobi_dual(1.5)


def test_jacobi_identity_random():
    rng = random.Random(7)
    with mp.workprec(PREC):
        for _ in range(100):
            q = mp.mpf(rng.uniform(0.05, 0.95))
            z = mp.mpc(rng.uniform(-1.5, 1.5), rng.uniform(-0.5, 0.5))
            assert jacobi_identity_check(z, q, PREC) < mp.mpf(10) ** -60
        # z = 0: both sides vanish
        assert jacobi_identity_check(0, mp.mpf("0.3"), PREC) < mp.mpf(10) ** -70
        assert jacobi_identity_check(mp.pi / 4, mp.exp(-mp.pi), PREC) < mp.mpf(10) ** -60


def test_agm_and_elliptic():
    with mp.workprec(PREC):
        assert agm(1, 1, PREC) == 1
        assert abs(elliptic_K(0, PREC) - mp.pi / 2) < mp.mpf(2) ** (-PREC + 8)
        # self-dual modulus: q = e^{-pi}
        q = nome_from_modulus(1 / mp.sqrt(2), PREC)
        assert abs(q - mp.exp(-mp.pi)) < mp.mpf(10) ** -60


def test_nome_monotone_in_modulus():
    with mp.workprec(128):
        ks = [mp.mpf(x) / 20 for x in range(1, 20)]
        qs = [nome_from_modulus(k, 128) for k in ks]
        assert all(a < b for a, b in zip(qs, qs[1:]))


def test_step_sets_and_kernel():
    kw = StepSet.kreweras()
    am = StepSet.amodel(F(5, 7))
    with mp.workprec(64):
        assert abs(step_poly_eval(kw, mp.mpf(1), mp.mpf(1)) - 3) < 1e-15
        assert abs(step_poly_eval(am, mp.mpf(1), mp.mpf(1)) - (4 + 5 / mp.mpf(7))) < 1e-15
        K = Kernel(kw, mp.mpf(0))
        x, y = mp.mpf("0.7"), mp.mpf("1.3")
        assert abs(kernel_eval(K, x, y) - x * y) < 1e-15
    with pytest.raises(ValueError):
        StepSet(((2, 0, 1),))
    with pytest.raises(ValueError):
        StepSet(((1, 0, 1), (1, 0, 2)))
    with pytest.raises(ZeroDivisionError):
        step_poly_eval(kw, mp.mpf(0), mp.mpf(1))
