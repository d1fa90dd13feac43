"""Core Puiseux series arithmetic."""

from fractions import Fraction

import pytest
from gmpy2 import mpq

from thetawalks.rings import CYC, QQ, ComplexRing
from thetawalks.series import (
    PuiseuxSeries,
    RingMismatchError,
    TruncationError,
    lagrange_reversion,
    ps_compose,
    ps_exp,
    ps_from_terms,
    ps_log,
    ps_monomial,
    ps_one,
    ps_pow,
    ps_promote,
    ps_reversion,
    ps_x,
    ps_zero,
)

F = Fraction


def geom(ring, order):
    """1/(1-x) = 1 + x + x^2 + ..."""
    one = ps_one(ring, order=F(order))
    x = ps_x(ring, order=F(order))
    return (one - x).inverse()


def test_add_cancellation_keeps_order():
    a = ps_from_terms(QQ, [(1, mpq(1)), (2, mpq(1))], order=F(10))
    b = ps_from_terms(QQ, [(1, mpq(-1))], order=F(10))
    s = a + b
    assert s.terms() == [(F(2), mpq(1))]
    assert s.order == F(10)


def test_add_grid_merge():
    a = ps_from_terms(QQ, [(F(1, 2), mpq(1))], order=F(5))
    b = ps_from_terms(QQ, [(F(1, 3), mpq(2))], order=F(5))
    s = a + b
    assert s.D == 6
    assert s.coeff(F(1, 3)) == 2 and s.coeff(F(1, 2)) == 1


def test_add_identity():
    a = ps_from_terms(QQ, [(0, mpq(3)), (2, mpq(-1))], order=F(7))
    assert (a + ps_zero(QQ)).terms() == a.terms()


def test_mul_geometric_inverse():
    x = ps_x(QQ, order=F(12))
    inv = (ps_one(QQ, order=F(12)) - x).inverse()
    prod = (ps_one(QQ, F(12)) + x) * inv  # (1+x)/(1-x) sanity: not 1
    assert prod.coeff(1) == 2
    one = (ps_one(QQ, F(12)) - x) * inv
    assert one.terms() == [(F(0), mpq(1))]


def test_mul_exponent_addition():
    a = ps_monomial(QQ, mpq(1), F(1, 2))
    b = ps_monomial(QQ, mpq(1), F(3, 2))
    assert (a * b).terms() == [(F(2), mpq(1))]


def test_mul_order_rule():
    a = ps_from_terms(QQ, [(1, mpq(1))], order=F(4))
    b = ps_from_terms(QQ, [(2, mpq(1))], order=F(5))
    # O = min(Oa + vb, Ob + va) = min(4+2, 5+1) = 6
    assert (a * b).order == F(6)


def test_inv_monomial_negative_valuation():
    a = ps_monomial(QQ, mpq(2), 1, order=F(9))
    inv = a.inverse()
    assert inv.coeff(-1) == F(1, 2)
    assert inv.valuation == F(-1)


def test_inv_round_trip():
    a = ps_from_terms(QQ, [(0, mpq(3)), (1, mpq(1)), (3, mpq(-2))], order=F(9))
    prod = a * a.inverse()
    assert prod.coeff(0) == 1
    assert all(c == 0 for e, c in prod.terms() if e != 0)


def test_compose_geometric():
    outer = geom(QQ, 6)
    inner = ps_monomial(QQ, mpq(1), 2, order=F(12))
    comp = ps_compose(outer, inner)
    assert comp.coeff(0) == 1 and comp.coeff(2) == 1 and comp.coeff(4) == 1
    assert comp.coeff(3) == 0


def test_compose_exp_log_round_trip():
    order = F(10)
    x = ps_x(QQ, order=order)
    lg = ps_log(ps_one(QQ, order) + x)  # log(1+x)
    assert lg.coeff(3) == F(1, 3)
    ex = ps_exp(lg)
    assert ex.coeff(0) == 1 and ex.coeff(1) == 1
    assert all(c == 0 for e, c in ex.terms() if e not in (F(0), F(1)))


def test_compose_rejects_bad_inner():
    outer = geom(QQ, 6)
    inner = ps_one(QQ, order=F(5))
    with pytest.raises(ValueError):
        ps_compose(outer, inner)


def test_pow_square_root_of_square():
    a = ps_monomial(QQ, mpq(1), 2, order=F(11))
    assert ps_pow(a, F(1, 2)).terms() == [(F(1), mpq(1))]


def test_pow_binomial():
    a = ps_one(QQ, F(8)) + ps_x(QQ, F(8))
    r = ps_pow(a, F(1, 2))
    assert r.coeff(1) == F(1, 2)
    assert r.coeff(2) == F(-1, 8)


def test_pow_inverse_pair():
    a = ps_from_terms(QQ, [(0, mpq(4)), (1, mpq(1)), (2, mpq(3))], order=F(8))
    prod = ps_pow(a, F(1, 2)) * ps_pow(a, F(-1, 2))
    assert prod.coeff(0) == 1
    assert all(c == 0 for e, c in prod.terms() if e != 0)


def test_pow_exact_root_failure_raises():
    a = ps_from_terms(QQ, [(0, mpq(5)), (1, mpq(1))], order=F(6))
    with pytest.raises(ValueError):
        ps_pow(a, F(1, 2))
    # but the cyclotomic ring can take sqrt(3)
    b = ps_from_terms(CYC, [(0, CYC.from_int(3)), (1, CYC.one)], order=F(6))
    r = ps_pow(b, F(1, 2))
    assert (r * r - b).is_zero()


def test_diff_and_coeff():
    a = ps_from_terms(QQ, [(F(1, 2), mpq(4)), (3, mpq(5))], order=F(9))
    d = a.diff()
    assert d.coeff(F(-1, 2)) == 2
    assert d.coeff(2) == 15


def test_coeff_beyond_truncation_raises():
    a = ps_from_terms(QQ, [(1, mpq(1))], order=F(4))
    assert a.coeff(3) == 0
    with pytest.raises(TruncationError):
        a.coeff(4)
    with pytest.raises(TruncationError):
        a.coeff(F(9, 2))


def test_ring_mismatch_raises():
    a = ps_one(QQ, F(3))
    b = ps_one(CYC, F(3))
    with pytest.raises(RingMismatchError):
        _ = a + b


def test_reversion_catalan():
    x = ps_x(QQ, order=F(8))
    a = x - x * x  # x - x^2
    g = ps_reversion(a)
    # Catalan numbers 1, 1, 2, 5, 14
    for n, cat in [(1, 1), (2, 1), (3, 2), (4, 5), (5, 14)]:
        assert g.coeff(n) == cat


def test_reversion_identity():
    x = ps_x(QQ, order=F(6))
    assert ps_reversion(x).coeff(1) == 1


def test_reversion_matches_lagrange_oracle():
    a = ps_from_terms(QQ, [(1, mpq(1)), (2, mpq(3)), (3, mpq(-2)), (4, mpq(7))],
                      order=F(9))
    g_newton = ps_reversion(a)
    g_lagr = lagrange_reversion(a, 8)
    for n in range(1, 9):
        assert g_newton.coeff(n) == g_lagr.coeff(n)


def test_reversion_round_trip_random():
    import random

    rng = random.Random(20240817)
    x = ps_x(QQ, order=F(7))
    for _ in range(100):
        coeffs = [(1, mpq(rng.choice([1, -1, 2])))]
        coeffs += [(k, mpq(rng.randint(-4, 4))) for k in range(2, 7)]
        a = ps_from_terms(QQ, coeffs, order=F(7))
        g = ps_reversion(a)
        back = ps_compose(a, g)
        assert back.coeff(1) == 1
        assert all(c == 0 for e, c in back.terms() if e != 1)


def test_reversion_fractional_grid():
    # a = t^{9/2}(1 + t^3) reverted on the declared grid
    t92 = ps_monomial(QQ, mpq(1), F(9, 2), order=F(33, 2))
    a = t92 + ps_monomial(QQ, mpq(1), F(15, 2), order=F(33, 2))
    g = ps_reversion(a, rescale=F(9, 2))
    back = ps_compose(a, g)
    assert back.coeff(1) == 1
    assert all(c == 0 for e, c in back.terms() if e != 1)


def test_ring_axioms_random():
    import random

    rng = random.Random(1234)

    def rand_series():
        n = rng.randint(1, 5)
        terms = [(F(rng.randint(0, 8), rng.choice([1, 2, 3])), mpq(rng.randint(-5, 5)))
                 for _ in range(n)]
        return ps_from_terms(QQ, terms, order=F(6))

    for _ in range(60):
        a, b, c = rand_series(), rand_series(), rand_series()
        lhs = (a + b) * c
        rhs = a * c + b * c
        diff = lhs - rhs
        assert diff.is_zero() or all(x == 0 for _, x in diff.terms())
        assert ((a * b) - (b * a)).is_zero()
        abc1 = (a * b) * c
        abc2 = a * (b * c)
        d2 = abc1 - abc2
        assert d2.is_zero()


def test_exact_vs_float_backends_agree():
    """Identical pipeline over Q and over 256-bit complex floats."""
    ring = ComplexRing(256)
    order = F(12)

    def pipeline(R, one, x):
        s = (one + x).pow(F(1, 2))
        s = s.inverse()
        lg = (one + x).log()
        return s * lg.exp()

    exact = pipeline(QQ, ps_one(QQ, order), ps_x(QQ, order))
    flt = pipeline(ring, ps_one(ring, order), ps_x(ring, order))
    tol = 10 ** -(256 // 4)
    for e, c in exact.terms():
        fv = flt.coeff(e)
        cv = QQ.to_mpc(c, 300)
        assert abs(fv - cv) <= tol * (1 + abs(cv))


def test_json_round_trip():
    a = ps_from_terms(QQ, [(F(1, 2), mpq(3, 7)), (2, mpq(-1))], order=F(5))
    js = a.to_json()
    assert js["grid"] == a.D and js["order"] == "5"
    coeffs = [QQ.from_json(s) for s in js["coeffs"]]
    b = PuiseuxSeries(QQ, js["grid"], js["valuation"], coeffs, F(js["order"]))
    assert b.terms() == a.terms()


def test_promote():
    import mpmath as mp

    ring = ComplexRing(128)
    a = ps_from_terms(QQ, [(1, mpq(2, 3))], order=F(4))
    b = ps_promote(a, ring, 128)
    with mp.workprec(160):
        assert abs(b.coeff(1) - QQ.to_mpc(mpq(2, 3), 160)) < mp.mpf(2) ** -120
