"""Walk-counting oracles: DP backends, DFS cross-check, fits."""

import math
from fractions import Fraction

import numpy as np
import pytest

from thetawalks.oracle import (
    MemoryBudgetError,
    dfs_enumerate,
    dp_count,
    fit_asymptotics,
    functional_equation_check,
    richardson,
    series_check,
)
from thetawalks.theta import StepSet

F = Fraction


def test_kreweras_excursion_counts():
    t = dp_count(StepSet.kreweras(), 9, backend="exact")
    assert t.value(0, 0, 3) == 2
    assert t.value(0, 0, 6) == 16
    assert t.value(0, 0, 9) == 192


def test_single_step_counts():
    for ss in (StepSet.kreweras(), StepSet.amodel(F(3, 2))):
        t = dp_count(ss, 1, backend="exact")
        for dx, dy, w in ss.steps:
            if dx >= 0 and dy >= 0:
                assert t.value(dx, dy, 1) == w
        assert t.value(0, 0, 1) == 0


def test_dfs_matches_dp():
    for ss, n in [(StepSet.kreweras(), 10), (StepSet.amodel(1), 8),
                  (StepSet.amodel(2), 7)]:
        t = dp_count(ss, n, backend="exact")
        byend = dfs_enumerate(ss, n)
        for (i, j), w in byend.items():
            assert t.value(i, j, n) == w
        # all nonzero dp entries are present in the dfs result
        plane = t.planes[n]
        for i in range(n + 1):
            for j in range(n + 1):
                if plane[i][j]:
                    assert byend.get((i, j)) == t.value(i, j, n)


def test_dfs_guard_and_total_mass():
    with pytest.raises(ValueError):
        dfs_enumerate(StepSet.kreweras(), 13)
    assert dfs_enumerate(StepSet.kreweras(), 0) == {(0, 0): 1}
    ss = StepSet.amodel(F(1, 2))
    n = 5
    tot = sum(dfs_enumerate(ss, n).values())
    assert tot <= ss.weight_sum() ** n


def test_survival_mass_inequality():
    ss = StepSet.amodel(1)
    t = dp_count(ss, 12, backend="exact")
    S11 = ss.weight_sum()
    prev = None
    for n in range(13):
        plane = t.planes[n]
        tot = sum(F(plane[i][j]) for i in range(13) for j in range(13)) / t.denominator ** n
        if prev is not None:
            assert tot <= S11 * prev
        prev = tot


def test_symmetry_of_tables():
    for ss in (StepSet.kreweras(), StepSet.amodel(F(5, 3))):
        t = dp_count(ss, 10, backend="exact")
        for n in (5, 10):
            for i in range(n + 1):
                for j in range(n + 1):
                    assert t.value(i, j, n) == t.value(j, i, n)


def test_exact_vs_scaled_vs_modular():
    ss = StepSet.amodel(F(1, 2))
    n = 120
    ex = dp_count(ss, n, backend="exact", box=30,
                  track=[(0, 0), (1, 0), (2, 2)])
    sc = dp_count(ss, n, backend="scaled", box=30, scale=0.2,
                  track=[(0, 0), (1, 0), (2, 2)])
    mod = 999999893  # prime < 2^30
    md = dp_count(ss, n, backend="modular", box=30, track=[(0, 0)], modulus=mod)
    for e in [(0, 0), (1, 0), (2, 2)]:
        for k in (60, 120):
            exact = ex.value(*e, k)
            scaled = sc.scaled_value(*e, k)
            want = float(exact) * 0.2 ** k
            assert scaled == pytest.approx(want, rel=1e-10)
    for k in (60, 120):
        q = ex.value(0, 0, k)
        assert md.tracked_series(0, 0)[k] % mod == (
            q.numerator * pow(q.denominator, -1, mod)) % mod


def test_memory_budget():
    with pytest.raises(MemoryBudgetError) as ei:
        dp_count(StepSet.kreweras(), 2000, backend="scaled", memory_budget=10 ** 6)
    assert ei.value.required > 10 ** 6


def test_functional_equation():
    assert functional_equation_check(StepSet.kreweras(), 15)
    assert functional_equation_check(StepSet.amodel(F(2, 3)), 12)


def test_series_check_exact():
    from gmpy2 import mpq

    from thetawalks.rings import QQ
    from thetawalks.series import ps_from_terms

    t = dp_count(StepSet.kreweras(), 9, backend="exact")
    good = ps_from_terms(QQ, [(0, mpq(1)), (3, mpq(2)), (6, mpq(16)), (9, mpq(192))],
                         order=F(10))
    assert series_check(t, good, 9)
    bad = ps_from_terms(QQ, [(0, mpq(1)), (3, mpq(3))], order=F(10))
    rep = series_check(t, bad, 5)
    assert not rep.ok and rep.first_mismatch[0] == 3


def test_richardson_power_sequence():
    ns = np.arange(1, 4000, dtype=float)
    seq = 2.5 + 3.0 / ns + 1.7 / ns ** 2
    assert abs(richardson(seq) - 2.5) < 1e-6


@pytest.mark.slow
def test_fit_kreweras_growth_and_exponent():
    n = 3000
    t = dp_count(StepSet.kreweras(), n, backend="scaled", box=n // 2 + 2,
                 scale=1.0 / 3.0, track=[(0, 0)], shrink_to_tracked=True)
    fit = fit_asymptotics(t, 0, 0, n_lo=1200, n_hi=n, period=3)
    assert abs(fit.mu - 3.0) < 1e-4
    assert abs(fit.alpha - 2.5) < 0.05
