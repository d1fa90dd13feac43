"""Discrete Laplacian powers, polyharmonicity tests, and the log-shift calculus.

The Laplacian for a weighted step set is

    (L v)(A) = sum_s w_s v(A + s) - lam * v(A),

acting on functions on the quadrant (v = 0 outside).  The natural scale for
walk asymptotics is lam = 1/t_c: with counts scaled by t_c^n, one extra step
multiplies by 1/t_c, and the simple-walk example sum_s v(A+s) = 4 v(A)
balances only with that reading.  The literal lam = t_c is available too.

The log-shift table gives the exact rational coefficients of

    (log(n+1))^m/(n+1)^l  =  (log n)^m/n^l
        + sum_{i=1}^{p-l} sum_{j=max(m-i,0)}^{m} c_{l,m,i,j} (log n)^j / n^{l+i}
        + O((log n)^m / n^{p+1}),

the bookkeeping behind "coefficients of slower terms are polyharmonic of
lower order": substituting n -> n+1 only moves weight down (larger l+i) and
left (log powers j <= m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .theta import StepSet

F = Fraction


@dataclass
class LatticeFunction:
    """Values on the window [0,I] x [0,J]; identically zero off the quadrant."""

    I: int
    J: int
    values: list  # values[i][j]

    @staticmethod
    def from_callable(I: int, J: int, fn) -> "LatticeFunction":
        return LatticeFunction(I, J, [[fn(i, j) for j in range(J + 1)]
                                      for i in range(I + 1)])

    @staticmethod
    def from_array(arr) -> "LatticeFunction":
        arr = np.asarray(arr)
        return LatticeFunction(arr.shape[0] - 1, arr.shape[1] - 1,
                               [list(row) for row in arr])

    def value(self, i: int, j: int):
        """v(i,j) with the quadrant zero convention; window overrun is an error."""
        if i < 0 or j < 0:
            return 0
        if i > self.I or j > self.J:
            raise IndexError(f"({i},{j}) is outside the stored window")
        return self.values[i][j]

    def max_abs(self) -> float:
        return max((abs(float(v)) for row in self.values for v in row), default=0.0)


def laplacian(v: LatticeFunction, stepset: StepSet, lam,
              interior_only: bool = False) -> LatticeFunction:
    """One application of the Laplacian; the window shrinks by one.

    With `interior_only` the boundary rows/columns are skipped (their value
    is set to exact zero), for callers who want the strict-interior reading.
    """
    if v.I < 1 or v.J < 1:
        raise ValueError("window exhausted: cannot apply the Laplacian")
    I2, J2 = v.I - 1, v.J - 1
    out = []
    for i in range(I2 + 1):
        row = []
        for j in range(J2 + 1):
            if interior_only and (i == 0 or j == 0):
                row.append(0 * v.values[0][0])
                continue
            acc = -lam * v.value(i, j)
            for dx, dy, w in stepset.steps:
                acc = acc + w * v.value(i + dx, j + dy)
            row.append(acc)
        out.append(row)
    return LatticeFunction(I2, J2, out)


def is_polyharmonic(v: LatticeFunction, stepset: StepSet, lam, order: int,
                    tol=0, interior_only: bool = False):
    """Whether Laplacian^order annihilates v on the remaining window.

    Returns (ok, max_residual).  tol = 0 demands exact zeros (exact values);
    floats should pass a tolerance matched to their scale.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if v.I < order or v.J < order:
        raise ValueError("window too small for the requested order")
    cur = v
    for _ in range(order):
        cur = laplacian(cur, stepset, lam, interior_only)
    resid = cur.max_abs()
    return (resid <= tol, resid)


# ------------------------------------------------------------ log shifts

@dataclass
class LogShiftTable:
    """Exact coefficients c_{l,m,i,j} of the (n+1) -> n rewriting."""

    l: int
    m: int
    p: int
    coeffs: dict = field(default_factory=dict)  # (i, j) -> Fraction

    def evaluate_rhs(self, n, prec: int = 96):
        """(log n)^m/n^l plus the tabulated corrections, numerically."""
        import mpmath as mp
        with mp.workprec(prec):
            n = mp.mpf(n)
            ln = mp.log(n)
            tot = ln ** self.m / n ** self.l
            for (i, j), c in self.coeffs.items():
                tot += mp.mpf(c.numerator) / c.denominator * ln ** j / n ** (self.l + i)
            return tot

    def residual(self, n, prec: int = 96):
        import mpmath as mp
        with mp.workprec(prec):
            n = mp.mpf(n)
            lhs = mp.log(n + 1) ** self.m / (n + 1) ** self.l
            return abs(lhs - self.evaluate_rhs(n, prec))


def log_shift_expansion(l: int, m: int, p: int) -> LogShiftTable:
    """Expand (log(n+1))^m/(n+1)^l to O((log n)^m / n^{p+1}), exactly.

    log(n+1) = log n + log(1+1/n) and (1+1/n)^{-l} are expanded in x = 1/n;
    every emitted term has log power j <= m and exponent l + i with i >= 1.
    """
    if p <= l:
        raise ValueError("need p > l")
    imax = p - l
    # log(1+x) powers: L^r = sum_t e[r][t] x^t (t >= r)
    logx = [F(0)] + [F((-1) ** (t + 1), t) for t in range(1, imax + 1)]
    powers = [[F(1)] + [F(0)] * imax]  # L^0 = 1
    for r in range(1, m + 1):
        prev = powers[-1]
        cur = [F(0)] * (imax + 1)
        for t1, c1 in enumerate(prev):
            if c1 == 0:
                continue
            for t2, c2 in enumerate(logx):
                if c2 != 0 and t1 + t2 <= imax:
                    cur[t1 + t2] += c1 * c2
        powers.append(cur)
    # (1+x)^{-l} coefficients
    binom_l = [F(1)]
    for i in range(1, imax + 1):
        binom_l.append(binom_l[-1] * F(-l - i + 1, i))
    coeffs: dict = {}
    for j in range(0, m + 1):  # power of log n
        mj = m - j
        cb = F(math.comb(m, j))
        for t in range(mj, imax + 1):  # from L^{m-j}
            e = powers[mj][t] if mj <= m else F(0)
            if e == 0:
                continue
            for i2 in range(0, imax - t + 1):
                c = cb * e * binom_l[i2]
                if c == 0:
                    continue
                i = t + i2
                if i == 0:
                    continue  # the leading (log n)^m / n^l term itself
                key = (i, j)
                coeffs[key] = coeffs.get(key, F(0)) + c
    coeffs = {k: v for k, v in coeffs.items() if v != 0}
    for (i, j) in coeffs:
        if not (1 <= i <= imax and max(m - i, 0) <= j <= m):
            raise AssertionError(f"log-shift index {(i, j)} out of the stated range")
    return LogShiftTable(l=l, m=m, p=p, coeffs=coeffs)


# --------------------------------------------- expansion-coefficient fits

@dataclass
class ExpansionFit:
    endpoints: list
    triples: list                    # (k, l, m) per design column
    coefficients: np.ndarray         # shape (n_endpoints, n_columns)
    condition: float

    def leading(self, endpoint) -> float:
        i = self.endpoints.index(tuple(endpoint))
        return float(self.coefficients[i, 0])


class IllConditionedFit(ArithmeticError):
    def __init__(self, condition, limit):
        super().__init__(f"design matrix condition {condition:.3e} exceeds {limit:.1e}")
        self.condition = condition


def extract_expansion_coeffs(table, rho: float, triples, n_lo: int, n_hi: int,
                             endpoints=None, cond_limit: float = 1e12) -> ExpansionFit:
    """Least-squares estimates of v_{k,l,m}(i,j) from scaled counts.

    The model is q(i,j;n) t_c^n ~ sum v_{k,l,m}(i,j) (log n)^m / n^{k rho + l + 1}
    over the given (k,l,m) triples; the scaled DP table must track the
    endpoints.  The design-matrix condition number is always reported and
    enforced before any estimate is returned.
    """
    triples = sorted(triples, key=lambda t: (t[0] * rho + t[1], t[2]))
    ns = np.arange(n_lo, n_hi + 1, dtype=float)
    cols = []
    for (k, l, m) in triples:
        cols.append(np.log(ns) ** m / ns ** (k * rho + l + 1))
    M = np.vstack(cols).T
    # scale columns for a meaningful condition number
    norms = np.linalg.norm(M, axis=0)
    cond = float(np.linalg.cond(M / norms))
    if cond > cond_limit:
        raise IllConditionedFit(cond, cond_limit)
    if endpoints is None:
        endpoints = sorted(table.tracked.keys())
    rows = []
    for e in endpoints:
        g = np.asarray(table.tracked_series(*e), dtype=float)[n_lo:n_hi + 1]
        sol, *_ = np.linalg.lstsq(M / norms, g, rcond=None)
        rows.append(sol / norms)
    return ExpansionFit(endpoints=[tuple(e) for e in endpoints], triples=triples,
                        coefficients=np.array(rows), condition=cond)


def harmonic_candidate_window(fit: ExpansionFit, shape) -> LatticeFunction:
    """Arrange the leading fitted coefficients on a window for harmonicity tests."""
    I, J = shape
    vals = [[0.0] * (J + 1) for _ in range(I + 1)]
    for (i, j), row in zip(fit.endpoints, fit.coefficients):
        if i <= I and j <= J:
            vals[i][j] = float(row[0])
    return LatticeFunction(I, J, vals)
