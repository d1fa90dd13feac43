"""Exact and scaled dynamic-programming enumeration of weighted quadrant walks.

The DP is the ground truth every theta-series pipeline is checked against:
q(i,j;0) = [i=j=0], q(i,j;n+1) = sum_s w_s q((i,j)-s; n), zero outside the
quadrant.  Backends:

* ``exact``   -- arbitrary-precision integers times a common denominator
                 (rational weights), full table or tracked endpoints;
* ``scaled``  -- float64, values stored as q(i,j;n) * scale^n (scale is
                 normally t_c, keeping magnitudes tame for large n);
* ``modular`` -- int64 residues mod a prime below 2^30.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .series import PuiseuxSeries
from .theta import StepSet


class MemoryBudgetError(MemoryError):
    def __init__(self, required: int, budget: int):
        super().__init__(f"DP table needs {required} bytes, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass
class CountTable:
    stepset: StepSet
    n_max: int
    backend: str
    box: int
    scale: float | None = None            # per-step factor (scaled backend)
    denominator: int = 1                  # exact backend: values are q * den^n
    modulus: int | None = None
    planes: list | None = None            # exact/modular full table
    tracked: dict | None = None           # (i, j) -> array over n
    final_plane: np.ndarray | None = None

    def value(self, i: int, j: int, n: int) -> Fraction:
        """Exact q(i,j;n); only for the exact backend."""
        if self.backend != "exact":
            raise ValueError("exact values only available from the exact backend")
        if self.planes is not None:
            plane = self.planes[n]
            raw = plane[i][j] if i < len(plane) and j < len(plane) else 0
        else:
            raw = self.tracked[(i, j)][n]
        return Fraction(int(raw), self.denominator ** n)

    def scaled_value(self, i: int, j: int, n: int) -> float:
        """q(i,j;n) * scale^n from the scaled backend."""
        if self.backend != "scaled":
            raise ValueError("scaled values only available from the scaled backend")
        if self.tracked is not None and (i, j) in self.tracked:
            return float(self.tracked[(i, j)][n])
        raise KeyError(f"endpoint {(i, j)} was not tracked")

    def tracked_series(self, i: int, j: int) -> np.ndarray:
        if self.tracked is None or (i, j) not in self.tracked:
            raise KeyError(f"endpoint {(i, j)} was not tracked")
        return self.tracked[(i, j)]


def _common_denominator(stepset: StepSet) -> int:
    den = 1
    for _, _, w in stepset.steps:
        den = math.lcm(den, w.denominator)
    return den


def dp_count(stepset: StepSet, n_max: int, backend: str = "exact", box: int | None = None,
             scale=None, track=None, modulus: int = (1 << 30) - 35,
             memory_budget: int = 2 << 30, shrink_to_tracked: bool = False) -> CountTable:
    """Run the quadrant DP up to length n_max.

    ``track`` is an optional list of endpoints (i, j); when given, per-length
    values are recorded only there (plus the final plane), which is what the
    large-n fitting harness needs.  Without it the full (n, i, j) table is
    stored, subject to the memory budget.

    ``shrink_to_tracked`` also shrinks the active window as n approaches
    n_max: lattice points too far out to return to any tracked endpoint in
    the remaining steps cannot contribute, so the wavefront is clipped.  Only
    the tracked series stay exact in that mode (the final plane is partial).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if box is None:
        box = n_max
    box = int(box)
    window = None
    if shrink_to_tracked:
        if not track:
            raise ValueError("shrink_to_tracked needs tracked endpoints")
        d0 = max(max(i, j) for i, j in track) + 1
        window = lambda n: min(n, n_max - n + d0, box)
    if backend == "exact":
        return _dp_exact(stepset, n_max, box, track, memory_budget, window)
    if backend == "scaled":
        return _dp_scaled(stepset, n_max, box, scale, track, memory_budget, window)
    if backend == "modular":
        return _dp_modular(stepset, n_max, box, track, modulus, memory_budget)
    raise ValueError(f"unknown backend {backend!r}")


def _dp_exact(stepset, n_max, box, track, memory_budget, window=None):
    den = _common_denominator(stepset)
    weights = [(dx, dy, int(w * den)) for dx, dy, w in stepset.steps]
    size = box + 1
    if track is None:
        required = (n_max + 1) * size * size * 16
        if required > memory_budget:
            raise MemoryBudgetError(required, memory_budget)
    cur = [[0] * size for _ in range(size)]
    cur[0][0] = 1
    planes = [cur] if track is None else None
    tracked = {tuple(e): [0] * (n_max + 1) for e in track} if track is not None else None
    if tracked is not None:
        for (i, j) in tracked:
            tracked[(i, j)][0] = cur[i][j] if i < size and j < size else 0
    for n in range(1, n_max + 1):
        m = min(n, box) if window is None else window(n)
        nxt = [[0] * size for _ in range(size)]
        for i in range(m + 1):
            row = nxt[i]
            for dx, dy, w in weights:
                pi = i - dx
                if 0 <= pi < size:
                    prev = cur[pi]
                    if dy == 0:
                        for j in range(m + 1):
                            pv = prev[j]
                            if pv:
                                row[j] += w * pv
                    else:
                        for j in range(m + 1):
                            pj = j - dy
                            if 0 <= pj < size:
                                pv = prev[pj]
                                if pv:
                                    row[j] += w * pv
        cur = nxt
        if planes is not None:
            planes.append(cur)
        else:
            for (i, j) in tracked:
                tracked[(i, j)][n] = cur[i][j] if i < size and j < size else 0
    return CountTable(stepset, n_max, "exact", box, denominator=den, planes=planes,
                      tracked=tracked)


def _shift_add(B, A, dx, dy, w, m):
    """B[i,j] += w * A[i-dx, j-dy] over the active (m+1)x(m+1) window."""
    size = m + 1
    rt = slice(max(dx, 0), size)
    rs = slice(0, size - max(dx, 0)) if dx >= 0 else slice(-dx, size)
    if dx < 0:
        rt = slice(0, size + dx)
    ct = slice(max(dy, 0), size)
    cs = slice(0, size - max(dy, 0)) if dy >= 0 else slice(-dy, size)
    if dy < 0:
        ct = slice(0, size + dy)
    B[rt, ct] += w * A[rs, cs]


def _dp_scaled(stepset, n_max, box, scale, track, memory_budget, window=None):
    if scale is None:
        scale = 1.0
    scale = float(scale)
    size = box + 1
    required = 2 * size * size * 8
    if track is None:
        required += (n_max + 1) * size * size * 8
    if required > memory_budget:
        raise MemoryBudgetError(required, memory_budget)
    weights = [(dx, dy, float(w)) for dx, dy, w in stepset.steps]
    A = np.zeros((size, size))
    A[0, 0] = 1.0
    B = np.zeros_like(A)
    planes = [A.copy()] if track is None else None
    tracked = {tuple(e): np.zeros(n_max + 1) for e in track} if track is not None else None
    if tracked is not None:
        for (i, j) in tracked:
            tracked[(i, j)][0] = A[i, j]
    for n in range(1, n_max + 1):
        m = min(n, box) if window is None else window(n)
        Bv = B[: m + 1, : m + 1]
        Bv[:] = 0.0
        Av = A[: m + 1, : m + 1]
        for dx, dy, w in weights:
            _shift_add(Bv, Av, dx, dy, w, m)
        Bv *= scale
        A, B = B, A
        if planes is not None:
            planes.append(A.copy())
        else:
            for (i, j) in tracked:
                tracked[(i, j)][n] = A[i, j]
    return CountTable(stepset, n_max, "scaled", box, scale=scale,
                      planes=planes, tracked=tracked, final_plane=A)


def _dp_modular(stepset, n_max, box, track, modulus, memory_budget):
    if modulus >= 1 << 30:
        raise ValueError("modulus must stay below 2^30 for int64 accumulation")
    den = _common_denominator(stepset)
    den_inv = pow(den, -1, modulus)
    weights = [(dx, dy, int(w * den) * den_inv % modulus) for dx, dy, w in stepset.steps]
    size = box + 1
    required = 2 * size * size * 8
    if required > memory_budget:
        raise MemoryBudgetError(required, memory_budget)
    A = np.zeros((size, size), dtype=np.int64)
    A[0, 0] = 1
    B = np.zeros_like(A)
    tracked = {tuple(e): np.zeros(n_max + 1, dtype=np.int64)
               for e in (track or [(0, 0)])}
    for (i, j) in tracked:
        tracked[(i, j)][0] = A[i, j]
    for n in range(1, n_max + 1):
        m = min(n, box)
        Bv = B[: m + 1, : m + 1]
        Bv[:] = 0
        Av = A[: m + 1, : m + 1]
        for dx, dy, w in weights:
            _shift_add(Bv, Av, dx, dy, w, m)
        Bv %= modulus
        A, B = B, A
        for (i, j) in tracked:
            tracked[(i, j)][n] = A[i, j]
    return CountTable(stepset, n_max, "modular", box, modulus=modulus, tracked=tracked)


def dfs_enumerate(stepset: StepSet, n: int) -> dict:
    """Exhaustive path enumeration (independent oracle for the DP); n <= 12."""
    if n > 12:
        raise ValueError("dfs_enumerate is an oracle for small n only (n <= 12)")
    counts: dict = {}
    steps = stepset.steps

    def walk(i, j, remaining, weight):
        if remaining == 0:
            counts[(i, j)] = counts.get((i, j), Fraction(0)) + weight
            return
        for dx, dy, w in steps:
            ni, nj = i + dx, j + dy
            if ni >= 0 and nj >= 0:
                walk(ni, nj, remaining - 1, weight * w)

    walk(0, 0, n, Fraction(1))
    return counts


# ------------------------------------------------------------- comparisons

@dataclass
class CheckReport:
    ok: bool
    checked: int
    first_mismatch: tuple | None = None
    max_rel_err: float = 0.0

    def __bool__(self):
        return self.ok


def series_check(table: CountTable, series: PuiseuxSeries, order: int,
                 endpoint=(0, 0), rel_tol: float | None = None) -> CheckReport:
    """Compare [t^n] series against q(endpoint; n) for n <= order."""
    import mpmath as mp

    i, j = endpoint
    exact = table.backend == "exact" and series.ring.exact
    max_rel = 0.0
    for n in range(0, order + 1):
        want = table.value(i, j, n)
        got = series.coeff(n)
        if exact:
            got_q = got if not hasattr(got, "rational_part") else got.rational_part()
            if got_q is None or Fraction(int(got_q.numerator), int(got_q.denominator)) != want:
                return CheckReport(False, n, first_mismatch=(n, want, got))
        else:
            gv = series.ring.to_mpc(got, 320)
            wv = mp.mpf(want.numerator) / want.denominator
            err = abs(gv - wv) / (1 + abs(wv))
            max_rel = max(max_rel, float(err))
            tol = rel_tol if rel_tol is not None else 1e-25
            if err > tol:
                return CheckReport(False, n, first_mismatch=(n, want, got),
                                   max_rel_err=max_rel)
    return CheckReport(True, order + 1, max_rel_err=max_rel)


def functional_equation_check(stepset: StepSet, order: int) -> bool:
    """K Q = K(x,0)Q(x,0) + K(0,y)Q(0,y) - K(0,0)Q(0,0) + xy coefficientwise.

    Checked on exact trivariate truncations built from the DP table; an
    independent structural test of the enumeration itself.
    """
    table = dp_count(stepset, order, backend="exact", box=order)

    # Q[n] = {(i,j): coeff}
    Q = []
    for n in range(order + 1):
        plane = table.planes[n]
        den = Fraction(table.denominator) ** n
        Q.append({(i, j): Fraction(plane[i][j]) / den
                  for i in range(min(n, table.box) + 1)
                  for j in range(min(n, table.box) + 1) if plane[i][j]})

    # K(x,y) = xy - t sum_s w_s x^{1+dx} y^{1+dy}.  The boundary terms use K
    # with x and/or y set to 0, which keeps only the steps whose monomial
    # survives the substitution (e.g. K(x,0) = -t sum_{dy=-1} w x^{1+dx}).
    def k_times(Qseq, sector):
        out = [dict() for _ in range(order + 1)]
        if sector == "full":
            steps = stepset.steps
            xy_part = True
        elif sector == "x":
            steps = [(dx, dy, w) for dx, dy, w in stepset.steps if dy == -1]
            xy_part = False
        elif sector == "y":
            steps = [(dx, dy, w) for dx, dy, w in stepset.steps if dx == -1]
            xy_part = False
        else:  # "00"
            steps = [(dx, dy, w) for dx, dy, w in stepset.steps if dx == dy == -1]
            xy_part = False
        for n in range(order + 1):
            src = Qseq[n]
            if sector == "x":
                src = {k: v for k, v in src.items() if k[1] == 0}
            elif sector == "y":
                src = {k: v for k, v in src.items() if k[0] == 0}
            elif sector == "00":
                src = {k: v for k, v in src.items() if k == (0, 0)}
            if xy_part:
                for (i, j), c in src.items():
                    key = (i + 1, j + 1)
                    out[n][key] = out[n].get(key, Fraction(0)) + c
            if n + 1 <= order:
                for (i, j), c in src.items():
                    for dx, dy, w in steps:
                        key = (i + 1 + dx, j + 1 + dy)
                        out[n + 1][key] = out[n + 1].get(key, Fraction(0)) - w * c
        return out

    lhs = k_times(Q, "full")
    rx = k_times(Q, "x")
    ry = k_times(Q, "y")
    r0 = k_times(Q, "00")
    for n in range(order + 1):
        rhs = dict(rx[n])
        for k, v in ry[n].items():
            rhs[k] = rhs.get(k, Fraction(0)) + v
        for k, v in r0[n].items():
            rhs[k] = rhs.get(k, Fraction(0)) - v
        if n == 0:
            rhs[(1, 1)] = rhs.get((1, 1), Fraction(0)) + 1
        keys = set(lhs[n]) | set(rhs)
        for k in keys:
            if lhs[n].get(k, Fraction(0)) != rhs.get(k, Fraction(0)):
                return False
    return True


# ------------------------------------------------------------------ fitting

@dataclass
class FitResult:
    mu: float                 # per-step exponential growth
    alpha: float              # polynomial decay exponent
    prefactor: float          # fitted leading amplitude (scaled by the DP scale)
    mu_scaled: float          # growth of the *scaled* values (should be ~1)
    n_range: tuple
    period: int
    log_corrected: bool
    details: dict = field(default_factory=dict)


def richardson(seq: np.ndarray, order: int = 3, ratio: float = 2.0) -> float:
    """Classic Richardson extrapolation of seq(n) ~ L + c/n + d/n^2 + ...

    Works on a geometrically subsampled tail of the sequence.
    """
    n = len(seq)
    picks = []
    idx = n - 1
    for _ in range(order + 1):
        picks.append(seq[int(idx)])
        idx /= ratio
        if idx < 1:
            break
    picks = picks[::-1]
    level = list(picks)
    for m in range(1, len(picks)):
        nxt = []
        for i in range(len(level) - 1):
            f = ratio ** m
            nxt.append((f * level[i + 1] - level[i]) / (f - 1))
        level = nxt
    return float(level[0])


def fit_asymptotics(table: CountTable, i: int, j: int, n_lo: int, n_hi: int,
                    period: int = 1, log_corrected: bool = True) -> FitResult:
    """Estimate mu and alpha in q(i,j;n) ~ A mu^n n^{-alpha} (1 + slow corrections).

    Uses second differences of log-counts (kills A and mu exactly) with a
    (log n)/n-corrected least-squares template, per-period on the arithmetic
    progression where the counts are nonzero.
    """
    g = np.asarray(table.tracked_series(i, j), dtype=float)
    p = period
    ns = np.arange(len(g))
    sel = ns[(ns >= max(n_lo, p)) & (ns <= min(n_hi, len(g) - 1 - p))]
    sel = sel[(sel % p) == (min(n_hi, len(g) - 1 - p) % p)]
    sel = sel[(g[sel] > 0) & (g[sel - p] > 0) & (g[sel + p] > 0)]
    if len(sel) < 8:
        raise ValueError("not enough nonzero counts in the fitting range")
    l = np.log(g[sel])
    n = sel.astype(float)
    lp = np.log(g[sel - p])
    lnx = np.log(g[sel + p])
    d2 = lnx - 2 * l + lp
    d2_log_n = np.log(n + p) - 2 * np.log(n) + np.log(n - p)
    alpha_seq = -d2 / d2_log_n
    if log_corrected:
        M = np.vstack([np.ones_like(n), np.log(n) / n, 1.0 / n, np.log(n) / n ** 2]).T
    else:
        M = np.vstack([np.ones_like(n), 1.0 / n, 1.0 / n ** 2]).T
    coef, *_ = np.linalg.lstsq(M, alpha_seq, rcond=None)
    alpha = float(coef[0])
    # growth: first differences
    d1 = (lnx - l) / p
    d1_ln = (np.log(n + p) - np.log(n)) / p
    if log_corrected:
        M2 = np.vstack([np.ones_like(n), d1_ln, np.log(n) / n ** 2, 1.0 / n ** 2]).T
    else:
        M2 = np.vstack([np.ones_like(n), d1_ln, 1.0 / n ** 2]).T
    coef2, *_ = np.linalg.lstsq(M2, d1, rcond=None)
    mu_scaled = float(np.exp(coef2[0]))
    scale = table.scale if table.scale else 1.0
    mu = mu_scaled / scale
    # prefactor with the fitted alpha: A(n) = g(n) n^alpha / mu_scaled^n
    An = g[sel] * n ** alpha * np.exp(-n * np.log(mu_scaled))
    M3 = np.vstack([np.ones_like(n), np.log(n) / n, 1.0 / n]).T
    coef3, *_ = np.linalg.lstsq(M3, An, rcond=None)
    prefactor = float(coef3[0])
    return FitResult(mu=mu, alpha=alpha, prefactor=prefactor, mu_scaled=mu_scaled,
                     n_range=(int(sel[0]), int(sel[-1])), period=period,
                     log_corrected=log_corrected,
                     details={"alpha_tail": float(alpha_seq[-1]),
                              "alpha_richardson": richardson(alpha_seq)})


def fit_prefactor_ratios(table: CountTable, endpoints, alpha: float, n_lo: int, n_hi: int):
    """Amplitude of each endpoint relative to the first, at a COMMON alpha/mu.

    Ratios of tracked sequences are insensitive to the common growth factor,
    so this is the robust way to compare against predicted harmonic values.
    """
    base = np.asarray(table.tracked_series(*endpoints[0]), dtype=float)
    out = []
    for e in endpoints:
        g = np.asarray(table.tracked_series(*e), dtype=float)
        ns = np.arange(len(g))
        sel = ns[(ns >= n_lo) & (ns <= n_hi) & (base > 0) & (g >= 0)]
        r = g[sel] / base[sel]
        n = sel.astype(float)
        M = np.vstack([np.ones_like(n), np.log(n) / n, 1.0 / n]).T
        coef, *_ = np.linalg.lstsq(M, r, rcond=None)
        out.append(float(coef[0]))
    return out
