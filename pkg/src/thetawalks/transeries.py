"""Log-transeries on the exponent lattice {r + k*rho}.

A TranseriesExpansion is a finite sum of terms

    c * u^(r + k*rho) * (log u)^m,      r rational, k >= 0 integer,

for one named real constant rho.  Exponent comparison uses the numeric value
of rho; equality of lattice points is componentwise while rho is flagged
irrational.  When rho = p/q is declared rational, k*rho folds into the
rational part with k reduced mod q (so k stays below the denominator, which
is also the cap on the dual-nome index in the rational case).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp


@dataclass(frozen=True)
class ExponentLattice:
    """The lattice {r + k*rho : r in Q, k in Z>=0} for a named constant rho."""

    rho_num: object                      # high-precision value of rho (mpf)
    name: str = "rho"
    rational: Fraction | None = None     # set when rho is provably rational

    def value(self, r: Fraction, k: int) -> mp.mpf:
        return mp.mpf(r.numerator) / r.denominator + k * self.rho_num

    def normalize(self, r: Fraction, k: int):
        if k < 0:
            raise ValueError("lattice index k must be nonnegative")
        if self.rational is not None:
            q = self.rational.denominator
            r = r + (k // q) * self.rational * q
            k = k % q
        return (Fraction(r), int(k))


@dataclass(frozen=True)
class LatticePoint:
    r: Fraction
    k: int


class TranseriesExpansion:
    """Finite truncation of sum c * u^{r+k rho} (log u)^m."""

    def __init__(self, ring, lattice: ExponentLattice, terms=None, order=None,
                 var: str = "u"):
        self.ring = ring
        self.lattice = lattice
        self.var = var
        self.order = order  # numeric (float/mpf) truncation; None = exact
        self.terms = {}
        for (r, k, m), c in (terms or {}).items():
            self._add_term(r, k, m, c)

    # --------------------------------------------------------------- basics

    def _add_term(self, r, k, m, c):
        r, k = self.lattice.normalize(Fraction(r), k)
        if m < 0:
            raise ValueError("log power must be nonnegative")
        if self.order is not None and self.lattice.value(r, k) >= self.order:
            return
        key = (r, k, int(m))
        if key in self.terms:
            cur = self.ring.add(self.terms[key], c)
        else:
            cur = c
        if self._is_zero_coeff(cur):
            self.terms.pop(key, None)
        else:
            self.terms[key] = cur

    def _is_zero_coeff(self, c) -> bool:
        if hasattr(c, "is_zero") and callable(c.is_zero):
            return c.is_zero()
        return self.ring.is_zero(c)

    def copy(self) -> "TranseriesExpansion":
        return TranseriesExpansion(self.ring, self.lattice, dict(self.terms),
                                   self.order, self.var)

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (float(self.lattice.value(kv[0][0], kv[0][1])),
                                      kv[0][2]))

    # ------------------------------------------------------------ operations

    def __add__(self, other: "TranseriesExpansion") -> "TranseriesExpansion":
        self._check(other)
        order = _min_num(self.order, other.order)
        out = TranseriesExpansion(self.ring, self.lattice, dict(self.terms), order,
                                  self.var)
        for (r, k, m), c in other.terms.items():
            out._add_term(r, k, m, c)
        return out

    def __neg__(self):
        return TranseriesExpansion(
            self.ring, self.lattice,
            {key: self.ring.neg(c) for key, c in self.terms.items()},
            self.order, self.var)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TranseriesExpansion") -> "TranseriesExpansion":
        self._check(other)
        order = None
        if self.order is not None:
            order = self.order + float(min_exponent(other))
        if other.order is not None:
            o2 = other.order + float(min_exponent(self))
            order = o2 if order is None else min(order, o2)
        out = TranseriesExpansion(self.ring, self.lattice, None, order, self.var)
        for (r1, k1, m1), c1 in self.terms.items():
            for (r2, k2, m2), c2 in other.terms.items():
                out._add_term(r1 + r2, k1 + k2, m1 + m2, self.ring.mul(c1, c2))
        return out

    def scale(self, c) -> "TranseriesExpansion":
        return TranseriesExpansion(
            self.ring, self.lattice,
            {key: self.ring.mul(c, v) for key, v in self.terms.items()},
            self.order, self.var)

    def _check(self, other):
        if self.lattice is not other.lattice and self.lattice != other.lattice:
            raise ValueError("transeries over different exponent lattices")

    def coeff(self, r, k: int = 0, m: int = 0):
        r, k = self.lattice.normalize(Fraction(r), k)
        if self.order is not None and self.lattice.value(r, k) >= self.order:
            raise ValueError(f"coefficient at {r} + {k}*{self.lattice.name} is "
                             f"beyond the truncation order {self.order}")
        return self.terms.get((r, k, m), self.ring.zero)

    def max_log_power(self) -> int:
        return max((m for (_, _, m) in self.terms), default=0)

    def evaluate(self, u, prec: int = 256):
        """Numeric value at u > 0, logs summed explicitly."""
        with mp.workprec(prec):
            u = mp.mpf(u)
            lu = mp.log(u)
            tot = mp.mpc(0)
            for (r, k, m), c in self.terms.items():
                e = self.lattice.value(r, k)
                cv = c if not hasattr(c, "evaluate") else c
                tot += self.ring.to_mpc(cv, prec) * u ** e * lu ** m
            return tot

    def __repr__(self):
        bits = []
        for (r, k, m), c in self.sorted_terms()[:8]:
            e = f"{r}" + (f"+{k}{self.lattice.name}" if k else "")
            l = f"*log^{m}" if m else ""
            bits.append(f"({c})*{self.var}^({e}){l}")
        if len(self.terms) > 8:
            bits.append("...")
        tail = "" if self.order is None else f" + O({self.var}^{self.order})"
        return "<Transeries " + " + ".join(bits or ["0"]) + tail + ">"


def _min_num(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def min_exponent(a: TranseriesExpansion):
    vals = [a.lattice.value(r, k) for (r, k, _) in a.terms]
    return min(vals) if vals else mp.mpf(0)


def tx_mul(a: TranseriesExpansion, b: TranseriesExpansion) -> TranseriesExpansion:
    return a * b


def tx_from_puiseux(ps, lattice: ExponentLattice, ring=None) -> TranseriesExpansion:
    """Lift a plain Puiseux series into the lattice (k = 0, no logs)."""
    ring = ring or ps.ring
    terms = {(e, 0, 0): c for e, c in ps.terms()}
    order = None if ps.order is None else float(ps.order)
    return TranseriesExpansion(ring, lattice, terms, order)


def tx_coeff(a: TranseriesExpansion, r, k: int = 0, m: int = 0):
    return a.coeff(r, k, m)
