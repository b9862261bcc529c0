"""Period group of CP^n in degree 4 and order analysis in R / <generator>.

Two tracks: :func:`order_exact` works on exact multiples of powers of pi and
can certify infinite order (pi is transcendental); :func:`order_numeric`
works on floats and can only bound the order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Convention, ExactValue, ZeroPeriod, exact_to_real

FINITE = "finite"
INFINITE = "infinite_by_irrationality"
NO_ORDER = "no_order_up_to"


@dataclass(frozen=True)
class PeriodGroup:
    k: int
    n: int
    generator: ExactValue

    def __post_init__(self):
        if not self.generator:
            raise ZeroPeriod("period generator is zero")

    @property
    def real(self) -> float:
        return exact_to_real(self.generator)


def period_generator(n: int, conv: Convention = Convention.NORMALIZED) -> PeriodGroup:
    """P_4(CP^n) is generated by the pairing of omega^2 with the class of CP^2."""
    if n < 2:
        raise ValueError("P_4(CP^n) needs n >= 2")
    return PeriodGroup(2, n, ExactValue({2: Fraction(1, 2) * conv.factor(2)}))


def reduce_mod(v: float, p: PeriodGroup) -> float:
    g = p.real
    if g <= 0:
        raise ValueError("generator must be positive")
    if 0.0 <= v < g:
        return v
    r = v - g * math.floor(v / g)
    if r < 0:
        r += g
    if r >= g:
        r -= g
    return max(r, 0.0)


@dataclass(frozen=True)
class OrderReport:
    verdict: str
    q: Optional[int] = None
    witness_power: Optional[int] = None
    qmax: Optional[int] = None
    tol: Optional[float] = None

    @property
    def is_finite(self) -> bool:
        return self.verdict == FINITE

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        for key in ("q", "witness_power", "qmax", "tol"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out

    def __str__(self) -> str:
        if self.verdict == FINITE:
            return f"Finite({self.q})"
        if self.verdict == INFINITE:
            return f"InfiniteByIrrationality(m={self.witness_power})"
        return f"NoOrderUpTo({self.qmax}, {self.tol:g})"


def _generator_coefficient(p: PeriodGroup) -> Fraction:
    c = p.generator.coefficient(2)
    if p.generator.terms.keys() != {2} or c <= 0:
        raise ValueError("order analysis needs a generator of the form c*pi^2 with c > 0")
    return c


def order_exact(v: ExactValue, p: PeriodGroup) -> OrderReport:
    """Order of the class of ``v`` in R / <generator>.

    ``v / generator`` is a rational combination of powers of pi. If any power
    other than pi^2 in ``v`` is present, the ratio is irrational and the
    class has infinite order; otherwise the order is the denominator of the
    ratio's fractional part.
    """
    c = _generator_coefficient(p)
    others = [m for m, coef in v.items if m != 2]
    if others:
        return OrderReport(INFINITE, witness_power=max(others))
    ratio = v.coefficient(2) / c
    return OrderReport(FINITE, q=(ratio - math.floor(ratio)).denominator)


def _convergent_denominators(x: Fraction):
    """Denominators of the continued-fraction convergents of x in [0, 1)."""
    q_prev, q = 0, 1
    yield q
    while x.numerator != 0:
        y = 1 / x
        a = math.floor(y)
        x = y - a
        q_prev, q = q, a * q + q_prev
        yield q


def _dist_to_int(x: Fraction) -> Fraction:
    return abs(x - round(x))


def order_numeric(v: float, p: PeriodGroup, qmax: int = 10**6, tol: float = 1e-9) -> OrderReport:
    """Smallest q <= qmax with dist(q * v/generator, Z) <= tol, via convergents.

    Never reports infinite order; failure to find q is ``NoOrderUpTo``.
    """
    if qmax < 1 or tol <= 0:
        raise ValueError("need qmax >= 1 and tol > 0")
    g = p.real
    if g == 0:
        raise ZeroPeriod("period generator is zero")
    r = v / g
    x = Fraction(r - math.floor(r))
    if x >= 1:
        x -= 1
    tol_f = Fraction(tol)
    for q in _convergent_denominators(x):
        if q > qmax:
            break
        if _dist_to_int(q * x) <= tol_f:
            return OrderReport(FINITE, q=q)
    return OrderReport(NO_ORDER, qmax=qmax, tol=tol)
