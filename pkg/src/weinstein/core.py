"""Shared value types: complex points, SU(2) elements, exact multiples of pi.

Every value here is immutable. Complex scalars are plain Python ``complex``
numbers; constructors reject NaN and infinities.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np


class WeinsteinError(Exception):
    """Base class for computational failures raised by this package."""


class HypersurfacePoint(WeinsteinError):
    """The point lies on the hyperplane at infinity, outside the ball chart."""


class NonFiniteIntegrand(WeinsteinError):
    """A quadrature node produced NaN or an infinity."""


class SingularFormula(WeinsteinError):
    """A closed-form expression has a vanishing denominator."""


class ZeroPeriod(WeinsteinError):
    """The period group generator is zero."""


class DimensionMismatch(ValueError):
    pass


class Convention(enum.Enum):
    """Which power of the symplectic form gets integrated.

    ``RAW`` integrates omega^k, ``NORMALIZED`` integrates omega^k / k!.
    """

    RAW = "raw"
    NORMALIZED = "normalized"

    def factor(self, k: int) -> int:
        """Multiplier that turns a NORMALIZED value into this convention."""
        return math.factorial(k) if self is Convention.RAW else 1

    @classmethod
    def parse(cls, text: str | Convention) -> Convention:
        if isinstance(text, Convention):
            return text
        return cls(text.lower())


def _check_complex(values: Iterable[complex]) -> tuple[complex, ...]:
    out = tuple(complex(v) for v in values)
    for v in out:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"non-finite coordinate {v!r}")
    return out


@dataclass(frozen=True)
class BallPoint:
    """A point of the open unit ball in C^n."""

    z: tuple[complex, ...]

    def __init__(self, z: Sequence[complex]):
        coords = _check_complex(z)
        if not coords:
            raise ValueError("BallPoint needs at least one coordinate")
        if sum(abs(c) ** 2 for c in coords) >= 1.0:
            raise ValueError("BallPoint must satisfy sum |z_j|^2 < 1")
        object.__setattr__(self, "z", coords)

    @property
    def n(self) -> int:
        return len(self.z)

    def norm_sq(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.z)

    def to_json(self) -> list[list[float]]:
        return [complex_to_json(c) for c in self.z]


@dataclass(frozen=True)
class ProjPoint:
    """Homogeneous coordinates [w_1 : ... : w_{n+1}] on CP^n."""

    w: tuple[complex, ...]

    def __init__(self, w: Sequence[complex]):
        coords = _check_complex(w)
        if len(coords) < 2:
            raise ValueError("ProjPoint needs at least two homogeneous coordinates")
        if all(c == 0 for c in coords):
            raise ValueError("all-zero homogeneous coordinates")
        object.__setattr__(self, "w", coords)

    @property
    def n(self) -> int:
        return len(self.w) - 1

    def canonical(self) -> np.ndarray:
        """Unit-norm representative whose first nonzero coordinate is real positive."""
        return canonical_rep(np.array(self.w, dtype=complex))

    def to_json(self) -> list[list[float]]:
        return [complex_to_json(c) for c in self.w]


# Moduli below this (relative to the unit-normalized vector) count as zero
# when picking the phase anchor; keeps canonicalization stable under rounding.
_ANCHOR_EPS = 1e-14


def canonical_rep(w: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(w)
    if norm == 0:
        raise ValueError("all-zero homogeneous coordinates")
    v = w / norm
    anchor = np.flatnonzero(np.abs(v) > _ANCHOR_EPS)[0]
    return v * (abs(v[anchor]) / v[anchor])


def proj_distance(p: ProjPoint, q: ProjPoint) -> float:
    """Max-norm distance between the canonical representatives of p and q."""
    if p.n != q.n:
        raise DimensionMismatch(f"CP^{p.n} vs CP^{q.n}")
    return float(np.max(np.abs(p.canonical() - q.canonical())))


def proj_equal(p: ProjPoint, q: ProjPoint, tol: float = 1e-12) -> bool:
    return proj_distance(p, q) <= tol


@dataclass(frozen=True)
class SU2Element:
    """The matrix [[a, b], [-conj(b), conj(a)]] with |a|^2 + |b|^2 = 1."""

    a: complex
    b: complex

    def __init__(self, a: complex, b: complex):
        a, b = _check_complex((a, b))
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 = {abs(a) ** 2 + abs(b) ** 2!r} is not 1")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def identity(cls) -> SU2Element:
        return cls(1, 0)

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]])

    def apply(self, z1: complex, z2: complex) -> tuple[complex, complex]:
        a, b = self.a, self.b
        return a * z1 + b * z2, -b.conjugate() * z1 + a.conjugate() * z2

    def __matmul__(self, other: SU2Element) -> SU2Element:
        # first row of the product determines the element
        m = self.matrix @ other.matrix
        a, b = complex(m[0, 0]), complex(m[0, 1])
        # renormalize away the rounding drift of one multiplication
        s = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return SU2Element(a / s, b / s)


@dataclass(frozen=True)
class ExactValue:
    """A finite sum  sum_m c_m * pi**m  with rational coefficients, m >= 0.

    Stored as ``(power, coefficient)`` pairs in ascending power order with
    zero coefficients dropped, so equality is structural.
    """

    items: tuple[tuple[int, Fraction], ...] = ()

    def __init__(self, terms: Mapping[int, Fraction | int | str] | None = None):
        cleaned: dict[int, Fraction] = {}
        for m, c in (terms or {}).items():
            m = int(m)
            if m < 0:
                raise ValueError("only nonnegative powers of pi are supported")
            c = Fraction(c)
            if c:
                cleaned[m] = c
        object.__setattr__(self, "items", tuple(sorted(cleaned.items())))

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self.items)

    def coefficient(self, m: int) -> Fraction:
        return self.terms.get(m, Fraction(0))

    def __bool__(self) -> bool:
        return bool(self.items)

    def __add__(self, other: ExactValue) -> ExactValue:
        if not isinstance(other, ExactValue):
            return NotImplemented
        out = self.terms
        for m, c in other.items:
            out[m] = out.get(m, Fraction(0)) + c
        return ExactValue(out)

    def __neg__(self) -> ExactValue:
        return ExactValue({m: -c for m, c in self.items})

    def __sub__(self, other: ExactValue) -> ExactValue:
        if not isinstance(other, ExactValue):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar: Fraction | int) -> ExactValue:
        if not isinstance(scalar, (int, Fraction)):
            return NotImplemented
        return ExactValue({m: c * scalar for m, c in self.items})

    __rmul__ = __mul__

    def __float__(self) -> float:
        return exact_to_real(self)

    def __str__(self) -> str:
        if not self.items:
            return "0"
        parts = []
        for m, c in reversed(self.items):
            coef = str(c)
            if m == 0:
                parts.append(coef)
            else:
                pw = "pi" if m == 1 else f"pi^{m}"
                parts.append(pw if c == 1 else f"{coef} {pw}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"terms": [[m, f"{c.numerator}/{c.denominator}"] for m, c in self.items]}

    @classmethod
    def from_json(cls, data: Mapping) -> ExactValue:
        return cls({int(m): Fraction(c) for m, c in data["terms"]})

    @classmethod
    def parse(cls, text: str) -> ExactValue:
        """Parse ``"3:97/256,2:1/32"`` (power:coefficient pairs)."""
        terms: dict[int, Fraction] = {}
        text = text.strip()
        if not text:
            return cls()
        for chunk in text.split(","):
            m, _, c = chunk.partition(":")
            if not _:
                raise ValueError(f"expected power:coefficient, got {chunk!r}")
            m = int(m)
            terms[m] = terms.get(m, Fraction(0)) + Fraction(c.strip())
        return cls(terms)


def exact_to_real(v: ExactValue) -> float:
    return math.fsum(float(c) * math.pi**m for m, c in v.items)


def exact_add(u: ExactValue, v: ExactValue) -> ExactValue:
    return u + v


def complex_to_json(c: complex) -> list[float]:
    return [c.real, c.imag]


def parse_complex_list(text: str) -> list[complex]:
    """Parse the flag syntax ``"re,im;re,im;..."``."""
    out = []
    for chunk in text.strip().split(";"):
        re_s, sep, im_s = chunk.partition(",")
        if not sep:
            raise ValueError(f"expected 're,im', got {chunk!r}")
        out.append(complex(float(re_s), float(im_s)))
    return out


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum in a fixed binary tree over index order."""
    if not values:
        return 0.0
    vals = list(values)
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
