"""Pointwise capped-sphere areas on SU(2)-orbits and their average over CP^n.

The average is taken over the ball chart, whose image is dense in CP^n.
Pointwise values come from the flat-disk closed form; the numeric pullback
path exists to check that closed form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .arith import PeriodGroup, order_exact, period_generator, reduce_mod
from .core import (
    BallPoint,
    Convention,
    ExactValue,
    HypersurfacePoint,
    ProjPoint,
    SingularFormula,
    SU2Element,
    exact_to_real,
)
from .forms import FlatDisk, QuadratureSpec, flat_disk_closed_form, integrate_pullback
from .projective import act_ball, uniform_ball

MIN_REPORTED_SAMPLES = 1000
BLOCK_SIZE = 1 << 16


def orbit_point(A: SU2Element, z: BallPoint) -> BallPoint:
    return act_ball(A, z)


def a_pointwise(
    z: BallPoint,
    conv: Convention = Convention.NORMALIZED,
    method: str = "closed_form",
    quad: QuadratureSpec = QuadratureSpec(),
    jacobian: str = "auto",
) -> float:
    """Capped area of the SU(2)-orbit through ``z``.

    ``method="closed_form"`` uses the 4-ball volume formula,
    ``method="numeric"`` integrates the pullback over the flat capping disk.
    """
    if z.n < 2:
        raise ValueError("a_pointwise needs n >= 2")
    if method == "closed_form":
        return flat_disk_closed_form(z.z[0], z.z[1], conv)
    if method == "numeric":
        return integrate_pullback(FlatDisk(z.z[0], z.z[1], z.n), quad, conv, jacobian)
    raise ValueError(f"unknown method {method!r}")


def a_pointwise_array(Z: np.ndarray, conv: Convention = Convention.NORMALIZED) -> np.ndarray:
    """Closed-form pointwise values for rows of a complex ``(m, n)`` array."""
    r2 = np.abs(Z[:, 0]) ** 2 + np.abs(Z[:, 1]) ** 2
    return (math.pi**2 / 2 * conv.factor(2)) * r2 * r2


def lemma33_value(p: ProjPoint, conv: Convention = Convention.NORMALIZED) -> float:
    """Pointwise value written in homogeneous coordinates with w_{n+1} != 0."""
    if p.n < 2:
        raise ValueError("needs n >= 2")
    last = p.w[-1]
    if last == 0:
        raise HypersurfacePoint("last homogeneous coordinate is zero")
    r = [abs(w / last) ** 2 for w in p.w[:-1]]
    ratio = (r[0] + r[1]) / (1.0 + math.fsum(r))
    return math.pi**2 / 2 * ratio * ratio * conv.factor(2)


# -- Monte-Carlo average ------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    samples: int
    seed: int = 0
    convention: Convention = Convention.NORMALIZED

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.samples < 2:
            raise ValueError("need at least 2 samples")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class MorphismEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    convention: Convention
    period: ExactValue
    reduced: float = field(init=False)

    def __post_init__(self):
        g = PeriodGroup(2, 0, self.period)
        object.__setattr__(self, "reduced", reduce_mod(self.value, g))

    def to_json(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "samples": self.samples, "seed": self.seed}


def _block_rng(seed: int, block: int) -> np.random.Generator:
    # counter-based: block index in the high counter word, seed as key
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 192))


def _block_moments(seed, block, count, n, integrand):
    Z = uniform_ball(_block_rng(seed, block), count, n)
    vals = np.asarray(integrand(Z), dtype=float)
    mean = float(np.mean(vals))
    m2 = float(np.sum((vals - mean) ** 2))
    return count, mean, m2


def _combine(a, b):
    na, ma, sa = a
    nb, mb, sb = b
    nt = na + nb
    delta = mb - ma
    return nt, ma + delta * (nb / nt), sa + sb + delta * delta * (na * nb / nt)


def _tree_combine(parts):
    while len(parts) > 1:
        nxt = [_combine(parts[i], parts[i + 1]) for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def average_mc(
    cfg: SamplerConfig,
    workers: int = 1,
    integrand: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> MorphismEstimate:
    """Monte-Carlo average of the pointwise area over the unit 2n-ball.

    Samples are split into fixed blocks of ``BLOCK_SIZE``; block ``b`` draws
    from a Philox stream keyed by the seed with counter ``b``, and block
    moments are merged in a fixed pairwise tree. The estimate is therefore
    bit-identical for every ``workers`` value.

    ``integrand`` replaces the closed-form pointwise area (used for
    self-tests); it receives complex arrays of shape ``(m, n)``.
    """
    if integrand is None:
        conv = cfg.convention

        def integrand(Z):
            return a_pointwise_array(Z, conv)

    blocks = []
    remaining, b = cfg.samples, 0
    while remaining > 0:
        blocks.append((b, min(BLOCK_SIZE, remaining)))
        remaining -= BLOCK_SIZE
        b += 1

    def run(block):
        return _block_moments(cfg.seed, block[0], block[1], cfg.n, integrand)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(blk) for blk in blocks]
    count, mean, m2 = _tree_combine(parts)
    stderr = math.sqrt(m2 / (count - 1) / count)
    return MorphismEstimate(
        value=mean,
        stderr=stderr,
        samples=count,
        seed=cfg.seed,
        convention=cfg.convention,
        period=period_generator(cfg.n, cfg.convention).generator,
    )


# -- quadrature oracle and closed forms --------------------------------------


def mean_r4_quadrature(n: int) -> float:
    """Mean of (|z1|^2 + |z2|^2)^2 over B^{2n}(1) by 1-D adaptive quadrature.

    The radius rho of the (z1, z2)-component has density proportional to
    rho^3 (1 - rho^2)^(n-2) on [0, 1], with normalizer 2n(n-1).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    val, _ = integrate.quad(lambda r: r**7 * (1.0 - r * r) ** (n - 2), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)
    return 2 * n * (n - 1) * val


def average_quadrature(n: int, conv: Convention = Convention.NORMALIZED) -> float:
    return math.pi**2 / 2 * conv.factor(2) * mean_r4_quadrature(n)


PAPER = "paper"
DERIVED = "derived"


def closed_form_average(n: int, source: str = DERIVED, conv: Convention = Convention.NORMALIZED) -> ExactValue:
    """Exact average as a rational combination of powers of pi.

    ``source="paper"`` reproduces the published formulas as printed:
    ``97/256 pi^3 + 1/32 pi^2`` for n = 2 and
    ``96 / (n^2 (n^3 - 4n^2 - 4n + 16)) pi^(n-1)`` for n >= 3.
    ``source="derived"`` is ``3 pi^2 / ((n+1)(n+2))``, checked against
    :func:`average_quadrature`.

    Raises
    ------
    SingularFormula
        For ``source="paper"`` when ``n^3 - 4n^2 - 4n + 16 = (n-4)(n^2-4)`` vanishes (n = 4).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    scale = conv.factor(2)
    if source == DERIVED:
        return ExactValue({2: Fraction(3, (n + 1) * (n + 2))}) * scale
    if source != PAPER:
        raise ValueError(f"unknown source {source!r}")
    if n == 2:
        return ExactValue({3: Fraction(97, 256), 2: Fraction(1, 32)}) * scale
    denom = n * n * (n**3 - 4 * n**2 - 4 * n + 16)
    if denom == 0:
        raise SingularFormula(f"denominator n^2(n^3-4n^2-4n+16) vanishes at n={n}")
    return ExactValue({n - 1: Fraction(96, denom)}) * scale


# -- cross-validation report --------------------------------------------------

MC_SIGMAS = 4.0
DERIVED_RTOL = 1e-10
PAPER_RTOL = 1e-6

INCONSISTENT = "paper value inconsistent with oracles"


@dataclass
class DiscrepancyReport:
    n: int
    convention: Convention
    mc: MorphismEstimate
    quadrature: float
    paper: Optional[ExactValue]
    derived: ExactValue
    verdicts: list[str]
    gaps: dict[str, float]
    period: ExactValue
    paper_order: Optional[str] = None
    derived_order: Optional[str] = None
    self_test: Optional[dict] = None

    @property
    def paper_real(self) -> Optional[float]:
        return None if self.paper is None else exact_to_real(self.paper)

    @property
    def derived_real(self) -> float:
        return exact_to_real(self.derived)

    @property
    def flags_paper_inconsistent(self) -> bool:
        return any(v.startswith(INCONSISTENT) for v in self.verdicts)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "convention": self.convention.value,
            "mc": self.mc.to_json(),
            "quadrature": self.quadrature,
            "paper": (
                "singular"
                if self.paper is None
                else {"exact": self.paper.to_json(), "real": self.paper_real, "order": self.paper_order}
            ),
            "derived": {"exact": self.derived.to_json(), "real": self.derived_real, "order": self.derived_order},
            "reduced": {"value": self.mc.reduced, "period": self.period.to_json()},
            "gaps": self.gaps,
            "verdicts": list(self.verdicts),
        }
        if self.self_test is not None:
            out["self_test"] = self.self_test
        return out


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b else abs(a - b)


def discrepancy_report(
    n: int,
    cfg: SamplerConfig,
    workers: int = 1,
    self_test: bool = False,
) -> DiscrepancyReport:
    """Put the Monte-Carlo estimate, the quadrature oracle, the published formula
    and the derived formula side by side and record agreement verdicts.
    """
    if cfg.n != n:
        cfg = SamplerConfig(n, cfg.samples, cfg.seed, cfg.convention)
    conv = cfg.convention
    mc = average_mc(cfg, workers=workers)
    quad = average_quadrature(n, conv)
    derived = closed_form_average(n, DERIVED, conv)
    period = period_generator(n, conv)
    try:
        paper: Optional[ExactValue] = closed_form_average(n, PAPER, conv)
    except SingularFormula:
        paper = None

    verdicts = []
    gaps = {
        "mc_minus_quadrature": mc.value - quad,
        "derived_minus_quadrature": exact_to_real(derived) - quad,
        "derived_rel_gap": _rel(exact_to_real(derived), quad),
    }
    if abs(mc.value - quad) <= MC_SIGMAS * mc.stderr:
        verdicts.append("mc agrees with quadrature within 4 stderr")
    else:
        verdicts.append("mc disagrees with quadrature beyond 4 stderr")
    if mc.value < 0:
        verdicts.append("mc value negative for a nonnegative integrand")
    if gaps["derived_rel_gap"] <= DERIVED_RTOL:
        verdicts.append("derived formula agrees with quadrature")
    else:
        verdicts.append("derived formula flagged: disagrees with quadrature")

    if paper is None:
        verdicts.append(f"paper formula singular at n={n}")
    else:
        pr = exact_to_real(paper)
        gaps["paper_minus_quadrature"] = pr - quad
        gaps["paper_rel_gap"] = _rel(pr, quad)
        if pr < 0:
            verdicts.append(f"{INCONSISTENT}: negative value for a nonnegative integrand")
        elif gaps["paper_rel_gap"] > PAPER_RTOL and abs(pr - mc.value) > MC_SIGMAS * mc.stderr:
            verdicts.append(f"{INCONSISTENT}: gap {pr - quad:.6g} to quadrature")
        else:
            verdicts.append("paper value agrees with oracles")

    st = None
    if self_test:
        probe = average_mc(cfg, workers=workers, integrand=lambda Z: np.ones(Z.shape[0]))
        st = {"value": probe.value, "stderr": probe.stderr, "expected": 1.0, "gap": probe.value - 1.0}

    return DiscrepancyReport(
        n=n,
        convention=conv,
        mc=mc,
        quadrature=quad,
        paper=paper,
        derived=derived,
        verdicts=verdicts,
        gaps=gaps,
        period=period.generator,
        paper_order=None if paper is None else str(order_exact(paper, period)),
        derived_order=str(order_exact(derived, period)),
        self_test=st,
    )
