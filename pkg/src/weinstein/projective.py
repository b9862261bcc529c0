"""Ball chart of CP^n and the SU(2) action on the first two coordinates.

The chart sends z in the open unit ball B^{2n}(1) to
``[z_1 : ... : z_n : sqrt(1 - |z|^2)]``; its image misses only the
hyperplane ``w_{n+1} = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BallPoint, DimensionMismatch, HypersurfacePoint, ProjPoint, SU2Element


@dataclass(frozen=True)
class Chart:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chart needs n >= 2, got n={self.n}")


def embed(chart: Chart, z: BallPoint) -> ProjPoint:
    if z.n != chart.n:
        raise DimensionMismatch(f"point in C^{z.n}, chart for C^{chart.n}")
    last = math.sqrt(1.0 - z.norm_sq())
    return ProjPoint(z.z + (complex(last),))


def chart_inverse(chart: Chart, p: ProjPoint) -> BallPoint:
    """Inverse of :func:`embed` on its image.

    Raises
    ------
    HypersurfacePoint
        If the last homogeneous coordinate is zero.
    """
    if p.n != chart.n:
        raise DimensionMismatch(f"point in CP^{p.n}, chart for CP^{chart.n}")
    w = np.array(p.w, dtype=complex)
    if w[-1] == 0:
        raise HypersurfacePoint("last homogeneous coordinate is zero")
    w = w / np.linalg.norm(w)
    w = w * (abs(w[-1]) / w[-1])
    return BallPoint(w[:-1].tolist())


def psi(chart: Chart, A: SU2Element, p: ProjPoint) -> ProjPoint:
    """The Hamiltonian diffeomorphism psi_A: apply A to the first two coordinates."""
    if p.n != chart.n:
        raise DimensionMismatch(f"point in CP^{p.n}, chart for CP^{chart.n}")
    w1, w2 = A.apply(p.w[0], p.w[1])
    return ProjPoint((w1, w2) + p.w[2:])


def act_ball(A: SU2Element, z: BallPoint) -> BallPoint:
    if z.n < 2:
        raise DimensionMismatch("the SU(2) action needs n >= 2")
    z1, z2 = A.apply(z.z[0], z.z[1])
    return BallPoint((z1, z2) + z.z[2:])


def act_ball_array(a: np.ndarray, b: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Vectorized :func:`act_ball` on rows of ``Z`` (shape ``(m, n)``)."""
    out = Z.copy()
    out[:, 0] = a * Z[:, 0] + b * Z[:, 1]
    out[:, 1] = -np.conj(b) * Z[:, 0] + np.conj(a) * Z[:, 1]
    return out


def haar_samples(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``size`` Haar-random SU(2) elements as arrays ``(a, b)``.

    Four standard Gaussians normalized to the unit 3-sphere of C^2.
    """
    g = rng.standard_normal((size, 4))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3]


def haar_sample(rng: np.random.Generator) -> SU2Element:
    a, b = haar_samples(rng, 1)
    return SU2Element(complex(a[0]), complex(b[0]))


def uniform_ball(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Uniform points of B^{2n}(1) as a complex array of shape ``(size, n)``.

    Gaussian direction, radius ``U**(1/(2n))``.
    """
    g = rng.standard_normal((size, 2 * n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(size) ** (1.0 / (2 * n))
    g *= r[:, None]
    return g[:, 0::2] + 1j * g[:, 1::2]
