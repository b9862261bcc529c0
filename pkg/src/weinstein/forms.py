"""Wedge powers of the standard symplectic form and pullback integrals over D^{2k}.

Real coordinates on C^n are ordered ``(x_1, y_1, ..., x_n, y_n)`` and the
standard form is ``omega_0 = sum dx_m ^ dy_m``. On a frame of 2k vectors,
``omega_0^k / k!`` equals the Pfaffian of the Gram matrix
``G[i, j] = omega_0(v_i, v_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Convention, DimensionMismatch, NonFiniteIntegrand, pairwise_sum


def to_real(Z: np.ndarray) -> np.ndarray:
    """Complex ``(..., n)`` to interleaved real ``(..., 2n)``."""
    return np.stack([Z.real, Z.imag], axis=-1).reshape(*Z.shape[:-1], 2 * Z.shape[-1])


def symplectic_gram(V: np.ndarray) -> np.ndarray:
    """Gram matrices of omega_0 for stacked frames ``V`` of shape ``(..., 2k, 2n)``."""
    X, Y = V[..., 0::2], V[..., 1::2]
    m = V.shape[-2]
    G = np.zeros(V.shape[:-2] + (m, m))
    for i in range(m):
        for j in range(i + 1, m):
            g = np.einsum("...n,...n->...", X[..., i, :], Y[..., j, :]) - np.einsum(
                "...n,...n->...", Y[..., i, :], X[..., j, :]
            )
            G[..., i, j] = g
            G[..., j, i] = -g
    return G


def pfaffian(G: np.ndarray) -> np.ndarray:
    """Pfaffian of antisymmetric matrices stacked along leading axes.

    Cofactor expansion along the first row; fine for the sizes used here
    (2k <= 8).
    """
    return _pf(G, tuple(range(G.shape[-1])))


def _pf(G: np.ndarray, idx: tuple[int, ...]) -> np.ndarray:
    m = len(idx)
    if m == 0:
        return np.ones(G.shape[:-2])
    if m % 2:
        return np.zeros(G.shape[:-2])
    if m == 2:
        return G[..., idx[0], idx[1]]
    total = np.zeros(G.shape[:-2])
    for pos in range(1, m):
        rest = idx[1:pos] + idx[pos + 1 :]
        sign = 1.0 if pos % 2 else -1.0
        total = total + sign * G[..., idx[0], idx[pos]] * _pf(G, rest)
    return total


@dataclass(frozen=True)
class Frame:
    """A base point in C^n (real coordinates) and 2k tangent vectors there."""

    point: tuple[float, ...]
    vectors: tuple[tuple[float, ...], ...]

    def __init__(self, point: Sequence[float], vectors: Sequence[Sequence[float]]):
        pt = tuple(float(x) for x in point)
        vecs = tuple(tuple(float(x) for x in v) for v in vectors)
        if len(pt) % 2:
            raise DimensionMismatch("point must have 2n real coordinates")
        if any(len(v) != len(pt) for v in vecs):
            raise DimensionMismatch("tangent vectors must match the point dimension")
        if not all(math.isfinite(x) for x in pt + sum(vecs, ())):
            raise ValueError("frame entries must be finite")
        object.__setattr__(self, "point", pt)
        object.__setattr__(self, "vectors", vecs)

    @property
    def n(self) -> int:
        return len(self.point) // 2


def omega_power_eval(frame: Frame, k: int, conv: Convention = Convention.NORMALIZED) -> float:
    if len(frame.vectors) != 2 * k:
        raise DimensionMismatch(f"omega^{k} needs {2 * k} vectors, got {len(frame.vectors)}")
    if k > frame.n:
        raise DimensionMismatch(f"k={k} exceeds n={frame.n}")
    V = np.array(frame.vectors, dtype=float).reshape(2 * k, 2 * frame.n)
    return float(pfaffian(symplectic_gram(V))) * conv.factor(k)


# -- capping maps -----------------------------------------------------------


class CappingMap:
    """Smooth map from the closed unit ball D^{2k} of C^k into C^n.

    Subclasses implement ``__call__`` on complex arrays of shape ``(..., k)``
    and may provide an analytic real Jacobian of shape ``(..., 2n, 2k)``,
    or of shape ``(2n, 2k)`` when it is the same at every point.
    Evaluators must accept points slightly outside D^{2k} (finite
    differences step across the boundary).
    """

    k: int
    n: int

    def __call__(self, W: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian(self, W: np.ndarray) -> Optional[np.ndarray]:
        return None


@dataclass(frozen=True)
class FlatDisk(CappingMap):
    """D^4 rescaled onto the ball of radius sqrt(|z1|^2 + |z2|^2) in the (z_1, z_2)-plane."""

    z1: complex
    z2: complex
    n: int = 2
    k: int = field(default=2, init=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("FlatDisk needs n >= 2")

    @property
    def radius(self) -> float:
        return math.sqrt(abs(self.z1) ** 2 + abs(self.z2) ** 2)

    def __call__(self, W: np.ndarray) -> np.ndarray:
        out = np.zeros(W.shape[:-1] + (self.n,), dtype=complex)
        out[..., :2] = self.radius * W
        return out

    def jacobian(self, W: np.ndarray) -> np.ndarray:
        # linear map: one constant (2n, 4) Jacobian for every point
        J = np.zeros((2 * self.n, 4))
        J[:4, :] = self.radius * np.eye(4)
        return J


def bump(s_sq: np.ndarray) -> np.ndarray:
    return (1.0 - s_sq) ** 2


@dataclass(frozen=True)
class Warped(CappingMap):
    """A base cap pushed off its plane into coordinate ``target`` (0-based).

    Displacement ``amplitude * (1 - s^2)^2 * w_1`` where s = |w|; it vanishes
    on the boundary, so the cap still bounds the same sphere. The ``w_1``
    factor makes the displacement complex-valued, otherwise the extra
    ``dx ^ dy`` term would pull back to zero identically.
    """

    base: CappingMap
    amplitude: float
    target: int

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def n(self) -> int:
        return self.base.n

    def __post_init__(self):
        if not 0 <= self.target < self.base.n:
            raise ValueError(f"target coordinate {self.target} out of range")

    def __call__(self, W: np.ndarray) -> np.ndarray:
        out = self.base(W)
        s_sq = np.sum(np.abs(W) ** 2, axis=-1)
        out[..., self.target] += self.amplitude * bump(s_sq) * W[..., 0]
        return out


@dataclass(frozen=True)
class GeneralCap(CappingMap):
    """User-supplied evaluator; Jacobian always by finite differences."""

    k: int
    n: int
    evaluator: Callable[[np.ndarray], np.ndarray]

    def __call__(self, W: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(W), dtype=complex)


def reversed_cap(cap: CappingMap) -> GeneralCap:
    """Precompose with conjugation of the first domain coordinate.

    Conjugation runs the first angle backwards, reverses the orientation of
    D^{2k}, and so negates every pullback integral.
    """

    def ev(W):
        V = W.copy()
        V[..., 0] = np.conj(V[..., 0])
        return cap(V)

    return GeneralCap(cap.k, cap.n, ev)


def fd_jacobian(cap: CappingMap, W: np.ndarray, h: float) -> np.ndarray:
    """Central-difference real Jacobian ``(..., 2n, 2k)`` of ``cap`` at ``W``."""
    cols = []
    for d in range(2 * cap.k):
        step = np.zeros(cap.k, dtype=complex)
        step[d // 2] = h if d % 2 == 0 else 1j * h
        diff = (cap(W + step) - cap(W - step)) / (2 * h)
        cols.append(to_real(diff))
    return np.stack(cols, axis=-1)


# -- quadrature -------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre node counts and the finite-difference step."""

    radial_nodes: int = 32
    angular_nodes: int = 32
    fd_step: float = 1e-5

    def __post_init__(self):
        if self.radial_nodes < 2 or self.angular_nodes < 2:
            raise ValueError("node counts must be >= 2")
        if not 1e-7 <= self.fd_step <= 1e-3:
            raise ValueError("fd_step must lie in [1e-7, 1e-3]")


@lru_cache(maxsize=8)
def _d4_grid(radial: int, angular: int):
    """Nodes and weights of the double-polar D^4 rule.

    ``|w1|^2 = u1*u2``, ``|w2|^2 = (1-u1)*u2`` with angles phi1, phi2; the
    Lebesgue measure is ``(1/4) u2 du1 du2 dphi1 dphi2``. Returns
    ``(W, weights)`` with W of shape ``(radial, radial*angular*angular, 2)``,
    chunked along the u1 axis.
    """
    xr, wr = np.polynomial.legendre.leggauss(radial)
    xa, wa = np.polynomial.legendre.leggauss(angular)
    u, wu = (xr + 1) / 2, wr / 2
    phi, wphi = np.pi * (xa + 1), wa * np.pi
    U1, U2, P1, P2 = np.meshgrid(u, u, phi, phi, indexing="ij")
    WT = np.einsum("i,j,k,l->ijkl", wu, wu, wphi, wphi) * U2 / 4
    w1 = np.sqrt(U1 * U2) * np.exp(1j * P1)
    w2 = np.sqrt((1 - U1) * U2) * np.exp(1j * P2)
    W = np.stack([w1, w2], axis=-1).reshape(radial, -1, 2)
    W.setflags(write=False)
    WT = WT.reshape(radial, -1)
    WT.setflags(write=False)
    return W, WT


def _pullback_density(cap: CappingMap, W: np.ndarray, h: float, jacobian: str) -> np.ndarray:
    J = cap.jacobian(W) if jacobian == "auto" else None
    if J is None:
        J = fd_jacobian(cap, W, h)
    elif J.ndim == 2:
        dens = pfaffian(symplectic_gram(J.T))
        return np.broadcast_to(dens, W.shape[:-1])
    # points-last layout keeps the Gram products on contiguous vectors
    T = np.ascontiguousarray(np.moveaxis(J, (-1, -2), (0, 1)).reshape(J.shape[-1], J.shape[-2], -1))
    X, Y = T[:, 0::2], T[:, 1::2]
    m = T.shape[0]
    G = np.zeros((m, m, T.shape[-1]))
    for i in range(m):
        for j in range(i + 1, m):
            g = np.sum(X[i] * Y[j] - Y[i] * X[j], axis=0)
            G[i, j] = g
            G[j, i] = -g
    return pfaffian(np.moveaxis(G, -1, 0)).reshape(J.shape[:-2])


def integrate_pullback(
    cap: CappingMap,
    q: QuadratureSpec = QuadratureSpec(),
    conv: Convention = Convention.NORMALIZED,
    jacobian: str = "auto",
) -> float:
    """Integrate ``cap^*(omega_0^k)`` (convention-adjusted) over D^4.

    Parameters
    ----------
    cap : CappingMap
        Must have ``k == 2``; other k go through :func:`integrate_pullback_mc`.
    q : QuadratureSpec
        Tensor Gauss-Legendre rule on ``(u1, u2, phi1, phi2)``.
    conv : Convention
    jacobian : {"auto", "fd"}
        ``"auto"`` uses an analytic Jacobian when the cap has one;
        ``"fd"`` forces central differences with step ``q.fd_step``.

    Raises
    ------
    NonFiniteIntegrand
        If any node evaluates to NaN or an infinity.
    """
    if cap.k != 2:
        raise ValueError("quadrature path covers k = 2 only; use integrate_pullback_mc")
    if jacobian not in ("auto", "fd"):
        raise ValueError(f"unknown jacobian mode {jacobian!r}")
    W, WT = _d4_grid(q.radial_nodes, q.angular_nodes)
    sums = []
    for i in range(W.shape[0]):
        dens = _pullback_density(cap, W[i], q.fd_step, jacobian)
        if not np.all(np.isfinite(dens)):
            raise NonFiniteIntegrand("pullback density is not finite")
        sums.append(float(np.sum(dens * WT[i])))
    return pairwise_sum(sums) * conv.factor(2)


def unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1)


def integrate_pullback_mc(
    cap: CappingMap,
    samples: int,
    rng: np.random.Generator,
    conv: Convention = Convention.NORMALIZED,
    h: float = 1e-5,
) -> tuple[float, float]:
    """Monte-Carlo fallback for any k: returns ``(value, stderr)``.

    Points are uniform in D^{2k}; the Jacobian is always by finite
    differences.
    """
    k = cap.k
    from .projective import uniform_ball

    W = uniform_ball(rng, samples, k)
    dens = _pullback_density(cap, W, h, "fd")
    if not np.all(np.isfinite(dens)):
        raise NonFiniteIntegrand("pullback density is not finite")
    vol = unit_ball_volume(2 * k) * conv.factor(k)
    return float(vol * dens.mean()), float(vol * dens.std(ddof=1) / math.sqrt(samples))


def flat_disk_closed_form(z1: complex, z2: complex, conv: Convention = Convention.NORMALIZED) -> float:
    """Volume of the 4-ball bounded by the SU(2)-orbit: ``(pi^2/2) (|z1|^2+|z2|^2)^2``."""
    r2 = abs(z1) ** 2 + abs(z2) ** 2
    return math.pi**2 / 2 * r2 * r2 * conv.factor(2)
