import math

import numpy as np
import pytest

from weinstein.core import BallPoint, DimensionMismatch, HypersurfacePoint, ProjPoint, SU2Element, proj_equal
from weinstein.projective import (
    Chart,
    act_ball,
    act_ball_array,
    chart_inverse,
    embed,
    haar_sample,
    haar_samples,
    psi,
    uniform_ball,
)
from weinstein.verify import (
    check_equivariance,
    check_group_action,
    check_orbit_dichotomy,
    check_round_trip,
    random_ball_point,
)

I = SU2Element.identity()
J = SU2Element(0, 1)


def test_chart_requires_n_at_least_two():
    with pytest.raises(ValueError):
        Chart(1)


class TestEmbed:
    def test_origin(self):
        assert embed(Chart(2), BallPoint([0, 0])).w == (0, 0, 1)

    def test_half(self):
        p = embed(Chart(2), BallPoint([0.5, 0]))
        assert np.allclose(p.w, [0.5, 0, math.sqrt(3) / 2], atol=1e-15)

    def test_three_fifths(self):
        p = embed(Chart(3), BallPoint([0, 0, 0.6]))
        assert np.allclose(p.w, [0, 0, 0.6, 0.8], atol=1e-15)

    def test_unit_norm_and_positive_last(self, rng):
        for _ in range(100):
            p = embed(Chart(4), random_ball_point(rng, 4))
            assert abs(np.linalg.norm(p.w) - 1) < 1e-15
            assert p.w[-1].imag == 0 and p.w[-1].real > 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            embed(Chart(3), BallPoint([0, 0]))


class TestChartInverse:
    def test_center(self):
        assert chart_inverse(Chart(2), ProjPoint([0, 0, 1])).z == (0, 0)

    def test_diagonal(self):
        z = chart_inverse(Chart(2), ProjPoint([1, 1, 1]))
        assert np.allclose(z.z, [1 / math.sqrt(3)] * 2, atol=1e-15)

    def test_hypersurface(self):
        with pytest.raises(HypersurfacePoint):
            chart_inverse(Chart(2), ProjPoint([1, 0, 0]))

    def test_complex_scaling_removed(self):
        z = chart_inverse(Chart(2), ProjPoint([2j, 0, 2j]))
        assert np.allclose(z.z, [1 / math.sqrt(2), 0], atol=1e-15)

    def test_round_trip(self, rng):
        res = check_round_trip(rng, trials=1000, tol=1e-12)
        assert res.passed, res.line()


class TestPsi:
    def test_identity(self):
        p = ProjPoint([0.3, 1j, 2])
        assert psi(Chart(2), I, p) == p

    def test_swap(self):
        assert proj_equal(psi(Chart(2), J, ProjPoint([1, 0, 1])), ProjPoint([0, -1, 1]), 1e-15)

    def test_diagonal_phase(self):
        # rows (i, 0), (0, -i)
        out = psi(Chart(2), SU2Element(1j, 0), ProjPoint([1, 1, 1]))
        assert proj_equal(out, ProjPoint([1j, -1j, 1]), 1e-15)

    def test_well_defined_on_classes(self, rng):
        chart = Chart(3)
        for _ in range(100):
            A = haar_sample(rng)
            w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            s = complex(rng.standard_normal() + 1j * rng.standard_normal())
            assert proj_equal(psi(chart, A, ProjPoint(w)), psi(chart, A, ProjPoint(s * w)), 1e-12)

    def test_group_action(self, rng):
        res = check_group_action(rng, trials=1000, tol=1e-12)
        assert res.passed, res.line()


class TestActBall:
    def test_identity(self):
        z = BallPoint([0.1, 0.2j, 0.3])
        assert act_ball(I, z) == z

    def test_swap(self):
        assert act_ball(J, BallPoint([0.5, 0, 0])).z == (0, -0.5, 0)

    def test_fixed_when_head_vanishes(self, rng):
        z = BallPoint([0, 0, 0.5])
        for _ in range(20):
            assert act_ball(haar_sample(rng), z) == z

    def test_norm_preserved(self, rng):
        for _ in range(1000):
            z = random_ball_point(rng, 3)
            out = act_ball(haar_sample(rng), z)
            assert abs(out.norm_sq() - z.norm_sq()) <= 1e-12

    def test_needs_two_coordinates(self):
        with pytest.raises(DimensionMismatch):
            act_ball(I, BallPoint([0.1]))

    def test_array_version_matches(self, rng):
        Z = uniform_ball(rng, 50, 3)
        a, b = haar_samples(rng, 50)
        out = act_ball_array(a, b, Z)
        for i in range(50):
            ref = act_ball(SU2Element(a[i], b[i]), BallPoint(Z[i].tolist()))
            assert np.allclose(out[i], ref.z, atol=1e-15)

    def test_orbit_dichotomy(self, rng):
        res = check_orbit_dichotomy(rng, trials=40)
        assert res.passed, res.line()


def test_equivariance(rng):
    res = check_equivariance(rng, trials=2000, tol=1e-12)
    assert res.passed, res.line()


class TestHaar:
    def test_moments(self, rng):
        a, b = haar_samples(rng, 100_000)
        m = np.abs(a) ** 2
        se = m.std() / math.sqrt(m.size)
        assert abs(m.mean() - 0.5) <= 3 * se
        for comp in (a.real, a.imag, b.real, b.imag):
            assert abs(comp.mean()) <= 3 * comp.std() / math.sqrt(comp.size)

    def test_normalized(self, rng):
        a, b = haar_samples(rng, 10_000)
        assert np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)) <= 1e-12
        haar_sample(rng)  # constructor re-validates

    def test_left_invariance(self, rng):
        """Haar: B * A has the same law as A; compare |a|^2 histograms."""
        a, b = haar_samples(rng, 50_000)
        B = haar_sample(rng)
        ba = B.a * a - B.b * np.conj(b)
        h1, _ = np.histogram(np.abs(a) ** 2, bins=10, range=(0, 1))
        h2, _ = np.histogram(np.abs(ba) ** 2, bins=10, range=(0, 1))
        # |a|^2 is uniform on [0, 1] for Haar measure on S^3
        expected = a.size / 10
        for h in (h1, h2):
            assert np.all(np.abs(h - expected) < 5 * math.sqrt(expected))


def test_uniform_ball_radius_law(rng):
    Z = uniform_ball(rng, 200_000, 3)
    r2 = np.sum(np.abs(Z) ** 2, axis=1)
    assert r2.max() < 1
    # P(|z|^2 <= t) = t^n for the uniform 2n-ball
    for t in (0.25, 0.5, 0.9):
        frac = np.mean(r2 <= t)
        assert abs(frac - t**3) < 5 * math.sqrt(t**3 * (1 - t**3) / r2.size)
