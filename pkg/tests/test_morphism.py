import math
from fractions import Fraction

import numpy as np
import pytest
import sympy

from weinstein.core import (
    BallPoint,
    Convention,
    ExactValue,
    HypersurfacePoint,
    ProjPoint,
    SingularFormula,
    SU2Element,
    exact_to_real,
)
from weinstein.morphism import (
    SamplerConfig,
    a_pointwise,
    a_pointwise_array,
    average_mc,
    average_quadrature,
    closed_form_average,
    discrepancy_report,
    lemma33_value,
    mean_r4_quadrature,
    orbit_point,
)
from weinstein.projective import Chart, act_ball, embed, haar_sample, uniform_ball
from weinstein.verify import check_chart_consistency, check_orbit_invariance, check_quartic_scaling, random_ball_point

PI2 = math.pi**2
RAW = Convention.RAW


def riemann_mean_r4_b4(m: int = 48) -> float:
    """Brute-force oracle: midpoint grid on [-1, 1]^4, mean of |x|^4 over the unit ball."""
    t = (np.arange(m) + 0.5) / m * 2 - 1
    x1, x2, x3 = np.meshgrid(t, t, t, indexing="ij")
    s3 = (x1**2 + x2**2 + x3**2).ravel()
    total, count = 0.0, 0
    for x4 in t:
        r2 = s3 + x4 * x4
        inside = r2 < 1
        total += float(np.sum(r2[inside] ** 2))
        count += int(inside.sum())
    return total / count


class TestPointwise:
    def test_orbit_point(self):
        z = BallPoint([0.1, 0.2j, 0.3])
        assert orbit_point(SU2Element.identity(), z) == z
        assert orbit_point(SU2Element(0, 1), BallPoint([1 / 3, 0])).z == (0, -1 / 3)

    def test_fixed_point_orbit(self, rng):
        z = BallPoint([0, 0, 0.5])
        for _ in range(10):
            assert orbit_point(haar_sample(rng), z) == z

    def test_fixed_point_value(self):
        z = BallPoint([0, 0, 0.5])
        assert a_pointwise(z) == 0.0
        assert a_pointwise(z, method="numeric") == 0.0

    def test_half_half(self):
        z = BallPoint([0.5, 0.5])
        assert a_pointwise(z) == pytest.approx(PI2 / 8, rel=1e-15)
        assert a_pointwise(z, method="numeric") == pytest.approx(PI2 / 8, rel=1e-10)
        assert a_pointwise(z, RAW) == pytest.approx(PI2 / 4, rel=1e-15)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            a_pointwise(BallPoint([0.1, 0.1]), method="magic")

    def test_array_matches_scalar(self, rng):
        Z = uniform_ball(rng, 20, 4)
        vals = a_pointwise_array(Z)
        for z, v in zip(Z, vals):
            assert v == pytest.approx(a_pointwise(BallPoint(z.tolist())), rel=1e-14)

    def test_quartic_scaling(self, rng):
        res = check_quartic_scaling(rng, trials=200, tol=1e-12)
        assert res.passed, res.line()

    def test_orbit_invariance(self, rng):
        res = check_orbit_invariance(rng, trials=200, tol=1e-12)
        assert res.passed, res.line()

    def test_reparametrization(self, rng):
        """{psi_{A B}} traces the same orbit as {psi_A}; the capped area is unchanged."""
        for _ in range(50):
            z = random_ball_point(rng, 3, (0.01, 0.99))
            B = haar_sample(rng)
            radius2 = abs(z.z[0]) ** 2 + abs(z.z[1]) ** 2
            for _ in range(10):
                w = act_ball(haar_sample(rng) @ B, z)
                assert abs(w.z[0]) ** 2 + abs(w.z[1]) ** 2 == pytest.approx(radius2, rel=1e-14)
                assert w.z[2:] == z.z[2:]
            assert a_pointwise(act_ball(B, z)) == pytest.approx(a_pointwise(z), rel=1e-14)

    def test_positivity(self, rng):
        assert np.all(a_pointwise_array(uniform_ball(rng, 10_000, 3)) >= 0)


class TestLemma33:
    def test_center(self):
        assert lemma33_value(ProjPoint([0, 0, 1])) == 0.0

    def test_diagonal(self):
        assert lemma33_value(ProjPoint([1, 1, 1])) == pytest.approx(2 * PI2 / 9, rel=1e-15)
        assert lemma33_value(ProjPoint([1, 1, 1]), RAW) == pytest.approx(4 * PI2 / 9, rel=1e-15)

    def test_hypersurface(self):
        with pytest.raises(HypersurfacePoint):
            lemma33_value(ProjPoint([1, 0, 0]))

    def test_scale_invariant(self):
        assert lemma33_value(ProjPoint([2j, 2j, 2j])) == pytest.approx(2 * PI2 / 9, rel=1e-15)

    def test_chart_consistency(self, rng):
        res = check_chart_consistency(rng, trials=1000, tol=1e-12)
        assert res.passed, res.line()


class TestQuadratureOracle:
    def test_n2(self):
        assert average_quadrature(2) == pytest.approx(PI2 / 4, rel=1e-13)

    def test_n3(self):
        assert average_quadrature(3) == pytest.approx(PI2 / 2 * 0.3, rel=1e-13)

    def test_raw(self):
        assert average_quadrature(2, RAW) == pytest.approx(PI2 / 2, rel=1e-13)

    def test_brute_force_riemann_n2(self):
        assert riemann_mean_r4_b4() == pytest.approx(mean_r4_quadrature(2), rel=5e-3)

    @pytest.mark.parametrize("n", range(2, 9))
    def test_symbolic_radial_integral(self, n):
        rho = sympy.symbols("rho", positive=True)
        exact = 2 * n * (n - 1) * sympy.integrate(rho**7 * (1 - rho**2) ** (n - 2), (rho, 0, 1))
        assert mean_r4_quadrature(n) == pytest.approx(float(exact), rel=1e-13)


class TestClosedFormAverage:
    def test_paper_n3(self):
        assert closed_form_average(3, "paper") == ExactValue({2: Fraction(-32, 15)})

    def test_paper_n2(self):
        assert closed_form_average(2, "paper") == ExactValue({3: Fraction(97, 256), 2: Fraction(1, 32)})

    def test_paper_n4_singular(self):
        with pytest.raises(SingularFormula):
            closed_form_average(4, "paper")

    def test_paper_general(self):
        # 96 / (25 * 21) at n=5, pi^4
        assert closed_form_average(5, "paper") == ExactValue({4: Fraction(96, 525)})

    def test_derived_n2(self):
        assert closed_form_average(2, "derived") == ExactValue({2: Fraction(1, 4)})

    def test_raw_scales(self):
        assert closed_form_average(3, "derived", RAW) == ExactValue({2: Fraction(3, 10)})
        assert closed_form_average(3, "paper", RAW) == ExactValue({2: Fraction(-64, 15)})

    @pytest.mark.parametrize("n", range(2, 9))
    def test_derived_matches_quadrature(self, n):
        assert exact_to_real(closed_form_average(n)) == pytest.approx(average_quadrature(n), rel=1e-10)

    def test_unknown_source(self):
        with pytest.raises(ValueError):
            closed_form_average(3, "folklore")


class TestAverageMC:
    def test_n2(self):
        est = average_mc(SamplerConfig(2, 1_000_000, 42))
        assert abs(est.value - PI2 / 4) <= 4 * est.stderr
        assert abs(est.value - average_quadrature(2)) <= 4 * est.stderr

    def test_n3(self):
        est = average_mc(SamplerConfig(3, 1_000_000, 7))
        assert abs(est.value - 3 * PI2 / 20) <= 4 * est.stderr

    def test_constant_integrand(self):
        for n in (2, 5):
            est = average_mc(SamplerConfig(n, 10_000, 1), integrand=lambda Z: np.ones(Z.shape[0]))
            assert est.value == 1.0 and est.stderr == 0.0

    def test_worker_count_does_not_change_bits(self):
        cfg = SamplerConfig(3, 300_001, 99)
        ref = average_mc(cfg, workers=1)
        for w in (2, 3, 8):
            assert average_mc(cfg, workers=w) == ref

    def test_seed_matters(self):
        a = average_mc(SamplerConfig(2, 10_000, 1))
        b = average_mc(SamplerConfig(2, 10_000, 2))
        assert a.value != b.value

    def test_estimate_fields(self):
        est = average_mc(SamplerConfig(2, 10_000, 5, RAW))
        assert est.samples == 10_000 and est.seed == 5 and est.convention is RAW
        assert est.period == ExactValue({2: 1})
        assert 0 <= est.reduced < PI2
        assert est.stderr >= 0

    def test_stderr_scaling(self):
        se = [average_mc(SamplerConfig(3, s, 11)).stderr for s in (10_000, 100_000, 1_000_000)]
        for a, b in zip(se, se[1:]):
            ratio = a / b
            assert math.sqrt(10) / 2 <= ratio <= 2 * math.sqrt(10)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SamplerConfig(1, 1000)
        with pytest.raises(ValueError):
            SamplerConfig(2, 1000, seed=2**64)


class TestDiscrepancyReport:
    def test_n3_flags_paper(self):
        rep = discrepancy_report(3, SamplerConfig(3, 200_000, 3))
        assert abs(rep.mc.value - rep.quadrature) <= 4 * rep.mc.stderr
        assert rep.paper_real < 0 < rep.quadrature and rep.mc.value > 0
        assert rep.flags_paper_inconsistent
        assert rep.paper_order == "Finite(15)"

    def test_n2_gap(self):
        rep = discrepancy_report(2, SamplerConfig(2, 100_000, 3))
        assert rep.gaps["paper_minus_quadrature"] == pytest.approx(9.58949606065655654, rel=1e-12)
        assert rep.flags_paper_inconsistent
        assert rep.paper_order == "InfiniteByIrrationality(m=3)"
        assert rep.derived_order == "Finite(2)"

    def test_n4_singular(self):
        rep = discrepancy_report(4, SamplerConfig(4, 10_000, 3))
        assert rep.paper is None
        assert rep.to_json()["paper"] == "singular"
        assert "paper formula singular at n=4" in rep.verdicts

    def test_self_test_channel(self):
        rep = discrepancy_report(2, SamplerConfig(2, 10_000, 3), self_test=True)
        assert rep.self_test == {"value": 1.0, "stderr": 0.0, "expected": 1.0, "gap": 0.0}

    def test_json_schema(self):
        data = discrepancy_report(3, SamplerConfig(3, 10_000, 3)).to_json()
        assert set(data) >= {"n", "convention", "mc", "quadrature", "paper", "derived", "reduced", "verdicts"}
        assert set(data["mc"]) == {"value", "stderr", "samples", "seed"}
        assert data["paper"]["exact"] == {"terms": [[2, "-32/15"]]}
        assert data["derived"]["exact"] == {"terms": [[2, "3/20"]]}
        assert set(data["reduced"]) == {"value", "period"}
