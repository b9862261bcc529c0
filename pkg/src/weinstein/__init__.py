"""Generalized Weinstein morphism for the SU(2) 3-sphere in Ham(CP^n, omega_FS)."""

from .arith import OrderReport, PeriodGroup, order_exact, order_numeric, period_generator, reduce_mod
from .core import (
    BallPoint,
    Convention,
    DimensionMismatch,
    ExactValue,
    HypersurfacePoint,
    NonFiniteIntegrand,
    ProjPoint,
    SingularFormula,
    SU2Element,
    WeinsteinError,
    ZeroPeriod,
    exact_add,
    exact_to_real,
    proj_equal,
)
from .forms import (
    FlatDisk,
    Frame,
    GeneralCap,
    QuadratureSpec,
    Warped,
    flat_disk_closed_form,
    integrate_pullback,
    omega_power_eval,
)
from .morphism import (
    MorphismEstimate,
    SamplerConfig,
    a_pointwise,
    average_mc,
    average_quadrature,
    closed_form_average,
    discrepancy_report,
    lemma33_value,
    orbit_point,
)
from .projective import Chart, act_ball, chart_inverse, embed, haar_sample, psi

__version__ = "0.1.0"
