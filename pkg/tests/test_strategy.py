import math
import warnings

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings

from qmarket.errors import (
    InvalidParameterError,
    ResolutionWarning,
    TruncationWarning,
    ZeroAmplitudeError,
)
from qmarket.strategy import (
    GaussianComponent,
    GridSpec,
    Representation,
    Strategy,
    amplitude_q,
    classical_mixture_density,
    density_q,
    moments,
    moments_quadrature,
    norm_squared,
    norm_squared_quadrature,
    sample,
    standard_gaussian,
    upper_tail,
)
from qmarket.tactics import apply, from_z, shift_only

from conftest import make_strategy, quad_line, superpositions

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def test_standard_gaussian_peak():
    assert density_q(standard_gaussian(1.0), 0.0) == pytest.approx(INV_SQRT_2PI, abs=1e-15)


def test_standard_gaussian_moments_exact():
    assert moments(standard_gaussian()) == (0.0, 1.0)


def test_standard_gaussian_integrates_to_one():
    s = standard_gaussian()
    total = quad_line(lambda q: density_q(s, q), -8.0, 8.0, [0.0])
    assert abs(total - 1.0) < 1e-9


@pytest.mark.parametrize("hbar", [0.0, -1.0])
def test_standard_gaussian_rejects_bad_hbar(hbar):
    with pytest.raises(InvalidParameterError):
        standard_gaussian(hbar)


def test_amplitude_at_origin():
    assert amplitude_q(standard_gaussian(), 0.0) == pytest.approx((2 * math.pi) ** -0.25, abs=1e-15)


def test_amplitude_two_components_midpoint():
    s = make_strategy([1.0, 0.9], [0.0, 3.0])
    q, w1, a1 = sp.symbols("q w1 a1")
    expr = (sp.exp(-(q**2) / 4) + w1 * sp.exp(-((q - a1) ** 2) / 4)) * (2 * sp.pi) ** sp.Rational(-1, 4)
    symbolic = float(expr.subs({q: sp.Rational(3, 2), w1: sp.Rational(9, 10), a1: 3}).evalf(30))
    expected = 1.9 * (2 * math.pi) ** -0.25 * math.exp(-0.5625)
    got = amplitude_q(s, 1.5)
    assert got == pytest.approx(expected, abs=1e-15)
    assert got.real == pytest.approx(symbolic, abs=1e-15)


def test_imaginary_weight_has_no_cross_term_in_density():
    s = make_strategy([1.0, 0.9j], [0.0, 3.0])
    q = np.linspace(-5, 8, 101)
    incoherent = (np.exp(-(q**2) / 2) + 0.81 * np.exp(-((q - 3) ** 2) / 2)) / math.sqrt(2 * math.pi)
    assert np.allclose(np.abs(amplitude_q(s, q)) ** 2, incoherent, atol=1e-15, rtol=0)


def test_norm_single_component():
    assert norm_squared(standard_gaussian()) == pytest.approx(1.0, abs=1e-15)


def test_norm_two_components_closed_form_and_quadrature():
    s = make_strategy([1.0, 0.9], [0.0, 3.0])
    expected = 1 + 0.81 + 2 * 0.9 * math.exp(-9 / 8)
    assert norm_squared(s) == pytest.approx(expected, abs=1e-14)
    numeric = quad_line(lambda q: abs(amplitude_q(s, q)) ** 2, -30, 30, [0.0, 3.0])
    assert abs(numeric - expected) < 1e-9


def test_general_width_overlap():
    s = make_strategy([1.0, 1.0], [0.0, 1.3], [0.7, 1.9])
    sj, sk, d = 0.7, 1.9, 1.3
    cross = math.sqrt(2 * sj * sk / (sj**2 + sk**2)) * math.exp(-(d**2) / (4 * (sj**2 + sk**2)))
    assert norm_squared(s) == pytest.approx(2 + 2 * cross, abs=1e-14)
    assert norm_squared_quadrature(s) == pytest.approx(2 + 2 * cross, abs=1e-9)


def test_complete_cancellation_rejected():
    with pytest.raises(ZeroAmplitudeError):
        make_strategy([1.0, -1.0], [0.0, 0.0])


@pytest.mark.parametrize(
    "kwargs",
    [dict(weight=complex("nan")), dict(weight=1.0, width=0.0), dict(weight=1.0, width=-2.0), dict(weight=1.0, shift=math.inf)],
)
def test_component_invariants(kwargs):
    with pytest.raises(InvalidParameterError):
        GaussianComponent(**kwargs)


def test_empty_strategy_rejected():
    with pytest.raises(InvalidParameterError):
        Strategy(())


def test_constructive_interference_exceeds_mixture():
    s = apply(from_z(3.0, 0.9), standard_gaussian())
    assert density_q(s, 1.5) > classical_mixture_density(0.9, 3.0, 1.5)


def test_destructive_interference_below_mixture():
    s = apply(from_z(3.0, -0.9), standard_gaussian())
    assert density_q(s, 1.5) < classical_mixture_density(0.9, 3.0, 1.5)


def test_mixture_limits():
    q = np.linspace(-4, 4, 9)
    assert np.allclose(classical_mixture_density(0.0, 3.0, q), np.exp(-(q**2) / 2) * INV_SQRT_2PI, atol=1e-16)
    assert classical_mixture_density(1e9, 3.0, 3.0) == pytest.approx(INV_SQRT_2PI, abs=1e-15)
    assert classical_mixture_density(complex(math.inf, 0), 3.0, 3.0) == pytest.approx(INV_SQRT_2PI, abs=1e-16)


def test_mixture_integrates_to_one():
    total = quad_line(lambda q: classical_mixture_density(0.9, 3.0, q), -30, 30, [0.0, 3.0])
    assert abs(total - 1.0) < 1e-10


def test_moments_of_shifted_gaussian():
    q0, sigma = moments(shift_only(3.0, standard_gaussian()))
    assert q0 == pytest.approx(3.0, abs=1e-14)
    assert sigma == pytest.approx(1.0, abs=1e-14)


def test_moments_superposition_against_quadrature():
    s = apply(from_z(3.0, 0.9), standard_gaussian())
    m0 = quad_line(lambda q: density_q(s, q), -30, 30, [0.0, 3.0])
    m1 = quad_line(lambda q: q * density_q(s, q), -30, 30, [0.0, 3.0])
    m2 = quad_line(lambda q: q * q * density_q(s, q), -30, 30, [0.0, 3.0])
    q0, sigma = moments(s)
    assert q0 == pytest.approx(m1 / m0, abs=1e-10)
    assert sigma == pytest.approx(math.sqrt(m2 / m0 - (m1 / m0) ** 2), abs=1e-9)
    assert moments_quadrature(s) == pytest.approx((q0, sigma), abs=1e-9)


def test_upper_tail_against_quadrature():
    s = make_strategy([1.0, -0.7 + 0.2j], [0.0, 1.1], [1.0, 0.8])
    for q in (-2.0, 0.3, 1.7):
        num = quad_line(lambda x: density_q(s, x), q, 40.0, [1.1])
        assert upper_tail(s, q) == pytest.approx(num, abs=1e-11)


def test_sample_normalized():
    smp = sample(standard_gaussian(), GridSpec(-8, 8, 1024))
    assert smp.representation is Representation.DEMAND
    assert abs(smp.norm_squared() - 1.0) < 1e-8


def test_sample_two_points_warns_but_works():
    with pytest.warns(ResolutionWarning):
        smp = sample(standard_gaussian(), GridSpec(-8, 8, 2))
    assert smp.values.shape == (2,)


def test_sample_truncation_warning():
    s = apply(from_z(3.0, 0.9), standard_gaussian())
    with pytest.warns(TruncationWarning):
        sample(s, GridSpec(-1, 1, 256))


@pytest.mark.parametrize("lo,hi,n", [(1, 1, 10), (2, 1, 10), (0, 1, 1), (0, 1, 2.5)])
def test_degenerate_grid(lo, hi, n):
    with pytest.raises(InvalidParameterError):
        GridSpec(lo, hi, n)


def test_grid_parse():
    g = GridSpec.parse("-6:9:1024")
    assert (g.lo, g.hi, g.n) == (-6.0, 9.0, 1024)
    assert g.spacing == pytest.approx(15 / 1023)
    with pytest.raises(InvalidParameterError):
        GridSpec.parse("1:2")


@pytest.mark.parametrize("z", [0.9j, -0.9j, math.sqrt(0.9) * 1j])
@pytest.mark.parametrize("delta", [3.0, 0.2])
def test_imaginary_z_reproduces_mixture(z, delta):
    s = apply(from_z(delta, z), standard_gaussian())
    q = np.linspace(-8, 11, 2001)
    assert np.max(np.abs(density_q(s, q) - classical_mixture_density(z, delta, q))) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(superpositions())
def test_norm_closed_form_matches_quadrature(s):
    num = norm_squared_quadrature(s)
    assert math.isclose(norm_squared(s), num, rel_tol=1e-9, abs_tol=1e-9)


@settings(max_examples=40, deadline=None)
@given(superpositions(max_components=3))
def test_density_nonnegative_and_normalized(s):
    lo, hi = s.support(12.0)
    q = np.linspace(lo, hi, 501)
    assert np.all(density_q(s, q) >= 0)
    total = quad_line(lambda x: density_q(s, x), lo, hi, [c.shift for c in s.components])
    assert abs(total - 1.0) < 1e-9


@settings(max_examples=40, deadline=None)
@given(superpositions(max_components=3))
def test_translation_covariance(s):
    t = shift_only(1.7, s)
    q = np.linspace(-10, 10, 41)
    assert np.allclose(density_q(t, q), density_q(s, q - 1.7), atol=1e-14, rtol=1e-12)
