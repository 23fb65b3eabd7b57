import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qmarket.errors import InvalidParameterError, ZeroAmplitudeError
from qmarket.spectral import supply_amplitude, to_supply
from qmarket.strategy import density_q, moments, standard_gaussian
from qmarket.tactics import IDENTITY, Tactic, apply, approach_pole, compose, from_z, shift_only

from conftest import make_strategy, quad_line, random_strategy, superpositions

finite = lambda lo, hi: st.floats(lo, hi, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite(-3, 3), finite(-3, 3))
tactics = st.builds(Tactic, finite(-4, 4), cplx, cplx).filter(lambda t: True)


def _tactic_or_skip(delta, xi0, xi1):
    if xi0 == 0 and xi1 == 0:
        xi0 = 1.0
    return Tactic(delta, xi0, xi1)


tactic_st = st.builds(_tactic_or_skip, finite(-4, 4), cplx, cplx)


def test_from_z_poles():
    assert from_z(3.0, 0) == Tactic(3.0, 1, 0)
    assert from_z(3.0, complex(math.inf, 0)) == Tactic(3.0, 0, 1)
    assert from_z(3.0, math.inf).z == complex(math.inf, 0)
    t = from_z(3.0, 0.9)
    assert (t.xi0, t.xi1) == (1, 0.9)
    assert t.z == 0.9


def test_origin_is_not_a_tactic():
    with pytest.raises(InvalidParameterError):
        Tactic(1.0, 0, 0)


def test_identity_pole_leaves_strategy_unchanged():
    s = make_strategy([1.0, 0.5j], [0.0, 2.0])
    assert apply(Tactic(2.5, 1, 0), s) == s


def test_fig1_construction():
    s = apply(from_z(3.0, 0.9), standard_gaussian())
    assert [(c.weight, c.shift, c.width) for c in s.components] == [(1, 0, 1), (0.9, 3, 1)]


def test_full_cancellation_raises():
    with pytest.raises(ZeroAmplitudeError):
        apply(Tactic(0.0, 1, -1), standard_gaussian())


def test_compose_examples():
    assert compose(Tactic(0, 1, 1), Tactic(0, 1, 1)) == Tactic(0, 1, 1)
    assert compose(Tactic(1, 1, 2), Tactic(2, 3, 4)) == Tactic(3, 3, 8)


@given(tactic_st)
def test_compose_identity(t):
    assert compose(IDENTITY, t) == t
    assert compose(t, IDENTITY) == t


@given(tactic_st, tactic_st)
def test_compose_commutative(a, b):
    assert compose(a, b) == compose(b, a)


@given(tactic_st, tactic_st, tactic_st)
def test_compose_associative_on_exact_values(a, b, c):
    # Use dyadic rationals so floating-point products are exact.
    r = lambda x: round(x * 8) / 8
    a, b, c = (Tactic(r(t.delta), complex(r(t.xi0.real), r(t.xi0.imag)) or 1, complex(r(t.xi1.real), r(t.xi1.imag))) for t in (a, b, c))
    assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_tactic_round_trip_dict():
    t = Tactic(0.2, 1 - 2j, -0.5j)
    assert Tactic.from_dict(t.to_dict()) == t


@settings(max_examples=60, deadline=None)
@given(superpositions(max_components=3), finite(-3, 3), cplx, cplx, finite(0.1, 5), finite(-math.pi, math.pi))
def test_projective_invariance(s, delta, xi0, xi1, lam_r, lam_phi):
    if abs(xi0) < 1e-3 and abs(xi1) < 1e-3:
        xi0 = 1.0
    lam = cmath.rect(lam_r, lam_phi)
    try:
        a = apply(Tactic(delta, xi0, xi1), s)
    except ZeroAmplitudeError:
        return
    if a._norm < 1e-6 * sum(abs(c.weight) ** 2 for c in a.components):
        return
    b = apply(Tactic(delta, lam * xi0, lam * xi1), s)
    q = np.linspace(-12, 12, 97)
    assert np.max(np.abs(density_q(a, q) - density_q(b, q))) <= 1e-12


pole_st = st.builds(
    lambda d, lam, at_shift: Tactic(d, 0, lam) if at_shift else Tactic(d, lam, 0),
    finite(-4, 4),
    cplx.filter(lambda c: abs(c) > 1e-3),
    st.booleans(),
)


@settings(max_examples=60, deadline=None)
@given(pole_st, pole_st)
def test_composition_homomorphism_at_poles(a, b):
    if (a.xi0 == 0) != (b.xi0 == 0):
        b = Tactic(b.delta, b.xi1, b.xi0)
    s = standard_gaussian()
    lhs = apply(compose(a, b), s)
    rhs = apply(a, apply(b, s))
    q = np.linspace(-12, 12, 97)
    assert np.allclose(density_q(lhs, q), density_q(rhs, q), atol=1e-12)


def test_opposite_poles_annihilate_under_composition():
    with pytest.raises(InvalidParameterError):
        compose(Tactic(1.0, 1, 0), Tactic(2.0, 0, 1))


def test_composition_is_not_a_homomorphism_off_the_poles():
    # Iterating two superposition tactics yields four shifted copies; the
    # coefficient product keeps only the two extreme ones.
    a, b = Tactic(0.7, 1, 0.4), Tactic(1.3, 1, -0.6j)
    s = standard_gaussian()
    lhs, rhs = apply(compose(a, b), s), apply(a, apply(b, s))
    assert len(lhs.components) == 2 and len(rhs.components) == 4
    diff = quad_line(lambda q: abs(density_q(lhs, q) - density_q(rhs, q)), -20, 20)
    assert diff > 1e-3


def test_iterated_poles_match_composition_on_superpositions_by_quadrature():
    rng = np.random.default_rng(11)
    for _ in range(10):
        s = random_strategy(rng)
        a = Tactic(rng.uniform(-2, 2), 0, complex(*rng.uniform(0.5, 1.5, 2)))
        b = Tactic(rng.uniform(-2, 2), 0, complex(*rng.uniform(0.5, 1.5, 2)))
        lhs, rhs = apply(compose(a, b), s), apply(a, apply(b, s))
        diff = quad_line(lambda q: abs(density_q(lhs, q) - density_q(rhs, q)), -20, 20)
        assert diff < 1e-9


def test_arg_zero_maximizes_midpoint_overlap():
    delta, r = 3.0, 0.9
    args = np.linspace(-math.pi, math.pi, 64, endpoint=False)
    mids = [density_q(apply(from_z(delta, cmath.rect(r, phi)), standard_gaussian()), delta / 2) for phi in args]
    assert int(np.argmax(mids)) == int(np.argmin(np.abs(args)))


def test_shift_only_examples():
    s = make_strategy([1.0, 0.3j], [0.0, 1.0])
    assert shift_only(0.0, s) == s
    q0, sigma = moments(shift_only(3.0, standard_gaussian()))
    assert (q0, sigma) == pytest.approx((3.0, 1.0), abs=1e-14)


def test_shift_only_equals_pure_shift_tactic():
    s = make_strategy([1.0, 0.3j], [0.0, 1.0], [1.0, 0.5])
    assert apply(from_z(2.2, math.inf), s) == shift_only(2.2, s)


def test_shift_keeps_supply_magnitude():
    s = make_strategy([1.0, -0.4 + 0.5j], [0.0, 1.3])
    p = np.linspace(-5, 5, 201)
    a = np.abs(supply_amplitude(to_supply(s), p))
    b = np.abs(supply_amplitude(to_supply(shift_only(2.7, s)), p))
    assert np.allclose(a, b, atol=1e-15, rtol=1e-13)


def test_merge_threshold_keeps_delta_zero_exact():
    s = apply(Tactic(0.0, 1, 0.5), standard_gaussian())
    assert len(s.components) == 1
    assert s.components[0].weight == 1.5


def test_approach_pole_sequences():
    to_identity = [t.z for t in approach_pole(3.0, "identity", 5)]
    to_shift = [t.z for t in approach_pole(3.0, "shift", 5)]
    assert np.all(np.diff(np.abs(to_identity)) < 0) and abs(to_identity[-1]) < 0.05
    assert np.all(np.diff(np.abs(to_shift)) > 0) and abs(to_shift[-1]) > 20
    with pytest.raises(InvalidParameterError):
        list(approach_pole(1.0, "north", 2))
