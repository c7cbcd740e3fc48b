import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polepath.errors import ConfigError, RecursionSingularError
from polepath.potentials import (
    Family,
    PotentialSpec,
    axis_function,
    fixed_zero,
    hulthen_pole_closed_form,
    moving_pole_function,
    pole_condition_exponential,
    pole_condition_hulthen,
    pole_condition_series_jost,
    pole_condition_square,
    s_matrix,
)
from polepath.rootfind import count_zeros_in_rectangle, find_zeros_in_rectangle, refine_root
from polepath.sweep import axis_thresholds, count_axis_poles

EXP = PotentialSpec(Family.EXPONENTIAL, 10.0)
HUL = PotentialSpec(Family.HULTHEN, 10.0)
SQ0 = PotentialSpec(Family.SQUARE, 10.0)
SQ1 = PotentialSpec(Family.SQUARE, 10.0, l=1)
GH = PotentialSpec(Family.GENERALIZED_HULTHEN, 10.0, c=-0.5)
ALL = [EXP, HUL, SQ0, SQ1, GH]

momenta = st.complex_numbers(max_magnitude=250, allow_nan=False, allow_infinity=False)
phases = st.floats(-2 * math.pi, 4 * math.pi)


def mp_exponential_pole(spec, alpha, seed):
    """Zero of J_{-i nu}(phi) in k via mpmath, independent of the package."""
    phi = 2 * spec.r0 * mpmath.sqrt(2 * spec.m * spec.U * mpmath.expj(alpha))
    f = lambda k: mpmath.besselj(-2j * spec.r0 * k, phi)  # noqa: E731
    return complex(mpmath.findroot(f, mpmath.mpc(seed.real, seed.imag)))


def test_spec_validation():
    with pytest.raises(ConfigError):
        PotentialSpec(Family.EXPONENTIAL, -1.0)
    with pytest.raises(ConfigError):
        PotentialSpec(Family.GENERALIZED_HULTHEN, 1.0, c=1.0)
    assert PotentialSpec(Family.HULTHEN, 1.0).c == -1.0
    assert fixed_zero(3, EXP) == pytest.approx(-210j)


def test_exponential_first_order_offset():
    spec = PotentialSpec(Family.EXPONENTIAL, 0.1)
    eps = 2 * spec.m * spec.r0**2 * spec.U
    assert eps == pytest.approx(0.009592, abs=1e-6)
    D = moving_pole_function(spec)
    r = refine_root(lambda k: D(k, 0.0, spec.U), -70j)
    offset = r.k - fixed_zero(1, spec)
    assert abs(offset.real) < 1e-10
    assert offset.imag == pytest.approx(70 * eps, rel=0.02)
    assert abs(r.k - mp_exponential_pole(spec, 0.0, r.k)) < 1e-9


@pytest.mark.parametrize("alpha", [0.0, 1.0, math.pi, 4.5])
def test_exponential_poles_against_mpmath(alpha):
    spec = PotentialSpec(Family.EXPONENTIAL, 4.0)
    D = moving_pole_function(spec)
    for n in (1, 2, 3):
        r = refine_root(lambda k: D(k, alpha, spec.U), fixed_zero(n, spec) + 5)
        assert abs(r.k - mp_exponential_pole(spec, alpha, r.k)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False), st.floats(0, 2 * math.pi))
def test_exponential_4pi_periodic(k, alpha):
    spec = PotentialSpec(Family.EXPONENTIAL, 3.0)
    a = pole_condition_exponential(k, alpha, spec)
    b = pole_condition_exponential(k, alpha + 4 * math.pi, spec)
    assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_hulthen_closed_form_numbers():
    U_th = 1 / (2 * 940 * (1 / 140) ** 2)
    assert U_th == pytest.approx(10.4255, abs=1e-4)
    assert abs(hulthen_pole_closed_form(1, 0.0, PotentialSpec(Family.HULTHEN, U_th))) < 1e-10
    k = hulthen_pole_closed_form(1, 0.0, HUL)
    assert k.imag == pytest.approx(-2.857, abs=1e-3)
    with pytest.raises(ValueError):
        hulthen_pole_closed_form(0, 0.0, HUL)


@pytest.mark.parametrize("U", [1.0, 10.0, 50.0])
@pytest.mark.parametrize("alpha", [0.0, math.pi / 3, math.pi, 1.5 * math.pi])
def test_hulthen_numeric_matches_closed_form(U, alpha):
    spec = PotentialSpec(Family.HULTHEN, U)
    D = moving_pole_function(spec)
    for n in range(1, 6):
        exact = hulthen_pole_closed_form(n, alpha, spec)
        r = refine_root(lambda k: D(k, alpha, U), 0.99 * exact)
        assert abs(r.k - exact) < 1e-8 * max(1, abs(exact))


def test_hulthen_literal_condition_vanishes_at_closed_form():
    for n in (1, 2, 3):
        k = hulthen_pole_closed_form(n, 0.7, HUL)
        scale = abs(pole_condition_hulthen(k + 5, 0.7, HUL))
        assert abs(pole_condition_hulthen(k, 0.7, HUL)) < 1e-10 * scale


def test_series_free_limit():
    spec = PotentialSpec(Family.GENERALIZED_HULTHEN, 1e-12, c=0.3)
    for k in (10 + 3j, -40j + 7, 120.0):
        assert abs(pole_condition_series_jost(k, 0.4, spec) - 1) < 1e-10


def test_series_recursion_singular_at_fixed_zero():
    with pytest.raises(RecursionSingularError):
        pole_condition_series_jost(fixed_zero(2, EXP), 0.0, EXP)
    # the regularised function is finite there
    D = moving_pole_function(EXP, engine="series")
    assert cmath.isfinite(D(fixed_zero(2, EXP), 0.0, EXP.U))


@pytest.mark.parametrize("alpha", [0.0, math.pi / 2, math.pi])
def test_series_engine_matches_bessel_zero_set(alpha):
    closed = moving_pole_function(EXP)
    series = moving_pole_function(EXP, engine="series")
    box = (-300 - 300j, 300 + 100j)
    n_closed = count_zeros_in_rectangle(lambda k: closed(k, alpha, EXP.U), box)
    n_series = count_zeros_in_rectangle(lambda k: series(k, alpha, EXP.U), box)
    assert n_closed == n_series > 0
    found = find_zeros_in_rectangle(lambda k: closed(k, alpha, EXP.U), box)
    assert len(found) == n_closed
    for r in found:
        b = refine_root(lambda k: series(k, alpha, EXP.U), r.k).k
        assert abs(r.k - b) < 1e-8


def test_generalized_hulthen_series_against_mpmath_recursion():
    spec = PotentialSpec(Family.GENERALIZED_HULTHEN, 12.0, c=-0.6)
    k, alpha = 30 - 50j, 0.9
    g = 2 * spec.m * spec.r0**2 * spec.U * mpmath.expj(alpha)
    w = -2j * spec.r0 * mpmath.mpc(k.real, k.imag)
    a = [mpmath.mpc(1)]
    for n in range(1, 400):
        conv = sum(a[n - j] * (-spec.c) ** (j - 1) for j in range(1, n + 1))
        a.append(-g * conv / (n * (n + w)))
    ref = complex(mpmath.fsum(a))
    assert abs(pole_condition_series_jost(k, alpha, spec) - ref) < 1e-11 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=300, allow_nan=False, allow_infinity=False), phases)
def test_square_branch_independence_s_wave(k, alpha):
    # h_l(k r0) is singular at k = 0, so the literal form is sampled away from it
    K = cmath.sqrt(k * k + 2 * SQ0.m * SQ0.U * cmath.exp(1j * alpha))
    a = pole_condition_square(k, alpha, SQ0, K=K)
    b = pole_condition_square(k, alpha, SQ0, K=-K)
    assert abs(a - b) <= 1e-10 * max(abs(a), 1e-300) + 1e-14


def test_square_s_wave_thresholds():
    th = axis_thresholds(PotentialSpec(Family.SQUARE, 1.0), (1.0, 240.0))
    exact = [math.pi**2 * (2 * n - 1) ** 2 / (8 * 940 * (1 / 140) ** 2) for n in (1, 2)]
    assert th[:2] == pytest.approx(exact, rel=1e-9)
    assert th[0] == pytest.approx(25.7, abs=0.1) and th[1] == pytest.approx(231.5, abs=0.1)


def test_square_single_attractive_antibound():
    spec = PotentialSpec(Family.SQUARE, 1.0)
    roots = count_axis_poles(spec, 0.0)
    assert len(roots) == 1 and roots[0] < 0


@pytest.mark.parametrize("spec", ALL, ids=lambda s: f"{s.family.value}-l{s.l}")
@settings(max_examples=40, deadline=None)
@given(k=momenta, alpha=phases)
def test_zero_set_mirror_symmetry(spec, k, alpha):
    D = moving_pole_function(spec)
    # D(-k*, -alpha)* is D(k, alpha) up to a constant phase for these functions
    a = D(k, alpha, spec.U)
    b = D(-k.conjugate(), -alpha, spec.U).conjugate()
    assert abs(abs(a) - abs(b)) <= 1e-9 * max(abs(a), 1e-300) + 1e-300


@pytest.mark.parametrize("spec", ALL, ids=lambda s: f"{s.family.value}-l{s.l}")
@pytest.mark.parametrize("alpha", [0.0, math.pi])
def test_axis_values_are_real(spec, alpha):
    D = moving_pole_function(spec)
    ph = 1j if spec.family is Family.SQUARE else 1.0
    for kappa in (-250.0, -70.3, 0.0, 12.5, 180.0):
        v = ph * D(1j * kappa, alpha, spec.U)
        assert abs(v.imag) <= 1e-12 * max(abs(v), 1e-300)
    g = axis_function(spec)
    ubar = spec.U if alpha == 0 else -spec.U
    assert g(-33.0, ubar) == pytest.approx((ph * D(-33j, alpha, spec.U)).real)


def _regular(spec, k, alpha):
    try:
        return s_matrix(k, alpha, spec), s_matrix(-k, alpha, spec)
    except ZeroDivisionError:
        return None


@pytest.mark.parametrize("spec", ALL, ids=lambda s: f"{s.family.value}-l{s.l}")
@settings(max_examples=60, deadline=None)
@given(k=st.complex_numbers(min_magnitude=1, max_magnitude=200, allow_nan=False, allow_infinity=False), alpha=phases)
def test_s_matrix_unitarity_relation(spec, k, alpha):
    pair = _regular(spec, k, alpha)
    if pair is None or not all(map(cmath.isfinite, pair)):
        return
    s1, s2 = pair
    if max(abs(s1), abs(s2)) > 1e6:
        return  # too close to a pole for the product to be well conditioned
    assert abs(s1 * s2 - 1) < 1e-10


@pytest.mark.parametrize("spec", ALL, ids=lambda s: f"{s.family.value}-l{s.l}")
@settings(max_examples=60, deadline=None)
@given(k=st.complex_numbers(min_magnitude=1, max_magnitude=200, allow_nan=False, allow_infinity=False), alpha=st.floats(0, 2 * math.pi))
def test_s_matrix_conjugation(spec, k, alpha):
    try:
        a = s_matrix(k, -alpha, spec).conjugate()
        b = s_matrix(-k.conjugate(), alpha % (2 * math.pi), spec)
    except ZeroDivisionError:
        return
    if max(abs(a), abs(b)) > 1e6:
        return
    assert abs(a - b) < 1e-9 * max(1.0, abs(a))


@pytest.mark.parametrize("family", [Family.EXPONENTIAL, Family.HULTHEN, Family.SQUARE])
def test_s_matrix_free_limit(family):
    spec = PotentialSpec(family, 1e-12)
    for k in (15 + 2j, 80.0, -30 - 10j):
        assert abs(s_matrix(k, 0.3, spec) - 1) < 1e-8
