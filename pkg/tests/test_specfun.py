import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polepath import specfun
from polepath.errors import GammaPoleError

from conftest import rel_err


def test_ln_gamma_small_values():
    assert abs(specfun.ln_gamma(1.0)) < 1e-15
    assert abs(specfun.ln_gamma(0.5) - 0.5723649429247001) < 1e-13


@pytest.mark.parametrize("z", [3 + 4j, 0.25 - 7j, 17.5 + 0.1j, 60 - 60j, 0.01 + 0.02j])
def test_ln_gamma_against_mpmath(z):
    ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
    assert rel_err(specfun.ln_gamma(z), ref) < 1e-12


@pytest.mark.parametrize("z", [-3.2 + 0.5j, -10.5 - 2j, -0.7 + 0j])
def test_gamma_left_half_plane(z):
    ref = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
    assert rel_err(specfun.gamma(z), ref) < 1e-11


@pytest.mark.parametrize("n", [0, -1, -7])
def test_gamma_pole_signal(n):
    with pytest.raises(GammaPoleError):
        specfun.ln_gamma(complex(n))
    assert specfun.rgamma(complex(n)) == 0


off_integer = st.complex_numbers(max_magnitude=20, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z - round(z.real)) > 1e-3
)


@settings(max_examples=1000, deadline=None)
@given(off_integer)
def test_gamma_recurrence(z):
    lhs = cmath.exp(specfun.ln_gamma(z + 1))
    rhs = z * cmath.exp(specfun.ln_gamma(z))
    assert rel_err(lhs, rhs) < 1e-11


@settings(max_examples=300, deadline=None)
@given(st.complex_numbers(max_magnitude=8, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z - round(z.real)) > 1e-2))
def test_gamma_reflection(z):
    lhs = specfun.gamma(z) * specfun.gamma(1 - z)
    rhs = math.pi / cmath.sin(math.pi * z)
    assert rel_err(lhs, rhs) < 1e-10


def test_bessel_examples():
    assert abs(specfun.bessel_j_complex_order(0, 0) - 1) < 1e-15
    assert abs(specfun.bessel_j_complex_order(0, 2) - 0.2238907791412357) < 1e-12


@pytest.mark.parametrize(
    "order,arg",
    [(1 - 1j, 1 + 1j), (0.5j, 3.4), (-2.5j, 2 - 1j), (4 + 3j, 7j), (-1.3j, 3.4 * cmath.exp(0.7j)), (12 - 5j, 9.5)],
)
def test_bessel_against_mpmath(order, arg):
    ref = complex(mpmath.besselj(mpmath.mpc(order.real, order.imag), mpmath.mpc(arg.real, arg.imag)))
    assert rel_err(specfun.bessel_j_complex_order(order, arg), ref) < 1e-10


@settings(max_examples=200, deadline=None)
@given(
    st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=6, allow_nan=False, allow_infinity=False),
)
def test_reduced_bessel_term_doubling(order, v):
    # the reduced series is entire in the order, so poles of Gamma are harmless
    base = specfun.bessel_j_reduced(order, v)
    more = specfun.bessel_j_reduced(order, v, max_terms=4000)
    assert abs(base - more) <= 1e-12 * max(abs(base), 1e-300) or base == more


def test_spherical_examples():
    assert specfun.spherical_bessel_j(0, 0) == 1
    assert abs(specfun.spherical_bessel_j(0, 1e-9) - 1) < 1e-15
    h = specfun.spherical_hankel_1(0, 1j)
    expected = math.sinh(1) + 1j * specfun.spherical_bessel_y(0, 1j)
    assert rel_err(specfun.spherical_bessel_j(0, 1j), math.sinh(1)) < 1e-13
    assert rel_err(h, expected) < 1e-13


@pytest.mark.parametrize("l", [0, 1])
@pytest.mark.parametrize("z", [0.3 + 0.1j, 2.0, 5 - 3j, 1e-3j, 40 + 0.5j])
def test_spherical_against_mpmath(l, z):
    mz = mpmath.mpc(z.real, z.imag)
    j_ref = complex(mpmath.sqrt(mpmath.pi / (2 * mz)) * mpmath.besselj(l + 0.5, mz))
    y_ref = complex(mpmath.sqrt(mpmath.pi / (2 * mz)) * mpmath.bessely(l + 0.5, mz))
    assert rel_err(specfun.spherical_bessel_j(l, z), j_ref) < 1e-11
    assert rel_err(specfun.spherical_bessel_y(l, z), y_ref) < 1e-11


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 1), st.complex_numbers(min_magnitude=0.05, max_magnitude=30, allow_nan=False, allow_infinity=False))
def test_hankel_average_is_j(l, z):
    h1, h2 = specfun.spherical_hankel_1(l, z), specfun.spherical_hankel_2(l, z)
    avg = 0.5 * (h1 + h2)
    assert abs(avg - specfun.spherical_bessel_j(l, z)) <= 1e-12 * max(1.0, abs(h1), abs(h2))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 1), st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False, allow_infinity=False))
def test_wronskian(l, z):
    a = specfun.spherical_bessel_j(l, z) * specfun.spherical_bessel_y_deriv(l, z)
    b = specfun.spherical_bessel_j_deriv(l, z) * specfun.spherical_bessel_y(l, z)
    # off the real axis both products grow like exp(2|Im z|) and cancel
    assert abs(a - b - 1 / z**2) <= 1e-13 * max(abs(a), abs(b), abs(1 / z**2))
    if abs(z.imag) <= 3:
        assert rel_err(a - b, 1 / z**2) < 1e-10
