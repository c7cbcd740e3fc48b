"""Special functions of complex argument.

Scalar, pure functions built on :mod:`cmath`. Gamma is a 9-term Lanczos
approximation (g = 7) on Re z >= 1/2, continued to the left half-plane with
the upward recurrence, which keeps the principal branch of log-gamma and
stays accurate next to the poles. Bessel functions of complex order use the
ascending series only; they are meant for moderate argument (|z| <~ 10).
"""

from __future__ import annotations

import cmath
import math

from .errors import AccuracyError, GammaPoleError

__all__ = [
    "ln_gamma",
    "gamma",
    "rgamma",
    "bessel_j_reduced",
    "bessel_j_complex_order",
    "spherical_bessel_j",
    "spherical_bessel_y",
    "spherical_hankel_1",
    "spherical_hankel_2",
    "spherical_bessel_j_deriv",
    "spherical_bessel_y_deriv",
    "spherical_hankel_1_deriv",
    "spherical_hankel_2_deriv",
]

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Below this modulus the spherical functions switch to their power series.
_SPHERICAL_SERIES_RADIUS = 0.5


def _is_gamma_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_ln_gamma(z: complex) -> complex:
    # valid for Re z >= 1/2
    z = z - 1.0
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def _shift(z: complex) -> int:
    return max(0, math.ceil(0.5 - z.real))


def ln_gamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    Raises :class:`GammaPoleError` at z = 0, -1, -2, ...
    """
    z = complex(z)
    if _is_gamma_pole(z):
        raise GammaPoleError(z)
    n = _shift(z)
    if n == 0:
        return _lanczos_ln_gamma(z)
    acc = 0j
    for j in range(n):
        acc += cmath.log(z + j)
    return _lanczos_ln_gamma(z + n) - acc


def rgamma(z: complex) -> complex:
    """Reciprocal gamma function 1/Gamma(z), entire; exactly 0 at the poles."""
    z = complex(z)
    if _is_gamma_pole(z):
        return 0j
    n = _shift(z)
    base = cmath.exp(-_lanczos_ln_gamma(z + n))
    for j in range(n):
        base *= z + j
    return base


def gamma(z: complex) -> complex:
    z = complex(z)
    if _is_gamma_pole(z):
        raise GammaPoleError(z)
    return 1.0 / rgamma(z)


def bessel_j_reduced(order: complex, v: complex, *, max_terms: int = 2000) -> complex:
    """Entire part of J_order: sum_j (-v)^j / (j! Gamma(order + j + 1)).

    With v = (z/2)^2 this is J_order(z) / (z/2)^order. The reciprocal gammas
    are anchored where Re(order + j + 1) >= 1 and propagated by the gamma
    recurrence in both directions, so terms at gamma poles come out as exact
    zeros instead of divisions by zero.
    """
    order = complex(order)
    v = complex(v)
    j0 = max(0, math.ceil(-order.real))
    r_anchor = rgamma(order + j0 + 1)
    if v == 0:
        if j0 == 0:
            return r_anchor
        r = r_anchor
        for j in range(j0, 0, -1):
            r *= order + j
        return r

    # terms below the anchor
    r = [0j] * (j0 + 1)
    r[j0] = r_anchor
    for j in range(j0, 0, -1):
        r[j - 1] = r[j] * (order + j)
    total = 0j
    coeff = 1.0 + 0j
    for j in range(j0 + 1):
        if j > 0:
            coeff *= -v / j
        total += coeff * r[j]

    term = coeff * r_anchor
    biggest = max(abs(total), abs(term))
    small_run = 0
    for j in range(j0 + 1, max_terms):
        term *= -v / (j * (order + j))
        total += term
        a = abs(term)
        biggest = max(biggest, abs(total))
        if j > abs(v) and a <= 1e-17 * biggest:
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
    raise AccuracyError(
        f"Bessel series did not converge in {max_terms} terms (order={order}, v={v})"
    )


def bessel_j_complex_order(order: complex, arg: complex) -> complex:
    """J_order(arg) from the ascending series, principal branch of (arg/2)^order."""
    order = complex(order)
    arg = complex(arg)
    if arg == 0:
        if order == 0:
            return 1.0 + 0j
        if order.real > 0:
            return 0j
        if _is_gamma_pole(order + 1):
            # J_{-n} = (-1)^n J_n vanishes at the origin
            return 0j
        raise AccuracyError(f"J_{order}(0) is unbounded")
    half = arg / 2.0
    return cmath.exp(order * cmath.log(half)) * bessel_j_reduced(order, half * half)


# -- spherical Bessel family -------------------------------------------------


def _double_factorial_odd(n: int) -> float:
    # (2n+1)!!
    out = 1.0
    for i in range(3, 2 * n + 2, 2):
        out *= i
    return out


def _j_series(l: int, z: complex) -> tuple[complex, complex]:
    """j_l(z) and j_l'(z) from the power series sum_s a_s z^(l+2s) (small |z|)."""
    w = z * z
    a = 1.0 / _double_factorial_odd(l)
    val = 0j
    der = 0j
    w_prev = 0j  # w^(s-1)
    ws = 1.0 + 0j  # w^s
    for s in range(40):
        if s > 0:
            a *= -0.5 / (s * (2 * l + 2 * s + 1))
        t = a * ws
        val += t
        if l > 0:
            der += (l + 2 * s) * t
        elif s > 0:
            der += 2 * s * a * w_prev
        if abs(t) < 1e-18 * abs(val):
            break
        w_prev, ws = ws, ws * w
    if l > 0:
        return z**l * val, z ** (l - 1) * der
    # l = 0: derivative series starts at z^1
    return val, z * der


def spherical_bessel_j(l: int, z: complex) -> complex:
    z = complex(z)
    if abs(z) < _SPHERICAL_SERIES_RADIUS:
        return _j_series(l, z)[0]
    s, c = cmath.sin(z), cmath.cos(z)
    j0 = s / z
    if l == 0:
        return j0
    j1 = s / (z * z) - c / z
    jm, jc = j0, j1
    for n in range(1, l):
        jm, jc = jc, (2 * n + 1) / z * jc - jm
    return jc


def spherical_bessel_y(l: int, z: complex) -> complex:
    z = complex(z)
    s, c = cmath.sin(z), cmath.cos(z)
    y0 = -c / z
    if l == 0:
        return y0
    y1 = -c / (z * z) - s / z
    ym, yc = y0, y1
    for n in range(1, l):
        ym, yc = yc, (2 * n + 1) / z * yc - ym
    return yc


def spherical_hankel_1(l: int, z: complex) -> complex:
    return spherical_bessel_j(l, z) + 1j * spherical_bessel_y(l, z)


def spherical_hankel_2(l: int, z: complex) -> complex:
    return spherical_bessel_j(l, z) - 1j * spherical_bessel_y(l, z)


def spherical_bessel_j_deriv(l: int, z: complex) -> complex:
    z = complex(z)
    if abs(z) < _SPHERICAL_SERIES_RADIUS:
        return _j_series(l, z)[1]
    if l == 0:
        return -spherical_bessel_j(1, z)
    return spherical_bessel_j(l - 1, z) - (l + 1) / z * spherical_bessel_j(l, z)


def spherical_bessel_y_deriv(l: int, z: complex) -> complex:
    z = complex(z)
    if l == 0:
        return -spherical_bessel_y(1, z)
    return spherical_bessel_y(l - 1, z) - (l + 1) / z * spherical_bessel_y(l, z)


def spherical_hankel_1_deriv(l: int, z: complex) -> complex:
    return spherical_bessel_j_deriv(l, z) + 1j * spherical_bessel_y_deriv(l, z)


def spherical_hankel_2_deriv(l: int, z: complex) -> complex:
    return spherical_bessel_j_deriv(l, z) - 1j * spherical_bessel_y_deriv(l, z)
