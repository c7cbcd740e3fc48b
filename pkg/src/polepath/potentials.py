"""Pole conditions and S-matrix elements for the supported potential families.

Conventions: hbar = c = 1, momenta and strengths in MeV, ranges in 1/MeV. The
potential is ``exp(i alpha) * V0(r)`` with ``V0 = -U exp(-r/r0) / (1 + c exp(-r/r0))``
for the exponential-tail families and ``V0 = -U`` inside ``r0`` for the square
well. S = f(k)/f(-k) and the moving poles are the zeros of f(-k).

Two kinds of pole condition are exposed for each family:

* the literal Jost-function expressions (``pole_condition_*``), which keep
  the fixed-pole structure and branch conventions of the closed forms;
* :func:`moving_pole_function`, an entire, branch-free function of k whose
  zeros are exactly the moving poles. The tracer and the root finders work
  with this one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np
from scipy import special

from . import specfun
from .errors import (
    AccuracyError,
    ConfigError,
    GammaPoleError,
    RecursionSingularError,
    SMatrixPoleError,
)

DEFAULT_MASS = 940.0
DEFAULT_R0 = 1.0 / 140.0

# hard cap on the number of series Jost terms
SERIES_MAX_TERMS = 20000
# |n + w| below this (w = -2 i r0 k) counts as sitting on a recursion singularity
SERIES_SINGULAR_GUARD = 1e-13


class Family(str, Enum):
    EXPONENTIAL = "Exponential"
    HULTHEN = "Hulthen"
    GENERALIZED_HULTHEN = "GeneralizedHulthen"
    SQUARE = "Square"

    @classmethod
    def parse(cls, text: str) -> "Family":
        key = text.strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ConfigError(f"unknown potential family {text!r}")


@dataclass(frozen=True)
class PotentialSpec:
    family: Family
    U: float
    r0: float = DEFAULT_R0
    c: float = 0.0
    l: int = 0
    m: float = DEFAULT_MASS

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if not (self.U > 0 and self.r0 > 0 and self.m > 0):
            raise ConfigError("U, r0 and m must be positive")
        if not all(math.isfinite(x) for x in (self.U, self.r0, self.m, self.c)):
            raise ConfigError("potential parameters must be finite")
        if fam is Family.EXPONENTIAL and self.c != 0.0:
            raise ConfigError("the exponential potential has c = 0")
        if fam is Family.HULTHEN and self.c not in (0.0, -1.0):
            raise ConfigError("the Hulthen potential has c = -1")
        if fam is Family.HULTHEN:
            object.__setattr__(self, "c", -1.0)
        if fam is Family.GENERALIZED_HULTHEN and not -1.0 < self.c < 1.0:
            raise ConfigError("generalized Hulthen requires -1 < c < 1")
        if fam is Family.SQUARE:
            if self.l < 0:
                raise ConfigError("angular momentum must be non-negative")
        elif self.l != 0:
            raise ConfigError("exponential-tail families are s-wave only")

    def with_strength(self, U: float) -> "PotentialSpec":
        return replace(self, U=U)

    @property
    def momentum_scale(self) -> float:
        """Natural momentum unit: 1/(2 r0) for exponential tails, 1/r0 for the well."""
        if self.family is Family.SQUARE:
            return 1.0 / self.r0
        return 0.5 / self.r0

    @property
    def has_fixed_zeros(self) -> bool:
        return self.family is not Family.SQUARE

    def coupling(self, alpha: float, U: float | None = None) -> complex:
        """Dimensionless 2 m r0^2 U exp(i alpha)."""
        U = self.U if U is None else U
        return 2.0 * self.m * self.r0**2 * U * cmath.exp(1j * alpha)


def fixed_zero(n: int, spec: PotentialSpec) -> complex:
    """k_n^FZ = -i n / (2 r0)."""
    if n < 1:
        raise ValueError("fixed-zero index starts at 1")
    return -0.5j * n / spec.r0


# -- exponential ---------------------------------------------------------------


def _exp_variables(k: complex, alpha: float, spec: PotentialSpec, U: float | None = None):
    nu = 2.0 * spec.r0 * k
    U = spec.U if U is None else U
    phi = 2.0 * spec.r0 * cmath.sqrt(2.0 * spec.m * U * cmath.exp(1j * alpha))
    return nu, phi


def pole_condition_exponential(k: complex, alpha: float, spec: PotentialSpec) -> complex:
    """J_{-i nu}(phi), nu = 2 r0 k, phi = 2 r0 sqrt(2 m U e^{i alpha}) (principal root)."""
    if spec.family is not Family.EXPONENTIAL:
        raise ConfigError("pole_condition_exponential needs the Exponential family")
    nu, phi = _exp_variables(complex(k), alpha, spec)
    return specfun.bessel_j_complex_order(-1j * nu, phi)


def _exponential_reduced(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    # J_{-i nu}(phi) / (phi/2)^{-i nu}: entire in k and in U e^{i alpha}
    mu = -2j * spec.r0 * k
    return specfun.bessel_j_reduced(mu, spec.coupling(alpha, U))


# -- Hulthen -------------------------------------------------------------------


def _hulthen_D(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    g = spec.coupling(alpha, U)
    return cmath.sqrt(g - (k * spec.r0) ** 2)


def pole_condition_hulthen(k: complex, alpha: float, spec: PotentialSpec) -> complex:
    """f(-k) = Gamma(1 - 2ikr0) / [Gamma(1 - ikr0 + D) Gamma(1 - ikr0 - D)]."""
    if spec.family is not Family.HULTHEN:
        raise ConfigError("pole_condition_hulthen needs the Hulthen family")
    k = complex(k)
    D = _hulthen_D(k, alpha, spec.U, spec)
    ikr = 1j * k * spec.r0
    return specfun.gamma(1.0 - 2.0 * ikr) * specfun.rgamma(1.0 - ikr + D) * specfun.rgamma(1.0 - ikr - D)


def _hulthen_reduced(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    # even in D, so independent of the square-root branch
    D = _hulthen_D(k, alpha, U, spec)
    ikr = 1j * k * spec.r0
    return specfun.rgamma(1.0 - ikr + D) * specfun.rgamma(1.0 - ikr - D)


def hulthen_pole_closed_form(n: int, alpha: float, spec: PotentialSpec) -> complex:
    """k_n(alpha) = i/(2 r0) (2 m r0^2 U e^{i alpha}/n - n)."""
    if n < 1:
        raise ValueError("Hulthen pole index starts at 1")
    return 0.5j / spec.r0 * (spec.coupling(alpha) / n - n)


# -- series Jost engine (exponential tails, |c| < 1) ---------------------------


def _series_tail(total, prev, conv, n_start, w, g, neg_c, k, guard=True):
    """Continue sum a_n from n_start with a_n n (n + w) = -g (a_{n-1} + (-c) conv_{n-1})."""
    small_run = 0
    biggest = max(1.0, abs(total))
    for n in range(n_start, SERIES_MAX_TERMS):
        denom = n + w
        if guard and abs(denom) < SERIES_SINGULAR_GUARD * n:
            raise RecursionSingularError(k, n)
        conv = prev + neg_c * conv
        a = -g * conv / (n * denom)
        total += a
        biggest = max(biggest, abs(total))
        tail = abs(a) + abs(prev)
        # relative tail test, floored at the rounding level of the largest partial sum
        if n > abs(w) and (tail < 1e-12 * abs(total) or tail < 1e-17 * biggest):
            small_run += 1
            if small_run >= 2:
                return total
        else:
            small_run = 0
        prev = a
    raise AccuracyError(f"series Jost function did not converge (k={k}, c={-neg_c})")


def _series_jost(k: complex, alpha: float, U: float, spec: PotentialSpec, c: float) -> complex:
    """Sum of a_n with a_n (n/r0)(n/r0 - 2ik) = 2m sum_j V_j a_{n-j}.

    V_j = -U e^{i alpha} (-c)^{j-1}; the convolution is geometric, so it is
    carried as a running sum.
    """
    w = -2j * spec.r0 * k
    g = spec.coupling(alpha, U)  # 2 m r0^2 U e^{i alpha}
    return _series_tail(1.0 + 0j, 1.0 + 0j, 0j, 1, w, g, -c, k)


def pole_condition_series_jost(k: complex, alpha: float, spec: PotentialSpec) -> complex:
    """Series Jost function whose zeros in k are the moving poles.

    Simple poles at the fixed zeros k = -i n/(2 r0) come from the recursion
    denominators; :func:`moving_pole_function` divides them out.
    """
    if spec.family not in (Family.EXPONENTIAL, Family.GENERALIZED_HULTHEN):
        raise ConfigError("series Jost engine covers Exponential and GeneralizedHulthen")
    return _series_jost(complex(k), alpha, spec.U, spec, spec.c)


def _series_reduced(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    """F(k) / Gamma(1 + w), w = -2 i r0 k; entire in k.

    Terms below n0 = ceil(1/2 - Re w), where n + w can vanish, are carried
    with the Pochhammer factor (1 + w)_n multiplied in, so the fixed zeros
    never divide; from n0 on the plain recursion is safe.
    """
    w = -2j * spec.r0 * k
    g = spec.coupling(alpha, U)
    neg_c = -spec.c
    n0 = max(0, math.ceil(0.5 - w.real))
    if n0 == 0:
        return _series_tail(1.0 + 0j, 1.0 + 0j, 0j, 1, w, g, neg_c, k) * specfun.rgamma(1.0 + w)
    # rgamma(n + 1 + w) for n = 0..n0, anchored where Re >= 3/2
    rg = [0j] * (n0 + 1)
    rg[n0] = specfun.rgamma(n0 + 1 + w)
    for n in range(n0, 0, -1):
        rg[n - 1] = rg[n] * (n + w)
    b_prev = 1.0 + 0j  # b_n = a_n (1 + w)_n
    C = 0j  # C_n = conv_n (1 + w)_{n-1}
    total = rg[0]
    for n in range(1, n0 + 1):
        C = b_prev + neg_c * (n - 1 + w) * C
        b_prev = -g * C / n
        total += b_prev * rg[n]
    # back to a_n rgamma(1 + w) and conv_n rgamma(1 + w)
    return _series_tail(total, b_prev * rg[n0], C * rg[n0 - 1], n0 + 1, w, g, neg_c, k, guard=False)


# -- square well ---------------------------------------------------------------


def _square_K(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    return cmath.sqrt(k * k + 2.0 * spec.m * U * cmath.exp(1j * alpha))


def pole_condition_square(k: complex, alpha: float, spec: PotentialSpec, *, K: complex | None = None) -> complex:
    """Denominator -k j_l(K r0) h_l'(k r0) + K j_l'(K r0) h_l(k r0), h = h^(1).

    ``K`` may be passed to pick the other square-root branch.
    """
    if spec.family is not Family.SQUARE:
        raise ConfigError("pole_condition_square needs the Square family")
    k = complex(k)
    if K is None:
        K = _square_K(k, alpha, spec.U, spec)
    l, r0 = spec.l, spec.r0
    x, y = k * r0, K * r0
    return -k * specfun.spherical_bessel_j(l, y) * specfun.spherical_hankel_1_deriv(l, x) + (
        K * specfun.spherical_bessel_j_deriv(l, y) * specfun.spherical_hankel_1(l, x)
    )


def _hankel_polynomials(l: int, x: complex) -> tuple[complex, complex]:
    """P = x^(l+1) e^(-ix) h_l(x) and Q = x^(l+2) e^(-ix) h_l'(x), both polynomial."""
    P = 0j
    dP = 0j
    for s in range(l + 1):
        c = math.factorial(l + s) / (math.factorial(s) * math.factorial(l - s)) / 2.0**s
        coef = (-1j) ** (l + 1) * 1j**s * c
        P += coef * x ** (l - s)
        if l - s > 0:
            dP += coef * (l - s) * x ** (l - s - 1)
    Q = x * (1j * P + dP) - (l + 1) * P
    return P, Q


def _reduced_j(l: int, y: complex) -> tuple[complex, complex]:
    """j_l(y)/y^l and y j_l'(y)/y^l, both even entire functions of y."""
    if abs(y) < 0.5:
        return _j_series_scaled(l, y)
    yl = y**l
    return specfun.spherical_bessel_j(l, y) / yl, y * specfun.spherical_bessel_j_deriv(l, y) / yl


def _j_series_scaled(l: int, y: complex) -> tuple[complex, complex]:
    # sum_s a_s y^(2s) and sum_s (l + 2s) a_s y^(2s), a_s from j_l's power series
    w = y * y
    a = 1.0
    for i in range(3, 2 * l + 2, 2):
        a /= i
    val = 0j
    der = 0j
    ws = 1.0 + 0j
    for s in range(40):
        if s > 0:
            a *= -0.5 / (s * (2 * l + 2 * s + 1))
        t = a * ws
        val += t
        der += (l + 2 * s) * t
        if abs(t) < 1e-18 * abs(val):
            break
        ws *= w
    return val, der


def _square_reduced(k: complex, alpha: float, U: float, spec: PotentialSpec) -> complex:
    # r0 x^(l+1) e^(-ix) y^(-l) times the literal denominator; entire and even in K
    l, r0 = spec.l, spec.r0
    x = k * r0
    y = _square_K(k, alpha, U, spec) * r0
    jr, djr = _reduced_j(l, y)
    P, Q = _hankel_polynomials(l, x)
    return djr * P - jr * Q


# -- public dispatch -----------------------------------------------------------

PoleFunction = Callable[[complex, float, float], complex]


def moving_pole_function(spec: PotentialSpec, *, engine: str = "closed") -> PoleFunction:
    """Entire function D(k, alpha, U) whose zeros are exactly the moving poles.

    ``engine="series"`` routes the exponential family through the series
    Jost engine (regularised by 1/Gamma(1 - 2 i r0 k)) instead of the Bessel
    closed form.
    """
    fam = spec.family
    if fam is Family.EXPONENTIAL and engine == "closed":
        return lambda k, alpha, U: _exponential_reduced(complex(k), alpha, U, spec)
    if fam in (Family.EXPONENTIAL, Family.GENERALIZED_HULTHEN):
        return lambda k, alpha, U: _series_reduced(complex(k), alpha, U, spec)
    if fam is Family.HULTHEN:
        return lambda k, alpha, U: _hulthen_reduced(complex(k), alpha, U, spec)
    if fam is Family.SQUARE:
        return lambda k, alpha, U: _square_reduced(complex(k), alpha, U, spec)
    raise ConfigError(f"no pole function for {fam}")


def pole_condition(k: complex, alpha: float, spec: PotentialSpec) -> complex:
    """Literal pole condition for the family of ``spec``."""
    fam = spec.family
    if fam is Family.EXPONENTIAL:
        return pole_condition_exponential(k, alpha, spec)
    if fam is Family.HULTHEN:
        return pole_condition_hulthen(k, alpha, spec)
    if fam is Family.GENERALIZED_HULTHEN:
        return pole_condition_series_jost(k, alpha, spec)
    return pole_condition_square(k, alpha, spec)


def axis_phase(spec: PotentialSpec) -> complex:
    """Constant phase making D(i kappa, alpha in {0, pi}) real."""
    return 1j if spec.family is Family.SQUARE else 1.0 + 0j


def axis_function(spec: PotentialSpec) -> Callable[[float, float], float]:
    """Real-valued restriction g(kappa, Ubar) of the moving-pole function to k = i kappa."""
    D = moving_pole_function(spec)
    ph = axis_phase(spec)

    def g(kappa: float, ubar: float) -> float:
        alpha = 0.0 if ubar >= 0 else math.pi
        return (ph * D(1j * kappa, alpha, abs(ubar))).real

    return g


def _series_axis_values(kappa: np.ndarray, ubar: float, spec: PotentialSpec) -> np.ndarray:
    """Series moving-pole function at k = i kappa for a whole grid at once.

    On the axis with alpha in {0, pi} every quantity is real, so the plain
    recursion runs in numpy. Grid points sitting exactly on a fixed zero fall
    back to the scalar evaluator.
    """
    w = 2.0 * spec.r0 * kappa
    g = 2.0 * spec.m * spec.r0**2 * ubar
    neg_c = -spec.c
    total = np.ones_like(w)
    prev = np.ones_like(w)
    conv = np.zeros_like(w)
    biggest = np.ones_like(w)
    run = np.zeros(w.shape, dtype=int)
    done = np.zeros(w.shape, dtype=bool)
    aw = np.abs(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        for n in range(1, SERIES_MAX_TERMS):
            conv = prev + neg_c * conv
            a = -g * conv / (n * (n + w))
            total = np.where(done, total, total + a)
            biggest = np.maximum(biggest, np.abs(total))
            tail = np.abs(a) + np.abs(prev)
            hit = (n > aw) & ((tail < 1e-12 * np.abs(total)) | (tail < 1e-17 * biggest))
            run = np.where(hit, run + 1, 0)
            done |= run >= 2
            prev = a
            if done.all():
                break
        out = total * special.rgamma(1.0 + w)
    bad = ~np.isfinite(out) | ~done
    if bad.any():
        alpha = 0.0 if ubar >= 0 else math.pi
        for i in np.flatnonzero(bad):
            out[i] = _series_reduced(1j * kappa[i], alpha, abs(ubar), spec).real
    return out


def axis_function_array(spec: PotentialSpec) -> Callable[[np.ndarray, float], np.ndarray]:
    """Vectorised :func:`axis_function` over an array of kappa."""
    if spec.family is Family.GENERALIZED_HULTHEN:
        return lambda kappa, ubar: _series_axis_values(np.asarray(kappa, dtype=float), ubar, spec)
    g = axis_function(spec)
    return lambda kappa, ubar: np.array([g(x, ubar) for x in np.asarray(kappa, dtype=float)])


# -- S-matrix ------------------------------------------------------------------


def _checked_ratio(num: complex, den: complex, k: complex) -> complex:
    if den == 0 or not cmath.isfinite(num / den):
        raise SMatrixPoleError(f"S-matrix pole at k = {k}")
    return num / den


def s_matrix(k: complex, alpha: float, spec: PotentialSpec) -> complex:
    """S_l(k, alpha) = f(k)/f(-k) from the family's closed form."""
    k = complex(k)
    fam = spec.family
    r0 = spec.r0
    try:
        if fam is Family.EXPONENTIAL:
            nu, phi = _exp_variables(k, alpha, spec)
            half = phi / 2.0
            pref = cmath.exp(-2j * nu * cmath.log(half))
            gam = cmath.exp(specfun.ln_gamma(1 + 1j * nu) - specfun.ln_gamma(1 - 1j * nu))
            num = pref * gam * specfun.bessel_j_complex_order(1j * nu, phi)
            den = specfun.bessel_j_complex_order(-1j * nu, phi)
            return _checked_ratio(num, den, k)
        if fam is Family.HULTHEN:
            D = _hulthen_D(k, alpha, spec.U, spec)
            ikr = 1j * k * r0

            def f(s: float) -> complex:
                # f(s k): Gamma(1 + 2 i s k r0) / [Gamma(1 + i s k r0 + D) Gamma(1 + i s k r0 - D)]
                return cmath.exp(
                    specfun.ln_gamma(1 + 2 * s * ikr)
                    - specfun.ln_gamma(1 + s * ikr + D)
                    - specfun.ln_gamma(1 + s * ikr - D)
                )

            return _checked_ratio(f(1.0), f(-1.0), k)
        if fam is Family.GENERALIZED_HULTHEN:
            num = _series_jost(-k, alpha, spec.U, spec, spec.c)
            den = _series_jost(k, alpha, spec.U, spec, spec.c)
            return _checked_ratio(num, den, k)
        # square well, literal ratio of the Hankel combinations
        K = _square_K(k, alpha, spec.U, spec)
        l = spec.l
        x, y = k * r0, K * r0
        jl = specfun.spherical_bessel_j(l, y)
        djl = specfun.spherical_bessel_j_deriv(l, y)
        num = k * jl * specfun.spherical_hankel_2_deriv(l, x) - K * djl * specfun.spherical_hankel_2(l, x)
        den = -k * jl * specfun.spherical_hankel_1_deriv(l, x) + K * djl * specfun.spherical_hankel_1(l, x)
        return _checked_ratio(num, den, k)
    except (GammaPoleError, RecursionSingularError) as exc:
        raise SMatrixPoleError(f"S-matrix singular at k = {k}: {exc}") from exc
