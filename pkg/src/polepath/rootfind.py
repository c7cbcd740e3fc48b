"""Zeros of analytic functions of one complex variable.

Newton refinement with central finite differences, argument-principle zero
counting on rectangles, and a stacked Newton solver for double zeros of a
two-parameter family D(k; alpha, U).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContourTooCoarseError,
    ConvergenceError,
    IllConditionedError,
    NearDegeneracyError,
)

AnalyticFunction = Callable[[complex], complex]
FamilyFunction = Callable[[complex, float, float], complex]

FD_REL_STEP = 1e-6
NEWTON_MAX_ITER = 60
DEGENERATE_DERIVATIVE = 1e-14


def fd_step(k: complex) -> float:
    return FD_REL_STEP * max(1.0, abs(k))


def derivative(f: AnalyticFunction, k: complex, h: float | None = None) -> complex:
    """Central difference f'(k); the function is analytic so a real step suffices."""
    h = fd_step(k) if h is None else h
    return (f(k + h) - f(k - h)) / (2.0 * h)


def stencil(f: AnalyticFunction, k: complex, h: float | None = None) -> tuple[complex, complex, complex]:
    """f, f' and f'' at k from one three-point stencil."""
    h = fd_step(k) if h is None else h
    fp, f0, fm = f(k + h), f(k), f(k - h)
    return f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)


@dataclass
class RootResult:
    """Outcome of :func:`refine_root`.

    ``residual`` is the Newton correction relative to max(1, |k|) at the last
    evaluated iterate, i.e. |D| / (|D'| max(1, |k|)); it does not depend on
    the arbitrary normalisation of D. ``derivative`` and ``curvature`` are
    the finite-difference D' and D'' at that iterate.
    """

    k: complex
    residual: float
    iterations: int
    multiplicity_hint: int = 1
    derivative: complex = 0j
    curvature: complex = 0j
    history: list[float] = field(default_factory=list, repr=False)

    @property
    def separation(self) -> float:
        """|D'/D''|: about half the distance to the nearest other zero."""
        if self.curvature == 0:
            return math.inf
        return abs(self.derivative / self.curvature)


def _multiplicity(steps: Sequence[float]) -> int:
    ratios = [steps[i + 1] / steps[i] for i in range(len(steps) - 1) if steps[i] > 0]
    if len(ratios) < 3:
        return 1
    tail = sorted(ratios[-4:-1]) if len(ratios) >= 4 else sorted(ratios[-3:])
    r = tail[len(tail) // 2]
    if r >= 0.95 or r <= 0.3:
        return 1
    return max(1, round(1.0 / (1.0 - r)))


def refine_root(
    f: AnalyticFunction,
    seed: complex,
    tol: float = 1e-12,
    *,
    df: AnalyticFunction | None = None,
    max_iter: int = NEWTON_MAX_ITER,
) -> RootResult:
    """Newton iteration from ``seed`` until |dk| < tol * max(1, |k|).

    Raises :class:`ConvergenceError` (``last`` = final iterate as a
    RootResult) or :class:`NearDegeneracyError` when the derivative vanishes
    against the scale of D.
    """
    k = complex(seed)
    steps: list[float] = []
    history: list[float] = []
    scale = 0.0
    for it in range(1, max_iter + 1):
        if df is None:
            f0, d1, d2 = stencil(f, k)
        else:
            f0, d1 = f(k), df(k)
            d2 = 0j
        history.append(abs(f0))
        scale = max(scale, abs(f0))
        if f0 == 0:
            return RootResult(k, 0.0, it, _multiplicity(steps), d1, d2, history)
        if abs(d1) * max(1.0, abs(k)) <= DEGENERATE_DERIVATIVE * scale:
            raise NearDegeneracyError(f"vanishing derivative near k = {k}", k)
        dk = f0 / d1
        k_new = k - dk
        if not cmath.isfinite(k_new):
            raise ConvergenceError(f"Newton diverged from seed {seed}", last=RootResult(k, math.inf, it))
        steps.append(abs(dk))
        residual = abs(dk) / max(1.0, abs(k))
        if abs(dk) < tol * max(1.0, abs(k_new)):
            return RootResult(k_new, residual, it, _multiplicity(steps), d1, d2, history)
        k = k_new
    raise ConvergenceError(
        f"Newton did not converge in {max_iter} iterations from seed {seed}",
        last=RootResult(k, steps[-1] / max(1.0, abs(k)) if steps else math.inf, max_iter, 1, history=history),
    )


# -- argument principle ---------------------------------------------------------


def _rectangle(corners: tuple[complex, complex]) -> tuple[float, float, float, float]:
    a, b = complex(corners[0]), complex(corners[1])
    x0, x1 = sorted((a.real, b.real))
    y0, y1 = sorted((a.imag, b.imag))
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        raise ValueError("degenerate rectangle")
    return x0, x1, y0, y1


def _edge_phase(f: AnalyticFunction, z0: complex, z1: complex, n: int, max_depth: int) -> float:
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = [z0 + (z1 - z0) * t for t in ts]
    vals = [f(z) for z in pts]
    total = 0.0
    refine_at = math.pi / 4
    for i in range(n):
        stack = [(pts[i], vals[i], pts[i + 1], vals[i + 1], 0)]
        while stack:
            za, fa, zb, fb, depth = stack.pop()
            if fa == 0 or fb == 0:
                raise ContourTooCoarseError(f"zero on the contour near {za if fa == 0 else zb}")
            d = cmath.phase(fb / fa)
            if abs(d) > refine_at:
                if depth >= max_depth:
                    if abs(d) > math.pi / 2:
                        raise ContourTooCoarseError(f"phase jump {d:.3f} unresolved near {za}")
                else:
                    zm = 0.5 * (za + zb)
                    fm = f(zm)
                    stack.append((zm, fm, zb, fb, depth + 1))
                    stack.append((za, fa, zm, fm, depth + 1))
                    continue
            total += d
    return total


def count_zeros_in_rectangle(
    f: AnalyticFunction,
    corners: tuple[complex, complex],
    samples_per_edge: int = 64,
    *,
    max_depth: int = 24,
) -> int:
    """Number of zeros (with multiplicity) of an analytic f inside the rectangle."""
    x0, x1, y0, y1 = _rectangle(corners)
    path = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1), complex(x0, y0)]
    total = 0.0
    for za, zb in zip(path[:-1], path[1:]):
        total += _edge_phase(f, za, zb, samples_per_edge, max_depth)
    winding = total / (2.0 * math.pi)
    n = round(winding)
    if abs(winding - n) > 0.25:
        raise ContourTooCoarseError(f"non-integer winding {winding:.4f}")
    return int(n)


def find_zeros_in_rectangle(
    f: AnalyticFunction,
    corners: tuple[complex, complex],
    *,
    samples_per_edge: int = 32,
    tol: float = 1e-13,
    min_size: float = 1e-7,
) -> list[RootResult]:
    """All zeros inside the rectangle, by recursive bisection of argument-principle counts."""
    x0, x1, y0, y1 = _rectangle(corners)
    out: list[RootResult] = []

    def count(ax, bx, ay, by):
        # nudge the rectangle if a zero sits on its boundary
        for shift in (0.0, 1.3e-4, -2.7e-4, 5.1e-4):
            dx = shift * (bx - ax)
            dy = shift * (by - ay)
            try:
                return count_zeros_in_rectangle(f, (complex(ax + dx, ay + dy), complex(bx + dx, by + dy)), samples_per_edge), (ax + dx, bx + dx, ay + dy, by + dy)
            except ContourTooCoarseError:
                continue
        raise ContourTooCoarseError("could not find a clean contour")

    def recurse(ax, bx, ay, by, n):
        if n == 0:
            return
        w, h = bx - ax, by - ay
        centre = complex(0.5 * (ax + bx), 0.5 * (ay + by))
        if n == 1 and max(w, h) < 0.25 * max(1.0, abs(centre)):
            try:
                res = refine_root(f, centre, tol)
                margin = 1e-9 * max(1.0, abs(res.k))
                if ax - margin <= res.k.real <= bx + margin and ay - margin <= res.k.imag <= by + margin:
                    out.append(res)
                    return
            except (ConvergenceError, NearDegeneracyError):
                pass
        if max(w, h) < min_size * max(1.0, abs(centre)):
            res = refine_root(f, centre, tol, max_iter=200)
            res.multiplicity_hint = max(res.multiplicity_hint, n)
            out.append(res)
            return
        frac = 0.5 + 0.0123
        if w >= h:
            cut = ax + frac * w
            n1, r1 = count(ax, cut, ay, by)
            recurse(*r1, n1)
            if n - n1 > 0:
                recurse(r1[1], bx, ay, by, n - n1)
        else:
            cut = ay + frac * h
            n1, r1 = count(ax, bx, ay, cut)
            recurse(*r1, n1)
            if n - n1 > 0:
                recurse(ax, bx, r1[3], by, n - n1)

    n_total, rect = count(x0, x1, y0, y1)
    recurse(*rect, n_total)
    return out


# -- double zeros in two parameters ---------------------------------------------


@dataclass
class Degeneracy:
    """Solution of D = dD/dk = 0 in (k, alpha, U).

    ``residual`` = |D| / (|D''| s^2) + |D'| / (|D''| s) with s the momentum
    scale handed to the solver; both terms are lengths in units of s.
    """

    k: complex
    alpha: float
    U: float
    residual: float
    iterations: int
    condition: float


def _degeneracy_parts(f: FamilyFunction, k: complex, alpha: float, U: float, hk: float):
    g = lambda z: f(z, alpha, U)  # noqa: E731
    return stencil(g, k, hk)


def solve_degeneracy(
    f_family: FamilyFunction,
    seed: tuple[complex, float, float],
    *,
    tol: float = 1e-9,
    max_iter: int = 50,
    scale: float = 1.0,
    fix_alpha: bool = False,
) -> Degeneracy:
    """Newton on the stacked real system (Re D, Im D, Re D', Im D') = 0.

    Unknowns are (Re k, Im k, alpha, U), or (Re k, Im k, U) with
    ``fix_alpha``. The Jacobian columns in k come from D' and D'' (Cauchy-
    Riemann), those in alpha and U from central differences.
    """
    k, alpha, U = complex(seed[0]), float(seed[1]), float(seed[2])
    hk = FD_REL_STEP * scale
    ha = 1e-6

    def residual_of(d0, d1, d2):
        c = abs(d2)
        if c == 0:
            return math.inf
        return abs(d0) / (c * scale * scale) + abs(d1) / (c * scale)

    d0, d1, d2 = _degeneracy_parts(f_family, k, alpha, U, hk)
    res = residual_of(d0, d1, d2)
    cond = math.nan
    for it in range(1, max_iter + 1):
        if res < tol:
            return Degeneracy(k, alpha, U, res, it - 1, cond)
        hu = 1e-6 * max(1.0, U)
        ap = _degeneracy_parts(f_family, k, alpha + ha, U, hk)
        am = _degeneracy_parts(f_family, k, alpha - ha, U, hk)
        up = _degeneracy_parts(f_family, k, alpha, U + hu, hk)
        um = _degeneracy_parts(f_family, k, alpha, U - hu, hk)
        col_a = ((ap[0] - am[0]) / (2 * ha), (ap[1] - am[1]) / (2 * ha))
        col_u = ((up[0] - um[0]) / (2 * hu), (up[1] - um[1]) / (2 * hu))
        cols = [(d1, d2), (1j * d1, 1j * d2)]
        if not fix_alpha:
            cols.append(col_a)
        cols.append(col_u)
        J = np.array(
            [[c[0].real for c in cols], [c[0].imag for c in cols], [c[1].real for c in cols], [c[1].imag for c in cols]]
        )
        F = np.array([d0.real, d0.imag, d1.real, d1.imag])
        # columns are in mixed units; condition the scaled system
        col_scale = np.array([scale, scale] + ([1.0] if not fix_alpha else []) + [max(1.0, U)])
        Js = J * col_scale
        Js = Js / np.maximum(np.abs(Js).max(axis=1, keepdims=True), 1e-300)
        cond = float(np.linalg.cond(Js))
        if not math.isfinite(cond) or cond > 1e12:
            raise IllConditionedError(
                f"degeneracy Jacobian ill-conditioned (cond={cond:.3g})",
                last=Degeneracy(k, alpha, U, res, it, cond),
                condition=cond,
            )
        delta, *_ = np.linalg.lstsq(J, -F, rcond=None)
        lam = 1.0
        for _ in range(12):
            dk = complex(delta[0], delta[1]) * lam
            da = float(delta[2]) * lam if not fix_alpha else 0.0
            du = float(delta[-1]) * lam
            k_new, a_new, u_new = k + dk, alpha + da, U + du
            if u_new > 0:
                parts = _degeneracy_parts(f_family, k_new, a_new, u_new, hk)
                r_new = residual_of(*parts)
                if r_new < res or lam < 1e-3:
                    break
            lam *= 0.5
        else:
            raise ConvergenceError("degeneracy line search failed", last=Degeneracy(k, alpha, U, res, it, cond))
        k, alpha, U = k_new, a_new, u_new
        d0, d1, d2 = parts
        res = r_new
    if res < tol:
        return Degeneracy(k, alpha, U, res, max_iter, cond)
    raise ConvergenceError(
        f"degeneracy solve did not converge (residual {res:.3g})",
        last=Degeneracy(k, alpha, U, res, max_iter, cond),
    )
