"""Pole trajectories in the phase alpha of the potential.

A trajectory is followed by predictor-corrector continuation of a zero of the
moving-pole function D(k; alpha, U) with alpha unwrapped. Periodicity and
winding numbers are measured on the traced samples, never assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConvergenceError, NearDegeneracyError, StepUnderflowError
from .potentials import PotentialSpec, fixed_zero, moving_pole_function
from .rootfind import refine_root, stencil

TWO_PI = 2.0 * math.pi


class Periodicity(str, Enum):
    TWO_PI = "TwoPi"
    FOUR_PI = "FourPi"
    OPEN = "Open"


class PoleKind(str, Enum):
    BOUND = "Bound"
    ANTIBOUND = "Antibound"
    RESONANCE = "Resonance"
    ANTIRESONANCE = "Antiresonance"


@dataclass(frozen=True, order=True)
class PoleLabel:
    sector: str
    n: int

    def __post_init__(self):
        if self.sector not in ("A", "R"):
            raise ValueError(f"sector must be A or R, got {self.sector!r}")
        if self.n < 1:
            raise ValueError("label index starts at 1")

    def __str__(self) -> str:
        return f"{self.sector}{self.n}"

    @classmethod
    def parse(cls, text: str) -> "PoleLabel":
        text = text.strip()
        return cls(text[0].upper(), int(text[1:]))


@dataclass(frozen=True)
class PhasePoint:
    alpha: float
    k: complex


@dataclass
class TraceConfig:
    step_min: float = 1e-5
    step_max: float = 0.05
    step_init: float = 0.01
    newton_tol: float = 1e-12
    newton_max_iter: int = 8
    slow_iterations: int = 5
    tol_residual: float = 1e-10
    tol_close: float = 1e-6
    cutoff: float = 600.0
    axis_tol: float = 1e-6
    near_degenerate: float = 1e-4

    def __post_init__(self):
        for name in ("step_min", "step_max", "step_init", "newton_tol", "tol_residual", "tol_close", "cutoff"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.step_min > self.step_max:
            raise ValueError("step_min exceeds step_max")


@dataclass
class Trajectory:
    spec: PotentialSpec
    points: list[PhasePoint]
    periodicity: Periodicity
    labels: dict[float, PoleLabel] = field(default_factory=dict)
    windings: dict[int, int] = field(default_factory=dict)
    start_label: PoleLabel | None = None
    truncated: bool = False
    # |D'/D''| along the path; small values flag a nearby double root
    separation: list[float] = field(default_factory=list, repr=False)

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.points])

    @property
    def ks(self) -> np.ndarray:
        return np.array([p.k for p in self.points])

    def period(self) -> float | None:
        if self.periodicity is Periodicity.TWO_PI:
            return TWO_PI
        if self.periodicity is Periodicity.FOUR_PI:
            return 2 * TWO_PI
        return None

    def closed_points(self) -> list[PhasePoint]:
        """Samples over one period (start point repeated at the end)."""
        per = self.period()
        if per is None:
            return list(self.points)
        a0 = self.points[0].alpha
        return [p for p in self.points if p.alpha <= a0 + per + 1e-12]

    def signed_area(self) -> float:
        return signed_area([p.k for p in self.closed_points()])

    def attractive_labels(self) -> frozenset[PoleLabel]:
        return frozenset(lab for lab in self.labels.values() if lab.sector == "A")


@dataclass
class EventRecord:
    kind: str
    U_critical: float
    alpha_critical: float
    k_critical: complex
    participants: list[str]
    residual: float = math.nan
    bracket: tuple[float, float] | None = None
    resolved: bool = True


def signed_area(ks: Sequence[complex]) -> float:
    """Shoelace area of the polygon through ``ks``; positive if counterclockwise."""
    z = np.asarray(ks, dtype=complex)
    if len(z) < 3:
        return 0.0
    x, y = z.real, z.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def classify_pole(k: complex, axis_tol: float = 1e-6) -> PoleKind:
    if abs(k.real) < axis_tol:
        if k.imag > 0:
            return PoleKind.BOUND
        return PoleKind.ANTIBOUND
    if k.imag >= 0:
        raise ValueError(f"off-axis pole in the upper half-plane at k = {k}")
    return PoleKind.RESONANCE if k.real > 0 else PoleKind.ANTIRESONANCE


def winding_number(ks: Sequence[complex], centre: complex) -> int:
    ph = np.unwrap(np.angle(np.asarray(ks, dtype=complex) - centre))
    return int(round((ph[-1] - ph[0]) / TWO_PI))


# -- continuation ----------------------------------------------------------------


@dataclass
class ContinuationPath:
    ts: list[float]
    ks: list[complex]
    separation: list[float]
    residuals: list[float]
    stopped: bool = False


def _predict(ts: Sequence[float], ks: Sequence[complex], t: float, slope: complex) -> complex:
    if len(ts) >= 3:
        t0, t1, t2 = ts[-3], ts[-2], ts[-1]
        k0, k1, k2 = ks[-3], ks[-2], ks[-1]
        l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2))
        l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2))
        l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1))
        return l0 * k0 + l1 * k1 + l2 * k2
    if len(ts) == 2:
        return ks[-1] + (ks[-1] - ks[-2]) * (t - ts[-1]) / (ts[-1] - ts[-2])
    return ks[-1] + slope * (t - ts[-1])


def continue_root(
    f: Callable[[complex, float], complex],
    k0: complex,
    t0: float,
    t1: float,
    cfg: TraceConfig,
    *,
    checkpoints: Iterable[float] = (),
    stop: Callable[[complex], bool] | None = None,
    step_max: float | None = None,
    step_min: float | None = None,
) -> ContinuationPath:
    """Follow the zero k(t) of f(., t) from (t0, k0) to t1.

    Steps land exactly on every checkpoint inside the interval. A step is
    accepted when Newton converges, the corrected root stays within a
    quarter of its local separation |D'/D''| of the prediction, and it moved
    by less than the previous separation (so the corrector cannot hop onto a
    neighbouring zero).
    """
    direction = 1.0 if t1 >= t0 else -1.0
    h_max = cfg.step_max if step_max is None else step_max
    h_min = cfg.step_min if step_min is None else step_min
    marks = sorted({c for c in checkpoints if (c - t0) * direction > 0 and (t1 - c) * direction > 0} | {t1})
    if direction < 0:
        marks = marks[::-1]

    g0 = lambda k: f(k, t0)  # noqa: E731
    first = refine_root(g0, k0, cfg.newton_tol, max_iter=20)
    k0 = first.k
    _, d1, d2 = stencil(g0, k0)
    ht = 1e-7 * max(1.0, abs(t0))
    ft = (f(k0, t0 + ht) - f(k0, t0 - ht)) / (2 * ht)
    slope = -ft / d1 if d1 != 0 else 0j
    sep0 = abs(d1 / d2) if d2 != 0 else math.inf

    ts, ks, seps, res = [t0], [k0], [sep0], [first.residual]
    derivs = [abs(d1)]
    d_max = derivs[0]
    h = min(cfg.step_init, h_max)
    t = t0
    mark_i = 0
    path = ContinuationPath(ts, ks, seps, res)
    if stop is not None and stop(k0):
        path.stopped = True
        return path
    while mark_i < len(marks):
        target = marks[mark_i]
        h_try = min(h, abs(target - t))
        t_new = target if abs(target - t) - h_try <= 1e-15 * max(1.0, abs(t)) else t + direction * h_try
        k_pred = _predict(ts, ks, t_new, slope)
        ok = False
        slow = False
        try:
            r = refine_root(lambda k: f(k, t_new), k_pred, cfg.newton_tol, max_iter=cfg.newton_max_iter)
            sep_new = r.separation
            jump = abs(r.k - ks[-1])
            miss = abs(r.k - k_pred)
            ok = miss <= 0.25 * min(sep_new, seps[-1]) and jump <= seps[-1]
            slow = r.iterations > cfg.slow_iterations
        except (ConvergenceError, NearDegeneracyError):
            ok = False
        if not ok:
            h = 0.5 * h_try
            if h < h_min:
                raise StepUnderflowError(
                    f"continuation step underflow at t = {t:.9g} (k = {ks[-1]:.9g})",
                    bracket=(t, t_new),
                    k=ks[-1],
                )
            continue
        ts.append(t_new)
        ks.append(r.k)
        seps.append(sep_new)
        res.append(r.residual)
        derivs.append(abs(r.derivative))
        t = t_new
        if t_new == target:
            mark_i += 1
        if stop is not None and stop(r.k):
            path.stopped = True
            break
        d_max = max(d_max, derivs[-1])
        # median <= max, so the median is only needed for small derivatives
        if derivs[-1] < cfg.near_degenerate * d_max and derivs[-1] < cfg.near_degenerate * float(np.median(derivs)):
            h = max(h_try / 4.0, h_min)
        elif slow:
            h = max(h_try / 2.0, h_min)
        elif r.iterations <= 3:
            h = min(h_try * 1.5, h_max)
        else:
            h = h_try
    return path


# -- tracing in alpha ------------------------------------------------------------


Catalog = Mapping[PoleLabel, complex]


def match_label(k: complex, alpha: float, catalog: Catalog | None, tol: float = 1e-5) -> PoleLabel | None:
    """Label of the catalogued pole at k, if alpha is a multiple of pi and one is within tol."""
    if not catalog:
        return None
    j = round(alpha / math.pi)
    if abs(alpha - j * math.pi) > 1e-9:
        return None
    sector = "A" if j % 2 == 0 else "R"
    best, dist = None, math.inf
    for lab, kc in catalog.items():
        if lab.sector != sector:
            continue
        d = abs(kc - k)
        if d < dist:
            best, dist = lab, d
    if best is not None and dist <= tol * max(1.0, abs(k)):
        return best
    return None


def trace(
    spec: PotentialSpec,
    start: tuple[PoleLabel | None, complex],
    alpha_span: tuple[float, float] = (0.0, 2 * TWO_PI),
    cfg: TraceConfig | None = None,
    *,
    catalog: Catalog | None = None,
    engine: str = "closed",
) -> Trajectory:
    """Trace the pole ``start`` over ``alpha_span`` at strength spec.U.

    The path is cut when |Im k| exceeds ``cfg.cutoff`` (the trajectory is then
    Open). ``catalog`` maps labels to pole positions at spec.U (A at alpha
    = 0, R at alpha = pi) and is used to label the multiples of pi visited.
    """
    cfg = cfg or TraceConfig()
    label, k0 = start
    a0, a1 = float(alpha_span[0]), float(alpha_span[1])
    if not (math.isfinite(a0) and math.isfinite(a1)) or a1 <= a0:
        raise ValueError("alpha span must be a finite increasing interval")
    D = moving_pole_function(spec, engine=engine)
    U = spec.U
    f = lambda k, a: D(k, a, U)  # noqa: E731

    checkpoints = [j * math.pi for j in range(math.ceil(a0 / math.pi), math.floor(a1 / math.pi) + 1)]
    checkpoints += [a0 + TWO_PI, a0 + 2 * TWO_PI]
    path = continue_root(f, k0, a0, a1, cfg, checkpoints=checkpoints, stop=lambda k: abs(k.imag) > cfg.cutoff)
    points = [PhasePoint(t, k) for t, k in zip(path.ts, path.ks)]

    def k_at(alpha: float) -> complex | None:
        for p in points:
            if p.alpha == alpha:
                return p.k
        return None

    kstart = points[0].k
    close = cfg.tol_close * max(1.0, abs(kstart))
    periodicity = Periodicity.OPEN
    if not path.stopped:
        k2 = k_at(a0 + TWO_PI)
        k4 = k_at(a0 + 2 * TWO_PI)
        if k2 is not None and abs(k2 - kstart) < close:
            periodicity = Periodicity.TWO_PI
        elif k4 is not None and abs(k4 - kstart) < close:
            periodicity = Periodicity.FOUR_PI

    traj = Trajectory(spec, points, periodicity, start_label=label, truncated=path.stopped, separation=path.separation)
    for p in points:
        lab = match_label(p.k, p.alpha, catalog)
        if lab is not None:
            traj.labels[p.alpha] = lab
    if label is not None:
        traj.labels.setdefault(a0, label)

    if spec.has_fixed_zeros and periodicity is not Periodicity.OPEN:
        closed = [p.k for p in traj.closed_points()]
        n_top = int(math.ceil(max(abs(k) for k in closed) / spec.momentum_scale)) + 1
        for n in range(1, n_top + 1):
            w = winding_number(closed, fixed_zero(n, spec))
            if w:
                traj.windings[n] = w
    return traj


def closest_approach(traj: Trajectory) -> tuple[float, complex, float]:
    """(alpha, estimated double-root position, separation) where |D'/D''| is smallest."""
    seps = traj.separation
    i = int(np.argmin(seps))
    p = traj.points[i]
    D = moving_pole_function(traj.spec)
    _, d1, d2 = stencil(lambda k: D(k, p.alpha, traj.spec.U), p.k)
    mid = p.k - d1 / d2 if d2 != 0 else p.k
    return p.alpha, mid, seps[i]


def mirror_trajectory(traj: Trajectory) -> list[PhasePoint]:
    """k -> -k*, alpha -> -alpha; another valid trajectory of the same potential."""
    return [PhasePoint(-p.alpha, -p.k.conjugate()) for p in reversed(traj.points)]


def residuals(traj: Trajectory, points: Sequence[PhasePoint] | None = None) -> list[float]:
    """Newton-correction residual |D|/(|D'| max(1,|k|)) at each point."""
    D = moving_pole_function(traj.spec)
    out = []
    for p in traj.points if points is None else points:
        g = lambda k, a=p.alpha: D(k, a, traj.spec.U)  # noqa: E731
        d0, d1, _ = stencil(g, p.k)
        out.append(abs(d0) / (abs(d1) * max(1.0, abs(p.k))) if d1 != 0 else math.inf)
    return out
