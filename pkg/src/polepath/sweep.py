"""Axis poles as functions of the real effective strength Ubar = e^{i alpha} U.

For alpha in {0, pi} the moving-pole function is real on the imaginary k
axis, so axis poles k = i kappa are found by one-dimensional search and
followed in Ubar. Two axis poles meeting head-on leave the axis as a
resonance/antiresonance pair; that fold is located and refined with the
degeneracy solver and the pair is then continued in the complex plane.

Labels: for families with fixed zeros the sweep starts at Ubar = 0 where
the n-th pole sits exactly on k_n^FZ, which defines A_n (Ubar > 0) and R_n
(Ubar < 0). For the square well axis poles are numbered from the top at the
first strength visited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment, minimize_scalar

from .errors import ConvergenceError, LostPoleError, NearDegeneracyError, StepUnderflowError
from .potentials import Family, PotentialSpec, axis_function, axis_function_array, fixed_zero, moving_pole_function
from .rootfind import refine_root, solve_degeneracy
from .tracer import EventRecord, PoleLabel, TraceConfig, continue_root


def axis_roots(g, lo: float, hi: float, n_grid: int, g_grid=None) -> list[float]:
    """Zeros of the real function g on [lo, hi].

    Sign changes on the grid are polished with brentq. Grid cells around a
    local minimum of |g| without a sign change are probed for a hidden pair
    by minimising sign * g there. ``g_grid`` evaluates g on a whole array.
    """
    xs = np.linspace(lo, hi, n_grid + 1)
    ys = np.asarray(g_grid(xs)) if g_grid is not None else np.array([g(x) for x in xs])
    roots: list[float] = []
    for i in range(n_grid):
        a, b = ys[i], ys[i + 1]
        if a == 0.0:
            roots.append(float(xs[i]))
        elif a * b < 0:
            roots.append(brentq(g, xs[i], xs[i + 1], xtol=1e-14, rtol=1e-15))
    if ys[-1] == 0.0:
        roots.append(float(xs[-1]))
    ay = np.abs(ys)
    for i in range(1, n_grid):
        if not (ay[i] < ay[i - 1] and ay[i] <= ay[i + 1]):
            continue
        if ys[i - 1] * ys[i] <= 0 or ys[i] * ys[i + 1] <= 0:
            continue
        s = math.copysign(1.0, ys[i])
        opt = minimize_scalar(lambda x: s * g(x), bounds=(xs[i - 1], xs[i + 1]), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(xs[i]))})
        xm = float(opt.x)
        if s * g(xm) < 0:
            roots.append(brentq(g, xs[i - 1], xm, xtol=1e-14, rtol=1e-15))
            roots.append(brentq(g, xm, xs[i + 1], xtol=1e-14, rtol=1e-15))
    return sorted(roots)


@dataclass
class AxisCollision:
    labels: tuple[PoleLabel, PoleLabel]
    ubar: float
    kappa: float
    residual: float
    arrival: bool = False


@dataclass
class ResonancePath:
    """Complex continuation of a collided pair in U = |Ubar| (alpha fixed)."""

    labels: tuple[PoleLabel, PoleLabel]  # (resonance, antiresonance)
    alpha: float
    U: list[float]
    k: list[complex]


@dataclass
class SweepResult:
    spec: PotentialSpec
    rows: list[tuple[float, PoleLabel, float]]
    collisions: list[AxisCollision]
    resonances: list[ResonancePath] = field(default_factory=list)
    final: dict[PoleLabel, float] = field(default_factory=dict)

    @property
    def events(self) -> list[EventRecord]:
        out = []
        for c in self.collisions:
            out.append(
                EventRecord(
                    "AxisCollision",
                    abs(c.ubar),
                    0.0 if c.ubar >= 0 else math.pi,
                    1j * c.kappa,
                    [str(c.labels[0]), str(c.labels[1])],
                    residual=c.residual,
                )
            )
        return out

    def flow(self, label: PoleLabel) -> tuple[np.ndarray, np.ndarray]:
        u = [r[0] for r in self.rows if r[1] == label]
        kap = [r[2] for r in self.rows if r[1] == label]
        return np.array(u), np.array(kap)

    def labels(self) -> list[PoleLabel]:
        seen = []
        for r in self.rows:
            if r[1] not in seen:
                seen.append(r[1])
        return seen


@dataclass
class SweepConfig:
    step: float = 0.25
    min_step: float = 1e-7
    grid_spacing: float = 0.02  # in units of the momentum scale
    window_margin: float = 0.6  # in units of the momentum scale
    fold_tol: float = 1e-7  # bracket width (MeV) before the fold is polished
    continue_pairs: bool = True


class _Tracker:
    """Shared state of one half-sweep (one sign of Ubar)."""

    def __init__(self, spec: PotentialSpec, sign: float, cfg: SweepConfig, trace_cfg: TraceConfig):
        self.spec = spec
        self.sign = sign
        self.cfg = cfg
        self.tcfg = trace_cfg
        self.g = axis_function(spec)
        self.g_grid = axis_function_array(spec) if spec.family is Family.GENERALIZED_HULTHEN else None
        self.scale = spec.momentum_scale
        self.sector = "A" if sign > 0 else "R"
        self.fixed_window = not spec.has_fixed_zeros

    def window(self, preds: list[float]) -> tuple[float, float]:
        cut = self.tcfg.cutoff
        if self.fixed_window or not preds:
            return -cut, cut
        # poles with fixed zeros are followed wherever they go; no clipping
        lo = min(preds) - self.cfg.window_margin * self.scale
        hi = max(preds) + self.cfg.window_margin * self.scale
        return lo, hi

    def roots(self, u: float, lo: float, hi: float) -> list[float]:
        n = max(16, int(math.ceil((hi - lo) / (self.cfg.grid_spacing * self.scale))))
        grid = (lambda xs: self.g_grid(xs, u)) if self.g_grid else None
        return axis_roots(lambda x: self.g(x, u), lo, hi, n, grid)

    def local_roots(self, u: float, centre: float, half: float) -> list[float]:
        grid = (lambda xs: self.g_grid(xs, u)) if self.g_grid else None
        return axis_roots(lambda x: self.g(x, u), centre - half, centre + half, 64, grid)


def _predict(hist: list[tuple[float, float]], u: float) -> float:
    if len(hist) >= 3:
        (u0, k0), (u1, k1), (u2, k2) = hist[-3:]
        return (
            k0 * (u - u1) * (u - u2) / ((u0 - u1) * (u0 - u2))
            + k1 * (u - u0) * (u - u2) / ((u1 - u0) * (u1 - u2))
            + k2 * (u - u0) * (u - u1) / ((u2 - u0) * (u2 - u1))
        )
    if len(hist) == 2:
        (u0, k0), (u1, k1) = hist
        return k1 + (k1 - k0) * (u - u1) / (u1 - u0)
    return hist[-1][1]


def _assign(preds: dict[PoleLabel, float], roots: list[float]) -> tuple[dict[PoleLabel, float], list[PoleLabel], list[float]]:
    """Match predicted label positions to found roots; returns (matched, missing labels, unmatched roots)."""
    labs = list(preds)
    if not labs or not roots:
        return {}, labs, list(roots)
    vals = np.array([preds[l] for l in labs])
    order = np.sort(vals)
    gaps = []
    for v in vals:
        others = np.abs(order - v)
        others = others[others > 0]
        gaps.append(others.min() if len(others) else math.inf)
    cost = np.abs(vals[:, None] - np.array(roots)[None, :])
    ri, ci = linear_sum_assignment(cost)
    matched: dict[PoleLabel, float] = {}
    used = set()
    for i, j in zip(ri, ci):
        if cost[i, j] <= 0.5 * gaps[i] or (math.isinf(gaps[i]) and cost[i, j] < 1e9):
            matched[labs[i]] = roots[j]
            used.add(j)
    missing = [l for l in labs if l not in matched]
    extra = [r for j, r in enumerate(roots) if j not in used]
    return matched, missing, extra


def _polish_fold(tr: _Tracker, u_in: float, u_out: float, pair_centre: float, pair_half: float):
    """Bisect between u_in (pair present) and u_out (pair gone), then solve D = D' = 0 on the axis."""
    half = max(pair_half * 3.0, 1e-6 * tr.scale)
    centre = pair_centre
    while abs(u_out - u_in) > tr.cfg.fold_tol:
        um = 0.5 * (u_in + u_out)
        rs = tr.local_roots(um, centre, half)
        near = [r for r in rs if abs(r - centre) < half]
        if len(near) >= 2:
            u_in = um
            near.sort(key=lambda r: abs(r - centre))
            a, b = sorted(near[:2])
            centre, half = 0.5 * (a + b), max(1.5 * (b - a), 1e-6 * tr.scale)
        else:
            u_out = um
    alpha = 0.0 if tr.sign > 0 else math.pi
    D = moving_pole_function(tr.spec)
    seed = (1j * centre, alpha, abs(0.5 * (u_in + u_out)))
    try:
        deg = solve_degeneracy(D, seed, scale=tr.scale, fix_alpha=True)
        return deg.U * tr.sign, deg.k.imag, deg.residual
    except ConvergenceError:
        return 0.5 * (u_in + u_out), centre, math.nan


def _continue_pair(tr: _Tracker, u_star: float, kappa_star: float, u_end: float, labels) -> ResonancePath | None:
    """Follow the pair that leaves the axis at |Ubar| = u_star out to |Ubar| = u_end."""
    alpha = 0.0 if tr.sign > 0 else math.pi
    D = moving_pole_function(tr.spec)
    f = lambda k, U: D(k, alpha, U)  # noqa: E731
    k0 = 1j * kappa_star
    U0 = abs(u_star)
    hk = 1e-4 * tr.scale
    d_kk = (f(k0 + hk, U0) - 2 * f(k0, U0) + f(k0 - hk, U0)) / hk**2
    hu = 1e-6 * max(1.0, U0)
    d_u = (f(k0, U0 + hu) - f(k0, U0 - hu)) / (2 * hu)
    if d_kk == 0 or d_u == 0:
        return None
    delta_k = 1e-3 * tr.scale
    dU = min(abs(d_kk) * delta_k**2 / (2 * abs(d_u)), 0.05 * max(abs(u_end) - U0, 1e-9))
    U1 = U0 + dU
    offs = np.sqrt(complex(-2 * d_u * dU / d_kk))
    branch = []
    for s in (1, -1):
        seed = k0 + s * offs
        r = refine_root(lambda k: f(k, U1), seed, 1e-13)
        branch.append(r.k)
    res, anti = sorted(branch, key=lambda k: -k.real)
    if res.real <= 0 or abs(res - anti) < 1e-8 * tr.scale:
        return None
    if abs(u_end) <= U1:
        return ResonancePath(labels, alpha, [U1], [res])
    grid = list(np.arange(math.ceil(U1 / tr.cfg.step) * tr.cfg.step, abs(u_end), tr.cfg.step))
    path = continue_root(f, res, U1, abs(u_end), tr.tcfg, checkpoints=grid, step_max=max(tr.cfg.step, 0.05), step_min=1e-9)
    return ResonancePath(labels, alpha, list(path.ts), list(path.ks))


def _half_sweep(spec, sign, u_end, n_track, cfg, tcfg, out_rows, collisions, resonances, final, record_range):
    tr = _Tracker(spec, sign, cfg, tcfg)
    lo_rec, hi_rec = record_range

    def record(u, lab, kap):
        if lo_rec - 1e-12 <= u <= hi_rec + 1e-12:
            out_rows.append((u, lab, kap))

    hist: dict[PoleLabel, list[tuple[float, float]]] = {}
    if spec.has_fixed_zeros:
        u = 0.0
        for n in range(1, n_track + 1):
            hist[PoleLabel(tr.sector, n)] = [(0.0, fixed_zero(n, spec).imag)]
    else:
        start = min(abs(lo_rec), abs(hi_rec)) if lo_rec * hi_rec > 0 else cfg.step
        u = sign * max(start, 1e-6)
        lo, hi = tr.window([])
        for i, r in enumerate(sorted(tr.roots(u, lo, hi), reverse=True)):
            hist[PoleLabel(tr.sector, i + 1)] = [(u, r)]
    next_n = max((l.n for l in hist), default=0) + 1
    for lab, h in hist.items():
        record(u, lab, h[-1][1])

    direction = sign
    grid_step = cfg.step
    h = grid_step
    while direction * (u_end - u) > 1e-12:
        next_grid = (math.floor(abs(u) / grid_step + 1e-9) + 1) * grid_step * direction
        if direction * (next_grid - u_end) > 0:
            next_grid = u_end
        h_try = min(h, abs(next_grid - u))
        u_new = next_grid if abs(abs(next_grid - u) - h_try) < 1e-12 else u + direction * h_try
        preds = {lab: _predict(hh, u_new) for lab, hh in hist.items()}
        lo, hi = tr.window(list(preds.values()))
        roots = tr.roots(u_new, lo, hi)
        matched, missing, extra = _assign(preds, roots)
        # extra roots near the window edges are strangers entering the search window
        edge = 0.05 * tr.tcfg.cutoff if tr.fixed_window else 0.5 * cfg.window_margin * tr.scale
        interior_extra = [r for r in extra if lo + edge < r < hi - edge]

        if missing:
            order = sorted(preds, key=lambda l: preds[l])
            if len(missing) == 1 and len(order) > 1 and lo + edge < preds[missing[0]] < hi - edge:
                # next to a fold the grazing pair can show up as a single root
                a = missing[0]
                i = order.index(a)
                nbrs = [order[j] for j in (i - 1, i + 1) if 0 <= j < len(order)]
                b = min(nbrs, key=lambda l: abs(preds[l] - preds[a]))
                if b in matched:
                    centre = 0.5 * (preds[a] + preds[b])
                    half = max(abs(preds[a] - preds[b]), 1e-3 * tr.scale)
                    if len(tr.local_roots(u_new, centre, 2 * half)) < 2:
                        del matched[b]
                        missing = [a, b]
            pair_ok = (
                len(missing) == 2
                and abs(order.index(missing[0]) - order.index(missing[1])) == 1
                and not interior_extra
            )
            lost_at_edge = [l for l in missing if not (lo + edge < preds[l] < hi - edge)]
            if pair_ok:
                a, b = missing
                ka, kb = hist[a][-1][1], hist[b][-1][1]
                # confirm with a dense local scan before calling it a collision
                centre = 0.5 * (preds[a] + preds[b])
                half = max(abs(preds[a] - preds[b]), abs(ka - kb), 1e-3 * tr.scale)
                again = [r for r in tr.local_roots(u_new, centre, 2 * half) if r not in matched.values()]
                if len(again) >= 2:
                    again.sort(key=lambda r: abs(r - centre))
                    x, y = sorted(again[:2])
                    if preds[a] <= preds[b]:
                        matched[a], matched[b] = x, y
                    else:
                        matched[a], matched[b] = y, x
                    missing = []
                elif h_try > 16 * cfg.min_step and len(hist[a]) > 1:
                    h = 0.5 * h_try
                    continue
                else:
                    u_star, kap_star, resid = _polish_fold(tr, u, u_new, 0.5 * (ka + kb), 0.5 * abs(ka - kb))
                    pair = tuple(sorted((a, b)))
                    collisions.append(AxisCollision(pair, u_star, kap_star, resid))
                    if cfg.continue_pairs:
                        try:
                            rp = _continue_pair(tr, u_star, kap_star, u_end, pair)
                            if rp is not None:
                                resonances.append(rp)
                        except (ConvergenceError, NearDegeneracyError, StepUnderflowError):
                            pass
                    for lab in pair:
                        del hist[lab]
                    missing = []
            elif len(lost_at_edge) == len(missing) and not interior_extra:
                for lab in missing:
                    del hist[lab]
                missing = []
            if missing:
                h = 0.5 * h_try
                if h < cfg.min_step:
                    raise LostPoleError(f"lost axis pole {missing[0]} at Ubar = {u_new:.9g}", missing[0].n)
                continue

        if len(interior_extra) >= 2 and len(interior_extra) % 2 == 0:
            interior_extra.sort()
            if h_try > 16 * cfg.min_step and len(interior_extra) == 2 and abs(interior_extra[1] - interior_extra[0]) > 0.05 * tr.scale:
                # an arrival should be caught close to the fold
                h = 0.5 * h_try
                continue
            for i in range(0, len(interior_extra), 2):
                x, y = interior_extra[i], interior_extra[i + 1]
                u_star, kap_star, resid = _polish_fold(tr, u_new, u, 0.5 * (x + y), 0.5 * (y - x))
                la, lb = PoleLabel(tr.sector, next_n), PoleLabel(tr.sector, next_n + 1)
                next_n += 2
                matched[la], matched[lb] = y, x
                hist[la], hist[lb] = [], []
                collisions.append(AxisCollision((la, lb), u_star, kap_star, resid, arrival=True))
        elif tr.fixed_window:
            for r in extra:
                lab = PoleLabel(tr.sector, next_n)
                next_n += 1
                matched[lab] = r
                hist[lab] = []

        for lab, kap in matched.items():
            hist[lab].append((u_new, kap))
            if len(hist[lab]) > 4:
                del hist[lab][0]
        u = u_new
        if abs(abs(u) / grid_step - round(abs(u) / grid_step)) < 1e-9 or u == u_end:
            for lab in sorted(matched):
                record(u, lab, matched[lab])
        if not missing:
            worst = max((abs(matched[l] - preds[l]) for l in preds if l in matched), default=0.0)
            h = min(grid_step, h_try * (2.0 if worst < 1e-3 * tr.scale else 1.0))
    for lab, hh in hist.items():
        if hh:
            final[lab] = hh[-1][1]


def sweep_real_strength(
    spec: PotentialSpec,
    ubar_range: tuple[float, float],
    n_max: int,
    *,
    cfg: SweepConfig | None = None,
    trace_cfg: TraceConfig | None = None,
) -> SweepResult:
    """Axis-pole flows kappa(Ubar) over ``ubar_range`` plus the collisions found.

    The first ``n_max`` labelled poles of each sector are reported; two
    extra ones are tracked so that their neighbours are followed safely.
    """
    cfg = cfg or SweepConfig()
    tcfg = trace_cfg or TraceConfig()
    lo, hi = sorted(map(float, ubar_range))
    rows: list[tuple[float, PoleLabel, float]] = []
    collisions: list[AxisCollision] = []
    resonances: list[ResonancePath] = []
    final: dict[PoleLabel, float] = {}
    n_track = n_max + 2
    if hi > 0:
        _half_sweep(spec, 1.0, hi, n_track, cfg, tcfg, rows, collisions, resonances, final, (max(lo, 0.0), hi))
    if lo < 0:
        _half_sweep(spec, -1.0, lo, n_track, cfg, tcfg, rows, collisions, resonances, final, (lo, min(hi, 0.0)))
    if spec.has_fixed_zeros:
        rows = [r for r in rows if r[1].n <= n_max]
        collisions = [c for c in collisions if min(l.n for l in c.labels) <= n_max]
    rows.sort(key=lambda r: (r[0], r[1]))
    collisions.sort(key=lambda c: c.ubar)
    return SweepResult(spec, rows, collisions, resonances, final)


def axis_thresholds(spec: PotentialSpec, u_range: tuple[float, float], n_grid: int = 400) -> list[float]:
    """Strengths where an axis pole passes through k = 0 (alpha = 0), by bisection."""
    g = axis_function(spec)
    lo, hi = u_range
    us = np.linspace(lo, hi, n_grid + 1)
    vals = [g(0.0, u) for u in us]
    out = []
    for i in range(n_grid):
        if vals[i] == 0.0:
            out.append(float(us[i]))
        elif vals[i] * vals[i + 1] < 0:
            out.append(brentq(lambda u: g(0.0, u), us[i], us[i + 1], xtol=1e-12))
    return out


def count_axis_poles(spec: PotentialSpec, alpha: float, *, cutoff: float = 600.0, spacing: float = 0.01) -> list[float]:
    """All axis poles kappa in [-cutoff, cutoff] at strength spec.U for alpha in {0, pi}."""
    g = axis_function(spec)
    ubar = spec.U if math.cos(alpha) > 0 else -spec.U
    n = int(math.ceil(2 * cutoff / (spacing * spec.momentum_scale)))
    return axis_roots(lambda x: g(x, ubar), -cutoff, cutoff, n)
