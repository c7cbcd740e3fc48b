"""Labelled seeds, topology signatures and restructuring events in U.

The topology signature at strength U is the set of trajectories started
from the attractive-sector poles, each reduced to (periodicity, set of A
labels met at alpha = 0 mod 2 pi). Where the signature changes between two
strengths the change is bisected and the contact point refined as a double
root of D in (k, alpha, U).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    ConvergenceError,
    IllConditionedError,
    NearDegeneracyError,
    PolepathError,
    StepUnderflowError,
)
from .potentials import Family, PotentialSpec, axis_function, moving_pole_function
from .rootfind import refine_root, solve_degeneracy
from .sweep import SweepConfig, axis_roots, axis_thresholds, count_axis_poles, sweep_real_strength
from .tracer import (
    EventRecord,
    Periodicity,
    PoleLabel,
    TraceConfig,
    Trajectory,
    closest_approach,
    trace,
)

TWO_PI = 2.0 * math.pi


class SignatureError(PolepathError):
    """Topology could not be established at this strength (a contact is too close)."""

    def __init__(self, message: str, U: float, seed=None):
        super().__init__(message)
        self.U = U
        self.seed = seed


# -- labelled poles at arbitrary strength ----------------------------------------


@dataclass
class LabelCatalog:
    """Homotopy labels over a strength interval, reusable at any U inside it."""

    spec: PotentialSpec
    U_max: float
    n_max: int
    sweep: object = None
    _axis: dict = field(default_factory=dict, repr=False)
    # label -> (fold strength, fold kappa, True for the upper pole of the pair)
    _folds: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, spec: PotentialSpec, U_max: float, n_max: int, *, step: float = 0.25, trace_cfg: TraceConfig | None = None):
        cat = cls(spec, U_max, n_max)
        if spec.has_fixed_zeros:
            cat.sweep = sweep_real_strength(spec, (-U_max, U_max), n_max + 2, cfg=SweepConfig(step=step), trace_cfg=trace_cfg)
            for u, lab, kap in cat.sweep.rows:
                cat._axis.setdefault(lab, []).append((abs(u), kap))
            for rows in cat._axis.values():
                rows.sort()
            for c in cat.sweep.collisions:
                a, b = c.labels
                if c.arrival or a not in cat._axis or b not in cat._axis:
                    continue
                upper = cat._axis[a][-1][1] > cat._axis[b][-1][1]
                cat._folds[a] = (abs(c.ubar), c.kappa, upper)
                cat._folds[b] = (abs(c.ubar), c.kappa, not upper)
        return cat

    def _near_fold(self, lab: PoleLabel, U: float, rows) -> float | None:
        # between the last sweep row and the fold the pair is too close to interpolate
        u_fold, k_fold, upper = self._folds[lab]
        half = 1.5 * abs(rows[-1][1] - k_fold) + 1e-6 * self.spec.momentum_scale
        g = axis_function(self.spec)
        ubar = U if lab.sector == "A" else -U
        roots = axis_roots(lambda x: g(x, ubar), k_fold - half, k_fold + half, 400)
        if len(roots) < 2:
            return None
        pair = sorted(sorted(roots, key=lambda x: abs(x - k_fold))[:2])
        return pair[1] if upper else pair[0]

    def at(self, U: float) -> dict[PoleLabel, complex]:
        """Pole position of every label alive at strength U (A: alpha = 0, R: alpha = pi)."""
        spec = self.spec.with_strength(U)
        if not spec.has_fixed_zeros:
            return square_axis_labels(spec)
        D = moving_pole_function(spec)
        out: dict[PoleLabel, complex] = {}
        for lab, rows in self._axis.items():
            us = np.array([r[0] for r in rows])
            if lab in self._folds and us.max() < U <= self._folds[lab][0]:
                kap = self._near_fold(lab, U, rows)
                if kap is not None:
                    out[lab] = complex(0.0, kap)
                continue
            if not (us.min() - 1e-12 <= U <= us.max() + 1e-12):
                continue
            ks = np.array([r[1] for r in rows])
            kap = float(np.interp(U, us, ks))
            alpha = 0.0 if lab.sector == "A" else math.pi
            r = refine_root(lambda k: D(k, alpha, U), 1j * kap, 1e-13)
            out[lab] = complex(0.0, r.k.imag)
        for rp in getattr(self.sweep, "resonances", []):
            if not (rp.U[0] <= U <= rp.U[-1]):
                continue
            us = np.array(rp.U)
            ks = np.array(rp.k)
            guess = complex(np.interp(U, us, ks.real), np.interp(U, us, ks.imag))
            r = refine_root(lambda k: D(k, math.pi, U), guess, 1e-13)
            odd, even = rp.labels
            out[odd] = r.k
            out[even] = -r.k.conjugate()
        return out


def square_axis_labels(spec: PotentialSpec, cutoff: float = 600.0) -> dict[PoleLabel, complex]:
    """Axis poles of the square well numbered from the top in each sector."""
    out = {}
    for sector, alpha in (("A", 0.0), ("R", math.pi)):
        roots = sorted(count_axis_poles(spec, alpha, cutoff=cutoff), reverse=True)
        for i, kap in enumerate(roots):
            out[PoleLabel(sector, i + 1)] = 1j * kap
    return out


def seed_poles(spec: PotentialSpec, n_max: int, *, step: float = 0.25, trace_cfg: TraceConfig | None = None) -> list[tuple[PoleLabel, complex]]:
    """Labelled pole positions at spec.U, sorted by label.

    For exponential tails the labels come from following every pole from
    its fixed zero at U = 0; pairs that collide on the repulsive axis
    continue as resonance (odd label) and antiresonance (even label).
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if not spec.has_fixed_zeros:
        return sorted(square_axis_labels(spec).items())
    cat = LabelCatalog.build(spec, spec.U, n_max, step=step, trace_cfg=trace_cfg)
    found = cat.at(spec.U)
    return sorted((lab, k) for lab, k in found.items() if lab.n <= n_max)


# -- topology ------------------------------------------------------------------------


TrajectoryKey = tuple[str, frozenset]


def trajectory_name(traj: Trajectory) -> str:
    labs = sorted(set(traj.labels.values()), key=lambda l: (l.sector != "R", -l.n))
    if not labs:
        return "(?)"
    if traj.periodicity is Periodicity.OPEN:
        return "open(" + ",".join(str(l) for l in sorted(labs)) + ")"
    a = sorted((l for l in labs if l.sector == "A"), key=lambda l: -l.n)
    r = sorted((l for l in labs if l.sector == "R"), key=lambda l: l.n)
    if traj.periodicity is Periodicity.FOUR_PI and len(a) >= 2:
        return "(" + "-".join(str(l) for l in a) + ")"
    return "(" + "-".join(str(l) for l in r + a) + ")"


@dataclass
class Topology:
    U: float
    trajectories: list[Trajectory]

    @property
    def signature(self) -> frozenset:
        return frozenset(_key(t) for t in self.trajectories)

    def by_key(self) -> dict:
        return {_key(t): t for t in self.trajectories}


def _key(t: Trajectory) -> TrajectoryKey:
    labs = t.attractive_labels()
    if not labs and t.start_label is not None:
        labs = frozenset([t.start_label])
    return (t.periodicity.value, labs)


def topology(spec: PotentialSpec, catalog_positions: dict[PoleLabel, complex], n_max: int, cfg: TraceConfig | None = None) -> Topology:
    """Trace every attractive pole A_1..A_n_max over [0, 4 pi] and collect distinct trajectories."""
    cfg = cfg or TraceConfig()
    starts = sorted((lab, k) for lab, k in catalog_positions.items() if lab.sector == "A" and lab.n <= n_max)
    covered: set[PoleLabel] = set()
    trajs: list[Trajectory] = []
    for lab, k in starts:
        if lab in covered:
            continue
        tcfg = cfg
        for _ in range(4):
            try:
                tr = trace(spec, (lab, k), (0.0, 2 * TWO_PI), tcfg, catalog=catalog_positions)
            except StepUnderflowError as exc:
                raise SignatureError(f"trace of {lab} stalled at alpha in {exc.bracket}", spec.U, seed=(exc.k, 0.5 * sum(exc.bracket))) from exc
            # with fixed zeros every trajectory closes; a cut one was just large
            if not (tr.truncated and spec.has_fixed_zeros):
                break
            tcfg = replace(tcfg, cutoff=4 * tcfg.cutoff)
        covered |= tr.attractive_labels()
        covered.add(lab)
        trajs.append(tr)
    return Topology(spec.U, trajs)


# -- events ---------------------------------------------------------------------------


@dataclass
class EventConfig:
    grid: float = 1.0
    bracket: float = 1e-3
    label_step: float = 0.25
    trace: TraceConfig = field(default_factory=TraceConfig)


def _classify(before: list[TrajectoryKey], after: list[TrajectoryKey], k_star: complex, scale: float) -> str:
    pb = sorted(p for p, _ in before)
    pa = sorted(p for p, _ in after)
    if pb == ["TwoPi", "TwoPi"] and pa == ["FourPi"]:
        return "Fusion"
    if pb == ["FourPi"] and pa == ["TwoPi", "TwoPi"]:
        return "Fusion"
    if pb == ["FourPi", "TwoPi"] and pa == ["FourPi", "TwoPi"]:
        return "RearrangementI"
    if pb == ["FourPi", "FourPi"] and pa == ["FourPi", "FourPi"]:
        return "RearrangementII"
    if abs(k_star) < 1e-3 * scale:
        return "ZeroMomentumCollision"
    if "Open" in pb or "Open" in pa:
        return "LoopFormation"
    return "AxisCollision"


def _reduce_alpha(alpha: float, k: complex) -> tuple[float, complex]:
    """Representative of a contact in [pi, 2 pi] using alpha -> -alpha, k -> -k* and 2 pi periodicity."""
    a = alpha % TWO_PI
    if a < math.pi - 1e-12:
        a, k = TWO_PI - a, -k.conjugate()
    return a, k


class _Prober:
    def __init__(self, spec: PotentialSpec, catalog: LabelCatalog, n_max: int, cfg: EventConfig):
        self.spec = spec
        self.catalog = catalog
        self.n_max = n_max
        self.cfg = cfg
        self.cache: dict[float, Topology | SignatureError] = {}

    def __call__(self, U: float) -> Topology:
        if U not in self.cache:
            s = self.spec.with_strength(U)
            try:
                self.cache[U] = topology(s, self.catalog.at(U), self.n_max, self.cfg.trace)
            except SignatureError as exc:
                self.cache[U] = exc
            except (ConvergenceError, NearDegeneracyError) as exc:
                self.cache[U] = SignatureError(str(exc), U)
        got = self.cache[U]
        if isinstance(got, SignatureError):
            raise got
        return got


def _seed_from(top: Topology, keys, D, spec) -> tuple[complex, float, float] | None:
    best = None
    for key in keys:
        t = top.by_key().get(key)
        if t is None or not t.separation:
            continue
        alpha, mid, sep = closest_approach(t)
        if best is None or sep < best[0]:
            best = (sep, mid, alpha)
    if best is None:
        return None
    return best[1], best[2], top.U


def _resolve(spec, probe: _Prober, lo: float, hi: float, cfg: EventConfig) -> EventRecord:
    """Bisect a signature change in [lo, hi] and polish the contact."""
    top_lo, top_hi = probe(lo), probe(hi)
    stalled_seed = None
    while hi - lo > cfg.bracket:
        mid = 0.5 * (lo + hi)
        try:
            tm = probe(mid)
        except SignatureError as exc:
            stalled_seed = exc.seed and (exc.seed[0], exc.seed[1], mid)
            break
        if tm.signature == top_lo.signature:
            lo, top_lo = mid, tm
        else:
            hi, top_hi = mid, tm
    before = sorted(top_lo.signature - top_hi.signature, key=str)
    after = sorted(top_hi.signature - top_lo.signature, key=str)
    names_b = [trajectory_name(top_lo.by_key()[k]) for k in before]
    names_a = [trajectory_name(top_hi.by_key()[k]) for k in after]
    participants = ["+".join(names_b), "+".join(names_a)]

    D = moving_pole_function(spec)
    seeds = []
    if stalled_seed is not None:
        seeds.append(stalled_seed)
    for top, keys in ((top_lo, before), (top_hi, after)):
        s = _seed_from(top, keys, D, spec)
        if s is not None:
            seeds.append(s)
    scale = spec.momentum_scale
    best = None
    for seed in seeds:
        try:
            deg = solve_degeneracy(D, seed, scale=scale)
        except (ConvergenceError, IllConditionedError):
            continue
        if lo - 10 * cfg.bracket <= deg.U <= hi + 10 * cfg.bracket:
            if best is None or deg.residual < best.residual:
                best = deg
    if best is None:
        return EventRecord(
            _classify(before, after, 1.0 + 0j, scale), 0.5 * (lo + hi), math.nan, complex(math.nan, math.nan),
            participants, bracket=(float(lo), float(hi)), resolved=False,
        )
    alpha, k = _reduce_alpha(best.alpha, best.k)
    kind = _classify(before, after, k, scale)
    return EventRecord(kind, best.U, alpha, k, participants, residual=best.residual, bracket=(float(lo), float(hi)))


def detect_events(
    spec: PotentialSpec,
    U_range: tuple[float, float],
    n_max: int,
    cfg: EventConfig | None = None,
) -> list[EventRecord]:
    """Restructuring events of the pole trajectories for strengths in U_range.

    ``spec`` fixes the family and shape; its own U is ignored.
    """
    cfg = cfg or EventConfig()
    lo, hi = map(float, U_range)
    if not 0 < lo < hi:
        raise ValueError("U range must satisfy 0 < lo < hi")
    catalog = LabelCatalog.build(spec.with_strength(hi), hi, n_max, step=cfg.label_step, trace_cfg=cfg.trace)
    probe = _Prober(spec, catalog, n_max, cfg)
    n = max(1, int(math.ceil((hi - lo) / cfg.grid)))
    grid = list(np.linspace(lo, hi, n + 1))
    sigs = []
    for U in grid:
        try:
            sigs.append(probe(U).signature)
        except SignatureError:
            sigs.append(None)
    events: list[EventRecord] = []
    # endpoints of a change: consecutive grid points with known, different signatures
    known = [(U, s) for U, s in zip(grid, sigs) if s is not None]
    for (u0, s0), (u1, s1) in zip(known[:-1], known[1:]):
        if s0 != s1:
            events.append(_resolve(spec, probe, u0, u1, cfg))
    if spec.family is Family.SQUARE and spec.l >= 1:
        for u_th in axis_thresholds(spec, (lo, hi)):
            events = [e for e in events if not (e.kind == "ZeroMomentumCollision" and abs(e.U_critical - u_th) < 1.0)]
            events.append(EventRecord("ZeroMomentumCollision", u_th, 0.0, 0j, ["A-sector resonance pair"], residual=0.0))
    events.sort(key=lambda e: e.U_critical)
    return events
