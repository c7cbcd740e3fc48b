"""Acceptance checks, shared by ``polepath verify`` and the test suite.

Each check returns a :class:`Check` with the measured and expected values
so that the report reads on its own.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .events import EventConfig, detect_events, seed_poles, square_axis_labels, topology, LabelCatalog
from .potentials import Family, PotentialSpec, fixed_zero, hulthen_pole_closed_form, moving_pole_function, s_matrix
from .rootfind import count_zeros_in_rectangle, find_zeros_in_rectangle
from .sweep import axis_thresholds, count_axis_poles, sweep_real_strength
from .tracer import Periodicity, PoleLabel, Trajectory, trace

TWO_PI = 2.0 * math.pi


@dataclass
class Check:
    name: str
    passed: bool
    measured: str
    expected: str
    details: dict = field(default_factory=dict, repr=False)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: measured {self.measured}; expected {self.expected}"


def fit_circle(ks) -> tuple[complex, float]:
    """Algebraic least-squares circle through the points."""
    z = np.asarray(ks, dtype=complex)
    A = np.column_stack([z.real, z.imag, np.ones(len(z))])
    b = z.real**2 + z.imag**2
    (a, c, d), *_ = np.linalg.lstsq(A, b, rcond=None)
    centre = complex(a / 2, c / 2)
    return centre, math.sqrt(d + abs(centre) ** 2)


# traces kept for the orientation check
_closed_traces: list[Trajectory] = []


def check_hulthen_circles() -> Check:
    spec = PotentialSpec(Family.HULTHEN, 10.0)
    worst_pt = worst_c = worst_r = 0.0
    periods = []
    for n in (1, 2, 3):
        k0 = hulthen_pole_closed_form(n, 0.0, spec)
        tr = trace(spec, (PoleLabel("A", n), k0), (0.0, 2 * TWO_PI))
        _closed_traces.append(tr)
        periods.append(tr.periodicity.value)
        worst_pt = max(worst_pt, max(abs(p.k - hulthen_pole_closed_form(n, p.alpha, spec)) for p in tr.points))
        centre, radius = fit_circle([p.k for p in tr.closed_points()])
        worst_c = max(worst_c, abs(centre - (-70j * n)))
        worst_r = max(worst_r, abs(radius - (940 / 140) * 10 / n))
    ok = worst_pt < 1e-6 and worst_c < 1e-6 and worst_r < 1e-6 and all(p == "TwoPi" for p in periods)
    return Check(
        "1 Hulthen circle oracle",
        ok,
        f"max |k - closed form| = {worst_pt:.2e} MeV, centre err {worst_c:.2e}, radius err {worst_r:.2e}, periodicity {periods}",
        "< 1e-6 MeV, TwoPi",
    )


def check_square_thresholds() -> Check:
    th = axis_thresholds(PotentialSpec(Family.SQUARE, 1.0), (1.0, 240.0))
    ok = len(th) == 2 and abs(th[0] - 25.7) <= 0.1 and abs(th[1] - 231.5) <= 0.1
    return Check("2 square-well s-wave thresholds", ok, ", ".join(f"{u:.4f}" for u in th) + " MeV", "25.7 +- 0.1, 231.5 +- 0.1 MeV")


def check_winding_law() -> Check:
    spec = PotentialSpec(Family.EXPONENTIAL, 0.1)
    v = spec.coupling(0.0).real
    seeds = dict(seed_poles(spec, 3))
    rel, winds = [], []
    for n in (1, 2, 3):
        k = seeds[PoleLabel("A", n)]
        eps = v**n / (math.factorial(n) * math.factorial(n - 1))
        measured = ((k - fixed_zero(n, spec)) / (1j * spec.momentum_scale)).real
        rel.append(abs(measured / eps - 1))
        tr = trace(spec, (PoleLabel("A", n), k), (0.0, 2 * TWO_PI))
        _closed_traces.append(tr)
        winds.append(tr.windings.get(n, 0) if tr.periodicity is Periodicity.TWO_PI else None)
    ok = all(r < 0.02 for r in rel) and winds == [1, 2, 3]
    return Check(
        "3 exponential winding law",
        ok,
        "rel. offset error " + ", ".join(f"{r:.2%}" for r in rel) + f"; windings {winds}",
        "< 2%; windings [1, 2, 3]",
    )


def check_event_brackets() -> Check:
    exp_events = detect_events(PotentialSpec(Family.EXPONENTIAL, 1.0), (1.0, 25.0), 4)
    sq_events = detect_events(PotentialSpec(Family.SQUARE, 1.0), (1.0, 240.0), 4, EventConfig(grid=2.0))
    wanted = [
        ("Fusion", exp_events, 4.0, 4.2),
        ("RearrangementI", exp_events, 10.3, 10.5),
        ("RearrangementII", exp_events, 20.4, 20.5),
        ("LoopFormation", sq_events, 220.0, 222.0),
    ]
    parts, ok = [], True
    for kind, evs, lo, hi in wanted:
        hit = [e for e in evs if e.kind == kind and lo < e.U_critical < hi and e.resolved and e.residual < 1e-9]
        ok &= bool(hit)
        if hit:
            parts.append(f"{kind} U*={hit[0].U_critical:.5f} (res {hit[0].residual:.1e})")
        else:
            found = [f"{e.kind}@{e.U_critical:.4f}" for e in evs if e.kind == kind]
            parts.append(f"{kind} missing (found {found})")
    return Check(
        "4 event brackets",
        ok,
        "; ".join(parts),
        "Fusion (4.0,4.2), RearrI (10.3,10.5), RearrII (20.4,20.5), Loop (220,222), residual < 1e-9",
        details={"exponential": exp_events, "square": sq_events},
    )


def _random_k(rng: random.Random) -> complex:
    return complex(rng.uniform(-300, 300), rng.uniform(-300, 300))


def check_smatrix_identities(samples: int = 500, seed: int = 7) -> Check:
    rng = random.Random(seed)
    families = [
        PotentialSpec(Family.EXPONENTIAL, 10.0),
        PotentialSpec(Family.HULTHEN, 10.0),
        PotentialSpec(Family.GENERALIZED_HULTHEN, 10.0, c=0.5),
        PotentialSpec(Family.SQUARE, 50.0, l=0),
        PotentialSpec(Family.SQUARE, 50.0, l=1),
    ]
    worst_unit = worst_conj = 0.0
    for spec in families:
        for _ in range(samples):
            k = _random_k(rng)
            alpha = rng.uniform(-TWO_PI, TWO_PI)
            spec_u = spec.with_strength(rng.uniform(1.0, 30.0))
            s1 = s_matrix(k, alpha, spec_u)
            s2 = s_matrix(-k, alpha, spec_u)
            worst_unit = max(worst_unit, abs(s1 * s2 - 1))
            lhs = s_matrix(k, -alpha, spec_u).conjugate()
            rhs = s_matrix(-k.conjugate(), alpha % TWO_PI, spec_u)
            worst_conj = max(worst_conj, abs(lhs - rhs))
    ok = worst_unit < 1e-10 and worst_conj < 1e-9
    return Check(
        "5 S-matrix identities",
        ok,
        f"max |S(k)S(-k) - 1| = {worst_unit:.2e}, max conjugation error = {worst_conj:.2e}",
        "< 1e-10 and < 1e-9",
    )


def check_engine_crossvalidation() -> Check:
    corners = (complex(-300, -300), complex(300, 100))
    worst = 0.0
    counts = []
    ok = True
    for U in (1.0, 10.0, 30.0):
        spec = PotentialSpec(Family.EXPONENTIAL, U)
        closed = moving_pole_function(spec)
        series = moving_pole_function(spec, engine="series")
        for alpha in (0.0, math.pi / 2, math.pi):
            fa = lambda k: closed(k, alpha, U)  # noqa: E731
            fb = lambda k: series(k, alpha, U)  # noqa: E731
            na = count_zeros_in_rectangle(fa, corners)
            nb = count_zeros_in_rectangle(fb, corners)
            za = sorted((r.k for r in find_zeros_in_rectangle(fa, corners)), key=lambda z: (z.imag, z.real))
            zb = sorted((r.k for r in find_zeros_in_rectangle(fb, corners)), key=lambda z: (z.imag, z.real))
            counts.append(na)
            if na != nb or len(za) != na or len(zb) != nb:
                ok = False
                continue
            for a in za:
                worst = max(worst, min(abs(a - b) for b in zb))
    ok = ok and worst < 1e-8
    return Check("6 series vs closed-form zero sets", ok, f"counts {counts}, max location difference {worst:.2e} MeV", "equal counts, < 1e-8 MeV")


def check_repulsive_dichotomy() -> Check:
    hul = sweep_real_strength(PotentialSpec(Family.HULTHEN, 1.0), (-60.0, 0.0), 6)
    exp = sweep_real_strength(PotentialSpec(Family.EXPONENTIAL, 1.0), (-60.0, 0.0), 6)
    pairs = sorted(tuple(str(l) for l in c.labels) for c in exp.collisions)
    ok = not hul.collisions and pairs == [("R1", "R2"), ("R3", "R4"), ("R5", "R6")]
    return Check(
        "7 repulsive-sector dichotomy",
        ok,
        f"Hulthen collisions {len(hul.collisions)}; exponential pairs {pairs} at Ubar "
        + ", ".join(f"{c.ubar:.3f}" for c in exp.collisions),
        "0; [R1R2, R3R4, R5R6]",
    )


def check_pole_count_conservation() -> Check:
    spec = PotentialSpec(Family.EXPONENTIAL, 10.0)
    seeds = dict(seed_poles(spec, 2))
    tr = trace(spec, (PoleLabel("A", 1), seeds[PoleLabel("A", 1)]), (0.0, 2 * TWO_PI))
    D = moving_pole_function(spec)
    ks = tr.ks
    # fixed rectangle enclosing the whole trajectory, bottom edge between fixed zeros 4 and 5
    corners = (complex(-400, -315), complex(400, 300))
    assert ks.imag.min() > -315 and abs(ks.real).max() < 400
    counts = []
    for p in tr.points[:: max(1, len(tr.points) // 24)]:
        counts.append(count_zeros_in_rectangle(lambda k, a=p.alpha: D(k, a, spec.U), corners))
    ok = len(set(counts)) == 1
    return Check("8 pole-count conservation", ok, f"counts along (A2-A1) at U = 10: {sorted(set(counts))} over {len(counts)} phases", "one constant value")


def check_pwave() -> Check:
    counts = [len(count_axis_poles(PotentialSpec(Family.SQUARE, U, l=1), math.pi)) for U in (1.0, 50.0, 200.0)]
    th = axis_thresholds(PotentialSpec(Family.SQUARE, 1.0, l=1), (1.0, 240.0))
    evs = detect_events(PotentialSpec(Family.SQUARE, 1.0, l=1), (90.0, 120.0), 2, EventConfig(grid=5.0))
    zmc = [e for e in evs if e.kind == "ZeroMomentumCollision"]
    ok = counts == [1, 1, 1] and bool(th) and bool(zmc)
    u_zmc = f"{zmc[0].U_critical:.4f}" if zmc else "none"
    return Check(
        "9 square p-wave",
        ok,
        f"repulsive antibound counts {counts}; first threshold {th[0] if th else float('nan'):.4f} MeV; ZeroMomentumCollision at {u_zmc} MeV",
        "[1, 1, 1]; a ZeroMomentumCollision above the threshold (value reported)",
    )


def check_counterclockwise() -> Check:
    trajs = list(_closed_traces)
    spec = PotentialSpec(Family.EXPONENTIAL, 1.0)
    cat = LabelCatalog.build(spec.with_strength(21.0), 21.0, 4)
    for U in (3.0, 5.0, 11.0, 21.0):
        trajs += topology(spec.with_strength(U), cat.at(U), 4).trajectories
    sq = PotentialSpec(Family.SQUARE, 222.0)
    trajs += topology(sq, square_axis_labels(sq), 3).trajectories
    closed = [t for t in trajs if t.periodicity is not Periodicity.OPEN]
    areas = [t.signed_area() for t in closed]
    ok = bool(areas) and min(areas) > 0
    return Check("10 counterclockwise motion", ok, f"{len(closed)} closed trajectories, min signed area {min(areas):.4g} MeV^2", "all > 0")


CHECKS: list[Callable[[], Check]] = [
    check_hulthen_circles,
    check_square_thresholds,
    check_winding_law,
    check_event_brackets,
    check_smatrix_identities,
    check_engine_crossvalidation,
    check_repulsive_dichotomy,
    check_pole_count_conservation,
    check_pwave,
    check_counterclockwise,
]


def run_all(report: Callable[[str], None] | None = None) -> list[Check]:
    out = []
    for fn in CHECKS:
        try:
            c = fn()
        except Exception as exc:  # a crash is a failed criterion, not an aborted report
            c = Check(fn.__name__, False, f"error: {type(exc).__name__}: {exc}", "no error")
        out.append(c)
        if report:
            report(c.line())
    return out
