import math

import numpy as np
import pytest

from polepath.potentials import Family, PotentialSpec
from polepath.sweep import axis_roots, axis_thresholds, count_axis_poles, sweep_real_strength
from polepath.tracer import PoleLabel


def test_axis_roots_sign_changes_and_hidden_pair():
    roots = axis_roots(lambda x: (x - 1) * (x + 2) * (x - 3), -5, 5, 50)
    assert roots == pytest.approx([-2, 1, 3], abs=1e-12)
    # a close pair inside one grid cell shows up only as a dip of |g|
    pair = axis_roots(lambda x: (x - 0.53) * (x - 0.56), 0.0, 1.0, 10)
    assert pair == pytest.approx([0.53, 0.56], abs=1e-10)


def test_hulthen_flows_are_straight_lines():
    spec = PotentialSpec(Family.HULTHEN, 1.0)
    res = sweep_real_strength(spec, (-60.0, 60.0), 6)
    assert res.collisions == []
    assert len(res.labels()) == 12
    slope = 2 * spec.m * spec.r0**2
    for lab in res.labels():
        u, kap = res.flow(lab)
        exact = 70.0 * (slope * u / lab.n - lab.n)
        assert np.max(np.abs(kap - exact)) < 1e-8
        assert np.all(np.sign(u[u != 0]) == (1 if lab.sector == "A" else -1))


def test_exponential_repulsive_pairs_collide():
    res = sweep_real_strength(PotentialSpec(Family.EXPONENTIAL, 1.0), (-45.0, 0.0), 6)
    pairs = sorted((str(c.labels[0]), str(c.labels[1])) for c in res.collisions)
    assert [tuple(sorted(p)) for p in pairs] == [("R1", "R2"), ("R3", "R4"), ("R5", "R6")]
    for c in res.collisions:
        assert c.ubar < 0 and c.residual < 1e-9
    first = min(res.collisions, key=lambda c: -c.ubar)
    assert first.ubar == pytest.approx(-4.1897, abs=1e-3)
    # after the fold the pair continues as a resonance / antiresonance pair
    assert res.resonances
    path = res.resonances[0]
    assert all(k.real > 0 and k.imag < 0 for k in path.k[1:])
    ev = res.events
    assert {e.kind for e in ev} == {"AxisCollision"}
    assert all(e.alpha_critical == math.pi for e in ev)


def test_generalized_hulthen_non_monotone_flows():
    spec = PotentialSpec(Family.GENERALIZED_HULTHEN, 1.0, c=-0.95)
    res = sweep_real_strength(spec, (-45.0, 0.0), 4)
    pairs = {frozenset(map(str, c.labels)) for c in res.collisions}
    assert pairs == {frozenset({"R1", "R2"}), frozenset({"R3", "R4"})}
    u, kap = res.flow(PoleLabel("R", 3))
    d = np.diff(kap)
    assert (d > 0).any() and (d < 0).any()


def test_square_thresholds_and_pwave_count():
    th = axis_thresholds(PotentialSpec(Family.SQUARE, 1.0, l=1), (1.0, 240.0))
    assert th and 100 < th[0] < 110
    for U in (1.0, 50.0, 200.0):
        roots = count_axis_poles(PotentialSpec(Family.SQUARE, U, l=1), math.pi)
        assert len([r for r in roots if r < 0]) == 1


def test_square_sweep_arrival():
    res = sweep_real_strength(PotentialSpec(Family.SQUARE, 1.0), (215.0, 225.0), 4)
    arrivals = [c for c in res.collisions if c.arrival]
    assert len(arrivals) == 1
    assert 220 < arrivals[0].ubar < 222
    assert arrivals[0].kappa == pytest.approx(-140.0, abs=1e-3)
