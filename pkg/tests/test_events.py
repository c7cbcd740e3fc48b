import math

import pytest

from polepath.events import EventConfig, LabelCatalog, detect_events, seed_poles, topology, trajectory_name
from polepath.potentials import Family, PotentialSpec, fixed_zero, hulthen_pole_closed_form, moving_pole_function
from polepath.tracer import Periodicity, PoleLabel

A = lambda n: PoleLabel("A", n)  # noqa: E731
R = lambda n: PoleLabel("R", n)  # noqa: E731


def test_seed_exponential_small_strength():
    spec = PotentialSpec(Family.EXPONENTIAL, 0.1)
    seeds = dict(seed_poles(spec, 2))
    eps = 2 * spec.m * spec.r0**2 * spec.U
    assert abs(seeds[A(1)] - (-70j * (1 - eps))) < 0.01
    assert abs(seeds[R(1)] - (-70j * (1 + eps))) < 0.01
    assert abs(seeds[A(2)] - fixed_zero(2, spec)) < 0.05


@pytest.mark.parametrize("U", [3.0, 30.0])
def test_seed_hulthen_matches_closed_form(U):
    spec = PotentialSpec(Family.HULTHEN, U)
    seeds = dict(seed_poles(spec, 4))
    for n in range(1, 5):
        exact = hulthen_pole_closed_form(n, 0.0, spec)
        assert abs(seeds[A(n)] - exact) < 1e-8 * max(1, abs(exact))
        assert abs(seeds[R(n)] - hulthen_pole_closed_form(n, math.pi, spec)) < 1e-8 * max(1, abs(exact))


def test_seed_square_single_antibound():
    seeds = dict(seed_poles(PotentialSpec(Family.SQUARE, 1.0), 1))
    attractive = [k for lab, k in seeds.items() if lab.sector == "A"]
    assert len(attractive) == 1 and attractive[0].imag < 0


def test_seeds_are_poles():
    spec = PotentialSpec(Family.EXPONENTIAL, 30.0)
    D = moving_pole_function(spec)
    for lab, k in seed_poles(spec, 6):
        alpha = 0.0 if lab.sector == "A" else math.pi
        d1 = abs(D(k + 1e-3, alpha, spec.U) - D(k, alpha, spec.U)) / 1e-3
        assert abs(D(k, alpha, spec.U)) < 1e-9 * d1 * max(1, abs(k))


def test_seed_rejects_bad_nmax():
    with pytest.raises(ValueError):
        seed_poles(PotentialSpec(Family.HULTHEN, 1.0), 0)


def test_catalog_resonance_gets_odd_label():
    spec = PotentialSpec(Family.EXPONENTIAL, 30.0)
    cat = LabelCatalog.build(spec, 30.0, 4).at(30.0)
    assert cat[R(1)].real > 0 and cat[R(2)].real < 0
    assert cat[R(1)] == pytest.approx(-cat[R(2)].conjugate())


def test_topology_exponential_pair():
    spec = PotentialSpec(Family.EXPONENTIAL, 5.0)
    top = topology(spec, dict(seed_poles(spec, 2)), 2)
    assert (Periodicity.FOUR_PI.value, frozenset({A(1), A(2)})) in top.signature
    names = {trajectory_name(t) for t in top.trajectories}
    assert "(A2-A1)" in names


def test_fusion_event():
    evs = detect_events(PotentialSpec(Family.EXPONENTIAL, 1.0), (3.5, 5.0), 4)
    assert [e.kind for e in evs] == ["Fusion"]
    e = evs[0]
    assert 4.0 < e.U_critical < 4.2
    assert e.bracket[1] - e.bracket[0] <= 1e-3
    assert e.residual < 1e-9
    assert e.alpha_critical == pytest.approx(math.pi)
    assert abs(e.k_critical.real) < 1e-6 and e.k_critical.imag < 0
    assert e.participants == ["(R1-A1)+(R2-A2)", "(A2-A1)"]


def test_second_fusion_obeys_empirical_conditions():
    # (R_m' - A_m) + (R_n' - A_n) -> (A_m - A_n) with m = m' = 2n, n' = 2n - 1, here n = 2
    evs = detect_events(PotentialSpec(Family.EXPONENTIAL, 1.0), (16.5, 18.5), 4)
    assert [e.kind for e in evs] == ["Fusion"]
    assert evs[0].participants == ["(R3-A2)+(R4-A4)", "(A4-A2)"]
    assert evs[0].residual < 1e-9


def test_rearrangement_event():
    evs = detect_events(PotentialSpec(Family.EXPONENTIAL, 1.0), (9.5, 11.0), 4)
    assert [e.kind for e in evs] == ["RearrangementI"]
    e = evs[0]
    assert 10.3 < e.U_critical < 10.5
    assert math.pi < e.alpha_critical < 2 * math.pi
    assert e.participants == ["(A2-A1)+(R3-A3)", "(A3-A1)+(R3-A2)"]


def test_hulthen_has_no_events():
    evs = detect_events(PotentialSpec(Family.HULTHEN, 1.0), (1.0, 100.0), 4)
    assert evs == []


def test_pwave_zero_momentum_collision():
    evs = detect_events(PotentialSpec(Family.SQUARE, 1.0, l=1), (95.0, 110.0), 2)
    zm = [e for e in evs if e.kind == "ZeroMomentumCollision"]
    assert len(zm) == 1
    assert zm[0].k_critical == 0 and 100 < zm[0].U_critical < 110


def test_events_sorted_and_configurable():
    cfg = EventConfig(grid=0.5)
    evs = detect_events(PotentialSpec(Family.EXPONENTIAL, 1.0), (3.0, 11.0), 4, cfg)
    assert [e.kind for e in evs] == ["Fusion", "RearrangementI"]
    assert evs == sorted(evs, key=lambda e: e.U_critical)
