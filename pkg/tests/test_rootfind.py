import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polepath.errors import ConvergenceError, IllConditionedError, NearDegeneracyError
from polepath.potentials import Family, PotentialSpec, hulthen_pole_closed_form, moving_pole_function, pole_condition_hulthen
from polepath.rootfind import count_zeros_in_rectangle, find_zeros_in_rectangle, refine_root, solve_degeneracy


def quad(k):
    return k * k + 1


def test_refine_simple_root():
    r = refine_root(quad, 0.1 + 0.9j)
    assert abs(r.k - 1j) < 1e-12
    assert r.multiplicity_hint == 1


def test_refine_double_root_hint():
    r = refine_root(lambda k: (k - 2j) ** 2, 2.1j)
    assert abs(r.k - 2j) < 1e-5
    assert r.multiplicity_hint == 2


def test_refine_hulthen_closed_form():
    spec = PotentialSpec(Family.HULTHEN, 30.0)
    exact = hulthen_pole_closed_form(1, 0.0, spec)
    r = refine_root(lambda k: pole_condition_hulthen(k, 0.0, spec), 25j)
    assert abs(r.k - exact) < 1e-8 * max(1, abs(exact))


def test_refine_explicit_derivative():
    r = refine_root(quad, 0.2 - 1.3j, df=lambda k: 2 * k)
    assert abs(r.k + 1j) < 1e-12


def test_refine_failure_carries_last_iterate():
    with pytest.raises(ConvergenceError) as exc:
        refine_root(lambda k: k * k + 1, 0.3, max_iter=3)
    assert exc.value.last is not None


def test_refine_flat_function_is_near_degenerate():
    with pytest.raises(NearDegeneracyError):
        refine_root(lambda k: 1.0 + 0j, 0.5)


def test_residual_monotone_on_simple_zero():
    r = refine_root(lambda k: (k - 1.5j) * (k + 3), 1.0j + 0.4)
    tail = r.history[-3:]
    assert all(b <= a for a, b in zip(tail, tail[1:]))


def test_count_examples():
    assert count_zeros_in_rectangle(quad, (-2 - 2j, 2 + 2j)) == 2
    assert count_zeros_in_rectangle(quad, (1 - 1j, 2 + 1j)) == 0


def test_count_hulthen_single_pole():
    spec = PotentialSpec(Family.HULTHEN, 10.0)
    k1 = hulthen_pole_closed_form(1, 0.0, spec)
    D = moving_pole_function(spec)
    n = count_zeros_in_rectangle(lambda k: D(k, 0.0, spec.U), (k1 - 10 - 10j, k1 + 10 + 10j))
    assert n == 1


zeros = st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False), min_size=1, max_size=5)


@settings(max_examples=60, deadline=None)
@given(zeros, st.floats(-2.5, 2.5))
def test_counts_add_over_a_cut(zs, cut):
    if any(abs(z.real - cut) < 1e-3 or abs(abs(z.imag) - 4) < 1e-3 for z in zs):
        return

    def f(k):
        out = 1.0 + 0j
        for z in zs:
            out *= k - z
        return out

    whole = count_zeros_in_rectangle(f, (-4 - 4j, 4 + 4j))
    left = count_zeros_in_rectangle(f, (-4 - 4j, cut + 4j))
    right = count_zeros_in_rectangle(f, (cut - 4j, 4 + 4j))
    assert whole == left + right == len(zs)


@pytest.mark.parametrize("samples", [16, 64])
def test_count_sample_doubling(samples):
    spec = PotentialSpec(Family.EXPONENTIAL, 10.0)
    D = moving_pole_function(spec)
    f = lambda k: D(k, 1.0, spec.U)  # noqa: E731
    box = (-300 - 300j, 300 + 100j)
    assert count_zeros_in_rectangle(f, box, samples) == count_zeros_in_rectangle(f, box, 2 * samples)


def test_find_zeros_in_rectangle():
    roots = find_zeros_in_rectangle(lambda k: (k - 0.5j) * (k + 1) * (k - 2 + 1j), (-3 - 3j, 3 + 3j))
    got = sorted((r.k for r in roots), key=lambda z: (z.real, z.imag))
    want = sorted([0.5j, -1, 2 - 1j], key=lambda z: (z.real, z.imag))
    assert len(got) == 3
    assert all(abs(a - b) < 1e-9 for a, b in zip(got, want))


def test_degeneracy_constructed_fold():
    U0 = 3.7
    res = solve_degeneracy(lambda k, a, U: k * k - (U - U0), (0.2 + 0.1j, 0.0, 4.0), fix_alpha=True)
    assert abs(res.k) < 1e-7 and abs(res.U - U0) < 1e-9
    assert res.residual < 1e-9


def test_degeneracy_exponential_fusion():
    spec = PotentialSpec(Family.EXPONENTIAL, 4.1)
    D = moving_pole_function(spec)
    res = solve_degeneracy(D, (-118.0j, math.pi, 4.1), scale=spec.momentum_scale, fix_alpha=True)
    assert 4.0 < res.U < 4.2
    assert abs(res.k.real) < 1e-6 and res.k.imag < 0
    assert res.residual < 1e-9


def test_degeneracy_square_loop():
    spec = PotentialSpec(Family.SQUARE, 221.0)
    D = moving_pole_function(spec)
    res = solve_degeneracy(D, (-140.0j, 0.0, 221.0), scale=spec.momentum_scale, fix_alpha=True)
    assert 220 < res.U < 222
    assert abs(res.k + 140j) < 1e-6
    assert res.residual < 1e-9


def test_degeneracy_without_fold_fails():
    with pytest.raises((ConvergenceError, IllConditionedError)):
        solve_degeneracy(lambda k, a, U: k - U, (1.0, 0.0, 1.0), max_iter=10)
