import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import brentq

from flowlab.core import StateVector
from flowlab.picard import (
    FixedPointDivergence,
    LipschitzViolation,
    NewtonFailure,
    PicardConfig,
    VectorField,
    classify_stability,
    find_equilibrium,
    iterate_to_fixed_point,
    picard_operator,
    picard_window,
    rk4_reference,
    solve_ivp_picard,
)

decay = VectorField(lambda x: -x, 1.0)
oscillator = VectorField(lambda x: np.array([x[1], -x[0]]), 1.0, dim=2)
pendulum = VectorField(lambda x: np.array([x[1], -math.sin(x[0])]), 1.0, dim=2)


def test_config_validation():
    with pytest.raises(ValueError):
        PicardConfig(window_factor=1.0)
    with pytest.raises(ValueError):
        PicardConfig(grid_step=0.0)
    with pytest.raises(ValueError):
        VectorField(lambda x: x, -1.0)


def test_constant_field_is_exact():
    sol = solve_ivp_picard(VectorField(lambda x: np.zeros_like(x), 0.0), StateVector.of(1.0), 1.0)
    assert np.all(sol.values == 1.0)
    assert sol.residual == 0.0 and sol.iterations_used == 1


def test_decay_against_closed_form_and_rk4():
    sol = solve_ivp_picard(decay, StateVector.of(1.0), 5.0)
    t = sol.times
    assert np.max(np.abs(sol.values[:, 0] - np.exp(-t))) <= 1e-6
    fine = np.linspace(0, 5, 50001)  # RK4 at step 1e-4
    rk = rk4_reference(decay, [1.0], fine)
    assert abs(rk[-1, 0] - sol.values[-1, 0]) <= 1e-6
    assert sol.residual <= 1e-10
    assert sol.contraction_constant == pytest.approx(0.5)
    assert max(sol.contraction_ratios) <= sol.contraction_constant + 1e-9


def test_oscillator_returns_home():
    sol = solve_ivp_picard(oscillator, StateVector.of(1.0, 0.0), 2 * math.pi)
    assert np.linalg.norm(sol.values[-1] - [1.0, 0.0]) <= 1e-5
    t = sol.times
    exact = np.stack([np.cos(t), -np.sin(t)], axis=1)
    assert np.max(np.abs(sol.values - exact)) <= 1e-5


@pytest.mark.parametrize("field,s0", [(decay, [2.0]), (oscillator, [0.3, -1.0]), (pendulum, [1.0, 0.0])])
def test_contraction_ratios_bounded(field, s0):
    sol = solve_ivp_picard(field, StateVector(tuple(s0)), 3.0)
    assert max(sol.contraction_ratios) <= sol.contraction_constant + 1e-9


def test_integral_equation_defect_per_window():
    times = np.linspace(0, 0.5, 501)
    res = picard_window(oscillator, [1.0, 0.0], times, 1e-10, 200)
    defect = np.max(np.abs(picard_operator(oscillator, np.array([1.0, 0.0]), times, res.values) - res.values))
    assert defect <= 1e-10


def test_uniqueness_probe_two_starts_agree():
    times = np.linspace(0, 0.5, 501)
    cold = picard_window(decay, [1.0], times, 1e-11, 200)
    warm = picard_window(decay, [1.0], times, 1e-11, 200, initial=rk4_reference(decay, [1.0], times))
    assert np.max(np.abs(cold.values - warm.values)) <= 2e-11


def test_understated_lipschitz_is_detected():
    fast = VectorField(lambda x: 50.0 * x, 0.1)
    with pytest.raises(LipschitzViolation):
        solve_ivp_picard(fast, StateVector.of(1.0), 1.0)


def test_fixed_point_examples():
    r = iterate_to_fixed_point(lambda x: x / 2 + 1, 0.0, tol=1e-12)
    assert abs(r.fixed_point - 2.0) <= 1e-12
    assert all(b < a for a, b in zip(r.trace, r.trace[1:]))
    same = iterate_to_fixed_point(lambda s: s, StateVector.of(3.0))
    assert same.fixed_point == StateVector.of(3.0) and same.iterate_count == 0
    star = brentq(lambda x: math.cos(x) - x, 0.0, 1.0, xtol=1e-15)
    assert abs(iterate_to_fixed_point(math.cos, 1.0, tol=1e-12).fixed_point - star) <= 1e-9
    with pytest.raises(FixedPointDivergence):
        iterate_to_fixed_point(lambda x: 2 * x + 1, 1.0, max_iter=50)


@given(st.floats(-0.9, 0.9), st.floats(-10, 10))
def test_affine_contractions_converge(a, b):
    r = iterate_to_fixed_point(lambda x: a * x + b, 0.0, tol=1e-12)
    assert abs(r.fixed_point - b / (1 - a)) <= 1e-10 * max(1.0, abs(b / (1 - a)))


def test_equilibria():
    assert abs(find_equilibrium(decay, StateVector.of(5.0))[0]) <= 1e-10
    logistic_field = VectorField(lambda x: x * (1 - x), 1.0)
    assert abs(find_equilibrium(logistic_field, StateVector.of(0.9))[0] - 1.0) <= 1e-10
    eq = find_equilibrium(pendulum, StateVector.of(3.0, 0.1), tol=1e-12)
    assert abs(eq[0] - math.pi) <= 1e-8 and abs(eq[1]) <= 1e-8
    with pytest.raises(NewtonFailure):
        find_equilibrium(VectorField(lambda x: x * x + 1.0, 1.0), StateVector.of(0.5))


def test_stability_classification():
    r = classify_stability(decay, StateVector.of(0.0))
    assert r.kind == "asymptotically_stable" and r.eigenvalues[0].real == pytest.approx(-1.0)
    assert classify_stability(VectorField(lambda x: x, 1.0), StateVector.of(0.0)).kind == "unstable"
    saddle = classify_stability(pendulum, StateVector.of(math.pi, 0.0))
    assert saddle.kind == "unstable"
    assert sorted(e.real for e in saddle.eigenvalues) == pytest.approx([-1.0, 1.0], abs=1e-6)
    assert classify_stability(oscillator, StateVector.of(0.0, 0.0)).kind == "marginal"
    with pytest.raises(ValueError):
        classify_stability(decay, StateVector.of(1.0))
