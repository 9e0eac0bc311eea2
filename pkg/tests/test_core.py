import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowlab.core import (
    DimensionError,
    FlowSpec,
    Observable,
    SampledTrajectory,
    StateVector,
    check_semigroup,
    periodic,
    sample_flow,
    wrap_gap,
)
from flowlab.maps import GOLDEN, frac_product


def rotation_flow(theta):
    return FlowSpec(lambda t, s: StateVector.of(float((s[0] + frac_product(t, theta)) % 1.0)), 1, periodic)


def test_state_vector_rejects_bad_coords():
    with pytest.raises(ValueError):
        StateVector(())
    with pytest.raises(ValueError):
        StateVector.of(1.0, math.nan)
    with pytest.raises(ValueError):
        StateVector.of(math.inf)
    assert StateVector.of(1, 2).dim == 2


def test_trajectory_invariants():
    s = StateVector.of(0.0)
    with pytest.raises(ValueError):
        SampledTrajectory((0.0, 0.0), (s, s))
    with pytest.raises(DimensionError):
        SampledTrajectory((0.0, 1.0), (s, StateVector.of(0.0, 1.0)))
    with pytest.raises(ValueError):
        SampledTrajectory((), ())


def test_sample_constant_flow():
    flow = FlowSpec(lambda t, s: s, 1)
    traj = sample_flow(flow, StateVector.of(1.0), [0, 1, 2])
    assert all(s == StateVector.of(1.0) for s in traj.states)


def test_sample_half_rotation():
    traj = sample_flow(rotation_flow(0.5), StateVector.of(0.0), [0, 1])
    assert [s[0] for s in traj.states] == [0.0, 0.5]


def test_sample_golden_rotation_matches_high_precision():
    mpmath.mp.dps = 50
    theta = mpmath.mpf(GOLDEN)  # same binary value, exact arithmetic
    traj = sample_flow(rotation_flow(GOLDEN), StateVector.of(0.0), list(range(11)))
    for t, s in zip(traj.times, traj.states):
        exact = float(mpmath.frac(theta * int(t)))
        assert wrap_gap(s[0], exact) < 1e-15


def test_sample_flow_errors():
    flow = FlowSpec(lambda t, s: s, 2)
    with pytest.raises(DimensionError):
        sample_flow(flow, StateVector.of(1.0), [0.0])
    with pytest.raises(ValueError):
        sample_flow(flow, StateVector.of(1.0, 2.0), [1.0, 0.5])


@given(st.lists(st.floats(-10, 10), min_size=1, max_size=4))
def test_sample_at_zero_returns_start(coords):
    flow = FlowSpec(lambda t, s: StateVector.from_array(s.as_array() * math.exp(-t)), len(coords))
    s0 = StateVector(tuple(coords))
    assert sample_flow(flow, s0, [0.0]).states == (s0,)


def test_semigroup_examples():
    samples = [StateVector.of(x) for x in (0.0, 0.3, 0.9)]
    pairs = [(0.5, 1.25), (2.0, 3.0), (0.0, 0.7)]
    rot = check_semigroup(rotation_flow(0.25), samples, pairs)
    assert rot.max_violation == 0.0 and rot.passed

    decay = FlowSpec(lambda t, s: StateVector.of(math.exp(-t) * s[0]), 1)
    assert check_semigroup(decay, samples, pairs).max_violation <= 1e-12

    broken = FlowSpec(lambda t, s: StateVector.of(s[0] + t * t), 1)
    rep = check_semigroup(broken, samples, pairs)
    assert not rep.passed and rep.max_violation > 0
    assert rep.worst is not None

    with pytest.raises(ValueError):
        check_semigroup(decay, samples, pairs, tol=0.0)


@given(st.floats(0, 1, exclude_max=True), st.floats(-50, 50), st.floats(-50, 50))
def test_additive_action_is_a_group(x, t, s):
    rep = check_semigroup(rotation_flow(GOLDEN), [StateVector.of(x)], [(t, s)])
    assert rep.max_violation <= 1e-12


def test_observable_and_periodic_metric():
    obs = Observable(lambda s: s[0] ** 2, "square")
    assert obs(StateVector.of(3.0)) == 9.0
    assert periodic(StateVector.of(0.95, 0.1), StateVector.of(0.05, 0.1)) == pytest.approx(0.1)
    with pytest.raises(DimensionError):
        periodic(StateVector.of(0.1), StateVector.of(0.1, 0.2))
    assert np.array_equal(StateVector.of(1, 2).as_array(), [1.0, 2.0])
