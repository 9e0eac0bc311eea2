import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowlab.infogeo import (
    NEG_ENTROPY,
    QUADRATIC,
    SimplexError,
    SimplexPoint,
    TangentVector,
    bregman_gradient,
    finite_difference_metric_gradient,
    fisher_gradient_kl,
    fisher_metric,
    gradient_flow,
    inverse_fisher,
    kl_divergence,
    kl_raw,
)


@st.composite
def simplex_points(draw, n=None):
    n = n or draw(st.integers(2, 6))
    w = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    return SimplexPoint.normalized(w)


@st.composite
def pairs(draw):
    n = draw(st.integers(2, 6))
    return draw(simplex_points(n)), draw(simplex_points(n))


def test_simplex_validation():
    with pytest.raises(SimplexError):
        SimplexPoint((0.5, 0.6))
    with pytest.raises(SimplexError):
        SimplexPoint((1.0, 0.0))
    with pytest.raises(SimplexError):
        SimplexPoint((1.0,))
    with pytest.raises(SimplexError):
        TangentVector((1.0, 0.5))


def test_metric_examples():
    assert np.array_equal(fisher_metric(SimplexPoint((0.5, 0.5))), [2.0, 2.0])
    assert np.allclose(fisher_metric(SimplexPoint((0.25, 0.75))), [4.0, 4 / 3])
    assert np.array_equal(fisher_metric(SimplexPoint.uniform(4)), [4.0] * 4)
    assert np.allclose(inverse_fisher(SimplexPoint((0.5, 0.5))), [[0.25, -0.25], [-0.25, 0.25]])


@given(simplex_points())
def test_inverse_metric_structure(p):
    G = inverse_fisher(p)
    assert np.allclose(G, G.T)
    assert np.max(np.abs(G.sum(axis=1))) <= 1e-15
    assert np.max(np.abs(G @ np.full(p.n, 3.7))) <= 1e-14


@given(simplex_points(), st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_metric_inverse_on_tangent_space(p, raw):
    v = np.array(raw[: p.n])
    v -= v.mean()
    back = inverse_fisher(p) @ (fisher_metric(p) * v)
    assert np.max(np.abs(back - v)) <= 1e-10


def test_kl_examples():
    p = SimplexPoint((0.5, 0.5))
    assert kl_divergence(p, p) == 0.0
    q = SimplexPoint((0.25, 0.75))
    assert kl_divergence(p, q) == pytest.approx(0.5 * math.log(2) + 0.5 * math.log(2 / 3), abs=1e-15)
    assert kl_divergence(p, q) == pytest.approx(0.143841, abs=1e-6)
    with pytest.raises(SimplexError):
        kl_divergence(p, SimplexPoint.uniform(3))
    rng = np.random.default_rng(0)
    assert all(kl_divergence(SimplexPoint.random(rng, 4), SimplexPoint.random(rng, 4)) >= 0 for _ in range(10**4))


def test_gradient_examples():
    p, q = SimplexPoint((0.5, 0.5)), SimplexPoint((0.25, 0.75))
    g = fisher_gradient_kl(p, q).as_array()
    assert g == pytest.approx([0.25 * math.log(3), -0.25 * math.log(3)], abs=1e-15)
    for n in (2, 3, 7):
        r = SimplexPoint.random(np.random.default_rng(n), n)
        assert np.all(fisher_gradient_kl(r, r).as_array() == 0.0)


@given(pairs())
def test_gradient_matches_fd_oracle(pq):
    p, q = pq
    g = fisher_gradient_kl(p, q).as_array()
    o = finite_difference_metric_gradient(kl_raw, p, q).as_array()
    assert abs(g.sum()) <= 1e-10 and abs(o.sum()) <= 1e-10
    assert np.max(np.abs(g - o)) <= 1e-6


def test_gradient_tangency_many():
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(10**4):
        n = int(rng.integers(2, 8))
        worst = max(worst, abs(fisher_gradient_kl(SimplexPoint.random(rng, n), SimplexPoint.random(rng, n)).as_array().sum()))
    assert worst <= 1e-10


def test_fd_oracle_edge_cases():
    p = SimplexPoint((0.3, 0.7))
    assert np.max(np.abs(finite_difference_metric_gradient(kl_raw, p, p).as_array())) <= 1e-8
    with pytest.raises(SimplexError):
        finite_difference_metric_gradient(kl_raw, SimplexPoint((1e-6, 1 - 1e-6)), p, fd_step=1e-5)


def test_bregman_examples():
    p, q = SimplexPoint((0.5, 0.5)), SimplexPoint((0.25, 0.75))
    # independent exact evaluation of p_i (d_i) - p_i sum_k p_k d_k with d = p - q
    P = [Fraction(1, 2), Fraction(1, 2)]
    Q = [Fraction(1, 4), Fraction(3, 4)]
    d = [a - b for a, b in zip(P, Q)]
    mean = sum(a * b for a, b in zip(P, d))
    exact = [float(a * b - a * mean) for a, b in zip(P, d)]
    assert exact == [0.125, -0.125]
    assert bregman_gradient(QUADRATIC, p, q).as_array() == pytest.approx(exact, abs=1e-15)
    assert np.all(bregman_gradient(QUADRATIC, p, p).as_array() == 0.0)
    assert QUADRATIC.looks_strictly_convex(np.random.default_rng(0), 3)
    assert NEG_ENTROPY.looks_strictly_convex(np.random.default_rng(0), 3)


@given(pairs())
def test_neg_entropy_reproduces_kl_gradient(pq):
    p, q = pq
    a = bregman_gradient(NEG_ENTROPY, p, q).as_array()
    b = fisher_gradient_kl(p, q).as_array()
    assert np.max(np.abs(a - b)) <= 1e-12
    assert NEG_ENTROPY.divergence(p, q) == pytest.approx(kl_divergence(p, q), abs=1e-12)


@given(pairs())
def test_bregman_gradient_matches_fd(pq):
    p, q = pq
    a = bregman_gradient(QUADRATIC, p, q).as_array()
    o = finite_difference_metric_gradient(QUADRATIC.divergence, p, q).as_array()
    assert np.max(np.abs(a - o)) <= 1e-6


def test_gradient_flow():
    q = SimplexPoint.uniform(3)
    assert gradient_flow(q, q).steps == 0
    rng = np.random.default_rng(4)
    for _ in range(10):
        path = gradient_flow(SimplexPoint.random(rng, 3), q, step_size=0.1, max_steps=10**4, tol=1e-8)
        assert path.divergences[-1] < 1e-8 and path.strictly_decreasing
    with pytest.raises(ValueError):
        gradient_flow(q, q, step_size=0.0)


def test_flow_halves_large_steps():
    p0, q = SimplexPoint((0.98, 0.01, 0.01)), SimplexPoint((0.01, 0.01, 0.98))
    path = gradient_flow(p0, q, step_size=50.0)
    assert path.strictly_decreasing and min(path.step_sizes) < 50.0
    assert all(min(pt.probs) > 1e-9 for pt in path.points)
