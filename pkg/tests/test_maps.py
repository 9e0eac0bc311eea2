import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from flowlab.maps import (
    GOLDEN,
    CircleState,
    Convergent,
    RotationSystem,
    TorusState,
    cat_eigen,
    cat_orbit,
    cat_step,
    cat_step_array,
    circle_distance,
    convergents,
    frac_product,
    logistic_orbit,
    logistic_preimages,
    logistic_step,
    lyapunov_exponent,
    return_times,
    rotate,
    rotation_orbit,
    sensitivity_probe,
)

golden = RotationSystem(GOLDEN)


def test_rotate_examples():
    assert rotate(RotationSystem(0.25), CircleState(0.0), 2).angle == 0.5
    assert rotate(golden, CircleState(0.37), 0).angle == 0.37
    mpmath.mp.dps = 40
    for t in range(1, 6):
        exact = float(mpmath.frac(mpmath.mpf(GOLDEN) * t))
        assert abs(rotate(golden, CircleState(0.0), t).angle - exact) <= 1e-12


def test_long_orbit_has_no_drift():
    mpmath.mp.dps = 60
    theta = mpmath.mpf(GOLDEN)
    orbit = rotation_orbit(golden, CircleState(0.0), 10**6)
    for n in (10**3, 12345, 10**6):
        assert circle_distance(orbit[n], float(mpmath.frac(theta * n))) <= 1e-15


def _fraction_cf(x: Fraction, count: int):
    # oracle: textbook recursion on the exact rational, without the integer part
    out, h0, k0, h1, k1 = [], 1, 0, math.floor(x), 1
    x -= math.floor(x)
    while x and len(out) < count:
        x = 1 / x
        a = math.floor(x)
        x -= a
        h0, k0, h1, k1 = h1, k1, a * h1 + h0, a * k1 + k0
        out.append((h1, k1))
    return out


def test_convergents_golden_are_fibonacci():
    qs = [c.q for c in convergents(GOLDEN, 22)]
    fib = [1, 2]
    while len(fib) < 22:
        fib.append(fib[-1] + fib[-2])
    assert qs == fib
    assert [(c.p, c.q) for c in convergents(GOLDEN, 30)] == _fraction_cf(Fraction(GOLDEN), 30)


def test_convergents_rational_and_bounds():
    assert convergents(0.5, 5) == [Convergent(1, 2)]
    for theta in (GOLDEN, math.sqrt(2) - 1, math.pi - 3, 0.3183):
        for c in convergents(theta, 15):
            assert abs(Fraction(theta) * c.q - c.p) < Fraction(1, c.q)
    with pytest.raises(ValueError):
        convergents(GOLDEN, 0)
    with pytest.raises(ValueError):
        Convergent(2, 4)


def test_return_times():
    half = return_times(RotationSystem(0.5), CircleState(0.0), 0.01, 20)
    assert half == list(range(2, 21, 2))
    times = return_times(golden, CircleState(0.0), 0.01, 1000)
    assert 144 in times
    orbit = rotation_orbit(golden, CircleState(0.0), 1000)
    brute = [n for n in range(1, 1001) if circle_distance(orbit[n], 0.0) < 0.01]
    assert times == brute
    for c in convergents(GOLDEN, 20):
        assert circle_distance(rotate(golden, CircleState(0.0), c.q).angle, 0.0) <= 1.0 / c.q
    with pytest.raises(ValueError):
        return_times(golden, CircleState(0.0), 0.6, 10)


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.floats(-1e4, 1e4))
def test_rotation_is_isometry(a, b, t):
    ra, rb = rotate(golden, CircleState(a), t), rotate(golden, CircleState(b), t)
    assert abs(circle_distance(ra.angle, rb.angle) - circle_distance(a, b)) <= 1e-12


def test_logistic_examples():
    assert logistic_step(0.5) == 1.0
    assert logistic_step(0.0) == 0.0
    assert logistic_step(0.75) == 0.75
    assert len(logistic_orbit(0.3, 10)) == 11
    with pytest.raises(ValueError):
        logistic_step(1.5)


def test_preimages_examples():
    assert logistic_preimages(1.0) == (0.5, 0.5)
    assert logistic_preimages(0.0) == (0.0, 1.0)
    lo, hi = logistic_preimages(0.64)
    assert lo == pytest.approx(0.2, abs=1e-15) and hi == pytest.approx(0.8, abs=1e-15)
    with pytest.raises(ValueError):
        logistic_preimages(1.01)


def test_preimages_invert_the_map():
    xs = np.random.default_rng(0).random(10**4)
    for x in xs:
        lo, hi = logistic_preimages(float(x))
        assert lo <= 0.5 <= hi
        assert abs(logistic_step(lo) - x) <= 1e-12 and abs(logistic_step(hi) - x) <= 1e-12
        assert abs(lo + hi - 1.0) <= 1e-15


def test_cat_examples_and_rational_oracle():
    assert cat_step(TorusState(0.0, 0.0)) == TorusState(0.0, 0.0)
    assert cat_step(TorusState(0.5, 0.5)) == TorusState(0.0, 0.5)
    exact = cat_orbit(TorusState(Fraction(1, 10), Fraction(2, 10)), 6)
    x, y = Fraction(1, 10), Fraction(2, 10)
    for s in exact:  # integer oracle on numerators mod 10
        assert (s.x, s.y) == (x, y)
        x, y = (x + y) % 1, (2 * x + y) % 1
    floats = np.array([0.1, 0.2])
    for s in exact[1:]:
        floats = cat_step_array(floats)
        assert np.allclose(floats, [float(s.x), float(s.y)], atol=1e-12)


def test_cat_eigen():
    lp, lm = cat_eigen()
    assert abs(lp - (1 + math.sqrt(2))) <= 1e-12
    assert lp * lm == pytest.approx(-1.0, abs=1e-14)
    assert lp + lm == pytest.approx(2.0, abs=1e-14)


def test_cat_preserves_area():
    rng = np.random.default_rng(1)
    n = 10**6
    pts = rng.random((n, 2))
    img = cat_step_array(pts)
    inside = lambda p: (p[:, 0] < 0.3) & (p[:, 1] > 0.5) & (p[:, 1] < 0.9)
    a, b = inside(pts).mean(), inside(img).mean()
    se = math.sqrt(0.12 * 0.88 / n)
    assert abs(a - b) < 3 * math.sqrt(2) * se


def test_sensitivity_examples():
    rot = sensitivity_probe("rotation", 0.4, 1e-6, 1000)
    assert max(abs(s - 1e-6) for s in rot.separations) <= 1e-15
    assert rot.first_escape is None
    log = sensitivity_probe("logistic", 0.3, 1e-9, 60)
    assert log.escaped and log.first_escape <= 60
    cat = sensitivity_probe("cat", (0.1, 0.2), 1e-9, 30)
    assert cat.escaped and cat.first_escape <= 30
    # growth along the unstable direction is (1 + sqrt 2)^n while small
    assert cat.separations[5] / cat.separations[0] == pytest.approx((1 + math.sqrt(2)) ** 5, rel=1e-5)
    with pytest.raises(ValueError):
        sensitivity_probe("logistic", 0.3, 0.0, 10)


def test_lyapunov():
    assert lyapunov_exponent("cat") == pytest.approx(0.88137, abs=1e-5)
    assert abs(lyapunov_exponent("logistic", 0.3, 10**6) - math.log(2)) <= 0.01
    assert lyapunov_exponent("logistic", 0.0, 10**4) == pytest.approx(math.log(4))
    with pytest.raises(ValueError):
        lyapunov_exponent("logistic", 0.3, 100)


def test_frac_product_vs_mpmath():
    mpmath.mp.dps = 50
    ts = np.array([1.0, 7.0, 1e5, 123456789.0, 2.0**40])
    got = frac_product(ts, GOLDEN)
    for t, g in zip(ts, got):
        assert circle_distance(g, float(mpmath.frac(mpmath.mpf(GOLDEN) * mpmath.mpf(t)))) <= 1e-15
