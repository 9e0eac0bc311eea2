import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from flowlab import ergodic
from flowlab.ergodic import (
    UlamPartition,
    arcsine_density,
    birkhoff_average,
    correlation_decay,
    holder_norm,
    mean_return_to_interval,
    recurrence_statistics,
    sample_arcsine,
    stationary_distribution,
    transfer_apply,
    ulam_invariant_density,
    ulam_matrix,
)


def test_arcsine_density_examples():
    assert arcsine_density(0.5) == pytest.approx(2 / math.pi, abs=1e-15)
    for x in np.linspace(0.001, 0.999, 50):
        assert arcsine_density(x) == pytest.approx(arcsine_density(1 - x), rel=1e-12)
    total, _ = quad(arcsine_density, 0, 1, limit=200, epsabs=1e-12)
    assert abs(total - 1.0) <= 1e-8
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            arcsine_density(bad)


def _transfer_oracle(phi, x):
    # direct preimage sum with |T'(y)| = |4 - 8y|
    r = math.sqrt(1 - x)
    return sum(phi(y) / abs(4 - 8 * y) for y in ((1 - r) / 2, (1 + r) / 2))


def test_transfer_operator_examples():
    assert transfer_apply(lambda y: 1.0, 0.5) == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert transfer_apply(lambda y: 0.0, 0.3) == 0.0
    for x in np.random.default_rng(3).uniform(0.01, 0.99, 200):
        f = lambda y: math.cos(3 * y) + y
        assert transfer_apply(f, x) == pytest.approx(_transfer_oracle(f, x), rel=1e-12)
    with pytest.raises(ValueError):
        transfer_apply(lambda y: 1.0, 1.0)


def test_transfer_fixed_point():
    xs = np.random.default_rng(0).uniform(0.01, 0.99, 1000)
    assert max(abs(transfer_apply(arcsine_density, x) - arcsine_density(x)) for x in xs) <= 1e-9


def test_transfer_preserves_mass():
    # integral of L phi equals integral of phi
    phi = lambda y: 1 + math.sin(2 * y)
    lhs, _ = quad(lambda x: transfer_apply(phi, x), 0, 1, limit=200, points=[0.999])
    rhs, _ = quad(phi, 0, 1)
    assert lhs == pytest.approx(rhs, abs=1e-6)


def test_ulam_matrix_row_stochastic():
    P = ulam_matrix("logistic", UlamPartition(128), 200, seed=1)
    assert np.max(np.abs(np.asarray(P.sum(axis=1)).ravel() - 1.0)) <= 1e-12
    pi, _ = stationary_distribution(P)
    assert np.all(pi >= -1e-15) and abs(pi.sum() - 1) <= 1e-12
    with pytest.raises(ValueError):
        ulam_matrix("logistic", UlamPartition(16), 10)
    with pytest.raises(ValueError):
        UlamPartition(1)


def test_ulam_density_refines():
    errs = [ulam_invariant_density("logistic", UlamPartition(n), 1000, seed=0).l1_distance() for n in (256, 512, 1024)]
    assert errs[0] >= errs[1] >= errs[2]
    dens = ulam_invariant_density("logistic", UlamPartition(256), 1000, seed=0)
    assert abs(dens.bin_masses.sum() - 1) <= 1e-12
    assert dens.seed == 0


def test_ulam_recovers_uniform_for_doubling_map():
    dens = ulam_invariant_density(lambda x: np.mod(2 * x, 1.0), UlamPartition(64), 500, seed=0)
    assert np.max(np.abs(dens.density - 1.0)) < 0.05


def test_birkhoff_examples():
    assert birkhoff_average("logistic", lambda x: 7.0, 0.3, 1000) == 7.0
    assert abs(birkhoff_average("logistic", lambda x: x, 0.3, 10**6) - 0.5) <= 5e-3
    assert abs(birkhoff_average("rotation", lambda x: x, 0.0, 10**6) - 0.5) <= 1e-3
    with pytest.raises(ValueError):
        birkhoff_average("logistic", lambda x: x, 0.3, 0)


@given(st.floats(0.01, 0.99), st.integers(1, 2000))
def test_birkhoff_within_range(x0, n):
    avg = birkhoff_average("logistic", lambda x: np.sin(3 * x), x0, n)
    assert -1.0 <= avg <= 1.0


def test_holder_norm_examples():
    grid = np.linspace(0, 1, 201)
    assert holder_norm(lambda x: np.full_like(x, -3.0), 0.5, grid) == pytest.approx(3.0)
    assert holder_norm(lambda x: x, 1.0, grid) == pytest.approx(2.0)
    coarse = holder_norm(np.sqrt, 0.5, np.linspace(0, 1, 11))
    fine = holder_norm(np.sqrt, 0.5, np.linspace(0, 1, 401))
    assert coarse <= fine <= 2.0 + 1e-12 and fine == pytest.approx(2.0, abs=1e-9)


def test_correlations():
    bump = lambda x: np.maximum(0.0, 1.0 - np.abs(x - 0.3) / 0.2)  # Lipschitz tent
    s = correlation_decay("logistic", bump, bump, 15, ensemble=10**6, seed=0)
    assert s.values[0] >= 0 and s.values[0] == pytest.approx(np.var(bump(sample_arcsine(np.random.default_rng(0), 10**6))), rel=1e-6)
    assert s.fitted_rho is not None and s.fitted_rho <= 0.9
    assert len(s.fitted_lags) >= 5
    flat = correlation_decay("logistic", lambda x: np.zeros_like(x), bump, 5, ensemble=1000, seed=0)
    assert flat.fitted_rho is None


def test_cat_correlations_small():
    s = correlation_decay("cat", lambda p: np.sin(2 * np.pi * p[..., 0]), lambda p: np.sin(2 * np.pi * p[..., 1]),
                          30, ensemble=10**5, seed=2)
    assert np.all(np.abs(s.values[20:]) < 5 * s.stderr[20:] + 1e-12)


def test_arcsine_sampler_matches_law():
    x = sample_arcsine(np.random.default_rng(5), 10**5)
    ks = np.max(np.abs(np.sort(x) - np.sin(0.5 * np.pi * (np.arange(1, x.size + 1) / x.size)) ** 2))
    assert ks < 0.01


def test_recurrence_examples():
    rot = recurrence_statistics("rotation", 0.01, 10**5, 100, seed=0)
    assert rot.fraction_recurrent == 1.0
    ident = recurrence_statistics("identity", 0.01, 5, 50, seed=0)
    assert ident.mean_first_return == 1.0 and ident.fraction_recurrent == 1.0
    kac = mean_return_to_interval("rotation", (0.2, 0.3), 10**4, seed=0)
    assert abs(kac - 10.0) <= 1.0
    with pytest.raises(ValueError):
        recurrence_statistics("rotation", 0.0, 10, 10)


def test_recurrence_monotone_in_horizon():
    fracs = [recurrence_statistics("rotation", 0.002, n, 200, seed=4).fraction_recurrent for n in (50, 200, 1000, 5000)]
    assert fracs == sorted(fracs)
    cat = [recurrence_statistics("cat", 0.05, n, 100, seed=4).fraction_recurrent for n in (10, 100, 1000)]
    assert cat == sorted(cat)
