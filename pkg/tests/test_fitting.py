"""Least-squares parameter recovery, fit guards, synthetic data."""

import numpy as np
import pytest

from paircorr.correlation import correlation_R
from paircorr.data import Dataset
from paircorr.errors import (
    InsufficientDataError,
    InsufficientSensitivityError,
    NonConvergenceError,
    UndefinedMetricError,
)
from paircorr.fitting import FitConfig, fit, synthesize, approximation_error
from paircorr.model import ModelParams

TRUTH = ModelParams(sigma=0.22, p_split=0.022, triplet_fraction=0.5)
GRID = np.linspace(0.02, 1.1, 30)


def test_noiseless_recovery():
    # default config: sigma and f free, p_tilde tied to 0.1 sigma, which
    # matches how TRUTH was built
    data = synthesize(TRUTH, GRID)
    res = fit(data)
    assert res.converged
    assert abs(res.sigma - 0.22) / 0.22 < 1e-4
    assert abs(res.f - 0.5) < 1e-3
    assert res.objective < 1e-18
    assert sorted(res.estimates) == ["f", "sigma"]


def test_noiseless_single_parameter():
    data = synthesize(TRUTH, GRID)
    cfg = FitConfig(free=("sigma",), f=0.5, p_tilde=0.022, multistart_count=8)
    res = fit(data, cfg)
    assert abs(res.sigma - 0.22) / 0.22 < 1e-6
    assert res.objective < 1e-20


def test_noisy_recovery_is_reasonable():
    data = synthesize(TRUTH, GRID, noise_rel=0.10, rng_seed=7)
    res = fit(data)
    assert abs(res.sigma - 0.22) / 0.22 < 0.15
    assert abs(res.f - 0.5) < 0.15


def test_fit_is_deterministic():
    data = synthesize(TRUTH, GRID, noise_rel=0.05, rng_seed=11)
    assert fit(data) == fit(data)


def test_objective_trace_never_increases():
    data = synthesize(TRUTH, GRID, noise_rel=0.05, rng_seed=11)
    res = fit(data)
    trace = np.asarray(res.objective_trace)
    assert np.all(np.diff(trace) <= 0.0)
    assert res.objective == trace[-1]
    assert 0 <= res.start_index < 16


def test_bounds_are_respected():
    # the optimum sigma = 0.22 lies outside the box, so the estimate
    # must park on the nearest bound
    data = synthesize(TRUTH, GRID)
    cfg = FitConfig(
        free=("sigma",), f=0.5, p_tilde=0.022, sigma_bounds=(0.6, 2.0), multistart_count=4
    )
    res = fit(data, cfg)
    assert res.sigma == 0.6
    assert res.converged


def test_insufficient_data_raises():
    with pytest.raises(InsufficientDataError):
        fit(Dataset(delta_p=(0.1, 0.2, 0.3), r=(0.1, 0.2, 0.1)))


def test_insensitive_configuration_raises():
    # f = 0 with p_tilde = 0 predicts R identically zero: no sigma
    # information in the data, whatever it looks like
    data = Dataset(
        delta_p=tuple(np.linspace(0.05, 1.0, 8)),
        r=tuple(0.1 * np.sin(np.arange(8) + 1.0)),
    )
    cfg = FitConfig(free=("sigma",), f=0.0, p_tilde=0.0, multistart_count=4)
    with pytest.raises(InsufficientSensitivityError):
        fit(data, cfg)


def test_nonconvergence_carries_best_effort():
    data = synthesize(TRUTH, GRID, noise_rel=0.10, rng_seed=7)
    cfg = FitConfig(multistart_count=1, max_iterations=1, step_tol=1e-14)
    with pytest.raises(NonConvergenceError) as excinfo:
        fit(data, cfg)
    best = excinfo.value.result
    assert best is not None
    assert not best.converged
    assert best.iterations == 1


def test_config_validation():
    with pytest.raises(ValueError):
        FitConfig(free=("sigma", "sigma"))
    with pytest.raises(ValueError):
        FitConfig(free=("mass",))
    with pytest.raises(ValueError):
        FitConfig(free=())
    with pytest.raises(ValueError):
        FitConfig(sigma_bounds=(0.0, 1.0))
    with pytest.raises(ValueError):
        FitConfig(f_bounds=(0.0, 1.5))
    with pytest.raises(ValueError):
        FitConfig(f=1.2)
    with pytest.raises(ValueError):
        FitConfig(multistart_count=0)


def test_offset_data_approximation_error():
    # a constant offset c on otherwise perfect data gives exactly
    # 100 * sqrt(n c^2 / sum r^2) with uniform weights
    clean = synthesize(TRUTH, GRID)
    c = 0.05
    shifted = Dataset(delta_p=clean.delta_p, r=tuple(v + c for v in clean.r))
    robs = np.asarray(shifted.r)
    want = 100.0 * np.sqrt(len(shifted) * c * c / np.sum(robs * robs))
    got = approximation_error(shifted, TRUTH)
    np.testing.assert_allclose(got, want, rtol=1e-12)


def test_approximation_error_undefined_for_zero_data():
    zeros = Dataset(delta_p=(0.1, 0.2), r=(0.0, 0.0))
    with pytest.raises(UndefinedMetricError):
        approximation_error(zeros, TRUTH)


def test_synthesize_noise_statistics():
    grid = np.linspace(0.01, 1.3, 1000)
    noise_rel = 0.08
    data = synthesize(TRUTH, grid, noise_rel=noise_rel, rng_seed=3)
    r_true = correlation_R(grid, TRUTH.sigma, TRUTH.triplet_fraction, TRUTH.p_split)
    # multiplicative noise: (r/r_true - 1)/noise_rel recovers unit normals
    xi = (np.asarray(data.r) - r_true) / (r_true * noise_rel)
    assert abs(xi.std() - 1.0) < 0.1
    assert abs(xi.mean()) < 0.1
    # per-point uncertainty: noise_rel * |R| floored at 5% of the peak
    peak = np.max(np.abs(r_true))
    want = noise_rel * np.maximum(np.abs(r_true), 0.05 * peak)
    np.testing.assert_array_equal(np.asarray(data.sigma_r), want)
    assert data.label == "synthetic"


def test_synthesize_noise_free_is_exact():
    data = synthesize(TRUTH, GRID)
    r_true = correlation_R(GRID, TRUTH.sigma, TRUTH.triplet_fraction, TRUTH.p_split)
    assert data.sigma_r is None
    np.testing.assert_array_equal(np.asarray(data.r), r_true)


def test_synthesize_seeding():
    a = synthesize(TRUTH, GRID, noise_rel=0.05, rng_seed=3)
    b = synthesize(TRUTH, GRID, noise_rel=0.05, rng_seed=3)
    c = synthesize(TRUTH, GRID, noise_rel=0.05, rng_seed=4)
    assert a == b
    assert a.r != c.r
    with pytest.raises(ValueError):
        synthesize(TRUTH, GRID, noise_rel=-0.1)
