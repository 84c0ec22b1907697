"""Least-squares estimation of (sigma, f, p_tilde) from measured curves.

The model curve R(dp; sigma, f, p_tilde) is fitted to digitized
correlation data by weighted least squares. The optimizer is a small
bounded Levenberg-Marquardt loop with forward-difference Jacobians,
restarted from a Latin-hypercube set of initial points because the
objective is multimodal when sigma and f are both free. Everything is
deterministic for a fixed rng_seed.

The quality-of-fit number reported alongside the estimates is

    approx_error_pct = 100 * sqrt( sum w (R_model - r)^2 / sum w r^2 ),

the weighted rms misfit normalized by the weighted rms of the data.
Published "error of approximation" percentages rarely state their
convention, so fitted values are comparable to, not necessarily equal
to, quoted ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlation import correlation_R
from .data import Dataset
from .errors import (
    InsufficientDataError,
    InsufficientSensitivityError,
    NonConvergenceError,
    UndefinedMetricError,
)
from .model import ModelParams

__all__ = [
    "FitConfig",
    "FitResult",
    "fit",
    "approximation_error",
    "synthesize",
]

_PARAM_NAMES = ("sigma", "f", "p_tilde")
# A start whose best model curve never leaves this relative magnitude
# is sitting on the zero-correlation ridge and carries no information
# about the free parameters.
_SENSITIVITY_FLOOR = 1e-10


@dataclass(frozen=True)
class FitConfig:
    """Free parameters, fixed values, bounds, and optimizer knobs.

    Parameters
    ----------
    free : tuple of str
        Subset of ("sigma", "f", "p_tilde") to estimate.
    sigma, f : float
        Values used when the parameter is not free.
    p_tilde : float or None
        Value used when p_tilde is not free; None ties it to
        0.1 * sigma of the current trial point (the small-splitting
        regime, where curve shapes barely depend on it).
    sigma_bounds, f_bounds, p_tilde_bounds : (float, float)
        Box constraints applied to both starts and steps.
    multistart_count : int
        Latin-hypercube starting points; sigma starts are log-uniform
        over [0.05, 2] a.u. clipped to its bounds.
    max_iterations : int
        Levenberg-Marquardt iterations per start.
    step_tol : float
        Convergence declared when the proposed step falls below
        step_tol * (1 + |theta|).
    residual_tol : float
        Convergence declared when the objective falls to or below this.
    rng_seed : int
        Seed for the start layout; fixed seed reproduces the fit.
    """

    free: tuple = ("sigma", "f")
    sigma: float = 0.5
    f: float = 0.5
    p_tilde: float | None = None
    sigma_bounds: tuple = (1e-3, 10.0)
    f_bounds: tuple = (0.0, 1.0)
    p_tilde_bounds: tuple = (0.0, 10.0)
    multistart_count: int = 16
    max_iterations: int = 200
    step_tol: float = 1e-10
    residual_tol: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        free = tuple(self.free)
        if not free:
            raise ValueError("at least one free parameter is required")
        if len(set(free)) != len(free):
            raise ValueError(f"duplicate free parameters in {free}")
        for name in free:
            if name not in _PARAM_NAMES:
                raise ValueError(f"unknown parameter {name!r}; choose from {_PARAM_NAMES}")
        object.__setattr__(self, "free", free)
        for name, (lo, hi) in (
            ("sigma_bounds", self.sigma_bounds),
            ("f_bounds", self.f_bounds),
            ("p_tilde_bounds", self.p_tilde_bounds),
        ):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                raise ValueError(f"{name} must be a finite ordered pair, got ({lo}, {hi})")
        if self.sigma_bounds[0] <= 0.0:
            raise ValueError("sigma_bounds must be positive")
        if self.f_bounds[0] < 0.0 or self.f_bounds[1] > 1.0:
            raise ValueError("f_bounds must lie within [0, 1]")
        if self.p_tilde_bounds[0] < 0.0:
            raise ValueError("p_tilde_bounds must be non-negative")
        if self.sigma <= 0.0:
            raise ValueError(f"fixed sigma must be > 0, got {self.sigma}")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"fixed f must lie in [0, 1], got {self.f}")
        if self.p_tilde is not None and self.p_tilde < 0.0:
            raise ValueError(f"fixed p_tilde must be >= 0, got {self.p_tilde}")
        if self.multistart_count < 1 or self.max_iterations < 1:
            raise ValueError("multistart_count and max_iterations must be >= 1")
        if self.step_tol <= 0.0 or self.residual_tol < 0.0:
            raise ValueError("step_tol must be > 0 and residual_tol >= 0")


@dataclass(frozen=True)
class FitResult:
    """Estimates and diagnostics of one fit.

    sigma/f/p_tilde are the fully resolved model parameters (fitted,
    fixed, or tied); ``estimates`` holds just the free ones.
    ``residuals`` are unweighted model-minus-data values per point, and
    ``objective_trace`` is the accepted-step objective sequence of the
    winning start (non-increasing by construction).
    """

    sigma: float
    f: float
    p_tilde: float
    estimates: dict
    approx_error_pct: float
    residuals: tuple
    converged: bool
    iterations: int
    objective: float
    objective_trace: tuple
    start_index: int


def _resolve(theta, config: FitConfig):
    """Full (sigma, f, p_tilde) from the free-parameter vector."""
    values = dict(zip(config.free, (float(v) for v in theta)))
    sigma = values.get("sigma", config.sigma)
    f = values.get("f", config.f)
    if "p_tilde" in values:
        p_tilde = values["p_tilde"]
    elif config.p_tilde is None:
        p_tilde = 0.1 * sigma
    else:
        p_tilde = config.p_tilde
    return sigma, f, p_tilde


def _bounds_arrays(config: FitConfig):
    table = {
        "sigma": config.sigma_bounds,
        "f": config.f_bounds,
        "p_tilde": config.p_tilde_bounds,
    }
    lo = np.array([table[name][0] for name in config.free])
    hi = np.array([table[name][1] for name in config.free])
    return lo, hi


def _latin_starts(config: FitConfig, rng: np.random.Generator):
    """Latin-hypercube start matrix, one row per start."""
    m = config.multistart_count
    columns = []
    for name in config.free:
        strata = (rng.permutation(m) + rng.random(m)) / m
        if name == "sigma":
            lo = max(config.sigma_bounds[0], 0.05)
            hi = min(config.sigma_bounds[1], 2.0)
            columns.append(np.exp(np.log(lo) + strata * (np.log(hi) - np.log(lo))))
        elif name == "f":
            lo, hi = config.f_bounds
            columns.append(lo + strata * (hi - lo))
        else:
            lo = config.p_tilde_bounds[0]
            hi = min(config.p_tilde_bounds[1], 2.0)
            columns.append(lo + strata * (hi - lo))
    return np.stack(columns, axis=1)


def _jacobian(resid_fn, theta, resid, lo, hi):
    """Forward-difference Jacobian, stepping backward at upper bounds."""
    n = theta.size
    jac = np.empty((resid.size, n))
    for k in range(n):
        h = 1e-6 * (abs(theta[k]) + 1e-3)
        if theta[k] + h > hi[k]:
            h = -h
        shifted = theta.copy()
        shifted[k] = np.clip(theta[k] + h, lo[k], hi[k])
        step = shifted[k] - theta[k]
        if step == 0.0:
            jac[:, k] = 0.0
            continue
        r_shift, _ = resid_fn(shifted)
        jac[:, k] = (r_shift - resid) / step
    return jac


def _lm_minimize(resid_fn, theta0, lo, hi, config: FitConfig):
    """Bounded Levenberg-Marquardt descent from one start.

    Returns (theta, cost, converged, trace, iterations, model_scale)
    where model_scale is max |R_model| at the final point, used by the
    identifiability guard.
    """
    theta = np.clip(np.asarray(theta0, dtype=float), lo, hi)
    resid, model_scale = resid_fn(theta)
    cost = float(np.sum(resid * resid))
    trace = [cost]
    lam = 1e-3
    converged = cost <= config.residual_tol
    iterations = 0
    while not converged and iterations < config.max_iterations:
        iterations += 1
        jac = _jacobian(resid_fn, theta, resid, lo, hi)
        jtj = jac.T @ jac
        grad = jac.T @ resid
        diag = np.maximum(np.diag(jtj), 1e-14 * max(np.max(np.diag(jtj)), 1.0))
        accepted = False
        for _ in range(30):
            try:
                delta = np.linalg.solve(jtj + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam = min(lam * 4.0, 1e12)
                continue
            trial = np.clip(theta + delta, lo, hi)
            step = trial - theta
            if np.max(np.abs(step)) <= config.step_tol * (1.0 + np.max(np.abs(theta))):
                converged = True
                break
            r_trial, scale_trial = resid_fn(trial)
            cost_trial = float(np.sum(r_trial * r_trial))
            if cost_trial < cost:
                theta, resid, cost, model_scale = trial, r_trial, cost_trial, scale_trial
                trace.append(cost)
                lam = max(lam / 3.0, 1e-12)
                accepted = True
                break
            lam = min(lam * 4.0, 1e12)
        if converged:
            break
        if not accepted:
            # damping exhausted without descent: a stationary point
            converged = True
            break
        if cost <= config.residual_tol:
            converged = True
    return theta, cost, converged, trace, iterations, model_scale


def fit(data: Dataset, config: FitConfig = FitConfig()) -> FitResult:
    """Weighted least-squares fit of the correlation model to a dataset.

    Runs ``config.multistart_count`` Levenberg-Marquardt descents from
    a Latin-hypercube of starting points and returns the best final
    objective (ties broken by start index).

    Raises
    ------
    InsufficientDataError
        Fewer than two points per free parameter.
    InsufficientSensitivityError
        Every start ended on the zero-correlation ridge (e.g. f and
        p_tilde both fixed at 0), so the data cannot constrain the
        free parameters.
    NonConvergenceError
        No start converged; the best-effort FitResult is attached to
        the exception's ``result`` attribute.
    """
    n_free = len(config.free)
    if len(data) < 2 * n_free:
        raise InsufficientDataError(
            f"{len(data)} points cannot constrain {n_free} free parameter(s);"
            f" need at least {2 * n_free}"
        )
    dp = np.asarray(data.delta_p)
    robs = np.asarray(data.r)
    sqrt_w = np.sqrt(data.weights())
    data_scale = float(np.max(np.abs(robs)))

    def resid_fn(theta):
        sigma, f, p_tilde = _resolve(theta, config)
        r_model = correlation_R(dp, sigma, f, p_tilde)
        return sqrt_w * (r_model - robs), float(np.max(np.abs(r_model)))

    lo, hi = _bounds_arrays(config)
    rng = np.random.default_rng(config.rng_seed)
    starts = _latin_starts(config, rng)
    outcomes = []
    for index in range(starts.shape[0]):
        outcomes.append(_lm_minimize(resid_fn, starts[index], lo, hi, config))
    if all(out[5] <= _SENSITIVITY_FLOOR * (1.0 + data_scale) for out in outcomes):
        raise InsufficientSensitivityError(
            "the model curve is identically negligible at every multistart"
            " optimum; the free parameters are not identifiable from this"
            " configuration (is the correlation switched off, f = 0 with"
            " p_tilde = 0?)"
        )
    best_index = min(range(len(outcomes)), key=lambda i: (outcomes[i][1], i))
    theta, cost, converged, trace, iterations, _ = outcomes[best_index]
    sigma, f, p_tilde = _resolve(theta, config)
    r_model = correlation_R(dp, sigma, f, p_tilde)
    params = ModelParams(sigma, p_tilde, triplet_fraction=f)
    result = FitResult(
        sigma=sigma,
        f=f,
        p_tilde=p_tilde,
        estimates={name: float(v) for name, v in zip(config.free, theta)},
        approx_error_pct=approximation_error(data, params),
        residuals=tuple(float(v) for v in (r_model - robs)),
        converged=bool(converged),
        iterations=int(iterations),
        objective=float(cost),
        objective_trace=tuple(trace),
        start_index=int(best_index),
    )
    if not any(out[2] for out in outcomes):
        raise NonConvergenceError(
            f"no start converged within {config.max_iterations} iterations",
            result=result,
        )
    return result


def approximation_error(data: Dataset, params: ModelParams) -> float:
    """Weighted rms misfit of the model against the data, in percent.

    100 * sqrt( sum w (R_model - r)^2 / sum w r^2 ); raises
    UndefinedMetricError when the data r-values are identically zero.
    """
    w = data.weights()
    robs = np.asarray(data.r)
    denom = float(np.sum(w * robs * robs))
    if denom == 0.0:
        raise UndefinedMetricError(
            "approximation error is undefined for identically zero data"
        )
    r_model = correlation_R(
        np.asarray(data.delta_p), params.sigma, params.triplet_fraction, params.p_split
    )
    return 100.0 * math.sqrt(float(np.sum(w * (r_model - robs) ** 2)) / denom)


def synthesize(params: ModelParams, grid, noise_rel: float = 0.0, rng_seed: int = 0) -> Dataset:
    """Model curve on a grid with multiplicative Gaussian noise.

    r_i = R(dp_i) * (1 + noise_rel * xi_i) with standard-normal xi,
    deterministic per seed. For noise_rel > 0 the per-point
    uncertainties are noise_rel * |R| with a floor of 5% of the curve's
    peak magnitude so near-zero crossings don't get infinite weight.
    """
    if noise_rel < 0.0:
        raise ValueError(f"noise_rel must be >= 0, got {noise_rel}")
    dp = np.asarray(grid, dtype=float)
    r_true = np.atleast_1d(
        correlation_R(dp, params.sigma, params.triplet_fraction, params.p_split)
    )
    rng = np.random.default_rng(rng_seed)
    noise = rng.standard_normal(r_true.shape)
    r = r_true * (1.0 + noise_rel * noise)
    peak = float(np.max(np.abs(r_true)))
    if noise_rel > 0.0 and peak > 0.0:
        sigma_r = tuple(float(v) for v in noise_rel * np.maximum(np.abs(r_true), 0.05 * peak))
    else:
        sigma_r = None
    return Dataset(
        tuple(float(v) for v in np.atleast_1d(dp)),
        tuple(float(v) for v in r),
        sigma_r,
        label="synthetic",
    )
