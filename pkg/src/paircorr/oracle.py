"""Brute-force integration of the pair model, used to validate closed forms.

Everything the closed-form module computes analytically is recomputed
here by direct numerical integration of the two-particle densities:

* pair-density normalization, by separable Gauss-Legendre quadrature or
  by importance-sampled Monte Carlo;
* the single-particle density rho(p) = integral of the pair density over
  the partner momentum, by 3-d tensor quadrature;
* the coincidence intensity, the 5-d integral
  (dp)^2 * int d^3p1 dOmega  Phi(p1, p1 + dp*n),
  and the accidental (event-mixed) intensity with integrand
  rho(p1) rho(p1 + dp*n) / N, both by Monte Carlo.

The Monte-Carlo design exploits the model's structure. For a fixed
detector direction n every term of the pair density has the same
Gaussian profile in p1, centered at (P - dp*n)/2 with covariance
sigma^2/2; drawing p1 from exactly that Gaussian removes the p1
variance entirely, leaving only the angular integral. The polar cosine
u is drawn from a mixture of a uniform density and cosh-tilted
densities matched to the exp(z u) factors of the integrand, with
stratified inversion per chunk, so the realized error falls much faster
than the reported (conservative) 1/sqrt(N) standard error.

Sampling is chunked; each chunk has its own seed spawned from the
spec's rng_seed and the per-chunk sums are combined with math.fsum, so
results are bit-identical across runs and across thread counts. Set
PAIRCORR_THREADS to evaluate chunks in a thread pool.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateChannelError,
    ToleranceNotMetError,
    UnsupportedMethodError,
)
from .model import (
    DEGENERACY_RATIO,
    ModelParams,
    SpinChannel,
    _as_vec3,
    _pair_density_kernel,
    _require_nondegenerate,
    mixture_marginal,
    mixture_density,
    two_particle_density,
)

__all__ = [
    "QuadratureSpec",
    "OracleResult",
    "ChannelCrossSection",
    "phi_differential",
    "pair_norm_oracle",
    "phi_norm_oracle",
    "rho_single",
    "intensity_cor_oracle",
    "intensity_uncor_oracle",
    "general_channel_integral",
]

_CHUNK = 1 << 18
# Below this z the cosh-tilted polar density is indistinguishable from
# uniform; sampler and density must switch together.
_TINY_Z = 1e-8

_METHODS = ("monte-carlo", "tensor-quadrature")


@dataclass(frozen=True)
class QuadratureSpec:
    """How an oracle integral should be evaluated.

    Parameters
    ----------
    method : str
        "monte-carlo" or "tensor-quadrature". Not every operation
        supports both; unsupported combinations raise
        UnsupportedMethodError rather than silently substituting.
    sample_count : int
        Monte-Carlo samples per emission channel.
    nodes_per_axis : int
        Gauss-Legendre nodes per axis for tensor quadrature; the error
        estimate compares against a run at half the nodes.
    rng_seed : int
        Seed; identical specs give bit-identical results.
    target_rel_tol : float
        Relative accuracy the caller needs. Monte-Carlo results whose
        3*SE exceeds it (and tensor results whose refinement delta
        exceeds it) raise ToleranceNotMetError carrying the estimate.
    """

    method: str = "monte-carlo"
    sample_count: int = 2_000_000
    nodes_per_axis: int = 64
    rng_seed: int = 0
    target_rel_tol: float = 1e-3

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}, got {self.method!r}")
        if int(self.sample_count) < 1:
            raise ValueError(f"sample_count must be >= 1, got {self.sample_count}")
        if int(self.nodes_per_axis) < 8:
            raise ValueError(f"nodes_per_axis must be >= 8, got {self.nodes_per_axis}")
        if not (float(self.target_rel_tol) > 0.0):
            raise ValueError(f"target_rel_tol must be > 0, got {self.target_rel_tol}")
        object.__setattr__(self, "sample_count", int(self.sample_count))
        object.__setattr__(self, "nodes_per_axis", int(self.nodes_per_axis))
        object.__setattr__(self, "rng_seed", int(self.rng_seed))
        object.__setattr__(self, "target_rel_tol", float(self.target_rel_tol))


@dataclass(frozen=True)
class OracleResult:
    """A numerical integral with its error estimate.

    est_error is one standard error for Monte Carlo and the last
    refinement delta for quadrature; comparisons against closed forms
    should use max(analytic_tol * |closed|, 3 * est_error).
    """

    value: float
    est_error: float
    samples_used: int

    def __post_init__(self):
        if self.est_error < 0.0:
            raise ValueError("est_error must be >= 0")


@dataclass(frozen=True)
class ChannelCrossSection:
    """One emission channel's contribution to the pair yield.

    A point mass of the given weight at fixed (P, s), optionally
    smeared by isotropic Gaussian jitter of the total momentum
    (spread_total) and of the splitting vector (spread_split).
    """

    weight: float
    channel: SpinChannel
    sigma: float
    p_split: tuple = (0.0, 0.0, 0.0)
    p_total: tuple = (0.0, 0.0, 0.0)
    spread_split: float = 0.0
    spread_total: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.weight) or self.weight < 0.0:
            raise ValueError(f"weight must be >= 0 and finite, got {self.weight}")
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        object.__setattr__(self, "p_split", _as_vec3(self.p_split, "p_split"))
        object.__setattr__(self, "p_total", _as_vec3(self.p_total, "p_total"))
        for name in ("spread_split", "spread_total"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be >= 0 and finite, got {v}")
            object.__setattr__(self, name, v)


def _thread_count() -> int:
    raw = os.environ.get("PAIRCORR_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PAIRCORR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"PAIRCORR_THREADS must be a positive integer, got {raw!r}")
    return n


def phi_differential(p1, p2, params: ModelParams):
    """Differential pair yield n_pairs * [(1-f)|Psi_0|^2 + f|Psi_1|^2]."""
    return params.n_pairs * mixture_density(p1, p2, params)


# ---------------------------------------------------------------------------
# shared Monte-Carlo machinery


def _mc_sum(total: int, seed_seq: np.random.SeedSequence, chunk_fn):
    """Run chunk_fn(seed, count) over fixed-size chunks; fsum the sums.

    chunk_fn returns (sum w, sum w^2) for its chunk. The chunk layout
    and per-chunk seeds depend only on (total, seed_seq), and the final
    reduction is ordered, so the result is independent of the thread
    count.
    """
    n_chunks = (total + _CHUNK - 1) // _CHUNK
    counts = [_CHUNK] * (n_chunks - 1) + [total - _CHUNK * (n_chunks - 1)]
    seeds = seed_seq.spawn(n_chunks)
    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sums = list(pool.map(chunk_fn, seeds, counts))
    else:
        sums = [chunk_fn(seed, count) for seed, count in zip(seeds, counts)]
    s1 = math.fsum(pair[0] for pair in sums)
    s2 = math.fsum(pair[1] for pair in sums)
    mean = s1 / total
    variance = max(s2 / total - mean * mean, 0.0)
    return mean, math.sqrt(variance / total), total


def _finish_mc(value, se, used, spec: QuadratureSpec, what: str) -> OracleResult:
    result = OracleResult(float(value), float(se), int(used))
    if 3.0 * se > spec.target_rel_tol * abs(value):
        raise ToleranceNotMetError(
            f"{what}: 3*SE = {3.0 * se:.3e} exceeds {spec.target_rel_tol:g} * |{value:.6e}|"
            " after the full sample budget; increase sample_count",
            result=result,
        )
    return result


def _finish_quad(value, est, used, spec: QuadratureSpec, what: str) -> OracleResult:
    result = OracleResult(float(value), float(est), int(used))
    if est > spec.target_rel_tol * abs(value):
        raise ToleranceNotMetError(
            f"{what}: refinement delta {est:.3e} exceeds {spec.target_rel_tol:g} *"
            f" |{value:.6e}|; increase nodes_per_axis",
            result=result,
        )
    return result


def _stratified(rng: np.random.Generator, count: int):
    """One stratified uniform per stratum of [0, 1)."""
    return (np.arange(count) + rng.random(count)) / count


def _sample_cosh_tilt(xi, z):
    """Invert the CDF of z*cosh(z*u)/(2 sinh z) on [-1, 1].

    The first bit of xi picks the exp(+z u) or exp(-z u) half; the rest
    inverts the exponential tilt through log/expm1-safe algebra. Falls
    back to uniform below _TINY_Z. Broadcasts over per-sample z.
    """
    xi = np.asarray(xi, dtype=float)
    z = np.asarray(z, dtype=float)
    pos = xi < 0.5
    eta = np.clip(np.where(pos, 2.0 * xi, 2.0 * xi - 1.0), 0.0, 1.0)
    zc = np.where(z < _TINY_Z, 1.0, z)
    u = 1.0 + np.log(eta + (1.0 - eta) * np.exp(-2.0 * zc)) / zc
    u = np.where(pos, u, -u)
    return np.where(z < _TINY_Z, 2.0 * xi - 1.0, np.clip(u, -1.0, 1.0))


def _cosh_tilt_pdf(u, z):
    """Density z*cosh(z*u)/(2 sinh z) on [-1, 1], stable at any z >= 0."""
    u = np.asarray(u, dtype=float)
    z = np.asarray(z, dtype=float)
    zc = np.where(z < _TINY_Z, 1.0, z)
    val = zc * (np.exp(zc * (u - 1.0)) + np.exp(-zc * (u + 1.0))) / (-2.0 * np.expm1(-2.0 * zc))
    return np.where(z < _TINY_Z, 0.5, val)


def _cor_tilt_sample(v, z):
    """Polar cosine for coincidence sampling: 1/2 uniform + 1/2 cosh tilt."""
    uniform = 4.0 * v - 1.0
    xi = np.clip(2.0 * (v - 0.5), 0.0, 1.0)
    return np.where(v < 0.5, np.clip(uniform, -1.0, 1.0), _sample_cosh_tilt(xi, z))


def _cor_tilt_pdf(u, z):
    return 0.25 + 0.5 * _cosh_tilt_pdf(u, z)


def _unc_tilt_sample(v, z):
    """Polar cosine for event-mixed sampling: uniform + cosh(z/2) + cosh(z).

    The event-mixed integrand carries exp(z u), exp(z u / 2) and flat
    angular factors (center offsets of s, s/2 and 0), so the proposal
    mixes all three shapes with weights 1/2, 1/4, 1/4.
    """
    uniform = 4.0 * v - 1.0
    xi_half = np.clip(4.0 * (v - 0.5), 0.0, 1.0)
    xi_full = np.clip(4.0 * (v - 0.75), 0.0, 1.0)
    return np.where(
        v < 0.5,
        np.clip(uniform, -1.0, 1.0),
        np.where(
            v < 0.75,
            _sample_cosh_tilt(xi_half, 0.5 * z),
            _sample_cosh_tilt(xi_full, z),
        ),
    )


def _unc_tilt_pdf(u, z):
    return 0.25 + 0.25 * _cosh_tilt_pdf(u, 0.5 * z) + 0.25 * _cosh_tilt_pdf(u, z)


def _orthonormal_frame(axis):
    """Right-handed frame with e3 along axis (or +z for a zero axis)."""
    a = np.asarray(axis, dtype=float)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        e3 = np.array([0.0, 0.0, 1.0])
    else:
        e3 = a / norm
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(helper, e3)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def _frames(axes):
    """Per-row orthonormal frames for an (m, 3) array of axis vectors."""
    a = np.asarray(axes, dtype=float)
    norms = np.linalg.norm(a, axis=-1, keepdims=True)
    e3 = np.where(norms > 0.0, a / np.where(norms == 0.0, 1.0, norms), [0.0, 0.0, 1.0])
    helper = np.where(
        (np.abs(e3[:, 0]) <= 0.9)[:, None], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]
    )
    e1 = np.cross(helper, e3)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def _direction(u, phi, e1, e2, e3):
    """Unit vectors with polar cosine u around e3; frame axes may be (m, 3)."""
    sin_theta = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    return (
        (sin_theta * np.cos(phi))[:, None] * e1
        + (sin_theta * np.sin(phi))[:, None] * e2
        + u[:, None] * e3
    )


# ---------------------------------------------------------------------------
# coincidence intensity (5-d: p1 and the detector direction)


def _cor_point_runner(delta_p, ccs: ChannelCrossSection, spec, seed_seq):
    """Coincidence integral for one fixed-(P, s) channel."""
    sigma = ccs.sigma
    sign = ccs.channel.sign
    p_total = np.asarray(ccs.p_total)
    p_split = np.asarray(ccs.p_split)
    split = float(np.linalg.norm(p_split))
    if sign < 0.0 and split < DEGENERACY_RATIO * sigma:
        raise DegenerateChannelError(
            f"triplet channel with |p_split| = {split:g} < {DEGENERACY_RATIO:g} * sigma"
        )
    c1 = (p_total + p_split) / 2.0
    c2 = (p_total - p_split) / 2.0
    j2 = math.exp(-split * split / (4.0 * sigma * sigma))
    z = split * delta_p / (2.0 * sigma * sigma)
    e1, e2, e3 = _orthonormal_frame(p_split)
    scale = sigma / math.sqrt(2.0)
    pdf_norm = (math.pi * sigma * sigma) ** -1.5
    norm = 2.0 * (1.0 + sign * j2)

    def chunk(seed, count):
        rng = np.random.default_rng(seed)
        v = _stratified(rng, count)
        phi = 2.0 * math.pi * rng.random(count)
        xi = rng.standard_normal((count, 3))
        u = _cor_tilt_sample(v, z)
        n_hat = _direction(u, phi, e1, e2, e3)
        q = delta_p * n_hat
        p1 = (p_total - q) / 2.0 + scale * xi
        dens = _pair_density_kernel(p1, p1 + q, c1, c2, sigma, sign) / norm
        pdf1 = pdf_norm * np.exp(-0.5 * np.sum(xi * xi, axis=-1))
        w = (delta_p * delta_p * 2.0 * math.pi) * dens / (pdf1 * _cor_tilt_pdf(u, z))
        return float(np.sum(w)), float(np.sum(w * w))

    return _mc_sum(spec.sample_count, seed_seq, chunk)


def _cor_jitter_runner(delta_p, ccs: ChannelCrossSection, spec, seed_seq):
    """Coincidence integral with Gaussian-smeared (P, s) per sample."""
    sigma = ccs.sigma
    sign = ccs.channel.sign
    p_total0 = np.asarray(ccs.p_total)
    p_split0 = np.asarray(ccs.p_split)
    scale = sigma / math.sqrt(2.0)
    pdf_norm = (math.pi * sigma * sigma) ** -1.5

    def chunk(seed, count):
        rng = np.random.default_rng(seed)
        v = _stratified(rng, count)
        phi = 2.0 * math.pi * rng.random(count)
        xi_split = rng.standard_normal((count, 3))
        xi_total = rng.standard_normal((count, 3))
        xi = rng.standard_normal((count, 3))
        p_split = p_split0 + ccs.spread_split * xi_split
        p_total = p_total0 + ccs.spread_total * xi_total
        split = np.linalg.norm(p_split, axis=-1)
        if sign < 0.0 and np.any(split < DEGENERACY_RATIO * sigma):
            raise DegenerateChannelError(
                "spread_split jitter produced a degenerate triplet sample;"
                " shrink spread_split or move p_split away from zero"
            )
        j2 = np.exp(-split * split / (4.0 * sigma * sigma))
        z = split * delta_p / (2.0 * sigma * sigma)
        e1, e2, e3 = _frames(p_split)
        u = _cor_tilt_sample(v, z)
        n_hat = _direction(u, phi, e1, e2, e3)
        q = delta_p * n_hat
        p1 = (p_total - q) / 2.0 + scale * xi
        c1 = (p_total + p_split) / 2.0
        c2 = (p_total - p_split) / 2.0
        dens = _pair_density_kernel(p1, p1 + q, c1, c2, sigma, sign)
        dens /= 2.0 * (1.0 + sign * j2)
        pdf1 = pdf_norm * np.exp(-0.5 * np.sum(xi * xi, axis=-1))
        w = (delta_p * delta_p * 2.0 * math.pi) * dens / (pdf1 * _cor_tilt_pdf(u, z))
        return float(np.sum(w)), float(np.sum(w * w))

    return _mc_sum(spec.sample_count, seed_seq, chunk)


def _run_cor_channels(channels, delta_p, spec: QuadratureSpec, what: str) -> OracleResult:
    if spec.method != "monte-carlo":
        raise UnsupportedMethodError(
            "the 5-d intensity integrals support method='monte-carlo' only"
        )
    delta_p = float(delta_p)
    if not np.isfinite(delta_p) or delta_p < 0.0:
        raise ValueError(f"delta_p must be finite and >= 0, got {delta_p}")
    if not channels:
        raise ValueError("at least one channel is required")
    if delta_p == 0.0:
        return OracleResult(0.0, 0.0, 0)
    children = np.random.SeedSequence(spec.rng_seed).spawn(len(channels))
    values, variances, used = [], [], 0
    for ccs, child in zip(channels, children):
        if ccs.weight == 0.0:
            continue
        if ccs.spread_split == 0.0 and ccs.spread_total == 0.0:
            mean, se, n = _cor_point_runner(delta_p, ccs, spec, child)
        else:
            mean, se, n = _cor_jitter_runner(delta_p, ccs, spec, child)
        values.append(ccs.weight * mean)
        variances.append((ccs.weight * se) ** 2)
        used += n
    value = math.fsum(values)
    se = math.sqrt(math.fsum(variances))
    return _finish_mc(value, se, used, spec, what)


def _mixture_channels(params: ModelParams):
    """Point-mass channel list of the singlet/triplet mixture."""
    f = params.triplet_fraction
    common = dict(sigma=params.sigma, p_split=params.p_split, p_total=params.p_total)
    if f == 0.0:
        return [ChannelCrossSection(params.n_pairs, SpinChannel.SINGLET, **common)]
    if f == 1.0:
        return [ChannelCrossSection(params.n_pairs, SpinChannel.TRIPLET, **common)]
    return [
        ChannelCrossSection(params.n_pairs * (1.0 - f), SpinChannel.SINGLET, **common),
        ChannelCrossSection(params.n_pairs * f, SpinChannel.TRIPLET, **common),
    ]


def intensity_cor_oracle(delta_p, params: ModelParams, spec: QuadratureSpec) -> OracleResult:
    """Coincidence intensity by direct 5-d Monte-Carlo integration.

    Evaluates (dp)^2 * int d^3p1 dOmega Phi(p1, p1 + dp*n) with the
    unnormalized solid-angle measure (int dOmega = 4 pi), the same
    convention the closed form uses.
    """
    return _run_cor_channels(
        _mixture_channels(params), delta_p, spec, "intensity_cor_oracle"
    )


def general_channel_integral(channels, delta_p, spec: QuadratureSpec) -> OracleResult:
    """Coincidence intensity for an arbitrary list of emission channels.

    Each ChannelCrossSection contributes weight * I_cor(channel);
    point-mass channels reduce exactly (same code path) to
    intensity_cor_oracle of the matching pure-channel parameters.
    """
    channels = list(channels)
    return _run_cor_channels(channels, delta_p, spec, "general_channel_integral")


# ---------------------------------------------------------------------------
# accidental (event-mixed) intensity


def intensity_uncor_oracle(delta_p, params: ModelParams, spec: QuadratureSpec) -> OracleResult:
    """Accidental intensity (dp)^2 int d^3p1 dOmega rho(p1) rho(p1+dp*n) / n_pairs.

    rho is the closed-form single-particle marginal (itself validated
    by rho_single); the 5-d integral over p1 and the direction is done
    by Monte Carlo with a three-center Gaussian proposal for p1.
    """
    if spec.method != "monte-carlo":
        raise UnsupportedMethodError(
            "the 5-d intensity integrals support method='monte-carlo' only"
        )
    delta_p = float(delta_p)
    if not np.isfinite(delta_p) or delta_p < 0.0:
        raise ValueError(f"delta_p must be finite and >= 0, got {delta_p}")
    if delta_p == 0.0:
        return OracleResult(0.0, 0.0, 0)
    if params.triplet_fraction > 0.0 and params.is_degenerate():
        raise DegenerateChannelError(
            "mixture with triplet weight requires a non-degenerate splitting"
        )
    sigma = params.sigma
    p_total = np.asarray(params.p_total)
    p_split = np.asarray(params.p_split)
    split = params.split_magnitude
    z = split * delta_p / (2.0 * sigma * sigma)
    e1, e2, e3 = _orthonormal_frame(p_split)
    # Proposal for p1: Gaussians at the three possible term centers
    # (offsets -s/2, 0, +s/2 from (P - q)/2), inflated to 0.75 sigma^2
    # so every product term's sigma^2/2 profile is dominated.
    offsets = np.stack([-0.5 * p_split, np.zeros(3), 0.5 * p_split])
    comp_weights = np.array([0.25, 0.5, 0.25])
    var = 0.75 * sigma * sigma
    pdf_norm = (2.0 * math.pi * var) ** -1.5
    n_pairs = params.n_pairs

    def chunk(seed, count):
        rng = np.random.default_rng(seed)
        v = _stratified(rng, count)
        phi = 2.0 * math.pi * rng.random(count)
        pick = rng.random(count)
        xi = rng.standard_normal((count, 3))
        u = _unc_tilt_sample(v, z)
        n_hat = _direction(u, phi, e1, e2, e3)
        q = delta_p * n_hat
        base = (p_total - q) / 2.0
        comp = (pick >= 0.25).astype(np.int64) + (pick >= 0.75)
        p1 = base + offsets[comp] + math.sqrt(var) * xi
        pdf1 = np.zeros(count)
        for k in range(3):
            d2 = np.sum((p1 - base - offsets[k]) ** 2, axis=-1)
            pdf1 += comp_weights[k] * pdf_norm * np.exp(-d2 / (2.0 * var))
        integrand = n_pairs * mixture_marginal(p1, params) * mixture_marginal(p1 + q, params)
        w = (delta_p * delta_p * 2.0 * math.pi) * integrand / (pdf1 * _unc_tilt_pdf(u, z))
        return float(np.sum(w)), float(np.sum(w * w))

    mean, se, used = _mc_sum(
        spec.sample_count, np.random.SeedSequence(spec.rng_seed), chunk
    )
    return _finish_mc(mean, se, used, spec, "intensity_uncor_oracle")


# ---------------------------------------------------------------------------
# normalization and marginal checks


def _axis_nodes(lo, hi, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def _pair_norm_quad_value(params: ModelParams, channel: SpinChannel, n: int) -> float:
    """Separable Gauss-Legendre evaluation of the pair-density norm."""
    c1, c2 = params.centers
    sigma = params.sigma
    sig2 = sigma * sigma
    j = params.overlap()
    sign = channel.sign
    prod1 = prod2 = prod_cross = 1.0
    for ax in range(3):
        lo = min(c1[ax], c2[ax]) - 8.0 * sigma
        hi = max(c1[ax], c2[ax]) + 8.0 * sigma
        x, w = _axis_nodes(lo, hi, n)
        prod1 *= float(np.sum(w * np.exp(-((x - c1[ax]) ** 2) / (2.0 * sig2))))
        prod2 *= float(np.sum(w * np.exp(-((x - c2[ax]) ** 2) / (2.0 * sig2))))
        prod_cross *= float(
            np.sum(w * np.exp(-((x - c1[ax]) ** 2 + (x - c2[ax]) ** 2) / (4.0 * sig2)))
        )
    total = 2.0 * prod1 * prod2 + sign * 2.0 * prod_cross * prod_cross
    return total * (2.0 * math.pi * sig2) ** -3.0 / (2.0 * (1.0 + sign * j * j))


def pair_norm_oracle(params: ModelParams, channel: SpinChannel, spec: QuadratureSpec) -> OracleResult:
    """Check that the pair density integrates to 1 over (p1, p2).

    tensor-quadrature exploits separability (the 6-d integral is a
    product of 1-d Gaussian integrals per axis); monte-carlo importance
    samples from the two-center product proposal.
    """
    _require_nondegenerate(params, channel)
    if spec.method == "tensor-quadrature":
        n = spec.nodes_per_axis
        coarse = _pair_norm_quad_value(params, channel, n // 2)
        fine = _pair_norm_quad_value(params, channel, n)
        used = 9 * (n + n // 2)
        return _finish_quad(fine, abs(fine - coarse), used, spec, "pair_norm_oracle")
    c1, c2 = params.centers
    sigma = params.sigma
    pdf_norm = (2.0 * math.pi * sigma * sigma) ** -1.5

    def gauss(p, c):
        return pdf_norm * np.exp(-np.sum((p - c) ** 2, axis=-1) / (2.0 * sigma * sigma))

    def chunk(seed, count):
        rng = np.random.default_rng(seed)
        swap = rng.random(count) < 0.5
        xi1 = rng.standard_normal((count, 3))
        xi2 = rng.standard_normal((count, 3))
        p1 = np.where(swap[:, None], c2, c1) + sigma * xi1
        p2 = np.where(swap[:, None], c1, c2) + sigma * xi2
        pdf = 0.5 * (gauss(p1, c1) * gauss(p2, c2) + gauss(p1, c2) * gauss(p2, c1))
        w = two_particle_density(p1, p2, params, channel) / pdf
        return float(np.sum(w)), float(np.sum(w * w))

    mean, se, used = _mc_sum(
        spec.sample_count, np.random.SeedSequence(spec.rng_seed), chunk
    )
    return _finish_mc(mean, se, used, spec, "pair_norm_oracle")


def phi_norm_oracle(params: ModelParams, spec: QuadratureSpec) -> OracleResult:
    """Check that the differential pair yield integrates to n_pairs."""
    f = params.triplet_fraction
    if spec.method == "tensor-quadrature":
        n = spec.nodes_per_axis
        value = est = 0.0
        used = 0
        for frac, channel in ((1.0 - f, SpinChannel.SINGLET), (f, SpinChannel.TRIPLET)):
            if frac == 0.0:
                continue
            part = pair_norm_oracle(params, channel, spec)
            value += frac * part.value
            est += frac * part.est_error
            used += part.samples_used
        return _finish_quad(params.n_pairs * value, params.n_pairs * est, used, spec, "phi_norm_oracle")
    if f > 0.0 and params.is_degenerate():
        raise DegenerateChannelError(
            "mixture with triplet weight requires a non-degenerate splitting"
        )
    c1, c2 = params.centers
    sigma = params.sigma
    pdf_norm = (2.0 * math.pi * sigma * sigma) ** -1.5

    def gauss(p, c):
        return pdf_norm * np.exp(-np.sum((p - c) ** 2, axis=-1) / (2.0 * sigma * sigma))

    def chunk(seed, count):
        rng = np.random.default_rng(seed)
        swap = rng.random(count) < 0.5
        xi1 = rng.standard_normal((count, 3))
        xi2 = rng.standard_normal((count, 3))
        p1 = np.where(swap[:, None], c2, c1) + sigma * xi1
        p2 = np.where(swap[:, None], c1, c2) + sigma * xi2
        pdf = 0.5 * (gauss(p1, c1) * gauss(p2, c2) + gauss(p1, c2) * gauss(p2, c1))
        w = phi_differential(p1, p2, params) / pdf
        return float(np.sum(w)), float(np.sum(w * w))

    mean, se, used = _mc_sum(
        spec.sample_count, np.random.SeedSequence(spec.rng_seed), chunk
    )
    return _finish_mc(mean, se, used, spec, "phi_norm_oracle")


def _rho_single_value(p, params: ModelParams, n: int) -> float:
    c1, c2 = params.centers
    sigma = params.sigma
    nodes, weights = [], []
    for ax in range(3):
        lo = min(c1[ax], c2[ax]) - 8.0 * sigma
        hi = max(c1[ax], c2[ax]) + 8.0 * sigma
        x, w = _axis_nodes(lo, hi, n)
        nodes.append(x)
        weights.append(w)
    gx, gy, gz = np.meshgrid(*nodes, indexing="ij")
    grid = np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=-1)
    wgt = (
        weights[0][:, None, None] * weights[1][None, :, None] * weights[2][None, None, :]
    ).ravel()
    values = phi_differential(np.asarray(p, dtype=float), grid, params)
    return float(np.sum(wgt * values))


def rho_single(p, params: ModelParams, spec: QuadratureSpec) -> OracleResult:
    """Single-particle density at p: the pair yield integrated over the partner.

    Tensor quadrature only; the integrand is a fixed 3-d Gaussian
    mixture, which Gauss-Legendre nodes resolve to near machine
    precision, so a Monte-Carlo path would only add noise.
    """
    if spec.method != "tensor-quadrature":
        raise UnsupportedMethodError("rho_single supports method='tensor-quadrature' only")
    if params.triplet_fraction > 0.0 and params.is_degenerate():
        raise DegenerateChannelError(
            "mixture with triplet weight requires a non-degenerate splitting"
        )
    n = spec.nodes_per_axis
    coarse = _rho_single_value(p, params, n // 2)
    fine = _rho_single_value(p, params, n)
    used = n**3 + (n // 2) ** 3
    return _finish_quad(fine, abs(fine - coarse), used, spec, "rho_single")
