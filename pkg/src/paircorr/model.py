"""Entangled two-electron momentum states built from Gaussian wavepackets.

A pair is emitted with total momentum P shared between two free-particle
Gaussian wavepackets whose centers are split by a relative momentum s:
one packet sits at (P + s)/2, the other at (P - s)/2, both with momentum
width sigma. The two-particle state is the symmetrized (spatially
symmetric, "singlet") or antisymmetrized ("triplet") combination. Units
are Hartree atomic units (hbar = m_e = 1) throughout.

The momentum-space pair density is stationary: the free-evolution phases
of the two exchange contributions cancel identically, which the test
suite checks by comparing |amplitude|^2 at several times against the
closed-form density. The coordinate-space width does spread with time;
``coordinate_uncertainty`` gives it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChannelError

__all__ = [
    "SpinChannel",
    "ModelParams",
    "DEGENERACY_RATIO",
    "wavepacket_amplitude",
    "pair_amplitude",
    "two_particle_density",
    "mixture_density",
    "rho_marginal",
    "mixture_marginal",
    "overlap_j",
    "coordinate_uncertainty",
]

# Below this splitting-to-width ratio the antisymmetric combination is
# treated as vanishing and triplet states are refused.
DEGENERACY_RATIO = 1e-6


class SpinChannel(enum.Enum):
    """Exchange symmetry of the momentum-space pair state."""

    SINGLET = "singlet"  # symmetric combination, + sign
    TRIPLET = "triplet"  # antisymmetric combination, - sign

    @property
    def sign(self) -> float:
        return 1.0 if self is SpinChannel.SINGLET else -1.0


def _as_vec3(value, name: str) -> tuple[float, float, float]:
    """Coerce a scalar (interpreted as +z magnitude) or 3-sequence to a tuple."""
    if np.ndim(value) == 0:
        v = float(value)
        return (0.0, 0.0, v)
    arr = np.asarray(value, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"{name} must be a scalar or length-3 vector, got shape {arr.shape}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class ModelParams:
    """Static parameters of one emission channel.

    Parameters
    ----------
    sigma : float
        Momentum width of each single-particle wavepacket, > 0 (a.u.).
    p_split : float or sequence of 3 floats
        Splitting momentum s between the two packet centers. A bare
        scalar is placed along +z.
    p_total : sequence of 3 floats, optional
        Total pair momentum P. Defaults to zero. Correlation
        observables are independent of it; densities are not.
    triplet_fraction : float, optional
        Probability f that an emitted pair is in the triplet channel,
        in [0, 1]. Defaults to 0 (pure singlet).
    n_pairs : float, optional
        Total pair yield scaling the mixture density and both
        intensities; an arbitrary positive cross-section scale.
    """

    sigma: float
    p_split: tuple[float, float, float] = (0.0, 0.0, 0.0)
    p_total: tuple[float, float, float] = (0.0, 0.0, 0.0)
    triplet_fraction: float = 0.0
    n_pairs: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        object.__setattr__(self, "p_split", _as_vec3(self.p_split, "p_split"))
        object.__setattr__(self, "p_total", _as_vec3(self.p_total, "p_total"))
        f = float(self.triplet_fraction)
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"triplet_fraction must lie in [0, 1], got {f}")
        object.__setattr__(self, "triplet_fraction", f)
        n = float(self.n_pairs)
        if not np.isfinite(n) or n <= 0.0:
            raise ValueError(f"n_pairs must be positive and finite, got {n}")
        object.__setattr__(self, "n_pairs", n)

    @property
    def split_magnitude(self) -> float:
        return float(np.linalg.norm(self.p_split))

    @property
    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Wavepacket centers ((P + s)/2, (P - s)/2) as arrays."""
        p = np.asarray(self.p_total)
        s = np.asarray(self.p_split)
        return (p + s) / 2.0, (p - s) / 2.0

    def overlap(self) -> float:
        """Modulus of the single-particle overlap of the two packets."""
        return overlap_j(self.sigma, self.split_magnitude)

    def is_degenerate(self) -> bool:
        return self.split_magnitude < DEGENERACY_RATIO * self.sigma


def overlap_j(sigma: float, split: float) -> float:
    """Overlap magnitude exp(-s^2 / (8 sigma^2)) of the two packets."""
    return float(np.exp(-(split * split) / (8.0 * sigma * sigma)))


def coordinate_uncertainty(sigma, t=0.0):
    """Position-space width of one wavepacket after free evolution.

    Starts at the minimum-uncertainty value 1/(2 sigma) and spreads as
    sqrt(1 + 4 sigma^4 t^2) / (2 sigma).
    """
    sigma = np.asarray(sigma, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.sqrt(1.0 + 4.0 * sigma**4 * t * t) / (2.0 * sigma)


def wavepacket_amplitude(p, center, sigma, t=0.0):
    """Free Gaussian wavepacket in momentum space, complex valued.

    Parameters
    ----------
    p : array_like, shape (..., 3)
        Momentum points.
    center : array_like, shape (3,)
        Center of the packet.
    sigma : float
        Momentum width.
    t : float
        Evolution time; enters only through the phase exp(-i p^2 t / 2).

    Returns
    -------
    ndarray, shape (...)
        Amplitude values.
    """
    p = np.asarray(p, dtype=float)
    d2 = np.sum((p - np.asarray(center, dtype=float)) ** 2, axis=-1)
    p2 = np.sum(p * p, axis=-1)
    mag = (2.0 * np.pi * sigma * sigma) ** (-0.75) * np.exp(-d2 / (4.0 * sigma * sigma))
    return mag * np.exp(-0.5j * p2 * t)


def _require_nondegenerate(params: ModelParams, channel: SpinChannel):
    if channel is SpinChannel.TRIPLET and params.is_degenerate():
        raise DegenerateChannelError(
            "triplet pair state is degenerate: |p_split| = "
            f"{params.split_magnitude:g} < {DEGENERACY_RATIO:g} * sigma"
        )


def _channel_norm(params: ModelParams, sign: float) -> float:
    """Normalization 2 (1 + sign * J^2) of one channel.

    The triplet value is formed through expm1 rather than from the
    rounded overlap: near the degeneracy threshold 1 - J^2 is ~1e-12
    and subtracting a float J^2 from 1 would cost six digits.
    """
    if sign > 0:
        j = params.overlap()
        return 2.0 * (1.0 + j * j)
    arg = params.split_magnitude**2 / (4.0 * params.sigma**2)
    return -2.0 * float(np.expm1(-arg))


def pair_amplitude(p1, p2, params: ModelParams, channel: SpinChannel, t=0.0):
    """Normalized symmetrized two-particle amplitude.

    (phi_a(p1) phi_b(p2) +/- phi_a(p2) phi_b(p1)) / sqrt(2 (1 +/- J^2))
    with the sign set by the channel. Raises DegenerateChannelError for
    a triplet with vanishing splitting momentum.
    """
    _require_nondegenerate(params, channel)
    c1, c2 = params.centers
    s = channel.sign
    direct = wavepacket_amplitude(p1, c1, params.sigma, t) * wavepacket_amplitude(p2, c2, params.sigma, t)
    exchanged = wavepacket_amplitude(p2, c1, params.sigma, t) * wavepacket_amplitude(p1, c2, params.sigma, t)
    return (direct + s * exchanged) / np.sqrt(_channel_norm(params, s))


def _pair_density_kernel(p1, p2, c1, c2, sigma, sign):
    """Unnormalized pair density (e^{-A/2} +/- e^{-B/2})^2 (2 pi sigma^2)^-3.

    A/2 and B/2 are the direct and exchanged Gaussian exponents. The
    antisymmetric difference is written through expm1 so it stays
    accurate when the two exponents nearly coincide. Broadcasts over all
    leading axes of the inputs.
    """
    sig2 = sigma * sigma
    a2 = (np.sum((p1 - c1) ** 2, axis=-1) + np.sum((p2 - c2) ** 2, axis=-1)) / (4.0 * sig2)
    b2 = (np.sum((p1 - c2) ** 2, axis=-1) + np.sum((p2 - c1) ** 2, axis=-1)) / (4.0 * sig2)
    lo = np.minimum(a2, b2)
    gap = np.abs(a2 - b2)
    base = np.exp(-2.0 * lo)
    if sign > 0:
        comb = base * (1.0 + np.exp(-gap)) ** 2
    else:
        comb = base * np.expm1(-gap) ** 2
    return comb * (2.0 * np.pi * sig2) ** (-3.0)


def two_particle_density(p1, p2, params: ModelParams, channel: SpinChannel):
    """Joint momentum density |Psi(p1, p2)|^2 of one spin channel.

    Time independent: the free-evolution phases of the direct and
    exchanged terms cancel. Symmetric under p1 <-> p2 for both channels.

    Parameters
    ----------
    p1, p2 : array_like, shape (..., 3)
        Momentum pairs (broadcast together).
    params : ModelParams
    channel : SpinChannel

    Returns
    -------
    ndarray, shape (...)
    """
    _require_nondegenerate(params, channel)
    c1, c2 = params.centers
    s = channel.sign
    kern = _pair_density_kernel(
        np.asarray(p1, dtype=float), np.asarray(p2, dtype=float), c1, c2, params.sigma, s
    )
    return kern / _channel_norm(params, s)


def mixture_density(p1, p2, params: ModelParams, triplet_fraction=None):
    """Incoherent singlet/triplet mixture of pair densities.

    ``triplet_fraction`` f weights the triplet channel; f = 0 and f = 1
    reduce to the pure channels. Any f > 0 requires a non-degenerate
    triplet state. Defaults to ``params.triplet_fraction``.
    """
    f = float(params.triplet_fraction if triplet_fraction is None else triplet_fraction)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"triplet_fraction must lie in [0, 1], got {f}")
    if f == 0.0:
        return two_particle_density(p1, p2, params, SpinChannel.SINGLET)
    if f == 1.0:
        return two_particle_density(p1, p2, params, SpinChannel.TRIPLET)
    return (1.0 - f) * two_particle_density(p1, p2, params, SpinChannel.SINGLET) + f * two_particle_density(
        p1, p2, params, SpinChannel.TRIPLET
    )


def rho_marginal(p, params: ModelParams, channel: SpinChannel):
    """Single-particle momentum density, the pair density integrated over
    the partner momentum.

    Closed form: [g1 + g2 +/- 2 J sqrt(g1 g2)] / (2 (1 +/- J^2)) times
    the Gaussian normalization, with g_i the squared packet envelopes.
    The triplet numerator is assembled from two non-negative pieces,
    (sqrt(g1) - sqrt(g2))^2 + 2 (1 - J) sqrt(g1 g2), so no cancellation
    occurs for small splitting.
    """
    _require_nondegenerate(params, channel)
    p = np.asarray(p, dtype=float)
    c1, c2 = params.centers
    sig2 = params.sigma**2
    e1 = np.sum((p - c1) ** 2, axis=-1) / (4.0 * sig2)  # exponent of sqrt(g1)
    e2 = np.sum((p - c2) ** 2, axis=-1) / (4.0 * sig2)
    jmod = params.overlap()
    cross = np.exp(-(e1 + e2))  # sqrt(g1 g2)
    if channel is SpinChannel.SINGLET:
        num = np.exp(-2.0 * e1) + np.exp(-2.0 * e2) + 2.0 * jmod * cross
    else:
        lo = np.minimum(e1, e2)
        diff2 = (np.exp(-lo) * np.expm1(-np.abs(e1 - e2))) ** 2
        one_minus_j = -np.expm1(-params.split_magnitude**2 / (8.0 * sig2))
        num = diff2 + 2.0 * one_minus_j * cross
    norm = (2.0 * np.pi * sig2) ** (-1.5) / _channel_norm(params, channel.sign)
    return norm * num


def mixture_marginal(p, params: ModelParams, triplet_fraction=None):
    """Single-particle density of the singlet/triplet mixture."""
    f = float(params.triplet_fraction if triplet_fraction is None else triplet_fraction)
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"triplet_fraction must lie in [0, 1], got {f}")
    if f == 0.0:
        return rho_marginal(p, params, SpinChannel.SINGLET)
    if f == 1.0:
        return rho_marginal(p, params, SpinChannel.TRIPLET)
    return (1.0 - f) * rho_marginal(p, params, SpinChannel.SINGLET) + f * rho_marginal(
        p, params, SpinChannel.TRIPLET
    )
