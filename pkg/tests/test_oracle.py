"""Brute-force integration oracles: norms, marginals, intensities."""

import math

import numpy as np
import pytest

from paircorr.errors import (
    DegenerateChannelError,
    ToleranceNotMetError,
    UnsupportedMethodError,
)
from paircorr.model import ModelParams, SpinChannel, mixture_marginal
from paircorr.correlation import accidental_intensity, coincidence_intensity
from paircorr.oracle import (
    ChannelCrossSection,
    OracleResult,
    QuadratureSpec,
    general_channel_integral,
    intensity_cor_oracle,
    intensity_uncor_oracle,
    pair_norm_oracle,
    phi_norm_oracle,
    rho_single,
)

PARAMS = ModelParams(
    sigma=0.5,
    p_split=(0.3, -0.1, 0.7),
    p_total=(0.2, 0.0, -0.4),
    triplet_fraction=0.3,
    n_pairs=2.0,
)

QUAD = QuadratureSpec(method="tensor-quadrature", nodes_per_axis=48)


def _mc(samples, seed=0):
    # loose target: these tests compare against 3 * est_error themselves,
    # so a tolerance failure inside the oracle would only hide the data
    return QuadratureSpec(sample_count=samples, rng_seed=seed, target_rel_tol=0.5)


def test_pair_norm_quadrature():
    for channel in (SpinChannel.SINGLET, SpinChannel.TRIPLET):
        res = pair_norm_oracle(PARAMS, channel, QUAD)
        assert abs(res.value - 1.0) < 1e-8
        assert res.est_error < 1e-4
        assert res.samples_used > 0


def test_pair_norm_monte_carlo():
    for channel in (SpinChannel.SINGLET, SpinChannel.TRIPLET):
        res = pair_norm_oracle(PARAMS, channel, _mc(1 << 19))
        assert abs(res.value - 1.0) <= 3.0 * res.est_error
        assert 0.0 < res.est_error < 1e-2


def test_phi_norm_counts_pairs():
    res = phi_norm_oracle(PARAMS, QUAD)
    assert abs(res.value - PARAMS.n_pairs) < 1e-7
    res = phi_norm_oracle(PARAMS, _mc(1 << 19))
    assert abs(res.value - PARAMS.n_pairs) <= 3.0 * res.est_error


def test_rho_single_matches_marginal():
    # the partner integral of the pair yield must reproduce the
    # closed-form single-particle density
    for p in ((0.4, -0.2, 0.1), (0.0, 0.0, 0.0), (-0.6, 0.3, 0.9)):
        res = rho_single(np.array(p), PARAMS, QUAD)
        want = PARAMS.n_pairs * float(mixture_marginal(np.array(p), PARAMS))
        assert abs(res.value - want) < 1e-10 * want


def test_method_restrictions():
    with pytest.raises(UnsupportedMethodError):
        intensity_cor_oracle(1.0, PARAMS, QUAD)
    with pytest.raises(UnsupportedMethodError):
        intensity_uncor_oracle(1.0, PARAMS, QUAD)
    with pytest.raises(UnsupportedMethodError):
        general_channel_integral(
            [ChannelCrossSection(1.0, SpinChannel.SINGLET, sigma=0.5)], 1.0, QUAD
        )
    with pytest.raises(UnsupportedMethodError):
        rho_single(np.zeros(3), PARAMS, _mc(1024))


def test_results_are_deterministic(monkeypatch):
    spec = _mc((1 << 18) * 2)
    first = intensity_cor_oracle(1.2, PARAMS, spec)
    again = intensity_cor_oracle(1.2, PARAMS, spec)
    assert first == again
    # chunk seeds and the ordered fsum reduction make the result
    # independent of the thread count, bit for bit
    monkeypatch.setenv("PAIRCORR_THREADS", "3")
    threaded = intensity_cor_oracle(1.2, PARAMS, spec)
    assert threaded == first


def test_error_estimate_scales_like_sqrt_n():
    coarse = pair_norm_oracle(PARAMS, SpinChannel.SINGLET, _mc(1 << 16))
    fine = pair_norm_oracle(PARAMS, SpinChannel.SINGLET, _mc(1 << 20))
    ratio = coarse.est_error / fine.est_error
    assert 2.5 < ratio < 6.5  # 16x the samples, expect about 4


def test_independent_seeds_agree():
    a = intensity_uncor_oracle(1.2, PARAMS, _mc(1 << 18, seed=0))
    b = intensity_uncor_oracle(1.2, PARAMS, _mc(1 << 18, seed=1))
    assert a.value != b.value
    assert abs(a.value - b.value) <= 3.0 * (a.est_error + b.est_error)


def test_point_mass_channels_reduce_to_mixture():
    # the general channel list with the mixture's own weights must take
    # the same code path, so the values agree exactly
    spec = _mc(1 << 18)
    common = dict(sigma=PARAMS.sigma, p_split=PARAMS.p_split, p_total=PARAMS.p_total)
    channels = [
        ChannelCrossSection(
            PARAMS.n_pairs * (1.0 - PARAMS.triplet_fraction),
            SpinChannel.SINGLET,
            **common,
        ),
        ChannelCrossSection(
            PARAMS.n_pairs * PARAMS.triplet_fraction, SpinChannel.TRIPLET, **common
        ),
    ]
    assert general_channel_integral(channels, 1.2, spec) == intensity_cor_oracle(
        1.2, PARAMS, spec
    )


def test_zero_weight_channel_is_skipped():
    spec = _mc(1 << 18)
    keep = ChannelCrossSection(0.7, SpinChannel.SINGLET, sigma=0.4, p_split=(0, 0, 0.3))
    dead = ChannelCrossSection(0.0, SpinChannel.TRIPLET, sigma=0.6, p_split=(0, 0, 1.0))
    assert general_channel_integral([keep, dead], 0.9, spec) == general_channel_integral(
        [keep], 0.9, spec
    )


def test_channel_sum_is_linear():
    spec = _mc(1 << 18)
    a = ChannelCrossSection(0.7, SpinChannel.SINGLET, sigma=0.4, p_split=(0, 0, 0.3))
    b = ChannelCrossSection(
        1.8, SpinChannel.TRIPLET, sigma=0.6, p_split=(0.2, 0.1, -0.5), p_total=(0.1, 0, 0.2)
    )
    both = general_channel_integral([a, b], 0.9, spec)
    only_a = general_channel_integral([a], 0.9, spec)
    only_b = general_channel_integral([b], 0.9, spec)
    budget = 3.0 * (both.est_error + only_a.est_error + only_b.est_error)
    assert abs(both.value - only_a.value - only_b.value) <= budget


def test_intensity_scales_with_n_pairs():
    spec = _mc(1 << 18)
    one = intensity_cor_oracle(1.2, PARAMS, spec)
    five = intensity_cor_oracle(
        1.2,
        ModelParams(
            sigma=PARAMS.sigma,
            p_split=PARAMS.p_split,
            p_total=PARAMS.p_total,
            triplet_fraction=PARAMS.triplet_fraction,
            n_pairs=5.0 * PARAMS.n_pairs,
        ),
        spec,
    )
    np.testing.assert_allclose(five.value, 5.0 * one.value, rtol=1e-13)


def test_zero_separation_is_exactly_zero():
    for oracle in (intensity_cor_oracle, intensity_uncor_oracle):
        res = oracle(0.0, PARAMS, _mc(1024))
        assert res == OracleResult(0.0, 0.0, 0)


def test_tolerance_failure_carries_partial_result():
    spec = QuadratureSpec(sample_count=4096, target_rel_tol=1e-6)
    with pytest.raises(ToleranceNotMetError) as excinfo:
        intensity_uncor_oracle(1.2, PARAMS, spec)
    partial = excinfo.value.result
    assert partial.samples_used == 4096
    assert partial.est_error > 0.0
    assert abs(partial.value - 1.47) < 0.2  # the estimate itself is sound


def test_degenerate_triplet_is_refused():
    bad = ModelParams(sigma=0.5, triplet_fraction=0.5)
    with pytest.raises(DegenerateChannelError):
        intensity_uncor_oracle(1.0, bad, _mc(1024))
    with pytest.raises(DegenerateChannelError):
        phi_norm_oracle(bad, _mc(1024))
    with pytest.raises(DegenerateChannelError):
        pair_norm_oracle(bad, SpinChannel.TRIPLET, _mc(1024))
    # jitter that wanders into the degenerate region is caught sample-wise
    wobbly = ChannelCrossSection(
        1.0, SpinChannel.TRIPLET, sigma=0.5, p_split=(0, 0, 0), spread_split=1e-8
    )
    with pytest.raises(DegenerateChannelError):
        general_channel_integral([wobbly], 1.0, _mc(4096))


def test_narrow_jitter_stays_near_point_mass():
    spec = _mc(1 << 18)
    point = ChannelCrossSection(1.0, SpinChannel.SINGLET, sigma=0.5, p_split=(0, 0, 0.5))
    smeared = ChannelCrossSection(
        1.0,
        SpinChannel.SINGLET,
        sigma=0.5,
        p_split=(0, 0, 0.5),
        spread_split=0.025,
        spread_total=0.025,
    )
    rp = general_channel_integral([point], 1.2, spec)
    rj = general_channel_integral([smeared], 1.2, spec)
    margin = 0.02 * rp.value + 3.0 * (rp.est_error + rj.est_error)
    assert abs(rj.value - rp.value) <= margin


def test_oracles_match_closed_forms():
    spec = _mc(1 << 19)
    for dp in (0.6, 1.2):
        cor = intensity_cor_oracle(dp, PARAMS, spec)
        want = coincidence_intensity(
            dp, PARAMS.sigma, PARAMS.triplet_fraction, PARAMS.p_split, n_pairs=PARAMS.n_pairs
        )
        assert abs(cor.value - want) <= max(3.0 * cor.est_error, 1e-6 * want)
        unc = intensity_uncor_oracle(dp, PARAMS, spec)
        want = accidental_intensity(
            dp, PARAMS.sigma, PARAMS.triplet_fraction, PARAMS.p_split, n_pairs=PARAMS.n_pairs
        )
        assert abs(unc.value - want) <= 3.0 * unc.est_error


def test_spec_and_channel_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(method="simpson")
    with pytest.raises(ValueError):
        QuadratureSpec(sample_count=0)
    with pytest.raises(ValueError):
        QuadratureSpec(nodes_per_axis=4)
    with pytest.raises(ValueError):
        QuadratureSpec(target_rel_tol=0.0)
    with pytest.raises(ValueError):
        ChannelCrossSection(-1.0, SpinChannel.SINGLET, sigma=0.5)
    with pytest.raises(ValueError):
        ChannelCrossSection(1.0, SpinChannel.SINGLET, sigma=0.0)
    with pytest.raises(ValueError):
        ChannelCrossSection(1.0, SpinChannel.SINGLET, sigma=0.5, spread_split=-0.1)
    with pytest.raises(ValueError):
        general_channel_integral([], 1.0, _mc(1024))
    with pytest.raises(ValueError):
        intensity_cor_oracle(-1.0, PARAMS, _mc(1024))


def test_thread_env_validation(monkeypatch):
    for raw in ("0", "junk"):
        monkeypatch.setenv("PAIRCORR_THREADS", raw)
        with pytest.raises(ValueError):
            intensity_cor_oracle(1.0, PARAMS, _mc(1024))
