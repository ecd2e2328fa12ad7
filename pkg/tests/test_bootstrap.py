"""Tests for bootstrap weights, the resampled statistics, variance estimators and intervals."""
import itertools
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from src.core.bootstrap import (
    BootstrapDistribution,
    BootstrapWeights,
    CIMethod,
    Statistic,
    bar_window_sum,
    bootstrap_distribution,
    ci_hybrid1,
    ci_hybrid2,
    ci_normal,
    draw_weights,
    enumerate_weights,
    hat_rank_gap_sum,
    l1_gap,
    materialize,
    var_b1,
    var_b2,
    xi_bar_b,
    xi_bar_b_bruteforce,
    xi_boot_direct,
    xi_hat_b,
    xi_tilde_fast,
)
from src.core.errors import DegenerateSampleError, ParameterError
from src.core.model_gen import ModelSpec, gaussian_rotation_sample, sample_from_arrays
from src.core.rng import stream
from src.core.theory import cond_exp_xibar
from src.core.xi_core import TieBreak, compute_ranks, order_by_x, rank_gap_sum, xi_general, xi_simple


def _sample(n, seed, rho=0.0):
    return gaussian_rotation_sample(ModelSpec(rho, n, seed))


def _weights(n, seed):
    return draw_weights(n, stream(seed))


def test_draw_weights_conservation():
    assert draw_weights(1, stream(0)).w.tolist() == [1]
    for seed in range(50):
        w = _weights(17, seed)
        assert int(w.w.sum()) == 17
        assert np.all(w.w >= 0)


def test_draw_weights_marginal():
    """P(W_1 = 0) = (3/4)^4 for n = 4."""
    rng = stream(99)
    draws = 100_000
    zeros = sum(draw_weights(4, rng).w[0] == 0 for _ in range(draws))
    p = 81 / 256
    se = math.sqrt(p * (1 - p) / draws)
    print(f"  empirical P(W_1=0) = {zeros / draws:.5f}, exact {p:.5f}")
    assert abs(zeros / draws - p) <= 4 * se


def test_weights_validation():
    with pytest.raises(ParameterError):
        BootstrapWeights(np.array([2, 0, 0, 0]))
    with pytest.raises(ParameterError):
        BootstrapWeights(np.array([-1, 3]))


def test_identity_weights_reproduce_sample():
    sample = _sample(25, 1, 0.5)
    ones = BootstrapWeights.identity(25)
    assert xi_boot_direct(sample, ones) == xi_general(sample).value
    assert xi_tilde_fast(sample, ones) == xi_general(sample).value
    assert xi_hat_b(sample, ones) == xi_simple(sample).value


def test_single_unit_resample_is_degenerate():
    sample = _sample(6, 2)
    weights = BootstrapWeights(np.array([0, 0, 6, 0, 0, 0]))
    with pytest.raises(DegenerateSampleError):
        xi_boot_direct(sample, weights)
    with pytest.raises(DegenerateSampleError):
        xi_tilde_fast(sample, weights)


def _direct_gap_sum(sample, weights, tie_break):
    resample = materialize(sample, weights)
    return rank_gap_sum(compute_ranks(resample.y).r, order_by_x(resample, tie_break).perm)


def test_key_identity_random_tie_breaks():
    for n in (5, 8, 50, 200):
        for case in range(40):
            sample = _sample(n, 1000 * n + case)
            weights = _weights(n, 2000 * n + case)
            expected = hat_rank_gap_sum(sample, weights)
            for tie_seed in range(3):
                assert _direct_gap_sum(sample, weights, TieBreak.seeded(tie_seed)) == expected
    print("✓ Resample rank-gap sums equal present-unit gap sums")


def test_key_identity_exhaustive_tie_breaks():
    """Every ordering of tied resample x values gives the same rank-gap sum (n = 6)."""
    n = 6
    for case in range(10):
        sample = _sample(n, case)
        weights = _weights(n, 100 + case)
        expected = hat_rank_gap_sum(sample, weights)
        resample = materialize(sample, weights)
        r = compute_ranks(resample.y).r
        blocks = [np.flatnonzero(resample.x == value).tolist()
                  for value in np.unique(resample.x)]
        for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
            perm = np.array([i for block in choice for i in block])
            assert rank_gap_sum(r, perm) == expected


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=2, max_value=60), st.integers(min_value=0, max_value=2**32))
def test_fast_tilde_equals_materialized(n, seed):
    sample = _sample(n, seed)
    weights = _weights(n, seed + 1)
    if np.unique(sample.y[weights.present]).size < 2:
        return
    assert xi_tilde_fast(sample, weights) == xi_boot_direct(sample, weights)


def test_fast_tilde_with_tied_y():
    sample = sample_from_arrays([1, 2, 3, 4, 5, 6], [1, 1, 2, 2, 3, 1])
    for seed in range(30):
        weights = _weights(6, seed)
        if np.unique(sample.y[weights.present]).size < 2:
            continue
        assert xi_tilde_fast(sample, weights) == xi_boot_direct(sample, weights)


def test_window_form_identity_weights_hand_check():
    sample = sample_from_arrays([1, 2, 3, 4], [1, 3, 2, 4])
    ones = BootstrapWeights.identity(4)
    # Strict windows between consecutive responses hold 1, 0 and 1 units
    assert bar_window_sum(sample, ones) == 2
    assert xi_bar_b(sample, ones) == pytest.approx(1 - 3 * 2 / 15)
    assert xi_bar_b_bruteforce(sample, ones) == pytest.approx(xi_bar_b(sample, ones))


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=2**32))
def test_window_form_matches_bruteforce_and_bound(n, seed):
    sample = _sample(n, seed)
    weights = _weights(n, seed + 7)
    bar = xi_bar_b(sample, weights)
    assert bar == pytest.approx(xi_bar_b_bruteforce(sample, weights), abs=1e-12)
    assert abs(bar - xi_hat_b(sample, weights)) <= 6 * n / (n * n - 1) + 1e-12


def test_enumerate_weights_probabilities():
    for n in range(1, 6):
        outcomes = list(enumerate_weights(n))
        assert len(outcomes) == math.comb(2 * n - 1, n)
        assert sum(p for _, p in outcomes) == 1
    probs = {tuple(w.w.tolist()): p for w, p in enumerate_weights(2)}
    assert probs == {(0, 2): Fraction(1, 4), (1, 1): Fraction(1, 2), (2, 0): Fraction(1, 4)}
    with pytest.raises(ParameterError):
        list(enumerate_weights(8))


def test_bootstrap_distribution_deterministic():
    sample = _sample(80, 5, 0.3)
    first = bootstrap_distribution(sample, 30, 123, (0, 1))
    second = bootstrap_distribution(sample, 30, 123, (0, 1))
    assert np.array_equal(first.values, second.values)
    assert first.b_count == 30
    assert first.source_xi == xi_general(sample).value
    assert np.all((first.values >= -2) & (first.values <= 1))


def test_statistics_share_weights():
    sample = _sample(40, 6)
    tilde = bootstrap_distribution(sample, 25, 9, statistic=Statistic.TILDE)
    direct = bootstrap_distribution(sample, 25, 9, statistic=Statistic.DIRECT)
    hat = bootstrap_distribution(sample, 25, 9, statistic=Statistic.HAT)
    assert np.array_equal(tilde.values, direct.values)
    assert not np.array_equal(tilde.values, hat.values)


def test_bootstrap_distribution_errors_and_fallback():
    sample = _sample(10, 7)
    with pytest.raises(ParameterError):
        bootstrap_distribution(sample, 1, 0)
    tied_x = sample_from_arrays([1, 1, 2, 3, 4], [5, 1, 2, 3, 4])
    dist = bootstrap_distribution(tied_x, 10, 0)
    assert dist.statistic is Statistic.DIRECT


def test_degenerate_resamples_are_redrawn():
    sample = sample_from_arrays([0.0, 1.0], [0.0, 1.0])
    dist = bootstrap_distribution(sample, 50, 17)
    assert dist.degenerate_redraws > 0
    assert np.all(dist.values == 0.0), "the only usable resample of n=2 is the sample itself"


def test_variance_estimators():
    dist = BootstrapDistribution(np.array([0.0, 1.0]), 0.0, 4)
    assert var_b1(dist) == pytest.approx(2.0)
    assert var_b2(dist) == pytest.approx(1.0)
    flat = BootstrapDistribution(np.full(5, 0.3), 0.3, 100)
    assert var_b1(flat) == pytest.approx(0.0)
    assert var_b2(flat) == 0.0
    with pytest.raises(ParameterError):
        var_b2(BootstrapDistribution(np.array([0.1]), 0.0, 4))


def test_hybrid_intervals_hand_check():
    symmetric = BootstrapDistribution(np.array([-1.0, 0.0, 1.0]), 0.0, 1)
    hb2 = ci_hybrid2(symmetric, 0.5)
    assert (hb2.lower, hb2.upper) == pytest.approx((-0.5, 0.5))
    assert hb2.method is CIMethod.HB2

    shifted = BootstrapDistribution(np.array([-0.7, 0.3, 1.3]), 0.0, 1)
    hb2 = ci_hybrid2(shifted, 0.5)
    hb1 = ci_hybrid1(shifted, 0.5)
    assert (hb2.lower, hb2.upper) == pytest.approx((-0.5, 0.5))
    assert (hb1.lower, hb1.upper) == pytest.approx((-0.8, 0.2))
    print("✓ Hybrid intervals match hand evaluation")


def test_hybrid_interval_properties():
    flat = BootstrapDistribution(np.full(10, 0.25), 0.25, 50)
    ci = ci_hybrid1(flat, 0.1)
    assert ci.lower == pytest.approx(0.25) and ci.upper == pytest.approx(0.25)

    dist = bootstrap_distribution(_sample(200, 8, 0.5), 200, 4)
    for method in (ci_hybrid1, ci_hybrid2):
        wide, narrow = method(dist, 0.05), method(dist, 0.1)
        assert wide.lower <= narrow.lower <= narrow.upper <= wide.upper
    for alpha in (0.0, 1.0, -0.2):
        with pytest.raises(ParameterError):
            ci_hybrid1(dist, alpha)


def test_normal_interval():
    ci = ci_normal(0.1, 1000, 0.4, 0.05, CIMethod.ORACLE_VAR)
    half = 1.959963984540054 * math.sqrt(0.4 / 1000)
    assert ci.lower == pytest.approx(0.1 - half)
    assert ci.upper == pytest.approx(0.1 + half)
    assert ci.covers(0.1) and not ci.covers(0.2)


def test_l1_gap_is_small():
    value = l1_gap(_sample(100, 9), 200, 3)
    assert 0.0 <= value < 0.5


def test_hat_form_enumerated_mean():
    """Exact E[xi_hat_b | data] agrees with the materialized resamples and sits just below the window form."""
    for n in (3, 4, 5):
        for seed in range(3):
            sample = _sample(n, 300 + 10 * n + seed)
            scale = Fraction(3, n * n - 1)
            hat_mean = Fraction(0)
            direct_mean = Fraction(0)
            bar_mean = Fraction(0)
            for weights, prob in enumerate_weights(n):
                hat_mean += prob * (1 - scale * hat_rank_gap_sum(sample, weights))
                direct_mean += prob * (1 - scale * _direct_gap_sum(sample, weights,
                                                                   TieBreak.by_index()))
                bar_mean += prob * (1 - scale * bar_window_sum(sample, weights))
            assert hat_mean == direct_mean
            assert bar_mean == cond_exp_xibar(sample, exact=True)
            assert 0 <= bar_mean - hat_mean <= Fraction(6 * n, n * n - 1)
    print("✓ Enumerated hat-form mean matches materialized resamples")


@pytest.mark.slow
def test_bootstrap_mean_tracks_conditional_mean():
    """Replicates centre on E[xi_bar_b | data] (near 1/e under independence), not on xi_n."""
    n, draws = 1000, 2000
    sample = _sample(n, 10)
    tilde = np.empty(draws)
    hat = np.empty(draws)
    bar = np.empty(draws)
    for b in range(draws):
        weights = draw_weights(n, stream(11, b))
        tilde[b] = xi_tilde_fast(sample, weights)
        hat[b] = xi_hat_b(sample, weights)
        bar[b] = xi_bar_b(sample, weights)
    centre = float(cond_exp_xibar(sample))
    se_bar = bar.std(ddof=1) / math.sqrt(draws)
    print(f"  mean replicate {tilde.mean():.4f}, conditional mean {centre:.4f}, "
          f"xi_n {xi_general(sample).value:.4f}")
    assert abs(bar.mean() - centre) <= 4 * se_bar
    # tilde - hat by Cauchy-Schwarz on the paired draws, hat - bar by the window bound
    bound = (math.sqrt(np.mean((tilde - hat) ** 2)) + 6 * n / (n * n - 1) + 4 * se_bar)
    assert abs(tilde.mean() - centre) <= bound
    assert abs(tilde.mean() - xi_general(sample).value) > 5 * bound
