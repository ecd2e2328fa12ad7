"""Agreement checks between the closed-form moments and brute-force or Monte Carlo oracles."""
import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, List

import numpy as np

from ..core import bootstrap, theory
from ..core.bootstrap import BootstrapWeights, draw_weights, enumerate_weights
from ..core.errors import VerificationError
from ..core.model_gen import BivariateSample, ModelSpec, gaussian_rotation_sample
from ..core.rng import derive_seed, stream
from ..core.xi_core import TieBreak, compute_ranks, order_by_x, rank_gap_sum

logger = logging.getLogger(__name__)


class Level(Enum):
    FAST = "fast"
    FULL = "full"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    observed: float
    expected: float
    tolerance: float
    detail: str = ""


@dataclass
class VerificationReport:
    level: Level
    seed: int
    checks: List[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures


def _close(name: str, observed, expected, tolerance: float, detail: str = "") -> Check:
    return Check(name, abs(float(observed) - float(expected)) <= tolerance,
                 float(observed), float(expected), tolerance, detail)


def _count(name: str, failures: int, cases: int) -> Check:
    return Check(name, failures == 0, float(failures), 0.0, 0.0, f"{cases} cases")


def _null_sample(n: int, seed: int) -> BivariateSample:
    return gaussian_rotation_sample(ModelSpec(0.0, n, seed))


# individual checks -----------------------------------------------------------

def _check_multinomial_moments(level: Level, seed: int) -> List[Check]:
    max_n = 6 if level is Level.FULL else 5
    failures = cases = 0
    for n in range(1, max_n + 1):
        outcomes = list(enumerate_weights(n))
        for s, s2, t in ((s, s2, t) for s in range(n + 1) for s2 in range(n + 1 - s)
                         for t in range(n + 1 - s - s2)):
            cells_s, cells_s2 = range(s), range(s, s + s2)
            cells_t = range(s + s2, s + s2 + t)
            m1 = m2 = mx = Fraction(0)
            for weights, prob in outcomes:
                w = weights.w
                if w[list(cells_t)].sum():
                    continue
                ws, ws2 = int(w[list(cells_s)].sum()), int(w[list(cells_s2)].sum())
                m1 += prob * ws
                m2 += prob * ws * ws
                mx += prob * ws * ws2
            cases += 1
            if (m1, m2, mx) != theory.multinomial_moments(s, s2, t, n, exact=True):
                failures += 1
    return [_count("multinomial moments vs enumeration", failures, cases)]


def _check_general_moment(level: Level, seed: int) -> List[Check]:
    n = 5
    rng = stream(seed, 1)
    outcomes = list(enumerate_weights(n))
    failures = 0
    cases = 60 if level is Level.FULL else 20
    for _ in range(cases):
        a, b, t = (set(np.flatnonzero(rng.random(n) < 0.4).tolist()) for _ in range(3))
        brute = sum((prob * int(weights.w[list(a)].sum()) * int(weights.w[list(b)].sum())
                     for weights, prob in outcomes if not weights.w[list(t)].sum()),
                    Fraction(0))
        if brute != theory.multinomial_moment_general(a, b, t, n, exact=True):
            failures += 1
    return [_count("overlapping moment identity vs enumeration", failures, cases)]


def _direct_gap_sum(sample: BivariateSample, weights: BootstrapWeights, tie_break) -> int:
    resample = bootstrap.materialize(sample, weights)
    return rank_gap_sum(compute_ranks(resample.y).r, order_by_x(resample, tie_break).perm)


def _check_key_identity(level: Level, seed: int) -> List[Check]:
    per_n = 3334 if level is Level.FULL else 200
    failures = cases = 0
    for n in (5, 50, 200):
        for case in range(per_n):
            sample = _null_sample(n, derive_seed(seed, 2, n, case))
            weights = draw_weights(n, stream(seed, 3, n, case))
            tie_break = TieBreak.seeded(derive_seed(seed, 4, n, case))
            cases += 1
            if _direct_gap_sum(sample, weights, tie_break) != bootstrap.hat_rank_gap_sum(
                    sample, weights):
                failures += 1
    return [_count("rank-gap sum of resample equals present-unit gap sum", failures, cases)]


def _check_fast_tilde(level: Level, seed: int) -> List[Check]:
    cases = 500 if level is Level.FULL else 100
    worst = 0.0
    for case in range(cases):
        n = 2 + case % 60
        sample = _null_sample(n, derive_seed(seed, 5, case))
        weights = draw_weights(n, stream(seed, 6, case))
        if np.unique(sample.y[weights.present]).size < 2:
            continue
        worst = max(worst, abs(bootstrap.xi_tilde_fast(sample, weights)
                               - bootstrap.xi_boot_direct(sample, weights)))
    return [Check("fast bootstrap xi matches materialized resample", worst <= 1e-12, worst,
                  0.0, 1e-12, f"{cases} cases")]


def _check_window_bound(level: Level, seed: int) -> List[Check]:
    cases = 10_000 if level is Level.FULL else 1000
    failures = 0
    for case in range(cases):
        n = 2 + case % 100
        sample = _null_sample(n, derive_seed(seed, 7, case))
        weights = draw_weights(n, stream(seed, 8, case))
        gap = abs(bootstrap.xi_bar_b(sample, weights) - bootstrap.xi_hat_b(sample, weights))
        if gap > 6 * n / (n * n - 1) + 1e-12:
            failures += 1
    return [_count("window form within 6n/(n^2-1) of hat form", failures, cases)]


def _check_conditional_mean(level: Level, seed: int) -> List[Check]:
    checks = []
    samples = 5 if level is Level.FULL else 2
    failures = 0
    for case in range(samples):
        for n in (2, 3, 4, 5):
            sample = _null_sample(n, derive_seed(seed, 9, case, n))
            mean, variance = theory.enumerate_xibar_moments(sample)
            if mean != theory.cond_exp_xibar(sample, exact=True):
                failures += 1
            if variance != theory.cond_var_xibar_exact(sample, exact=True):
                failures += 1
    checks.append(_count("conditional mean and variance vs enumeration", failures, samples * 8))

    sample = _null_sample(30, derive_seed(seed, 10))
    draws = 100_000 if level is Level.FULL else 20_000
    mc = theory.xibar_moments_mc(sample, draws, derive_seed(seed, 11))
    checks.append(_close("conditional mean vs Monte Carlo (n=30)", mc.mean,
                         theory.cond_exp_xibar(sample), 4 * mc.mean_se))
    checks.append(_close("exact conditional variance vs Monte Carlo (n=30)", mc.variance,
                         theory.cond_var_xibar_exact(sample), 4 * mc.variance_se))
    return checks


def _check_variance_display(level: Level, seed: int) -> List[Check]:
    samples = 20 if level is Level.FULL else 3
    n = 30 if level is Level.FULL else 20
    worst = 0.0
    band = 0.0
    for case in range(samples):
        sample = _null_sample(n, derive_seed(seed, 12, case))
        display = theory.cond_var_xibar(sample)
        worst = max(worst, abs(display.value - theory.cond_var_xibar_exact(sample)))
        band = display.remainder_band
    return [Check(f"variance expansion within O(1/n^2) band (n={n})", worst <= band, worst, 0.0,
                  band, f"{samples} samples")]


def _check_identities(level: Level, seed: int) -> List[Check]:
    max_n = 50 if level is Level.FULL else 20
    failures = cases = 0
    for n in range(2, max_n + 1):
        cases += 1
        if any(theory.c_sum_over_k(n, i) != theory.c_sum_telescoped(n, i) for i in range(1, n)):
            failures += 1
        if theory.double_c_sum(n) != theory.double_c_sum_closed(n):
            failures += 1
        if theory.double_kc_sum(n) != theory.double_kc_sum_closed(n):
            failures += 1
        if theory.expected_xibar_unconditional(n, exact=True) != theory.expected_xibar_closed(n):
            failures += 1
    return [_count("telescoped coefficient sums", failures, cases)]


def _check_cardinalities(level: Level, seed: int) -> List[Check]:
    n = 6
    draws = 1_000_000 if level is Level.FULL else 100_000
    table = theory.card_expectation_table(n)
    observed = theory.card_expectation_mc(n, draws, derive_seed(seed, 13))
    return [_close(f"E[{key}] at n={n}", observed[key][0], table[key], 4 * observed[key][1])
            for key in theory.CARD_KEYS]


def _check_weighted_l(level: Level, seed: int) -> List[Check]:
    checks = [
        Check(f"weighted denominator mean vs enumeration (n={n})",
              theory.weighted_l_mean_enumerated(n) == theory.weighted_l_mean(n),
              float(theory.weighted_l_mean_enumerated(n)), float(theory.weighted_l_mean(n)), 0.0)
        for n in (2, 3, 4)
    ]
    draws = 1_000_000 if level is Level.FULL else 100_000
    mean, se = theory.weighted_l_mean_mc(5, draws, derive_seed(seed, 14))
    checks.append(_close("weighted denominator mean vs Monte Carlo (n=5)", mean,
                         theory.weighted_l_mean(5), 4 * se))
    return checks


def _check_bias(level: Level, seed: int) -> List[Check]:
    samples, replicates = (100, 200) if level is Level.FULL else (10, 100)
    n = 1000
    means = []
    for case in range(samples):
        sample = _null_sample(n, derive_seed(seed, 15, case))
        dist = bootstrap.bootstrap_distribution(sample, replicates, seed, (16, case))
        means.append(dist.mean)
    return [_close("mean bootstrap xi near 1/e (n=1000)", np.mean(means),
                   theory.asymptotic_constants().one_over_e, 0.02,
                   f"{samples} samples x {replicates} replicates")]


def _check_unconditional_mean(level: Level, seed: int) -> List[Check]:
    samples = 200 if level is Level.FULL else 50
    n = 1000
    values = [theory.cond_exp_xibar(_null_sample(n, derive_seed(seed, 17, case)))
              for case in range(samples)]
    return [_close("average conditional mean vs 1/e + (3 - 1/(2e))/n", np.mean(values),
                   theory.expected_xibar_expansion(n), 0.01, f"{samples} samples")]


def _check_constants(level: Level, seed: int) -> List[Check]:
    c = theory.asymptotic_constants()
    return [
        _close("1/e", c.one_over_e, 0.3678794412, 1e-10),
        _close("conditional variance bound", c.var_bound, 0.3834635468, 1e-9),
        _close("null variance", c.null_var, 0.4, 0.0),
    ]


CHECKS: List[Callable[[Level, int], List[Check]]] = [
    _check_constants,
    _check_multinomial_moments,
    _check_general_moment,
    _check_identities,
    _check_key_identity,
    _check_fast_tilde,
    _check_window_bound,
    _check_conditional_mean,
    _check_variance_display,
    _check_cardinalities,
    _check_weighted_l,
    _check_unconditional_mean,
    _check_bias,
]


def verify_theory(level: Level = Level.FAST, seed: int = 0, strict: bool = False) -> VerificationReport:
    """
    Run every agreement check at the given level.

    Args:
        level: FAST for a quick pass, FULL for the complete sample counts
        seed: Root seed for all Monte Carlo oracles
        strict: Raise instead of returning a failing report

    Raises:
        VerificationError: If strict and any check fails
    """
    report = VerificationReport(level, seed)
    started = time.perf_counter()
    for check in CHECKS:
        results = check(level, seed)
        for r in results:
            logger.info("%s %s: observed %.6g, expected %.6g", "PASS" if r.passed else "FAIL",
                        r.name, r.observed, r.expected)
        report.checks.extend(results)
    report.elapsed = time.perf_counter() - started
    if strict and not report.passed:
        raise VerificationError(report.failures)
    return report
