"""
Standard n-out-of-n bootstrap for xi_n.

A bootstrap resample is represented by multinomial weights W (W_i copies of
pair i). Three evaluations of the resampled statistic are provided:

- DIRECT: materialize the resample and apply xi_general (reference path).
- TILDE: the same value computed on original indices. Copies of one unit share
  their x, so the rank gaps of the resample are the gaps between consecutive
  present units, and the denominator is sum_i W_i L~_i (n - L~_i).
- HAT: the tilde rank-gap sum with the fixed factor 3/(n^2 - 1).

The window-count form (xi_bar) replaces each rank gap by the weight strictly
between the two responses; its conditional moments have closed forms (theory.py).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Tuple

import numpy as np
from scipy import stats

from .. import config
from .errors import DegenerateSampleError, ParameterError, PreconditionError
from .model_gen import BivariateSample
from .rng import stream
from .xi_core import BY_INDEX, TieBreak, xi_general

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BootstrapWeights:
    """Multinomial counts: w[i] copies of pair i, sum(w) == n."""
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.int64)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or int(w.sum()) != w.size:
            raise ParameterError("weights must be nonnegative integers summing to n", "weights")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return int(self.w.size)

    @property
    def present(self) -> np.ndarray:
        return self.w > 0

    @classmethod
    def identity(cls, n: int) -> "BootstrapWeights":
        return cls(np.ones(n, dtype=np.int64))


class Statistic(Enum):
    DIRECT = "direct"
    TILDE = "tilde"
    HAT = "hat"


class CIMethod(Enum):
    HB1 = "HB1"
    HB2 = "HB2"
    ORACLE_VAR = "OracleVar"
    NORMAL = "Normal"


@dataclass(frozen=True)
class BootstrapDistribution:
    """B replicate values of the bootstrapped statistic for one source sample."""
    values: np.ndarray
    source_xi: float
    source_n: int
    statistic: Statistic = Statistic.TILDE
    degenerate_redraws: int = 0

    @property
    def b_count(self) -> int:
        return int(self.values.size)

    @property
    def mean(self) -> float:
        return float(self.values.mean())


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    alpha: float
    method: CIMethod

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def width(self) -> float:
        return self.upper - self.lower


def draw_weights(n: int, rng: np.random.Generator) -> BootstrapWeights:
    """Tally n uniform index draws into multinomial counts."""
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}", "n")
    return BootstrapWeights(np.bincount(rng.integers(0, n, size=n), minlength=n))


def materialize(sample: BivariateSample, weights: BootstrapWeights) -> BivariateSample:
    """The explicit resample: pair i repeated w[i] times, in index order."""
    _check_sizes(sample, weights)
    return sample.take(np.repeat(np.arange(sample.n), weights.w))


def _check_sizes(sample: BivariateSample, weights: BootstrapWeights) -> None:
    if weights.n != sample.n:
        raise ParameterError(f"weights have length {weights.n}, sample has {sample.n}", "weights")


def _require_tie_free(sample: BivariateSample, what: str) -> None:
    if not sample.continuous:
        raise PreconditionError(f"{what} needs a sample without ties in x or y")


class _ResamplePlan:
    """Orderings of one source sample, shared by every replicate drawn from it."""

    def __init__(self, sample: BivariateSample):
        self.n = sample.n
        self.x_order = np.argsort(sample.x, kind="stable")
        self.y_order = np.argsort(sample.y, kind="stable")
        sorted_y = sample.y[self.y_order]
        # Last and first positions of each response's tie block in y-order
        self.y_right = np.searchsorted(sorted_y, sample.y, side="right") - 1
        self.y_left = np.searchsorted(sorted_y, sample.y, side="left")
        self.sorted_y = sorted_y

    def weighted_ranks(self, w: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """R~_i = sum_j W_j 1(y_j <= y_i) and L~_i = sum_j W_j 1(y_j >= y_i)."""
        cum = np.cumsum(w[self.y_order])
        r = cum[self.y_right]
        below = np.concatenate(([0], cum))[self.y_left]
        return r, self.n - below

    def present_in_x_order(self, w: np.ndarray) -> np.ndarray:
        order = self.x_order
        return order[w[order] > 0]

    def gap_sum(self, w: np.ndarray, r: np.ndarray) -> int:
        return int(np.abs(np.diff(r[self.present_in_x_order(w)])).sum())

    def tilde(self, w: np.ndarray) -> float:
        r, l = self.weighted_ranks(w)
        denominator = 2 * int((w * l * (self.n - l)).sum())
        if denominator == 0:
            raise DegenerateSampleError("resample has all y tied")
        return 1.0 - self.n * self.gap_sum(w, r) / denominator

    def hat(self, w: np.ndarray) -> float:
        r, _ = self.weighted_ranks(w)
        return 1.0 - 3 * self.gap_sum(w, r) / (self.n * self.n - 1)

    def is_degenerate(self, w: np.ndarray) -> bool:
        present_y = self.sorted_y[w[self.y_order] > 0]
        return present_y[0] == present_y[-1]


def xi_boot_direct(sample: BivariateSample, weights: BootstrapWeights,
                   tie_break: TieBreak = BY_INDEX) -> float:
    """
    xi_n of the materialized resample (general form, given X-tie rule).

    Raises:
        DegenerateSampleError: If every resampled y is equal
    """
    return xi_general(materialize(sample, weights), tie_break).value


def xi_tilde_fast(sample: BivariateSample, weights: BootstrapWeights) -> float:
    """
    Same value as xi_boot_direct, without materializing the resample.

    Requires distinct x; y may contain ties.

    Raises:
        PreconditionError: If x contains ties
        DegenerateSampleError: If every resampled y is equal
    """
    _check_sizes(sample, weights)
    if not sample.x_distinct:
        raise PreconditionError("the fast bootstrap path needs distinct x; use xi_boot_direct")
    return _ResamplePlan(sample).tilde(weights.w)


def hat_rank_gap_sum(sample: BivariateSample, weights: BootstrapWeights) -> int:
    """Sum of |R~_next - R~| over consecutive present units in x-order."""
    _check_sizes(sample, weights)
    _require_tie_free(sample, "the rank-gap sum")
    plan = _ResamplePlan(sample)
    r, _ = plan.weighted_ranks(weights.w)
    return plan.gap_sum(weights.w, r)


def xi_hat_b(sample: BivariateSample, weights: BootstrapWeights) -> float:
    n = sample.n
    return 1.0 - 3 * hat_rank_gap_sum(sample, weights) / (n * n - 1)


def bar_window_sum(sample: BivariateSample, weights: BootstrapWeights) -> int:
    """
    Weight strictly between the responses of each pair of consecutive present units.

    For consecutive present units p, q the rank gap |R~_q - R~_p| counts the
    upper endpoint's own weight on top of the strict window, so the window sum
    is the rank-gap sum minus the weights of the upper endpoints.
    """
    _check_sizes(sample, weights)
    _require_tie_free(sample, "the window sum")
    plan = _ResamplePlan(sample)
    w = weights.w
    r, _ = plan.weighted_ranks(w)
    units = plan.present_in_x_order(w)
    y = sample.y[units]
    upper = np.where(y[1:] > y[:-1], units[1:], units[:-1])
    return int(np.abs(np.diff(r[units])).sum() - w[upper].sum())


def xi_bar_b(sample: BivariateSample, weights: BootstrapWeights) -> float:
    n = sample.n
    return 1.0 - 3 * bar_window_sum(sample, weights) / (n * n - 1)


def xi_bar_b_bruteforce(sample: BivariateSample, weights: BootstrapWeights) -> float:
    """Window-count form by explicit double loop over x-ordered positions (O(n^2))."""
    _check_sizes(sample, weights)
    _require_tie_free(sample, "the window-count form")
    n = sample.n
    order = np.argsort(sample.x)
    y = sample.y[order].tolist()
    w = weights.w[order].tolist()
    total = 0
    for i in range(n - 1):
        if w[i] == 0:
            continue
        for k in range(1, n - i):
            if w[i + k] > 0:
                lo, hi = min(y[i], y[i + k]), max(y[i], y[i + k])
                total += sum(w[j] for j in range(n) if lo < y[j] < hi)
                break
    return 1.0 - 3 * total / (n * n - 1)


def bootstrap_distribution(
    sample: BivariateSample,
    b_count: int,
    seed: int,
    key: Tuple[int, ...] = (),
    statistic: Statistic = Statistic.TILDE,
    tie_break: TieBreak = BY_INDEX,
) -> BootstrapDistribution:
    """
    Draw B bootstrap replicates of the chosen statistic.

    Replicate b uses the stream (seed, *key, b), so the result does not depend
    on how replicates are scheduled. A resample whose y values are all equal
    is redrawn from the same stream and counted; more than
    MAX_DEGENERATE_REDRAWS redraws in one replicate is an error.

    Args:
        sample: Source sample
        b_count: Number of replicates B (>= 2)
        seed: Root seed
        key: Stream key prefix, e.g. (rho index, n index, replication)
        statistic: DIRECT, TILDE or HAT; TILDE falls back to DIRECT when x has ties
        tie_break: X-tie rule for the source xi_n and for materialized resamples

    Returns:
        BootstrapDistribution with the source xi_n and the redraw count

    Raises:
        ParameterError: If B < 2
        PreconditionError: If HAT is requested on a sample with ties
        DegenerateSampleError: If the source sample or a replicate cannot avoid all-tied y
    """
    if int(b_count) != b_count or b_count < 2:
        raise ParameterError(f"bootstrap size must be an integer >= 2, got {b_count}", "B")
    if statistic is Statistic.HAT:
        _require_tie_free(sample, "the HAT statistic")
    if statistic is Statistic.TILDE and not sample.x_distinct:
        logger.info("x has ties; computing bootstrap replicates by materialization")
        statistic = Statistic.DIRECT

    source_xi = xi_general(sample, tie_break).value
    plan = _ResamplePlan(sample)
    n = sample.n
    values = np.empty(b_count)
    redraws = 0
    for b in range(b_count):
        rng = stream(seed, *key, b)
        weights = draw_weights(n, rng)
        attempts = 0
        while plan.is_degenerate(weights.w):
            attempts += 1
            if attempts > config.MAX_DEGENERATE_REDRAWS:
                raise DegenerateSampleError(
                    f"replicate {b}: every resample had all y tied after "
                    f"{config.MAX_DEGENERATE_REDRAWS} redraws"
                )
            weights = draw_weights(n, rng)
        redraws += attempts
        if statistic is Statistic.TILDE:
            values[b] = plan.tilde(weights.w)
        elif statistic is Statistic.HAT:
            values[b] = plan.hat(weights.w)
        else:
            values[b] = xi_boot_direct(sample, weights, tie_break)
    if redraws:
        logger.warning("%d degenerate resample(s) redrawn (n=%d, B=%d)", redraws, n, b_count)
    values.setflags(write=False)
    return BootstrapDistribution(values, source_xi, n, statistic, redraws)


def var_b1(dist: BootstrapDistribution) -> float:
    """n times the mean squared deviation of the replicates from the source xi_n."""
    _require_replicates(dist)
    return float(dist.source_n * np.mean((dist.values - dist.source_xi) ** 2))


def var_b2(dist: BootstrapDistribution) -> float:
    """n times the (divide-by-B) variance of the replicates."""
    _require_replicates(dist)
    return float(dist.source_n * np.var(dist.values))


def _require_replicates(dist: BootstrapDistribution) -> None:
    if dist.b_count < 2:
        raise ParameterError(f"need at least 2 replicates, got {dist.b_count}", "B")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}", "alpha")


def _hybrid_interval(dist: BootstrapDistribution, alpha: float, center: float,
                     method: CIMethod) -> ConfidenceInterval:
    _check_alpha(alpha)
    _require_replicates(dist)
    root_n = math.sqrt(dist.source_n)
    roots = root_n * (dist.values - center)
    q_low, q_high = np.quantile(roots, [alpha / 2.0, 1.0 - alpha / 2.0])
    return ConfidenceInterval(
        lower=float(dist.source_xi - q_high / root_n),
        upper=float(dist.source_xi - q_low / root_n),
        alpha=alpha,
        method=method,
    )


def ci_hybrid1(dist: BootstrapDistribution, alpha: float) -> ConfidenceInterval:
    """Hybrid interval from the quantiles of sqrt(n) * (replicate - source xi_n)."""
    return _hybrid_interval(dist, alpha, dist.source_xi, CIMethod.HB1)


def ci_hybrid2(dist: BootstrapDistribution, alpha: float) -> ConfidenceInterval:
    """Hybrid interval from the quantiles of sqrt(n) * (replicate - replicate mean)."""
    return _hybrid_interval(dist, alpha, dist.mean, CIMethod.HB2)


def ci_normal(xi: float, n: int, variance: float, alpha: float,
              method: CIMethod = CIMethod.NORMAL) -> ConfidenceInterval:
    """xi +/- z_{1-alpha/2} * sqrt(variance / n), for a given limit of n * Var(xi_n)."""
    _check_alpha(alpha)
    if variance < 0:
        raise ParameterError(f"variance must be nonnegative, got {variance}", "variance")
    half = float(stats.norm.ppf(1.0 - alpha / 2.0)) * math.sqrt(variance / n)
    return ConfidenceInterval(xi - half, xi + half, alpha, method)


def enumerate_weights(n: int) -> Iterator[Tuple[BootstrapWeights, Fraction]]:
    """
    Every multinomial outcome with its exact probability n! / (prod w_i! * n^n).

    Raises:
        ParameterError: If n exceeds ENUMERATION_MAX_N
    """
    if not 1 <= n <= config.ENUMERATION_MAX_N:
        raise ParameterError(f"enumeration supports 1 <= n <= {config.ENUMERATION_MAX_N}", "n")
    total = n ** n
    numerator = math.factorial(n)
    for counts in _compositions(n, n):
        ways = numerator
        for c in counts:
            ways //= math.factorial(c)
        yield BootstrapWeights(np.array(counts, dtype=np.int64)), Fraction(ways, total)


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def l1_gap(sample: BivariateSample, b_count: int, seed: int) -> float:
    """Monte Carlo estimate of n * E[(xi_hat_b - xi_tilde_b)^2 | sample], skipping all-tied resamples."""
    _require_tie_free(sample, "the hat/tilde gap")
    plan = _ResamplePlan(sample)
    n = sample.n
    total = 0.0
    kept = 0
    for b in range(b_count):
        w = draw_weights(n, stream(seed, b)).w
        if plan.is_degenerate(w):
            continue
        total += (plan.hat(w) - plan.tilde(w)) ** 2
        kept += 1
    if kept == 0:
        raise DegenerateSampleError("every resample had all y tied")
    return n * total / kept


def describe(dist: BootstrapDistribution, alpha: Optional[float] = None) -> dict:
    """Summary numbers for reports: replicate mean, both variances, and intervals at alpha."""
    summary = {
        "xi_n": dist.source_xi,
        "n": dist.source_n,
        "B": dist.b_count,
        "statistic": dist.statistic.value,
        "replicate_mean": dist.mean,
        "var_b1": var_b1(dist),
        "var_b2": var_b2(dist),
        "degenerate_redraws": dist.degenerate_redraws,
    }
    if alpha is not None:
        for ci in (ci_hybrid1(dist, alpha), ci_hybrid2(dist, alpha)):
            summary[f"{ci.method.value}_lower"] = ci.lower
            summary[f"{ci.method.value}_upper"] = ci.upper
    return summary
