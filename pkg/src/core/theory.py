"""
Closed-form moments of the window-count bootstrap statistic, with brute-force oracles.

Throughout, a sample is viewed in x-order: position p (0-based) holds the unit
with the (p+1)-th smallest x. A window term (i, k) pairs position i with
position i + k, and its window set is

    S_{i,k} = {t : y_i ^ y_{i+k} < y_t < y_i v y_{i+k}} minus the gap {i < t < i + k}.

Sets of positions are held as Python int bitmasks.

Numerics: coefficient families are finite differences of f(x) = (1 - x/n)^m and
lose digits to cancellation, so they are evaluated as exact rationals up to
EXACT_ARITHMETIC_MAX_N and with compensated sums (math.fsum) beyond.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .. import config
from .bootstrap import bar_window_sum, draw_weights, enumerate_weights
from .errors import ParameterError, PreconditionError
from .model_gen import BivariateSample
from .rng import stream

logger = logging.getLogger(__name__)

Number = Union[Fraction, float]


# ---------------------------------------------------------------------------
# Multinomial moment identities
# ---------------------------------------------------------------------------

def _use_exact(n: int, exact: Optional[bool]) -> bool:
    return n <= config.EXACT_ARITHMETIC_MAX_N if exact is None else exact


def _base_power(x: int, n: int, m: int, exact: bool) -> Number:
    """(1 - x/n)^m; negative bases are allowed and m may be 0."""
    if exact:
        return Fraction(n - x, n) ** m
    return (1.0 - x / n) ** m


def multinomial_moments(s_size: int, s2_size: int, t_size: int, n: int,
                        exact: Optional[bool] = None) -> Tuple[Number, Number, Number]:
    """
    Moments of W ~ Multinomial(n; 1/n, ..., 1/n) restricted to {W_T = 0}.

    For disjoint S, S', T:
        m1      = E[W_S 1(W_T = 0)]       = |S| (1 - |T|/n)^(n-1)
        m2      = E[W_S^2 1(W_T = 0)]     = m1 + |S|^2 (1 - 1/n)(1 - |T|/n)^(n-2)
        m_cross = E[W_S W_S' 1(W_T = 0)]  = |S||S'| (1 - 1/n)(1 - |T|/n)^(n-2)
    where W_S is the total weight on S.

    Raises:
        ParameterError: If a size is negative or the sets cannot be disjoint in [n]
    """
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}", "n")
    if min(s_size, s2_size, t_size) < 0 or s_size + s2_size + t_size > n:
        raise ParameterError(
            f"set sizes ({s_size}, {s2_size}, {t_size}) do not fit disjointly in n={n}")
    exact = _use_exact(n, exact)
    m1 = s_size * _base_power(t_size, n, n - 1, exact)
    if n == 1:
        # Only one cell; the (1 - 1/n) factor vanishes
        return m1, m1, m1 * 0
    pair = _base_power(1, n, 1, exact) * _base_power(t_size, n, n - 2, exact)
    return m1, m1 + s_size * s_size * pair, s_size * s2_size * pair


def multinomial_moment_general(a_set, b_set, zero_set, n: int,
                               exact: Optional[bool] = None) -> Number:
    """
    E[W_A W_B 1(W_T = 0)] for arbitrary, possibly overlapping A, B and T.

    With A' = A minus T, B' = B minus T and t = |T|:
        |A' & B'| (1 - t/n)^(n-1) + |A'||B'| (1 - 1/n)(1 - t/n)^(n-2)

    Sets may be given as iterables of 0-based cells or as int bitmasks.
    """
    a, b, t = (_as_mask(s, n) for s in (a_set, b_set, zero_set))
    exact = _use_exact(n, exact)
    a &= ~t
    b &= ~t
    zeros = t.bit_count()
    value = (a & b).bit_count() * _base_power(zeros, n, n - 1, exact)
    if n > 1:
        value += (a.bit_count() * b.bit_count() * _base_power(1, n, 1, exact)
                  * _base_power(zeros, n, n - 2, exact))
    return value


def _as_mask(cells, n: int) -> int:
    if isinstance(cells, int):
        mask = cells
    else:
        mask = 0
        for c in cells:
            if not 0 <= c < n:
                raise ParameterError(f"cell {c} outside 0..{n - 1}")
            mask |= 1 << c
    if mask >> n:
        raise ParameterError(f"set has cells outside 0..{n - 1}")
    return mask


# ---------------------------------------------------------------------------
# Coefficient families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientParams:
    n: int
    m: int
    k: int
    l: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"need n >= 1, got {self.n}", "n")
        if self.m < 0:
            raise ParameterError(f"need m >= 0, got {self.m}", "m")


def finite_difference(order: int, start: int, n: int, m: int,
                      exact: Optional[bool] = None) -> Number:
    """sum_r (-1)^r C(order, r) (1 - (start + r)/n)^m."""
    exact = _use_exact(n, exact)
    terms = [(-1) ** r * math.comb(order, r) * _base_power(start + r, n, m, exact)
             for r in range(order + 1)]
    return sum(terms) if exact else math.fsum(terms)


def coeff_c(p: CoefficientParams, exact: Optional[bool] = None) -> Number:
    """Second difference at k - 1: f(k-1) - 2 f(k) + f(k+1)."""
    return finite_difference(2, p.k - 1, p.n, p.m, exact)


def coeff_a(p: CoefficientParams, exact: Optional[bool] = None) -> Number:
    """Third difference at k + l - 2."""
    return finite_difference(3, p.k + p.l - 2, p.n, p.m, exact)


def coeff_b(p: CoefficientParams, exact: Optional[bool] = None) -> Number:
    """Fourth difference at k + l - 2."""
    return finite_difference(4, p.k + p.l - 2, p.n, p.m, exact)


@lru_cache(maxsize=65536)
def _difference_float(order: int, start: int, n: int, m: int) -> float:
    return float(finite_difference(order, start, n, m))


def c_sum_over_k(n: int, i: int) -> Fraction:
    """sum_{k=1}^{n-i} c_{n,n-1,k} for 1 <= i <= n - 1, summed term by term."""
    return sum((coeff_c(CoefficientParams(n, n - 1, k), exact=True)
                for k in range(1, n - i + 1)), Fraction(0))


def c_sum_telescoped(n: int, i: int) -> Fraction:
    """Telescoped value 1 - (1-1/n)^(n-1) - (i/n)^(n-1) + ((i-1)/n)^(n-1)."""
    return (1 - Fraction(n - 1, n) ** (n - 1) - Fraction(i, n) ** (n - 1)
            + Fraction(i - 1, n) ** (n - 1))


def double_c_sum(n: int) -> Fraction:
    """sum over i, k of c_{n,n-1,k}, term by term."""
    return sum((c_sum_over_k(n, i) for i in range(1, n)), Fraction(0))


def double_c_sum_closed(n: int) -> Fraction:
    q = Fraction(n - 1, n) ** (n - 1)
    return (n - 1) * (1 - q) - q


def double_kc_sum(n: int) -> Fraction:
    """sum over i, k of k * c_{n,n-1,k}, term by term."""
    total = Fraction(0)
    for i in range(1, n):
        for k in range(1, n - i + 1):
            total += k * coeff_c(CoefficientParams(n, n - 1, k), exact=True)
    return total


def double_kc_sum_closed(n: int) -> Fraction:
    return n - 1 - 2 * Fraction(sum(i ** (n - 1) for i in range(1, n)), n ** (n - 1))


# ---------------------------------------------------------------------------
# Window sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WindowSets:
    """Window cardinalities; the pair fields are None when only (i, k) was requested."""
    s_ik: int
    s_cap: Optional[int] = None
    s_diff_ij: Optional[int] = None
    s_diff_ji: Optional[int] = None


class WindowIndex:
    """Bitmask view of a tie-free sample in x-order."""

    def __init__(self, sample: BivariateSample):
        if not sample.continuous:
            raise PreconditionError("window sets need a sample without ties in x or y")
        self.n = n = sample.n
        self.y = sample.y[np.argsort(sample.x)]
        rank = np.empty(n, dtype=np.int64)
        rank[np.argsort(self.y)] = np.arange(n)
        self.rank = rank.tolist()
        self.full = (1 << n) - 1
        # below[r]: positions whose y-rank is < r
        by_rank = np.argsort(self.y).tolist()
        below = [0]
        for pos in by_rank:
            below.append(below[-1] | (1 << pos))
        self._below = below

    def check(self, i: int, k: int) -> None:
        if not (0 <= i <= self.n - 2 and 1 <= k <= self.n - 1 - i):
            raise ParameterError(f"window ({i}, {k}) outside 0 <= i <= n-2, 1 <= k <= n-1-i "
                                 f"for n={self.n}")

    def inside(self, p: int, q: int) -> int:
        """Positions whose y lies strictly between y_p and y_q."""
        lo, hi = sorted((self.rank[p], self.rank[q]))
        return self._below[hi] & ~self._below[lo + 1]

    @staticmethod
    def gap(i: int, k: int) -> int:
        return ((1 << (i + k)) - 1) ^ ((1 << (i + 1)) - 1)

    def window(self, i: int, k: int) -> int:
        return self.inside(i, i + k) & ~self.gap(i, k)

    def outside(self, p: int, q: int) -> int:
        """Positions whose y lies strictly outside the closed range of y_p, y_q."""
        return self.full & ~self.inside(p, q) & ~(1 << p) & ~(1 << q)

    def pair_sets(self, i: int, k: int, j: int, l: int) -> Tuple[int, int, int]:
        gaps = self.gap(i, k) | self.gap(j, l)
        in1, in2 = self.inside(i, i + k), self.inside(j, j + l)
        cap = in1 & in2 & ~gaps
        diff_ij = in1 & self.outside(j, j + l) & ~gaps
        diff_ji = in2 & self.outside(i, i + k) & ~gaps
        return cap, diff_ij, diff_ji


def window_cardinalities(sample: BivariateSample, i: int, k: int,
                         j: Optional[int] = None, l: Optional[int] = None) -> WindowSets:
    """
    Exact window counts for terms (i, k) and optionally (j, l), positions 0-based in x-order.

    The pair sets drop the union of both gaps:
      s_cap     - y strictly inside both ranges
      s_diff_ij - y strictly inside the (i, k) range and strictly outside the (j, l) range
      s_diff_ji - the same with the roles swapped

    Raises:
        PreconditionError: If the sample has ties
        ParameterError: If an index is out of range
    """
    index = WindowIndex(sample)
    index.check(i, k)
    s_ik = index.window(i, k).bit_count()
    if j is None and l is None:
        return WindowSets(s_ik)
    if j is None or l is None:
        raise ParameterError("give both j and l, or neither")
    index.check(j, l)
    cap, diff_ij, diff_ji = index.pair_sets(i, k, j, l)
    return WindowSets(s_ik, cap.bit_count(), diff_ij.bit_count(), diff_ji.bit_count())


def _x_ordered_ranks(sample: BivariateSample) -> np.ndarray:
    if not sample.continuous:
        raise PreconditionError("window sets need a sample without ties in x or y")
    y = sample.y[np.argsort(sample.x)]
    rank = np.empty(sample.n, dtype=np.int64)
    rank[np.argsort(y)] = np.arange(sample.n)
    return rank


def _window_sizes(rank: np.ndarray, k: int) -> np.ndarray:
    """|S_{i,k}| for every i, given y-ranks in x-order."""
    n = rank.size
    left, right = rank[:n - k], rank[k:]
    lo, hi = np.minimum(left, right), np.maximum(left, right)
    sizes = hi - lo - 1
    for g in range(1, k):
        middle = rank[g:n - k + g]
        sizes -= (middle > lo) & (middle < hi)
    return sizes


def _tail_limit(n: int) -> int:
    """Largest k whose window weight can still matter at TAIL_CUTOFF."""
    for k in range(1, n):
        if (1.0 - (k - 1) / n) ** (n - 1) * n * n < config.TAIL_CUTOFF:
            return k - 1
    return n - 1


# ---------------------------------------------------------------------------
# Conditional moments of the window-count statistic
# ---------------------------------------------------------------------------

def cond_exp_xibar(sample: BivariateSample, exact: bool = False) -> Number:
    """
    E[xi_bar_b | sample] = 1 - 3/(n^2-1) * sum_{i,k} |S_{i,k}| c_{n,n-1,k}.

    The coefficient depends on k only, so window sizes are summed per k first.
    Up to EXACT_ARITHMETIC_MAX_N the sum is exact; beyond, k is truncated
    where the coefficient is below TAIL_CUTOFF relative to n^2.

    Args:
        sample: Tie-free sample
        exact: Return a Fraction (requires n <= EXACT_ARITHMETIC_MAX_N)

    Raises:
        PreconditionError: If the sample has ties
    """
    n = sample.n
    rank = _x_ordered_ranks(sample)
    if exact and n > config.EXACT_ARITHMETIC_MAX_N:
        logger.warning("Exact conditional mean refused for n=%d (limit %d)", n,
                       config.EXACT_ARITHMETIC_MAX_N)
        raise ParameterError(f"exact evaluation supports n <= {config.EXACT_ARITHMETIC_MAX_N}", "n")
    if n <= config.EXACT_ARITHMETIC_MAX_N:
        total = sum((int(_window_sizes(rank, k).sum())
                     * coeff_c(CoefficientParams(n, n - 1, k), exact=True)
                     for k in range(1, n)), Fraction(0))
        value = 1 - Fraction(3, n * n - 1) * total
        return value if exact else float(value)
    kmax = _tail_limit(n)
    logger.debug("Conditional mean for n=%d on the float path, gaps k <= %d", n, kmax)
    terms = [float(_window_sizes(rank, k).sum()) * _difference_float(2, k - 1, n, n - 1)
             for k in range(1, kmax + 1)]
    return 1.0 - 3.0 / (n * n - 1) * math.fsum(terms)


@dataclass(frozen=True)
class VarianceDisplay:
    """Approximate conditional variance (may be negative) and the slack for its O(1/n^2) remainder."""
    value: float
    remainder_band: float
    n: int


def cond_var_xibar(sample: BivariateSample) -> VarianceDisplay:
    """
    Approximate Var[xi_bar_b | sample] from the closed-form expansion.

    Single-term part uses c coefficients; cross terms over i < j use the third
    (a) and fourth (b) differences in k + l, gated by whether the two index
    blocks touch (k == j - i) or are separated (k < j - i), plus endpoint
    corrections when an endpoint of one term lies in the other's window.
    Overlapping blocks contribute nothing. The expansion is accurate up to an
    O(1/n^2) remainder, reported as VARIANCE_BAND_SLACK / n^2.

    The value is an approximation, not a variance: it sits below the exact
    value by a few units of 1/n^2 and can come out negative for small samples.
    Use cond_var_xibar_exact when the true value is needed.

    Raises:
        ParameterError: If n exceeds COND_VAR_MAX_N
        PreconditionError: If the sample has ties
    """
    n = sample.n
    if n > config.COND_VAR_MAX_N:
        logger.warning("Variance expansion refused for n=%d (limit %d)", n, config.COND_VAR_MAX_N)
        raise ParameterError(
            f"the O(n^4) variance expansion is limited to n <= {config.COND_VAR_MAX_N}; "
            f"use a smaller sample or estimate Var[xi_bar_b | sample] by resampling", "n")
    index = WindowIndex(sample)
    shrink = 1.0 - 1.0 / n
    windows = {(i, k): index.window(i, k) for i in range(n - 1) for k in range(1, n - i)}
    sizes = {key: mask.bit_count() for key, mask in windows.items()}

    mean_terms = []
    single_terms = []
    for (i, k), s in sizes.items():
        c1 = _difference_float(2, k - 1, n, n - 1)
        c2 = _difference_float(2, k - 1, n, n - 2)
        mean_terms.append(s * c1)
        single_terms.append(s * c1 + s * s * c2 * shrink)

    cross_terms = []
    for i in range(n - 1):
        for j in range(i + 1, n - 1):
            for k in range(1, j - i + 1):
                touching = k == j - i
                s_ik = windows[(i, k)]
                for l in range(1, n - j):
                    cap, diff_ij, diff_ji = index.pair_sets(i, k, j, l)
                    cap_n = cap.bit_count()
                    left = cap_n + diff_ij.bit_count()
                    right = cap_n + diff_ji.bit_count()
                    start = k + l - 2
                    if touching:
                        cross_terms.append(cap_n * _difference_float(3, start, n, n - 1)
                                           + left * right * _difference_float(3, start, n, n - 2)
                                           * shrink)
                        continue
                    a2 = _difference_float(3, start, n, n - 2)
                    s_jl = windows[(j, l)]
                    hits_ik = (s_ik >> j & 1) + (s_ik >> (j + l) & 1)
                    hits_jl = (s_jl >> i & 1) + (s_jl >> (i + k) & 1)
                    cross_terms.append(
                        cap_n * _difference_float(4, start, n, n - 1)
                        + left * right * _difference_float(4, start, n, n - 2) * shrink
                        + hits_ik * right * a2 * shrink
                        + hits_jl * left * a2 * shrink
                    )
    mean_sum = math.fsum(mean_terms)
    bracket = math.fsum(single_terms) + 2.0 * math.fsum(cross_terms) - mean_sum * mean_sum
    value = 9.0 / (n * n - 1) ** 2 * bracket
    return VarianceDisplay(value, config.VARIANCE_BAND_SLACK / (n * n), n)


def cond_var_xibar_exact(sample: BivariateSample, exact: bool = False) -> Number:
    """
    Exact Var[xi_bar_b | sample].

    Each window term is W_{S_{i,k}} 1(W_i > 0) 1(W_{i+k} > 0) 1(W_gap = 0). The two
    positivity indicators are expanded by inclusion-exclusion into zero-events,
    and every product of two expanded terms is evaluated with
    multinomial_moment_general. Pairs where an endpoint of one term falls in the
    other's gap vanish and are skipped. Rational arithmetic up to n = 8.

    Raises:
        ParameterError: If n exceeds COND_VAR_EXACT_MAX_N
        PreconditionError: If the sample has ties
    """
    n = sample.n
    if n > config.COND_VAR_EXACT_MAX_N:
        logger.warning("Exact conditional variance refused for n=%d (limit %d)", n,
                       config.COND_VAR_EXACT_MAX_N)
        raise ParameterError(f"exact conditional variance is limited to "
                             f"n <= {config.COND_VAR_EXACT_MAX_N}", "n")
    use_fraction = exact or n <= 8
    index = WindowIndex(sample)
    pow1 = [_base_power(t, n, n - 1, use_fraction) for t in range(n + 1)]
    pow2 = [_base_power(t, n, n - 2, use_fraction) if n > 1 else 0 for t in range(n + 1)]
    shrink = _base_power(1, n, 1, use_fraction)

    terms = []
    for i in range(n - 1):
        for k in range(1, n - i):
            s = index.window(i, k)
            if not s:
                continue
            gap = index.gap(i, k)
            ends = (1 << i) | (1 << (i + k))
            combos = ((1, gap), (-1, gap | 1 << i), (-1, gap | 1 << (i + k)), (1, gap | ends))
            terms.append((s, gap, ends, combos))

    mean_parts = [s.bit_count() * sign * pow1[zero.bit_count()]
                  for s, _, _, combos in terms for sign, zero in combos]
    mean = sum(mean_parts, Fraction(0)) if use_fraction else math.fsum(mean_parts)

    def pair_moment(p, q) -> Number:
        s_p, _, _, combos_p = p
        s_q, _, _, combos_q = q
        parts = []
        for sign_p, zero_p in combos_p:
            for sign_q, zero_q in combos_q:
                zero = zero_p | zero_q
                t = zero.bit_count()
                a = s_p & ~zero
                b = s_q & ~zero
                parts.append(sign_p * sign_q * ((a & b).bit_count() * pow1[t]
                                                + a.bit_count() * b.bit_count() * shrink * pow2[t]))
        return sum(parts) if use_fraction else math.fsum(parts)

    second = []
    for a_idx, p in enumerate(terms):
        row = [pair_moment(p, p)]
        _, gap_p, ends_p, _ = p
        for q in terms[a_idx + 1:]:
            _, gap_q, ends_q, _ = q
            if gap_p & ends_q or gap_q & ends_p:
                continue
            row.append(2 * pair_moment(p, q))
        second.append(sum(row) if use_fraction else math.fsum(row))
    second_moment = sum(second) if use_fraction else math.fsum(second)
    var_q = second_moment - mean * mean
    if use_fraction:
        value = Fraction(9, (n * n - 1) ** 2) * var_q
        return value if exact else float(value)
    return 9.0 / (n * n - 1) ** 2 * var_q


def enumerate_xibar_moments(sample: BivariateSample) -> Tuple[Fraction, Fraction]:
    """Exact (mean, variance) of xi_bar_b over every multinomial outcome (n <= 6)."""
    n = sample.n
    if n > 6:
        logger.warning("Enumeration of xi_bar_b refused for n=%d (limit 6)", n)
        raise ParameterError("enumeration of xi_bar_b supports n <= 6", "n")
    scale = Fraction(3, n * n - 1)
    first = Fraction(0)
    second = Fraction(0)
    for weights, prob in enumerate_weights(n):
        value = 1 - scale * bar_window_sum(sample, weights)
        first += prob * value
        second += prob * value * value
    return first, second - first * first


@dataclass(frozen=True)
class MonteCarloMoments:
    mean: float
    mean_se: float
    variance: float
    variance_se: float
    draws: int


def xibar_moments_mc(sample: BivariateSample, draws: int, seed: int) -> MonteCarloMoments:
    """Monte Carlo mean and variance of xi_bar_b given the sample, with standard errors."""
    if draws < 2:
        raise ParameterError(f"need at least 2 draws, got {draws}", "draws")
    n = sample.n
    scale = 3.0 / (n * n - 1)
    values = np.array([1.0 - scale * bar_window_sum(sample, draw_weights(n, stream(seed, d)))
                       for d in range(draws)])
    return _moments_with_errors(values)


def _moments_with_errors(values: np.ndarray) -> MonteCarloMoments:
    draws = values.size
    centered = values - values.mean()
    variance = float(np.mean(centered ** 2))
    fourth = float(np.mean(centered ** 4))
    return MonteCarloMoments(
        mean=float(values.mean()),
        mean_se=math.sqrt(variance / draws),
        variance=variance,
        variance_se=math.sqrt(max(fourth - variance * variance, 0.0) / draws),
        draws=draws,
    )


# ---------------------------------------------------------------------------
# Unconditional expectations
# ---------------------------------------------------------------------------

def expected_xibar_unconditional(n: int, exact: Optional[bool] = None) -> Number:
    """
    E[xi_bar_b] under independence, using E|S_{i,k}| = (n - k - 1)/3.

    There are n - k window terms with gap k, so the sum collapses to
    1 - 1/(n^2 - 1) * sum_k (n - k)(n - k - 1) c_{n,n-1,k}.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}", "n")
    use_exact = _use_exact(n, exact)
    if use_exact:
        total = sum(((n - k) * (n - k - 1) * coeff_c(CoefficientParams(n, n - 1, k), exact=True)
                     for k in range(1, n)), Fraction(0))
        return 1 - Fraction(1, n * n - 1) * total
    kmax = _tail_limit(n)
    terms = [(n - k) * (n - k - 1) * _difference_float(2, k - 1, n, n - 1)
             for k in range(1, kmax + 1)]
    return 1.0 - math.fsum(terms) / (n * n - 1)


def expected_xibar_closed(n: int) -> Fraction:
    """Telescoped form of expected_xibar_unconditional, exact."""
    return (1 - Fraction(1, n + 1) * double_c_sum_closed(n)
            + Fraction(1, n * n - 1) * double_kc_sum_closed(n))


def expected_xibar_expansion(n: int) -> float:
    """Two-term large-n expansion 1/e + (3 - 1/(2e))/n."""
    return math.exp(-1.0) + (3.0 - 0.5 * math.exp(-1.0)) / n


# ---------------------------------------------------------------------------
# Cardinality expectations
# ---------------------------------------------------------------------------

CARD_KEYS = (
    "S12", "S12^2", "S1234", "S1234^2",
    "S1234*S12\\34", "S1234*S34\\12", "S12\\34*S34\\12",
    "S1223", "S1223^2",
    "S1223*S12\\23", "S1223*S23\\12", "S12\\23*S23\\12",
    "1(Y3 in 12)*S1234", "1(Y3 in 12)*S34\\12",
)


def card_expectation_table(n: int) -> Dict[str, Fraction]:
    """
    Expected window counts for n i.i.d. points Z against i.i.d. endpoints Y1..Y4.

    S12 counts Z strictly between Y1 and Y2; S1234 counts Z strictly inside both
    the (Y1, Y2) and (Y3, Y4) ranges; S12\\34 counts Z inside (Y1, Y2) and strictly
    outside (Y3, Y4); the 1223 family uses the ranges (Y1, Y2) and (Y2, Y3).
    """
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}", "n")
    f = Fraction
    n2 = n * n
    cross45 = f(n2 - n, 45)
    cross60 = f(n2 - n, 60)
    values = (
        f(n, 3), f(n2, 6) + f(n, 6), f(2 * n, 15), f(2 * n2, 45) + f(4 * n, 45),
        cross45, cross45, cross45,
        f(n, 6), f(n2, 15) + f(n, 10),
        cross60, cross60, cross60,
        f(n, 15), f(n, 30),
    )
    return dict(zip(CARD_KEYS, values))


def card_expectation_mc(n: int, draws: int, seed: int,
                        chunk: int = 100_000) -> Dict[str, Tuple[float, float]]:
    """Monte Carlo (mean, standard error) of each card_expectation_table entry, uniform draws."""
    rng = stream(seed)
    sums = np.zeros(len(CARD_KEYS))
    squares = np.zeros(len(CARD_KEYS))
    done = 0
    while done < draws:
        size = min(chunk, draws - done)
        z = rng.random((size, n))
        y = rng.random((size, 4))
        y1, y2, y3, y4 = (y[:, c:c + 1] for c in range(4))
        lo12, hi12 = np.minimum(y1, y2), np.maximum(y1, y2)
        lo34, hi34 = np.minimum(y3, y4), np.maximum(y3, y4)
        lo23, hi23 = np.minimum(y2, y3), np.maximum(y2, y3)
        in12 = (lo12 < z) & (z < hi12)
        in34 = (lo34 < z) & (z < hi34)
        in23 = (lo23 < z) & (z < hi23)
        out12 = (z > hi12) | (z < lo12)
        out34 = (z > hi34) | (z < lo34)
        out23 = (z > hi23) | (z < lo23)
        s12 = in12.sum(axis=1)
        s1234 = (in12 & in34).sum(axis=1)
        s12_34 = (in12 & out34).sum(axis=1)
        s34_12 = (in34 & out12).sum(axis=1)
        s1223 = (in12 & in23).sum(axis=1)
        s12_23 = (in12 & out23).sum(axis=1)
        s23_12 = (in23 & out12).sum(axis=1)
        y3_in = ((lo12 < y3) & (y3 < hi12))[:, 0]
        columns = np.stack([
            s12, s12 ** 2, s1234, s1234 ** 2,
            s1234 * s12_34, s1234 * s34_12, s12_34 * s34_12,
            s1223, s1223 ** 2,
            s1223 * s12_23, s1223 * s23_12, s12_23 * s23_12,
            y3_in * s1234, y3_in * s34_12,
        ], axis=1).astype(float)
        sums += columns.sum(axis=0)
        squares += (columns ** 2).sum(axis=0)
        done += size
    means = sums / draws
    variances = np.maximum(squares / draws - means ** 2, 0.0) * draws / (draws - 1)
    return {key: (float(m), float(math.sqrt(v / draws)))
            for key, m, v in zip(CARD_KEYS, means, variances)}


# ---------------------------------------------------------------------------
# Weighted reversed-rank denominator
# ---------------------------------------------------------------------------

def weighted_l_mean(n: int) -> Fraction:
    """E[sum_i W_i L~_i (n - L~_i)] = (n-1)^2 (n^2 + 2n - 2) / (6n) for distinct y."""
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}", "n")
    return Fraction((n - 1) ** 2 * (n * n + 2 * n - 2), 6 * n)


def weighted_l_sum(w: np.ndarray) -> int:
    """sum_i W_i L~_i (n - L~_i) for weights listed in increasing order of y."""
    w = np.asarray(w, dtype=np.int64)
    n = int(w.sum())
    l_tilde = np.cumsum(w[::-1])[::-1]
    return int((w * l_tilde * (n - l_tilde)).sum())


def weighted_l_mean_enumerated(n: int) -> Fraction:
    """Exact expectation over every multinomial outcome; the y-order is immaterial."""
    return sum((prob * weighted_l_sum(weights.w) for weights, prob in enumerate_weights(n)),
               Fraction(0))


def weighted_l_mean_mc(n: int, draws: int, seed: int) -> Tuple[float, float]:
    """Monte Carlo (mean, standard error) of the weighted denominator."""
    values = np.array([weighted_l_sum(draw_weights(n, stream(seed, d)).w)
                       for d in range(draws)], dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(draws))


def weighted_l_variance_check(n_grid: List[int], draws: int, seed: int) -> List[Tuple[int, float]]:
    """Empirical Var of the weighted denominator divided by n^3, per n."""
    rows = []
    for n in n_grid:
        values = np.array([weighted_l_sum(draw_weights(n, stream(seed, n, d)).w)
                           for d in range(draws)], dtype=float)
        rows.append((n, float(values.var(ddof=1) / n ** 3)))
    return rows


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AsymptoticConstants:
    one_over_e: float
    var_bound: float
    null_var: float


def asymptotic_constants() -> AsymptoticConstants:
    """Limit of E[xi_b], limsup bound on n E[Var(xi_bar_b | data)], null variance of sqrt(n) xi_n."""
    e_inv = math.exp(-1.0)
    return AsymptoticConstants(
        one_over_e=e_inv,
        var_bound=0.6 - 1.6 * e_inv * e_inv,
        null_var=0.4,
    )
