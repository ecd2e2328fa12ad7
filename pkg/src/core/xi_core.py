"""Ranks, X-orderings and Chatterjee's rank correlation xi_n."""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import stats

from .errors import DegenerateSampleError, ParameterError, PreconditionError
from .model_gen import BivariateSample, sample_from_arrays
from .rng import stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankVectors:
    """
    Rank counts of a response vector.

    r[i] = #{j: y_j <= y_i}, l[i] = #{j: y_j >= y_i}, tie_mult[i] = #{j: y_j == y_i},
    so that r + l == n + tie_mult elementwise.
    """
    r: np.ndarray
    l: np.ndarray
    tie_mult: np.ndarray

    @property
    def n(self) -> int:
        return int(self.r.size)


@dataclass(frozen=True)
class TieBreak:
    """Rule for ordering tied X values: by original index, or by a seeded shuffle."""
    seed: Optional[int] = None

    @classmethod
    def by_index(cls) -> "TieBreak":
        return cls(None)

    @classmethod
    def seeded(cls, seed: int) -> "TieBreak":
        return cls(int(seed))

    @property
    def is_seeded(self) -> bool:
        return self.seed is not None

    def __str__(self) -> str:
        return "by-index" if self.seed is None else f"seeded({self.seed})"


BY_INDEX = TieBreak.by_index()


@dataclass(frozen=True)
class XOrdering:
    """0-based permutation with x[perm[0]] <= x[perm[1]] <= ... <= x[perm[n-1]]."""
    perm: np.ndarray
    tie_break: TieBreak


class XiForm(Enum):
    GENERAL = "general"
    SIMPLE = "simple"


@dataclass(frozen=True)
class XiEstimate:
    value: float
    form: XiForm
    n: int
    tie_break: TieBreak


@dataclass(frozen=True)
class TieSummary:
    """n_tied counts observations whose value is shared with at least one other."""
    n_distinct: int
    n_tied: int
    largest_block: int


@dataclass(frozen=True)
class XiSummary:
    general: XiEstimate
    simple: Optional[XiEstimate]
    x_ties: TieSummary
    y_ties: TieSummary


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ParameterError("expected a one-dimensional sequence", name)
    if arr.size == 0:
        raise ParameterError("empty input", name)
    if not np.all(np.isfinite(arr)):
        raise ParameterError("input contains non-finite values", name)
    return arr


def compute_ranks(y) -> RankVectors:
    """
    Exact rank counts in O(n log n) via binary search on the sorted responses.

    Raises:
        ParameterError: If y is empty or contains non-finite values
    """
    y = _as_vector(y, "y")
    n = y.size
    sorted_y = np.sort(y)
    r = np.searchsorted(sorted_y, y, side="right").astype(np.int64)
    l = n - np.searchsorted(sorted_y, y, side="left").astype(np.int64)
    return RankVectors(r, l, r + l - n)


def compute_ranks_bruteforce(y) -> RankVectors:
    """O(n^2) double-loop reference for compute_ranks."""
    y = _as_vector(y, "y").tolist()
    r = [sum(1 for b in y if b <= a) for a in y]
    l = [sum(1 for b in y if b >= a) for a in y]
    t = [sum(1 for b in y if b == a) for a in y]
    return RankVectors(np.array(r, dtype=np.int64), np.array(l, dtype=np.int64),
                       np.array(t, dtype=np.int64))


def order_by_x(sample: BivariateSample, tie_break: TieBreak = BY_INDEX) -> XOrdering:
    """
    Sort indices by x. Tied x keep their original index order under the
    by-index rule; under the seeded rule each tie block is shuffled with a
    stream derived from the seed, so repeated calls give the same permutation.
    """
    x = sample.x
    if tie_break.is_seeded:
        jitter = stream(tie_break.seed).random(x.size)
        perm = np.lexsort((jitter, x))
    else:
        perm = np.argsort(x, kind="stable")
    return XOrdering(perm, tie_break)


def rank_gap_sum(r: np.ndarray, perm: np.ndarray) -> int:
    """Integer sum of |r[perm[i+1]] - r[perm[i]]| along the ordering."""
    return int(np.abs(np.diff(r[perm])).sum())


def xi_general(sample: BivariateSample, tie_break: TieBreak = BY_INDEX) -> XiEstimate:
    """
    Rank correlation allowing ties in either coordinate.

        xi_n = 1 - n * sum_i |R_[i+1] - R_[i]| / (2 * sum_i L_i (n - L_i))

    Both sums are accumulated as integers; the only rounding is the final division.

    Raises:
        DegenerateSampleError: If all y are equal
    """
    ranks = compute_ranks(sample.y)
    n = sample.n
    l = ranks.l
    denominator = 2 * int((l * (n - l)).sum())
    if denominator == 0:
        logger.warning("xi_n refused: all %d y values are tied", n)
        raise DegenerateSampleError("all y values are tied; xi_n is undefined")
    gaps = rank_gap_sum(ranks.r, order_by_x(sample, tie_break).perm)
    return XiEstimate(1.0 - n * gaps / denominator, XiForm.GENERAL, n, tie_break)


def xi_simple(sample: BivariateSample, tie_break: TieBreak = BY_INDEX) -> XiEstimate:
    """
    Rank correlation for samples without ties in y: 1 - 3 * sum |R_[i+1] - R_[i]| / (n^2 - 1).

    Raises:
        PreconditionError: If y contains ties (use xi_general instead)
    """
    if not sample.y_distinct:
        logger.warning("Simple form refused: y has ties (n=%d)", sample.n)
        raise PreconditionError("y contains ties; the simple form needs distinct y, "
                                "use xi_general")
    n = sample.n
    ranks = compute_ranks(sample.y)
    gaps = rank_gap_sum(ranks.r, order_by_x(sample, tie_break).perm)
    return XiEstimate(1.0 - 3 * gaps / (n * n - 1), XiForm.SIMPLE, n, tie_break)


def tie_summary(values) -> TieSummary:
    values = _as_vector(values, "values")
    _, counts = np.unique(values, return_counts=True)
    return TieSummary(
        n_distinct=int(counts.size),
        n_tied=int(counts[counts > 1].sum()),
        largest_block=int(counts.max()),
    )


def xi_n(x, y, tie_break: TieBreak = BY_INDEX) -> XiSummary:
    """
    General-form xi_n of raw sequences, with the simple form alongside when y is tie-free.

    Args:
        x: Predictor values
        y: Response values, same length as x
        tie_break: Ordering rule for tied x

    Returns:
        XiSummary with both estimates and the tie counts of each coordinate
    """
    sample = sample_from_arrays(x, y)
    general = xi_general(sample, tie_break)
    simple = xi_simple(sample, tie_break) if sample.y_distinct else None
    return XiSummary(general, simple, tie_summary(sample.x), tie_summary(sample.y))


def null_p_value(xi: float, n: int) -> float:
    """One-sided p-value of xi_n under independence, from sqrt(n) * xi_n ~ N(0, 2/5)."""
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}", "n")
    return float(stats.norm.sf(xi * math.sqrt(2.5 * n)))
