"""Synthetic data from the Gaussian rotation model and the population xi oracle."""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate, special, stats

from .. import config
from .errors import OracleError, ParameterError
from .rng import derive_seed, stream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelSpec:
    """Bivariate Gaussian with unit variances and correlation `rho`."""
    rho: float
    n: int
    seed: int = config.MASTER_SEED

    def __post_init__(self):
        validate_rho(self.rho)
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"sample size must be an integer >= 2, got {self.n}", "n")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed}", "seed")


@dataclass(frozen=True)
class BivariateSample:
    """Paired observations (x_i, y_i), i = 1..n."""
    x: np.ndarray
    y: np.ndarray
    regenerations: int = field(default=0, compare=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 1 or y.ndim != 1:
            raise ParameterError("x and y must be one-dimensional")
        if x.shape != y.shape:
            raise ParameterError(f"x and y have different lengths: {x.size} vs {y.size}")
        if x.size < 2:
            raise ParameterError(f"a sample needs at least 2 pairs, got {x.size}", "n")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ParameterError("sample contains non-finite values")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.size)

    @property
    def x_distinct(self) -> bool:
        return np.unique(self.x).size == self.n

    @property
    def y_distinct(self) -> bool:
        return np.unique(self.y).size == self.n

    @property
    def continuous(self) -> bool:
        """True iff all x are pairwise distinct and all y are pairwise distinct."""
        return self.x_distinct and self.y_distinct

    def take(self, index: np.ndarray) -> "BivariateSample":
        """Sample made of the pairs at `index` (repeats allowed)."""
        return BivariateSample(self.x[index], self.y[index])


def sample_from_arrays(x, y) -> BivariateSample:
    """Validated sample from user-supplied sequences."""
    return BivariateSample(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def validate_rho(rho: float) -> None:
    if not math.isfinite(rho) or abs(rho) >= 1:
        raise ParameterError(f"rho must lie strictly inside (-1, 1), got {rho}", "rho")


def gaussian_rotation_sample(spec: ModelSpec) -> BivariateSample:
    """
    Draw n i.i.d. pairs with standard normal marginals and correlation rho.

    Uses y = rho*x + sqrt(1 - rho^2)*z with x, z independent standard normals.
    Ties have probability zero but can appear in finite precision; the sample
    is then redrawn from the next stream and the redraw count recorded.

    Args:
        spec: Model parameters and seed

    Returns:
        A continuous BivariateSample; identical specs give identical samples

    Raises:
        OracleError: If no tie-free sample is found within the redraw cap
    """
    scale = math.sqrt(1.0 - spec.rho * spec.rho)
    for attempt in range(config.MAX_REGENERATIONS + 1):
        rng = stream(spec.seed, attempt)
        x = rng.standard_normal(spec.n)
        z = rng.standard_normal(spec.n)
        sample = BivariateSample(x, spec.rho * x + scale * z, regenerations=attempt)
        if sample.continuous:
            return sample
        logger.warning("Tie in generated sample (rho=%s, n=%d, seed=%d); redrawing",
                       spec.rho, spec.n, spec.seed)
    raise OracleError(f"could not draw a tie-free sample after {config.MAX_REGENERATIONS} redraws")


class OracleMethod(Enum):
    INTEGRATION = "integration"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class OracleSettings:
    method: OracleMethod = OracleMethod.INTEGRATION
    tolerance: float = config.ORACLE_TOLERANCE
    mc_n: int = config.ORACLE_MC_N
    mc_reps: int = config.ORACLE_MC_REPS
    seed: int = config.MASTER_SEED


@dataclass(frozen=True)
class OracleResult:
    value: float
    error: float
    method: OracleMethod


def true_xi_oracle(rho: float, settings: OracleSettings = OracleSettings()) -> OracleResult:
    """
    Population dependence measure xi(X, Y) for the bivariate Gaussian.

    With s = sqrt(1 - rho^2), P(Y >= y | X) = Phi((rho*X - y)/s) and the
    denominator integral equals 1/6, so

        xi = 6 * E[Phi((rho*X - Y')/s)^2] - 2,   X, Y' i.i.d. N(0, 1).

    The integration method evaluates that expectation on a truncated square;
    the Monte Carlo method averages xi_n over many large samples.

    Raises:
        ParameterError: If |rho| >= 1
        OracleError: If the error estimate exceeds the tolerance
    """
    validate_rho(rho)
    if rho == 0.0:
        return OracleResult(0.0, 0.0, settings.method)
    if settings.method is OracleMethod.INTEGRATION:
        result = _integrate_gaussian_xi(abs(rho))
    else:
        result = _monte_carlo_gaussian_xi(abs(rho), settings)
    if not result.error <= settings.tolerance:
        raise OracleError(
            f"xi oracle for rho={rho} did not converge: error {result.error:.2e} "
            f"> tolerance {settings.tolerance:.2e}"
        )
    logger.debug("xi(rho=%s) = %.6f +/- %.1e via %s", rho, result.value, result.error,
                 result.method.value)
    return result


def _integrate_gaussian_xi(rho: float) -> OracleResult:
    s = math.sqrt(1.0 - rho * rho)
    bound = config.ORACLE_INTEGRATION_BOUND
    inv_two_pi = 1.0 / (2.0 * math.pi)

    def integrand(v: float, u: float) -> float:
        return special.ndtr((rho * u - v) / s) ** 2 * inv_two_pi * math.exp(-0.5 * (u * u + v * v))

    value, abserr = integrate.dblquad(integrand, -bound, bound, -bound, bound,
                                      epsabs=1e-9, epsrel=1e-9)
    # Gaussian mass outside the square is below 2 * norm.sf(bound) per axis
    truncation = 4.0 * stats.norm.sf(bound)
    xi = min(max(6.0 * value - 2.0, 0.0), 1.0)
    return OracleResult(xi, 6.0 * (abserr + truncation), OracleMethod.INTEGRATION)


def _mean_of_xi_n(rho: float, n: int, reps: int, seed: int, size_key: int):
    from .xi_core import xi_simple

    values = np.empty(reps)
    for rep in range(reps):
        spec = ModelSpec(rho, n, derive_seed(seed, size_key, rep))
        values[rep] = xi_simple(gaussian_rotation_sample(spec)).value
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(reps))


def _monte_carlo_gaussian_xi(rho: float, settings: OracleSettings) -> OracleResult:
    """
    Average xi_n at n and n/2 and extrapolate: E[xi_n] = xi + c/n + o(1/n), so
    2 E[xi_n] - E[xi_{n/2}] removes the leading bias. The error is three
    standard errors of the extrapolated value.
    """
    if settings.mc_n < 4 or settings.mc_reps < 2:
        raise ParameterError("Monte Carlo oracle needs mc_n >= 4 and mc_reps >= 2", "mc_n")
    full, full_se = _mean_of_xi_n(rho, settings.mc_n, settings.mc_reps, settings.seed, 0)
    half, half_se = _mean_of_xi_n(rho, settings.mc_n // 2, settings.mc_reps, settings.seed, 1)
    value = 2.0 * full - half
    stderr = math.sqrt(4.0 * full_se * full_se + half_se * half_se)
    logger.debug("Monte Carlo xi(rho=%s): mean %.6f at n=%d, bias correction %.2e",
                 rho, full, settings.mc_n, value - full)
    return OracleResult(min(max(value, 0.0), 1.0), 3.0 * stderr, OracleMethod.MONTE_CARLO)


def gaussian_xi_closed_form(rho: float) -> float:
    """Literature value (3/pi)*arcsin((1 + rho^2)/2) - 1/2; used only as a cross-check."""
    validate_rho(rho)
    return 3.0 / math.pi * math.asin((1.0 + rho * rho) / 2.0) - 0.5
