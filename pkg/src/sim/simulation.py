"""Monte Carlo study of bootstrap variance estimates and interval coverage for xi_n."""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import config
from ..core.bootstrap import (
    CIMethod,
    Statistic,
    bootstrap_distribution,
    ci_hybrid1,
    ci_hybrid2,
    ci_normal,
    var_b1,
    var_b2,
)
from ..core.errors import DataFileError, ParameterError
from ..core.model_gen import (
    ModelSpec,
    OracleMethod,
    OracleSettings,
    gaussian_rotation_sample,
    true_xi_oracle,
    validate_rho,
)
from ..core.rng import derive_seed

logger = logging.getLogger(__name__)

COVERAGE_METHODS = (CIMethod.HB1, CIMethod.HB2, CIMethod.ORACLE_VAR)


@dataclass
class SimulationConfig:
    """Grid and sizes of one simulation run; defaults come from src/config.py."""
    rho_grid: List[float] = field(default_factory=lambda: list(config.RHO_GRID))
    n_grid: List[int] = field(default_factory=lambda: list(config.N_GRID))
    replications: int = config.REPLICATIONS
    bootstrap_size: int = config.BOOTSTRAP_SIZE
    alphas: List[float] = field(default_factory=lambda: list(config.ALPHAS))
    master_seed: int = config.MASTER_SEED
    variance_targets: Dict[float, float] = field(
        default_factory=lambda: dict(config.VARIANCE_TARGETS))
    workers: int = config.WORKERS
    statistic: Statistic = Statistic(config.DEFAULT_STATISTIC)
    oracle_method: OracleMethod = OracleMethod.INTEGRATION

    @classmethod
    def full_scale(cls, **overrides) -> "SimulationConfig":
        return cls(
            n_grid=list(config.FULL_SCALE_N_GRID),
            replications=config.FULL_SCALE_REPLICATIONS,
            bootstrap_size=config.FULL_SCALE_BOOTSTRAP_SIZE,
            **overrides,
        )

    def validate(self) -> None:
        """
        Raises:
            ParameterError: Naming the first offending field
        """
        if not self.rho_grid:
            raise ParameterError("at least one rho is required", "rho_grid")
        for rho in self.rho_grid:
            validate_rho(rho)
        if not self.n_grid or any(int(n) != n or n < 2 for n in self.n_grid):
            raise ParameterError(f"sample sizes must be integers >= 2, got {self.n_grid}", "n_grid")
        if self.replications < 2:
            raise ParameterError(f"need R >= 2, got {self.replications}", "replications")
        if self.bootstrap_size < 2:
            raise ParameterError(f"need B >= 2, got {self.bootstrap_size}", "bootstrap_size")
        if not self.alphas or any(not 0.0 < a < 1.0 for a in self.alphas):
            raise ParameterError(f"alphas must lie in (0, 1), got {self.alphas}", "alphas")
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError(f"seed must be a 64-bit unsigned integer, got {self.master_seed}",
                                 "master_seed")
        if self.workers < 1:
            raise ParameterError(f"need at least one worker, got {self.workers}", "workers")
        missing = [rho for rho in self.rho_grid if self.target_for(rho) is None]
        if missing:
            raise ParameterError(f"no variance target for rho {missing}", "variance_targets")

    def target_for(self, rho: float) -> Optional[float]:
        for key, value in self.variance_targets.items():
            if math.isclose(key, rho, abs_tol=1e-12):
                return value
        return None


# key = value file -----------------------------------------------------------

_LIST_FLOAT = ("rho_grid", "alphas")


def _parse_value(key: str, raw: str, path: str, line: int):
    try:
        if key in _LIST_FLOAT:
            return [float(v) for v in raw.split(",") if v.strip()]
        if key == "n_grid":
            return [int(v) for v in raw.split(",") if v.strip()]
        if key in ("replications", "bootstrap_size", "master_seed", "workers"):
            return int(raw)
        if key == "variance_targets":
            targets = {}
            for pair in raw.split(","):
                rho, value = pair.split(":")
                targets[float(rho)] = float(value)
            return targets
        if key == "statistic":
            return Statistic(raw.strip().lower())
        if key == "oracle_method":
            return OracleMethod(raw.strip().lower())
    except ValueError as e:
        raise ParameterError(f"{path}:{line}: bad value {raw!r} ({e})", key) from e
    raise ParameterError(f"{path}:{line}: unknown key", key)


def load_config_file(path, base: Optional[SimulationConfig] = None) -> SimulationConfig:
    """
    Apply `key = value` overrides from a file on top of `base`.

    Lines may carry `#` comments; lists are comma-separated and variance
    targets are given as `rho:value` pairs.

    Raises:
        DataFileError: If the file cannot be read
        ParameterError: On unknown keys or malformed values
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataFileError(f"cannot read config file: {e.strerror}", str(path)) from e
    overrides = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{number}: expected key = value", "config")
        key, value = (part.strip() for part in line.split("=", 1))
        overrides[key] = _parse_value(key, value, str(path), number)
    return replace(base or SimulationConfig(), **overrides)


# results --------------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float


@dataclass
class CellResult:
    """Aggregates for one (rho, n) cell."""
    rho: float
    n: int
    true_xi: float
    target: float
    rmse_b1: Estimate
    rmse_b2: Estimate
    coverage: Dict[Tuple[CIMethod, float], Estimate]
    mean_xi: Estimate
    n_var_xi: float
    mean_var_b1: Estimate
    mean_var_b2: Estimate
    mean_xib: Estimate
    degenerate_redraws: int
    regenerations: int
    wall_time: float = field(default=0.0, compare=False)


@dataclass
class SimulationResult:
    config: SimulationConfig
    cells: List[CellResult]
    oracle: Dict[float, float]
    schema_version: str = config.SCHEMA_VERSION

    def cell(self, rho: float, n: int) -> CellResult:
        for c in self.cells:
            if math.isclose(c.rho, rho, abs_tol=1e-12) and c.n == n:
                return c
        raise KeyError((rho, n))


# worker ---------------------------------------------------------------------

@dataclass(frozen=True)
class _Task:
    rho_idx: int
    n_idx: int
    rep: int
    rho: float
    n: int
    bootstrap_size: int
    alphas: Tuple[float, ...]
    master_seed: int
    statistic: Statistic
    target: float
    true_xi: float


def _run_replication(task: _Task) -> dict:
    """One fresh sample, its bootstrap distribution and every per-sample estimate."""
    key = (task.rho_idx, task.n_idx, task.rep)
    spec = ModelSpec(task.rho, task.n, derive_seed(task.master_seed, *key))
    sample = gaussian_rotation_sample(spec)
    dist = bootstrap_distribution(sample, task.bootstrap_size, task.master_seed, key,
                                  statistic=task.statistic)
    covers = {}
    for alpha in task.alphas:
        intervals = (
            ci_hybrid1(dist, alpha),
            ci_hybrid2(dist, alpha),
            ci_normal(dist.source_xi, task.n, task.target, alpha, CIMethod.ORACLE_VAR),
        )
        for ci in intervals:
            covers[(ci.method, alpha)] = ci.covers(task.true_xi)
    return {
        "xi": dist.source_xi,
        "var_b1": var_b1(dist),
        "var_b2": var_b2(dist),
        "mean_xib": dist.mean,
        "covers": covers,
        "redraws": dist.degenerate_redraws,
        "regenerations": sample.regenerations,
    }


def _run_tasks(tasks: List[_Task], workers: int) -> List[dict]:
    if workers <= 1:
        return [_run_replication(t) for t in tasks]
    chunksize = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_replication, tasks, chunksize=chunksize))


# aggregation ----------------------------------------------------------------

def _mean(values: np.ndarray) -> Estimate:
    return Estimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size)))


def _rmse(estimates: np.ndarray, target: float) -> Estimate:
    squared = (estimates - target) ** 2
    mse = float(squared.mean())
    rmse = math.sqrt(mse)
    se_mse = float(squared.std(ddof=1) / math.sqrt(squared.size))
    # Delta method: se(sqrt(m)) = se(m) / (2 sqrt(m))
    return Estimate(rmse, se_mse / (2.0 * rmse) if rmse > 0 else 0.0)


def _proportion(flags: List[bool]) -> Estimate:
    p = float(np.mean(flags))
    return Estimate(p, math.sqrt(p * (1.0 - p) / len(flags)))


def _aggregate(rho: float, n: int, true_xi: float, target: float, alphas,
               rows: List[dict], wall_time: float) -> CellResult:
    xi = np.array([r["xi"] for r in rows])
    b1 = np.array([r["var_b1"] for r in rows])
    b2 = np.array([r["var_b2"] for r in rows])
    coverage = {
        (method, alpha): _proportion([r["covers"][(method, alpha)] for r in rows])
        for alpha in alphas for method in COVERAGE_METHODS
    }
    return CellResult(
        rho=rho,
        n=n,
        true_xi=true_xi,
        target=target,
        rmse_b1=_rmse(b1, target),
        rmse_b2=_rmse(b2, target),
        coverage=coverage,
        mean_xi=_mean(xi),
        n_var_xi=float(n * xi.var(ddof=1)),
        mean_var_b1=_mean(b1),
        mean_var_b2=_mean(b2),
        mean_xib=_mean(np.array([r["mean_xib"] for r in rows])),
        degenerate_redraws=sum(r["redraws"] for r in rows),
        regenerations=sum(r["regenerations"] for r in rows),
        wall_time=wall_time,
    )


def run_simulation(sim_config: SimulationConfig) -> SimulationResult:
    """
    Run every (rho, n) cell of the study.

    Per replication: a fresh Gaussian sample, xi_n, B bootstrap replicates,
    both variance estimates, and HB1 / HB2 / OracleVar intervals at each alpha.
    Per cell: RMSE of each variance estimate against the target limit of
    n Var(xi_n), and coverage of the population xi.

    Replication (rho_idx, n_idx, rep) draws its sample and its bootstrap
    replicates from streams keyed by those indices, and results are reduced
    in task order, so output does not depend on the worker count.

    Raises:
        ParameterError: If the configuration is invalid
        OracleError: If the population xi cannot be computed for some rho
    """
    sim_config.validate()
    settings = OracleSettings(method=sim_config.oracle_method, seed=sim_config.master_seed)
    oracle = {rho: true_xi_oracle(rho, settings).value for rho in sim_config.rho_grid}
    alphas = tuple(sim_config.alphas)

    cells = []
    for rho_idx, rho in enumerate(sim_config.rho_grid):
        target = sim_config.target_for(rho)
        for n_idx, n in enumerate(sim_config.n_grid):
            started = time.perf_counter()
            tasks = [
                _Task(rho_idx, n_idx, rep, rho, n, sim_config.bootstrap_size, alphas,
                      sim_config.master_seed, sim_config.statistic, target, oracle[rho])
                for rep in range(sim_config.replications)
            ]
            rows = _run_tasks(tasks, sim_config.workers)
            elapsed = time.perf_counter() - started
            cell = _aggregate(rho, n, oracle[rho], target, alphas, rows, elapsed)
            logger.info("cell rho=%s n=%d done in %.1fs (V-B2 RMSE %.3f)",
                        rho, n, elapsed, cell.rmse_b2.value)
            cells.append(cell)
    return SimulationResult(sim_config, cells, oracle)
