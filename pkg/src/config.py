"""Configuration for the xi bootstrap toolkit."""
import os

# Simulation grid (desk scale; the full study uses n = 1000, 5000, 10000 and R = B = 5000)
RHO_GRID = [0.0, 0.3, 0.5, 0.7, 0.9]
N_GRID = [1000]
REPLICATIONS = 500  # R, fresh samples per (rho, n) cell
BOOTSTRAP_SIZE = 500  # B, bootstrap replicates per sample
ALPHAS = [0.05, 0.1]
MASTER_SEED = 20230419

# Full-scale settings, selectable with `simulate --full-scale`
FULL_SCALE_N_GRID = [1000, 5000, 10000]
FULL_SCALE_REPLICATIONS = 5000
FULL_SCALE_BOOTSTRAP_SIZE = 5000

# Limits of n*Var(xi_n) under the Gaussian rotation model, keyed by rho
VARIANCE_TARGETS = {0.0: 0.4, 0.3: 0.46, 0.5: 0.51, 0.7: 0.47, 0.9: 0.24}

# Parallelism
WORKERS = int(os.getenv("XI_BOOT_WORKERS", "1"))

# Data generation
MAX_REGENERATIONS = 16  # Redraws allowed when finite precision produces a tie

# Bootstrap
MAX_DEGENERATE_REDRAWS = 1000  # Hard cap on redraws of all-tied resamples
DEFAULT_STATISTIC = "tilde"  # direct | tilde | hat

# Population xi oracle
ORACLE_TOLERANCE = 0.002  # Required error bound on the oracle value
ORACLE_MC_N = 4000  # Sample size per Monte Carlo oracle replicate (a second run uses n/2)
ORACLE_MC_REPS = 4000  # Monte Carlo oracle replicates per sample size
ORACLE_INTEGRATION_BOUND = 9.0  # Integrate the Gaussian over [-bound, bound]^2

# Theory oracle numerics
EXACT_ARITHMETIC_MAX_N = 50  # Rational arithmetic up to this n, compensated floats beyond
COND_VAR_MAX_N = 60  # Guard for the O(n^4) conditional-variance display
COND_VAR_EXACT_MAX_N = 40  # Guard for the exact conditional variance
ENUMERATION_MAX_N = 7  # Largest n for full multinomial enumeration
TAIL_CUTOFF = 1e-18  # Float path drops window gaps k whose weight (1-(k-1)/n)^(n-1) * n^2 falls below this
VARIANCE_BAND_SLACK = 8.0  # C in the C/n^2 band; n^2 * |display - exact| stays within about 5 for n in 10..40

# Output
SCHEMA_VERSION = "1.0"
CSV_COLUMNS = [
    "rho", "n", "method", "metric", "alpha", "value", "stderr",
    "replications", "bootstrap_size", "seed",
]
INCONSISTENCY_WARNING = (
    "The standard n-out-of-n bootstrap is inconsistent for Chatterjee's xi_n: "
    "E[xi_b] tends to 1/e under independence and n*Var[xi_b | data] stays below 2/5. "
    "The bootstrap variances and intervals below are diagnostics, not valid inference."
)
