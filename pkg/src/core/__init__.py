"""Rank correlation, bootstrap and closed-form moment components."""

from .errors import (
    XiBootError,
    ParameterError,
    PreconditionError,
    DegenerateSampleError,
    OracleError,
    VerificationError,
    DataFileError,
)
from .model_gen import (
    ModelSpec,
    BivariateSample,
    OracleMethod,
    OracleSettings,
    OracleResult,
    gaussian_rotation_sample,
    sample_from_arrays,
    true_xi_oracle,
    gaussian_xi_closed_form,
)
from .xi_core import (
    RankVectors,
    TieBreak,
    XOrdering,
    XiEstimate,
    compute_ranks,
    order_by_x,
    xi_general,
    xi_simple,
    xi_n,
    tie_summary,
    null_p_value,
)
from .bootstrap import (
    BootstrapWeights,
    BootstrapDistribution,
    ConfidenceInterval,
    CIMethod,
    Statistic,
    draw_weights,
    xi_boot_direct,
    xi_tilde_fast,
    xi_hat_b,
    xi_bar_b,
    bootstrap_distribution,
    var_b1,
    var_b2,
    ci_hybrid1,
    ci_hybrid2,
    ci_normal,
)
from .theory import (
    CoefficientParams,
    WindowSets,
    multinomial_moments,
    coeff_a,
    coeff_b,
    coeff_c,
    window_cardinalities,
    cond_exp_xibar,
    cond_var_xibar,
    cond_var_xibar_exact,
    card_expectation_table,
    weighted_l_mean,
    asymptotic_constants,
)

__all__ = [
    'XiBootError',
    'ParameterError',
    'PreconditionError',
    'DegenerateSampleError',
    'OracleError',
    'VerificationError',
    'DataFileError',
    'ModelSpec',
    'BivariateSample',
    'OracleMethod',
    'OracleSettings',
    'OracleResult',
    'gaussian_rotation_sample',
    'sample_from_arrays',
    'true_xi_oracle',
    'gaussian_xi_closed_form',
    'RankVectors',
    'TieBreak',
    'XOrdering',
    'XiEstimate',
    'compute_ranks',
    'order_by_x',
    'xi_general',
    'xi_simple',
    'xi_n',
    'tie_summary',
    'null_p_value',
    'BootstrapWeights',
    'BootstrapDistribution',
    'ConfidenceInterval',
    'CIMethod',
    'Statistic',
    'draw_weights',
    'xi_boot_direct',
    'xi_tilde_fast',
    'xi_hat_b',
    'xi_bar_b',
    'bootstrap_distribution',
    'var_b1',
    'var_b2',
    'ci_hybrid1',
    'ci_hybrid2',
    'ci_normal',
    'CoefficientParams',
    'WindowSets',
    'multinomial_moments',
    'coeff_a',
    'coeff_b',
    'coeff_c',
    'window_cardinalities',
    'cond_exp_xibar',
    'cond_var_xibar',
    'cond_var_xibar_exact',
    'card_expectation_table',
    'weighted_l_mean',
    'asymptotic_constants',
]
