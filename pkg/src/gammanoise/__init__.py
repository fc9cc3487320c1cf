# -*- coding: utf-8 -*-
"""
gammanoise: gamma white-noise numerics on a finite time partition.
"""

from .errors import (
    GammaNoiseError, DomainError, BranchError, PartitionMismatchError,
    SingularElementError, TruncationLossError, ConfigurationError, ToleranceFailure,
)
from .core_model import (
    Partition, StepFunction, LevyTriple,
    log_cf, cf, gamma_density, gamma_function, log_gamma,
    levy_density, levy_tail_mass, levy_small_jump_mean, levy_khinchine_exponent,
    levy_triple, levy_measure_conditions, alpha_mu_series, poisson_alpha_series,
)
from .sampler import (
    GammaPath, PathBatch, McEstimate,
    sample_increments, sample_increment_batch, sample_jumps, sample_jump_batch,
    empirical_cf, lln_statistic, boundedness_probe,
)
from .chaos import (
    laguerre_eval, laguerre_family, appell_coeffs, compose_with_alpha,
    chaos_norm, norm_vector, basis_eval, expand_linear, orthogonality_table,
    enumerate_multi_indices,
)
from .wick import (
    ChaosElement, s_transform, wick_mul, wick_inv, wick_exp, wick_pow,
    expectation, variance,
)
from .verhulst import (
    VerhulstConfig, exponential_element, closed_form_solution, ode_solve, moment_report,
)

__version__ = "0.1.0"
