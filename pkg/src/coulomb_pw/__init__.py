"""Partial-wave summation of the Coulomb scattering amplitude."""

from .coulomb_engine import (
    AmplitudeTable,
    ScatteringParams,
    amplitude_table,
    analytic_sum_check,
    bateman_coefficients,
    closed_form_amplitude,
    m_test,
    raw_coefficients,
    reduced1_coefficients,
    reduced2_coefficients,
    s_matrix,
    t_factor,
)
from .legendre_series import (
    CoefficientSequence,
    ConvergenceReport,
    adaptive_sum,
    evaluate_partial_sums,
    multiply_by_one_minus_x,
    oscillation_metric,
    reduce_series,
)
from .nuclear_coulomb import PhaseShiftTable, combined_amplitude, raw_combined_diagnostic
from .special_functions import (
    DomainError,
    PoleError,
    coulomb_phase_shift,
    legendre_all,
    log_gamma,
    pochhammer,
)

__version__ = "0.1.0"
