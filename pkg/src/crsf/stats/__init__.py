"""Estimators, fits and distribution comparisons."""

from .basic import (DecayFit, EstimatorResult, chi2_two_sample, empirical, fit_exponential,
                    tv_distance, tv_se, wilson_interval)
from .estimators import (ComponentStats, ConvergenceRow, CorrelationResult, TailCurve,
                         box_boundary, compare_boundary_conditions, component_size_distribution,
                         correlation_series, estimate_connection, estimate_edge_correlation,
                         ordering_pvalues, rooting_tail)

__all__ = [
    "DecayFit", "EstimatorResult", "chi2_two_sample", "empirical", "fit_exponential",
    "tv_distance", "tv_se", "wilson_interval", "ComponentStats", "ConvergenceRow",
    "CorrelationResult", "TailCurve", "box_boundary", "compare_boundary_conditions",
    "component_size_distribution", "correlation_series", "estimate_connection",
    "estimate_edge_correlation", "ordering_pvalues", "rooting_tail",
]
