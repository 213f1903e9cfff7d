"""Exhaustive enumeration and exact Boltzmann laws on small graphs."""

from .configs import (DEFAULT_EDGE_CAP, CRSFConfig, ECRSFConfig, EnsembleTable,
                      EnumerationRefused, enumerate_crsf, enumerate_ecrsf,
                      spanning_tree_count)
from .measure import (ConditioningSpec, ExactDistribution, MeasureUndefined, boltzmann,
                      class_on, conditional_distribution, config_weight, heavy_cycles,
                      realizable_conditions, verify_conditioning)

__all__ = [
    "DEFAULT_EDGE_CAP", "CRSFConfig", "ECRSFConfig", "EnsembleTable", "EnumerationRefused",
    "enumerate_crsf", "enumerate_ecrsf", "spanning_tree_count", "ConditioningSpec",
    "ExactDistribution", "MeasureUndefined", "boltzmann", "class_on",
    "conditional_distribution", "config_weight", "heavy_cycles", "realizable_conditions",
    "verify_conditioning",
]
