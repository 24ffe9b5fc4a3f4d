"""Entropy, pressure, reference measures and Gibbs bounds."""
from .gibbs import (GibbsReport, bounded_range_check, cylinder_extremes, gibbs_check, permutation_count_bound,
                    sgap_pressure_gap, stirling_check)
from .measures import Bernoulli, GraphPerron, Markov, MeasureModel, measure_from_config
from .potential import BoundaryCache, Potential, birkhoff_sum_range, interior_sum
from .pressure import (PressureEstimate, bowen_variation, count_words, entropy, exact_pressure,
                       log_sum_exp, max_birkhoff, partition_sum, partition_sum_words, pressure,
                       sgap_exact_pressure, spectral_pressure)

__all__ = [
    "GibbsReport", "bounded_range_check", "cylinder_extremes", "gibbs_check", "permutation_count_bound", "sgap_pressure_gap",
    "stirling_check", "Bernoulli", "GraphPerron", "Markov", "MeasureModel",
    "measure_from_config", "BoundaryCache", "Potential", "birkhoff_sum_range", "interior_sum",
    "PressureEstimate", "bowen_variation", "count_words", "entropy", "exact_pressure",
    "log_sum_exp", "max_birkhoff", "partition_sum", "partition_sum_words", "pressure",
    "sgap_exact_pressure", "spectral_pressure",
]
