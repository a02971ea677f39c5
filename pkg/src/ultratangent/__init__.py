"""Ultrametric, betweenness and pretangent-space diagnostics for finite metric spaces."""
from . import _backend
from .diagnostics import HEURISTIC_WARNING, LimitEstimate, estimate_limit, s1_criterion, ultra_criterion
from .generators import GeneratorSpec, gen_example37, gen_line_sample, gen_prop29, gen_random_ultrametric, snowflaked
from .line_geometry import detect_pseudo_linear_quadruple, embed_into_line, realize_quadruple_linf
from .metric_core import (
    DEFAULT_TOL,
    FiniteMetricSpace,
    PointedSpace,
    ToleranceConfig,
    from_points,
    is_ultrametric,
    snowflake,
    validate_metric,
)
from .pretangent import (
    check_prop25_identity,
    family_from_dict,
    metric_identification,
    mutual_stability_matrix,
    scaled_distance_limit,
    subsequence_refinement,
)
from .triples import betweenness_exponent, is_in_M_class, power_sum, solve_s_exponent, triple_s

__version__ = "0.1.0"


def backend() -> str:
    """Name of the active kernel implementation: "cython" or "numpy"."""
    return _backend.NAME
