"""Tropical geometry and root localization for exponential sums."""
from .core import ExpSum, affine_dimension, evaluate, minimal_spacing, slice_to_line, transform
from .errors import (DegenerateError, ExpTropError, InvalidInputError, NumericalError,
                     ProjectionSamplingError, QuadratureError, RootOnBoundaryError)
from .metric import bounds, nearest_trop_point, sample_projection, sampled_hausdorff, witness_family
from .roots import Rectangle, isolate_roots, winding_count, wv_bound
from .tropical import (cell_query, clusters_1d, distance_to_trop, root_free_strips, root_interval,
                       trop_points_1d, trop_vertices)

__all__ = [
    "ExpSum", "affine_dimension", "evaluate", "minimal_spacing", "slice_to_line", "transform",
    "DegenerateError", "ExpTropError", "InvalidInputError", "NumericalError",
    "ProjectionSamplingError", "QuadratureError", "RootOnBoundaryError",
    "bounds", "nearest_trop_point", "sample_projection", "sampled_hausdorff", "witness_family",
    "Rectangle", "isolate_roots", "winding_count", "wv_bound",
    "cell_query", "clusters_1d", "distance_to_trop", "root_free_strips", "root_interval",
    "trop_points_1d", "trop_vertices",
]
