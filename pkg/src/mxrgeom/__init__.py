"""Surfaces in S^2 x R and H^2 x R: compatibility equations, moving-frame
reconstruction, associate family and conjugate minimal surfaces."""
from .ambient import H2R, S2R, Signature, g_inner, project_to_model, reorthonormalize
from .fundamental import (Chart, FundamentalData, ParameterGrid, SampledSurface,
                          check_compatibility, fundamental_from_chart)
from .frames import (compare_up_to_isometry, connection_from_data, integrate_frame,
                     reconstruct, reconstruct_immersion)
from .associate import associate_immersion, rotate_data, rotation_field
from .catalog import CatalogSpec, chart, fundamental_closed_form, solve_profile

__version__ = "0.1.0"
