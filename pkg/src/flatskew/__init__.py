"""Exact flows, cylinder decompositions and cut cocycles on square-tiled surfaces."""

from .cuts import Cut, CutCollection, LiftedCuts, lift_cuts, lift_point, sample_cuts
from .errors import FlatSkewError, SchemaError
from .flow import (Cylinder, FlowResult, RationalDirection, cylinder_decomposition, flow,
                   is_single_cylinder)
from .groups import GroupElement, GroupSpec, generates_dense
from .iet import IET, first_return_iet, rauzy_step, shorten_to_convention
from .skew import SumProfile, ergodic_sum, skew_orbit, transversal_sum_profile
from .surface import (SquareTiledSurface, StratumSignature, SurfacePoint, build_surface,
                      singular_vertices, stratum, torus)
from .witness import (ApproximationTarget, DirectionCandidate, WitnessReport, diagnose,
                      essential_value_witness, self_avoidance_subsequence,
                      single_cylinder_search)

__version__ = "0.1.0"

__all__ = [
    "ApproximationTarget", "Cut", "CutCollection", "Cylinder", "DirectionCandidate",
    "FlatSkewError", "FlowResult", "GroupElement", "GroupSpec", "IET", "LiftedCuts",
    "RationalDirection", "SchemaError", "SquareTiledSurface", "StratumSignature", "SumProfile", "SurfacePoint", "WitnessReport", "build_surface",
    "cylinder_decomposition", "diagnose", "ergodic_sum", "essential_value_witness",
    "first_return_iet", "flow", "generates_dense", "is_single_cylinder", "lift_cuts",
    "lift_point", "rauzy_step", "sample_cuts", "self_avoidance_subsequence",
    "shorten_to_convention", "single_cylinder_search", "singular_vertices", "skew_orbit",
    "stratum", "torus", "transversal_sum_profile",
]
