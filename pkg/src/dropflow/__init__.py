"""Droplet mean curvature flow in the half space by minimizing movements.

Voxel droplets live on a uniform grid over {z >= 0}; each time step solves
the capillary Almgren-Taylor-Wang functional

    P(E) + int_{z=0} beta chi_E dA + (1/tau) int_{E sym E0} dist(x, bd E0) dx

exactly via a graph cut (grid: sets and measures, mincut/flatflow: the step
and the discrete flow).  An axisymmetric marker front solver (axisym) gives
the smooth reference law, winterbottom holds the closed-form equilibrium
measures, and verify bundles the refinement and structure experiments.
"""

from .axisym import AxisymFront, SmoothFlowConfig, evolve, exact_hemisphere
from .energy import AdhesionField, EnergyBreakdown, atw, capillary
from .flatflow import (
    FlatFlowTrajectory,
    build_initial_set,
    gmm_refine,
    minimize_step,
    run_flat_flow,
)
from .grid import (
    BinarySet,
    HalfSpaceGrid,
    hausdorff,
    rasterize_cap,
    read_cmcf1,
    signed_distance,
    write_cmcf1,
)
from .winterbottom import WinterbottomShape, cap_measures, isoperimetric_constant

__version__ = "0.1.0"

__all__ = [
    "AdhesionField",
    "AxisymFront",
    "BinarySet",
    "EnergyBreakdown",
    "FlatFlowTrajectory",
    "HalfSpaceGrid",
    "SmoothFlowConfig",
    "WinterbottomShape",
    "atw",
    "build_initial_set",
    "cap_measures",
    "capillary",
    "evolve",
    "exact_hemisphere",
    "gmm_refine",
    "hausdorff",
    "isoperimetric_constant",
    "minimize_step",
    "rasterize_cap",
    "read_cmcf1",
    "run_flat_flow",
    "signed_distance",
    "write_cmcf1",
]
