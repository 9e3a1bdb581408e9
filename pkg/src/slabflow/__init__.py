"""Numerical construction of ancient pancake solutions of mean curvature
flow in a slab, by evolving rotated Angenent-oval slices.

The package splits into closed forms (`angenent_oval`), static profile
geometry (`profile`), time integration (`solver`), the verification
harness that checks every quantitative bound (`harness`), and a CLI
front end (`cli`).
"""
from .angenent_oval import (
    PlanePoint, grim_height, oval_curvature, oval_curvature_rate,
    oval_extents, oval_point, oval_residual, sample_profile,
)
from .profile import (
    DerivedFields, ProfileCurve, alexandrov_strict, derived_fields,
    displacements, enclosed_area, grid, lambda_kappa_integral, lambda_of,
    mean_curvature, model_area, reconstruct, symmetrize, symmetry_indices,
    tip_anchored_coordinates,
)
from .solver import (
    Diagnostics, FlowInstabilityError, FlowState, RunRecord, SolverConfig,
    estimate_extinction, evolve, stable_dt, step, time_derivative,
)
from .harness import (
    BoundReport, BoundResult, DisplacementFit, SpeedMargins,
    area_identity_residual, build_report, check_graph_height, check_harnack,
    check_inequalities, check_speed_lower, edge_gap_at_fraction,
    edge_grim_gap, fit_displacement_constant, run_approximant,
    sphere_benchmark,
)
from .cli import (
    CliConfig, load_record, main, parse_config, save_record, write_report,
    write_timeseries,
)

__version__ = "0.1.0"
