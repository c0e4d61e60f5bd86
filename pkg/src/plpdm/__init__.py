"""Dynamics of the piecewise-linear perturbation of the doubling map."""
from .map_core import Params, eval_lift, eval_map, lift_iterate, mirror, orbit, slopes
from .symbolic import (
    Classification,
    Cycle,
    Itinerary,
    Stability,
    UniquenessViolation,
    affine_pieces,
    classify,
    cycles_with_itinerary,
    enumerate_attracting_cycles,
    follower_set,
    multiplier,
)
from .cycle_search import AttractorReport, Outcome, SearchOptions, audit_uniqueness, find_attractor, find_attractors
from .semiconj import PhiEstimate, TypeFraction, injectivity_probe, phi, type_of
from .tongue_geometry import (
    AmbiguousBoundary,
    BoundaryQuery,
    BoundaryResult,
    EmptyInterval,
    NoBoundaryFound,
    SeedResult,
    Side,
    StageCheckFailed,
    XiTable,
    boundary_a,
    ceiling_gap,
    period3_interval,
    seed_tongue,
    xi_table,
)
from .scan import CellResult, ComponentRecord, Grid, GridSpec, export, label_components, load_json, scan_grid

__version__ = "0.1.0"
