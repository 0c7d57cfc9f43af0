"""Scalarization proximal point method for quasiconvex multiobjective problems."""

from .criticality import (
    CriticalityReport,
    check_criticality,
    probe_descent,
    sampled_pareto_clarke_test,
    smooth_criticality_residual,
)
from .driver import DriverParams, IterateRecord, RunRecord, check_stop, run_sppm, run_sweep
from .library import (
    CATALOG,
    Budget,
    ClusterSpec,
    Ellipsoid,
    EuclideanBall,
    Polyhedron,
    load_problem,
    make_ces,
    make_cobb_douglas,
    make_convex_quadratic,
    make_location,
)
from .order import in_level_set, leq, lt
from .problem import ComponentOracle, Problem, clarke_dir_deriv_estimate, exp_transform
from .scalarizer import RegularizedObjective, ScalarizationParams, beta, phi_subgradient, phi_value
from .subproblem import InnerOptions, InnerResult, feasible_backtrack, solve_subproblem

__version__ = "0.1.0"
