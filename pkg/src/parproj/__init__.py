"""Parallel hybrid projection methods for systems of variational
inequalities with common fixed-point constraints."""

from .spaces import (
    EuclideanSpace,
    GridSpace,
    Space,
    SpaceMismatchError,
    Vec,
    combine,
    dist,
    inner,
    norm,
)
from .sets import (
    Ball,
    Box,
    ConvexSet,
    EmptySet,
    HalfSpace,
    InfeasibleError,
    WholeSpace,
    build_C,
    build_Q,
    build_T,
    halfspace,
    project_oracle,
    project_two_halfspaces,
)
from .operators import (
    AffineOperator,
    FixedPointMap,
    FredholmMap,
    FuncMap,
    IdentityMap,
    MonotoneOperator,
    ZeroOperator,
    fredholm_family,
    operator_norm,
)
from .solver import (
    IterationRecord,
    Problem,
    Schedule,
    Solver,
    SolverError,
    StopRule,
    epsilon_n,
    mann_step,
    select_furthest,
    solve,
    subextragradient_step,
)
from .bench import (
    BUILTIN_IDS,
    ConfigError,
    DeterminismError,
    ExperimentConfig,
    RunReport,
    builtin_config,
    build_instance,
    emit_solution,
    emit_trace,
    parse_config,
    run_experiment,
    time_modes,
    traces_equal,
)

__version__ = "0.1.0"
