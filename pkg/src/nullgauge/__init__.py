"""nullgauge: a workbench for non-standard null Lagrangians.

Builds null Lagrangians from gauge functions, derives their energy and
forcing functions, converts the law of inertia into driven dynamics,
simulates the result, and cross-checks a registry of printed closed
forms against independently derived canonical counterparts.
"""

from .errors import (
    DegenerateLagrangianError,
    ImmediateSingularityError,
    IndeterminateSamplingError,
    NullgaugeError,
    ParseError,
    SingularPointError,
    UnboundSymbolError,
    UnknownIdentifierError,
)
from .expr import (
    Binding,
    CoefficientFunction,
    Expr,
    T,
    VARIABLES,
    X,
    XDDOT,
    XDOT,
    binding,
    coeff,
    constant_coefficient,
    evaluate,
    inline_coefficients,
    partial,
    to_string,
    total_time_derivative,
)
from .fuzz import DEFAULT_FUZZ, EquivalenceResult, FuzzConfig, equivalent
from .kernel import BACKEND as KERNEL_BACKEND
from .parse import parse
from .simplify import simplify
from .variational import (
    EulerLagrange,
    GaugeFunction,
    Lagrangian,
    NullVerdict,
    energy_function,
    energy_rate_residual,
    euler_lagrange,
    gauge_energy,
    is_null,
    lift_gauge,
    solve_for_acceleration,
)
from .catalog import (
    CheckReport,
    CoefficientSet,
    PRINTED_FORM_IDS,
    PrintedForm,
    cross_check,
    cross_check_all,
    gauge_general,
    inertia_set1,
    inertia_set2,
    nsl_general,
    nsl_inertia_first,
    nsl_inertia_second,
    null_basic,
    printed_form,
    standard_inertia,
)
from .forces import (
    Classification,
    ForceLaw,
    classify,
    effective_force,
    force_from_gauge,
    force_printed,
    special_case_force,
    total_lagrangian,
)
from .dynamics import (
    IntegratorConfig,
    SingularityEvent,
    Trajectory,
    diagnostics,
    integrate,
)
from .galilean import (
    BoostParams,
    EomInvariance,
    InvarianceReport,
    boost,
    check_eom_invariance,
    check_form_invariance,
    translate,
)

__version__ = "0.1.0"
