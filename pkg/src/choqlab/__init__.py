"""choqlab: a numerical laboratory for normalized states of a doubly
coupled nonlocal system with Riesz-potential interactions."""

__version__ = "0.1.0"

from .params import (  # noqa: F401
    ProblemParams,
    ExponentInfo,
    RegimeClass,
    gamma_of,
    exponent_info,
    validate_params,
    classify_regime,
)
from .energy import (  # noqa: F401
    EnergyBreakdown,
    FiberProfile,
    energy,
    pohozaev,
    fiber,
    multipliers,
    el_residual,
)
from .thresholds import (  # noqa: F401
    GNConstants,
    LandscapeCoeffs,
    ThresholdReport,
    coeffs,
    h_eval,
    landscape,
    beta0,
    kappa0,
    check_side_conditions,
    nonexistence_check,
    full_report,
)
