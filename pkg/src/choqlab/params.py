"""Problem parameters, scaling exponents, and regime classification.

The lab studies a pair of radial fields (u, v) on R^N coupled through a
Riesz-potential energy

    J(u, v) = T/2 - (lam1/(2 r1)) D(|u|^r1, |u|^r1)
                  - (lam2/(2 r2)) D(|v|^r2, |v|^r2)
                  - beta D(|u|^p, |v|^q) - kappa * int(u v),

minimized over the mass constraint |u|_2^2 = rho1^2, |v|_2^2 = rho2^2,
where T is the total Dirichlet integral and D(f, g) = int f (I_alpha * g)
with I_alpha the Riesz kernel of order alpha.

Under the L2-preserving dilation u -> t^{N/2} u(t x) each interaction
integral picks up the power t^{2*gamma_s} with gamma_s = (N s - N - alpha)/2
per exponent s.  The variational character of the constrained problem
(local well, mountain pass, or no solution at all) is decided entirely by
where the sums p+q, 2 r1, 2 r2 sit relative to the mass-critical value
(2N + 2 alpha + 4)/N, which is the comparison `classify_regime` encodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "ProblemParams",
    "ExponentInfo",
    "RegimeClass",
    "gamma_of",
    "exponent_info",
    "validate_params",
    "classify_regime",
    "LOCAL_MIN",
    "MOUNTAIN_PASS",
    "NONEXISTENCE",
    "SUB",
    "CRITICAL",
    "SUPER",
    "ALL_THEOREM_IDS",
]

LOCAL_MIN = "LocalMin"
MOUNTAIN_PASS = "MountainPass"
NONEXISTENCE = "Nonexistence"

SUB = "Sub"
CRITICAL = "Critical"
SUPER = "Super"

OUT_OF_SCOPE = "OutOfScope"

ALL_THEOREM_IDS = tuple(f"T1_{k}" for k in range(1, 16))

# Regimes resolved as mountain-pass problems; T1_3 admits no solution;
# every other in-scope regime is a constrained local minimization.
_MOUNTAIN_PASS_IDS = frozenset({"T1_5", "T1_6", "T1_12", "T1_14", "T1_15"})

# Named side conditions attached to each regime.  They are predicates on
# the landscape coefficients A1, A2, A3 (hence on the interaction-estimate
# constants), so classification leaves them unresolved (None); the
# thresholds module evaluates them.
_SIDE_CONDITIONS = {
    "T1_1": (),
    "T1_2": ("half_minus_a1a2_positive",),
    "T1_3": ("nonexistence_inequality",),
    "T1_4": ("beta_below_beta0", "kappa_below_kappa0"),
    "T1_5": ("half_minus_a3_positive",),
    "T1_6": (),
    "T1_7": (),
    "T1_8": ("half_minus_a2_positive",),
    "T1_9": ("shape_condition_t1_9", "beta_below_beta0", "kappa_below_kappa0"),
    "T1_10": ("shape_condition_t1_10", "beta_below_beta0", "kappa_below_kappa0"),
    "T1_11": ("half_minus_a1_positive", "beta_below_beta0", "kappa_below_kappa0"),
    "T1_12": ("half_minus_a1a3_positive",),
    "T1_13": ("shape_condition_t1_13", "beta_below_beta0", "kappa_below_kappa0"),
    "T1_14": ("half_minus_a3_positive",),
    "T1_15": (),
}


@dataclass(frozen=True)
class ProblemParams:
    """All physical parameters of the coupled system."""

    N: int
    alpha: float
    p: float
    q: float
    r1: float
    r2: float
    lambda1: float = 1.0
    lambda2: float = 1.0
    beta: float = 1.0
    kappa: float = 1.0
    rho1: float = 1.0
    rho2: float = 1.0

    @property
    def lower_exp(self) -> float:
        """Lower admissible exponent (N+alpha)/N."""
        return (self.N + self.alpha) / self.N

    @property
    def upper_exp(self) -> float:
        """Upper admissible exponent (N+alpha)/(N-2)."""
        return (self.N + self.alpha) / (self.N - 2)


@dataclass(frozen=True)
class ExponentInfo:
    """Dilation exponents and the mass-critical landmarks for the sums."""

    gamma_p: float
    gamma_q: float
    gamma_r1: float
    gamma_r2: float
    mass_crit: float   # (2N + 2 alpha + 4)/N, critical value for p+q, 2r1, 2r2
    mass_lower: float  # (2N + 2 alpha)/N
    mass_upper: float  # (2N + 2 alpha)/(N - 2)


@dataclass(frozen=True)
class RegimeClass:
    """Which existence regime the exponent triple falls in."""

    theorem_id: str
    sum_regime: str
    r1_regime: str
    r2_regime: str
    character: str
    side_conditions: dict = field(default_factory=dict)
    notes: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "character": self.character,
            "regimes": {
                "sum": self.sum_regime,
                "r1": self.r1_regime,
                "r2": self.r2_regime,
            },
            "side_conditions": {
                name: ("unknown" if value is None else bool(value))
                for name, value in self.side_conditions.items()
            },
            "notes": list(self.notes),
        }


def gamma_of(params: ProblemParams, s: float) -> float:
    """Dilation exponent gamma_s = (N s - N - alpha)/2 for one exponent s."""
    return (params.N * s - params.N - params.alpha) / 2.0


def exponent_info(params: ProblemParams) -> ExponentInfo:
    N, alpha = params.N, params.alpha
    return ExponentInfo(
        gamma_p=gamma_of(params, params.p),
        gamma_q=gamma_of(params, params.q),
        gamma_r1=gamma_of(params, params.r1),
        gamma_r2=gamma_of(params, params.r2),
        mass_crit=(2 * N + 2 * alpha + 4) / N,
        mass_lower=(2 * N + 2 * alpha) / N,
        mass_upper=(2 * N + 2 * alpha) / (N - 2),
    )


def validate_params(params: ProblemParams) -> list:
    """Check admissibility; returns the list of violated conditions (empty = ok).

    Violations are data, not errors: callers decide whether to stop.
    """
    bad = []
    if params.N not in (3, 4):
        bad.append("N not in {3, 4}")
        return bad  # the remaining bounds are meaningless without a valid N
    if not (0.0 < params.alpha < params.N):
        bad.append("alpha not in (0, N)")
        return bad
    lo, hi = params.lower_exp, params.upper_exp
    for name in ("p", "q", "r1", "r2"):
        s = getattr(params, name)
        if s <= lo:
            bad.append(f"{name} <= (N+alpha)/N")
        elif s >= hi:
            bad.append(f"{name} >= (N+alpha)/(N-2)")
    if params.p + params.q > 2 * params.r1:
        bad.append("p+q > 2r1")
    if params.r1 > params.r2:
        bad.append("2r1 > 2r2")
    for name in ("lambda1", "lambda2", "beta", "kappa", "rho1", "rho2"):
        if getattr(params, name) <= 0:
            bad.append(f"{name} <= 0")
    return bad


def _relative(x: float, crit: float) -> str:
    if x < crit:
        return SUB
    if x == crit:
        return CRITICAL
    return SUPER


def classify_regime(params: ProblemParams) -> RegimeClass:
    """Place (p+q, 2r1, 2r2) in one of the fifteen existence regimes.

    Comparisons against the mass-critical value and between exponents are
    exact: the regime is a modeling choice of the caller, not a measured
    quantity, so no tolerance is applied.  Parameters admissible per
    `validate_params` always land in exactly one regime;
    anything else comes back OutOfScope (no existence claim is made there).
    """
    info = exponent_info(params)
    cstar = info.mass_crit
    s = params.p + params.q
    t1 = 2.0 * params.r1
    t2 = 2.0 * params.r2

    if validate_params(params):
        return RegimeClass(
            theorem_id=OUT_OF_SCOPE,
            sum_regime=_relative(s, cstar),
            r1_regime=_relative(t1, cstar),
            r2_regime=_relative(t2, cstar),
            character=OUT_OF_SCOPE,
            side_conditions={},
            notes=("parameters violate the admissible ranges; no claim applies",),
        )

    notes = []
    if params.r1 == params.r2:
        if t1 < cstar:
            tid = "T1_1"
        elif t1 == cstar:
            tid = "T1_2" if s < cstar else "T1_3"
        else:
            tid = "T1_4" if s < cstar else ("T1_5" if s == cstar else "T1_6")
    else:
        if t2 < cstar:
            tid = "T1_7"
        elif t2 == cstar:
            tid = "T1_8"
        elif t1 < cstar:
            tid = "T1_9" if s < t1 else "T1_10"
        elif t1 == cstar:
            tid = "T1_11" if s < cstar else "T1_12"
        else:
            tid = "T1_13" if s < cstar else ("T1_14" if s == cstar else "T1_15")

    if tid == "T1_1":
        alt_lower = (2 * params.N + 2 * params.alpha) / params.alpha
        if s <= alt_lower:
            notes.append(
                "T1_1 applied with the sum lower bound (2N+2alpha)/N = "
                f"{info.mass_lower:.6g}; an alternative printed bound "
                f"(2N+2alpha)/alpha = {alt_lower:.6g} would exclude "
                f"p+q = {s:.6g}"
            )
    if tid == "T1_6":
        notes.append(
            "T1_6 read as the equal-exponent case r1 == r2 with p+q above "
            "the mass-critical sum; its printed hypothesis 2r1 = 2r2 sits "
            "under an unequal-exponent heading, and T1_15 covers "
            "2r1 < 2r2"
        )

    character = (
        NONEXISTENCE
        if tid == "T1_3"
        else MOUNTAIN_PASS
        if tid in _MOUNTAIN_PASS_IDS
        else LOCAL_MIN
    )
    return RegimeClass(
        theorem_id=tid,
        sum_regime=_relative(s, cstar),
        r1_regime=_relative(t1, cstar),
        r2_regime=_relative(t2, cstar),
        character=character,
        side_conditions={name: None for name in _SIDE_CONDITIONS[tid]},
        notes=tuple(notes),
    )
