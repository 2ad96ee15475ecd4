"""Scaling landscape of the constrained energy and its explicit thresholds.

Dilating a mass-constrained pair and bounding every interaction integral
by its sharp constant compresses the energy into one scalar landscape

    h(s) = s^2/2 - A1 s^{2 gamma_r1} - A2 s^{2 gamma_r2}
                 - A3 s^{gamma_p + gamma_q} - kappa rho1 rho2,

where s stands for the Dirichlet seminorm of the dilated pair and the
coefficients collect estimate constants, masses and couplings.  Wells,
humps and well-then-barrier profiles of h decide whether the constrained
problem is a local minimization or a mountain pass, and at which energy
level, so everything this module reports reduces to critical points and
level crossings of h.

All critical points solve a single scalar equation.  Differentiating
termwise factors the derivative as h'(s) = s (1 - G(s)) with

    G(s) = 2 gamma_r1 A1 s^{2 gamma_r1 - 2}
         + 2 gamma_r2 A2 s^{2 gamma_r2 - 2}
         + (gamma_p + gamma_q) A3 s^{gamma_p + gamma_q - 2},

and the exponent signs sort the regimes: all negative means G falls from
infinity to a floor (single well), all positive means G climbs from a
floor to infinity (single hump), mixed signs make G U-shaped so that
G = 1 has two roots exactly when the couplings are small enough.  Root
finding always happens on G; regimes whose analysis provides a closed
form get it evaluated directly, and the two routes agree to root
tolerance wherever both apply.

The coupling thresholds beta0 and kappa0 come from the per-regime
displayed formulas at that regime's pivot scale s0.  One structural fact
helps when reading results: the kappa0 numerator is proportional to the
gap between the regime's half-energy beta route and the returned beta0,
so kappa0 collapses to exactly zero whenever the half-energy route
attains the minimum.  That provably happens on all of T1_4, T1_10 and
T1_11, and can happen elsewhere; kappa0 then raises NonPositive rather
than reporting a vacuous window.  Evaluating kappa0 with the actual
coupling beta in place of beta0 gives the informative per-coupling level
threshold, and full_report notes this whenever the displayed threshold
degenerates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from scipy.optimize import brentq

from .errors import NonPositive, RootNotBracketed, SideConditionViolated, WrongRegime
from .params import (
    ALL_THEOREM_IDS,
    ExponentInfo,
    ProblemParams,
    RegimeClass,
    classify_regime,
    exponent_info,
    validate_params,
)

__all__ = [
    "GNConstants",
    "LandscapeCoeffs",
    "ThresholdReport",
    "SideConditions",
    "ESTIMATED",
    "USER_SUPPLIED",
    "MONOTONE_WELL",
    "SINGLE_HUMP",
    "DOUBLE_CRITICAL",
    "coeffs",
    "h_eval",
    "g_eval",
    "landscape",
    "beta0",
    "kappa0",
    "check_side_conditions",
    "nonexistence_margin",
    "nonexistence_check",
    "full_report",
    "h_profile_csv",
]

ESTIMATED = "Estimated"
USER_SUPPLIED = "UserSupplied"

MONOTONE_WELL = "MonotoneWell"
SINGLE_HUMP = "SingleHump"
DOUBLE_CRITICAL = "DoubleCritical"

# Regimes carrying explicit coupling thresholds beta0 / kappa0.
_COUPLING_THRESHOLD_IDS = frozenset({"T1_4", "T1_9", "T1_10", "T1_11", "T1_13"})

_SHAPE_BY_ID = {
    "T1_1": MONOTONE_WELL,
    "T1_2": MONOTONE_WELL,
    "T1_3": MONOTONE_WELL,
    "T1_4": DOUBLE_CRITICAL,
    "T1_5": SINGLE_HUMP,
    "T1_6": SINGLE_HUMP,
    "T1_7": MONOTONE_WELL,
    "T1_8": MONOTONE_WELL,
    "T1_9": DOUBLE_CRITICAL,
    "T1_10": DOUBLE_CRITICAL,
    "T1_11": DOUBLE_CRITICAL,
    "T1_12": SINGLE_HUMP,
    "T1_13": DOUBLE_CRITICAL,
    "T1_14": SINGLE_HUMP,
    "T1_15": SINGLE_HUMP,
}

_HUGE = 1e300
_TINY = 1e-300
_RTOL = 1e-13


@dataclass(frozen=True)
class GNConstants:
    """Interaction-estimate constants entering the landscape coefficients.

    Numerically estimated constants are reciprocals of the best Rayleigh
    quotient found, hence lower bounds on the sharp values; thresholds
    built from them are not conservative in a guaranteed direction, which
    is why the provenance travels with every downstream report.
    """

    c_pq: float
    c_r1: float
    c_r2: float
    provenance: str

    def __post_init__(self) -> None:
        for name in ("c_pq", "c_r1", "c_r2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.provenance not in (ESTIMATED, USER_SUPPLIED):
            raise ValueError(
                f"provenance must be {ESTIMATED!r} or {USER_SUPPLIED!r}"
            )


@dataclass(frozen=True)
class LandscapeCoeffs:
    """Coefficients of the scalar landscape h."""

    A1: float
    A2: float
    A3: float
    kappa_rho: float


@dataclass(frozen=True)
class ThresholdReport:
    """Landscape geometry and thresholds for one parameter set.

    Scale fields that a regime's geometry does not define stay None.  For
    the well-then-barrier regimes the invariant is s1 < s0 < s2 with
    h(s1) < 0 < kappa rho1 rho2 < h(s2), and T0 < T1 enclose the
    super-level set where h exceeds kappa rho1 rho2.
    """

    regime: RegimeClass
    landscape_shape: str
    s0: float | None = None
    s1: float | None = None
    s2: float | None = None
    T0: float | None = None
    T1: float | None = None
    beta0: float | None = None
    kappa0: float | None = None
    side_conditions_resolved: dict = field(default_factory=dict)
    gn_provenance: str | None = None
    notes: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "regime": self.regime.to_json_dict(),
            "landscape_shape": self.landscape_shape,
            "s0": self.s0,
            "s1": self.s1,
            "s2": self.s2,
            "T0": self.T0,
            "T1": self.T1,
            "beta0": self.beta0,
            "kappa0": self.kappa0,
            "side_conditions_resolved": {
                name: bool(value)
                for name, value in self.side_conditions_resolved.items()
            },
            "gn_provenance": self.gn_provenance,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


@dataclass(frozen=True)
class SideConditions:
    """Resolved named predicates plus the provenance of the constants used."""

    checks: dict
    gn_provenance: str

    def to_json_dict(self) -> dict:
        return {
            "checks": {name: bool(value) for name, value in self.checks.items()},
            "gn_provenance": self.gn_provenance,
        }


def coeffs(params: ProblemParams, gn: GNConstants) -> LandscapeCoeffs:
    """Landscape coefficients from parameters and estimate constants."""
    info = exponent_info(params)
    A1 = (
        params.lambda1
        / (2.0 * params.r1)
        * gn.c_r1
        * 2.0 ** params.r1
        * params.rho1 ** (2.0 * (params.r1 - info.gamma_r1))
    )
    A2 = (
        params.lambda2
        / (2.0 * params.r2)
        * gn.c_r2
        * 2.0 ** params.r2
        * params.rho2 ** (2.0 * (params.r2 - info.gamma_r2))
    )
    mass = params.rho1 ** 2 + params.rho2 ** 2
    A3 = params.beta * gn.c_pq * mass ** (
        (params.p + params.q - info.gamma_p - info.gamma_q) / 2.0
    )
    return LandscapeCoeffs(
        A1=A1, A2=A2, A3=A3, kappa_rho=params.kappa * params.rho1 * params.rho2
    )


def h_eval(coeffs: LandscapeCoeffs, exps: ExponentInfo, s: float) -> float:
    """Pointwise landscape value h(s) for s >= 0."""
    if s < 0.0:
        raise ValueError("the landscape is defined for s >= 0")
    val = 0.5 * s * s - coeffs.kappa_rho
    for a, e in (
        (coeffs.A1, 2.0 * exps.gamma_r1),
        (coeffs.A2, 2.0 * exps.gamma_r2),
        (coeffs.A3, exps.gamma_p + exps.gamma_q),
    ):
        if a != 0.0:
            val -= a * s ** e
    return val


def _pow(s: float, e: float) -> float:
    # s > 0 at every call site; cap overflow so sign tests during bracket
    # walks stay informative instead of raising.
    try:
        v = s ** e
    except OverflowError:
        return _HUGE
    return v if v < _HUGE else _HUGE


def g_eval(coeffs: LandscapeCoeffs, exps: ExponentInfo, s: float) -> float:
    """Slope factor G(s) with h'(s) = s (1 - G(s)).

    Every critical point of h is a root of G = 1, including the cases
    where exponents coincide and terms merge; zero coefficients are
    skipped so degenerate landscapes evaluate cleanly.
    """
    if s <= 0.0:
        raise ValueError("the slope factor is defined for s > 0")
    m = exps.gamma_p + exps.gamma_q
    total = 0.0
    for a, e in (
        (2.0 * exps.gamma_r1 * coeffs.A1, 2.0 * exps.gamma_r1 - 2.0),
        (2.0 * exps.gamma_r2 * coeffs.A2, 2.0 * exps.gamma_r2 - 2.0),
        (m * coeffs.A3, m - 2.0),
    ):
        if a != 0.0:
            total += a * _pow(s, e)
    return total if total < _HUGE else _HUGE


def _h_gap(coeffs: LandscapeCoeffs, exps: ExponentInfo, level: float, s: float) -> float:
    # h(s) - level with capped powers, for bracket walks far from scale 1
    val = 0.5 * _pow(s, 2.0) - coeffs.kappa_rho - level
    for a, e in (
        (coeffs.A1, 2.0 * exps.gamma_r1),
        (coeffs.A2, 2.0 * exps.gamma_r2),
        (coeffs.A3, exps.gamma_p + exps.gamma_q),
    ):
        if a != 0.0:
            val -= a * _pow(s, e)
    return val


def _bracket_walk(fn, start: float, direction: int, label: str):
    factor = 2.0 if direction > 0 else 0.5
    a = start
    fa = fn(a)
    if fa == 0.0:
        return a, a
    b = a * factor
    while _TINY <= b <= _HUGE:
        fb = fn(b)
        if fb == 0.0 or (fa > 0.0) != (fb > 0.0):
            return (a, b) if a < b else (b, a)
        a, fa = b, fb
        b *= factor
    raise RootNotBracketed(
        "no sign change of {} walking {} from s = {:g}".format(
            label, "up" if direction > 0 else "down", start
        )
    )


def _refine(fn, lo: float, hi: float) -> float:
    if lo == hi:
        return lo
    return float(brentq(fn, lo, hi, xtol=_TINY, rtol=_RTOL, maxiter=256))


def _directed_root(fn, start: float, direction: int, label: str) -> float:
    lo, hi = _bracket_walk(fn, start, direction, label)
    return _refine(fn, lo, hi)


def _monotone_root(fn, start: float, increasing: bool, label: str) -> float:
    f0 = fn(start)
    if f0 == 0.0:
        return start
    direction = 1 if (f0 < 0.0) == increasing else -1
    return _directed_root(fn, start, direction, label)


def _merged(x: float, y: float) -> bool:
    # Exponent sums carried through gamma arithmetic are not bitwise equal
    # even when the underlying exponents coincide; both formula routes
    # agree to root tolerance at the crossover, so this only picks a route.
    return abs(x - y) <= 1e-12 * max(1.0, abs(x), abs(y))


def _guarded_power(base: float, expo: float, label: str) -> float:
    if not base > 0.0:
        raise RootNotBracketed(f"{label} needs a positive base, got {base:g}")
    return base ** expo


def _pivot_scale(tid, g1, g2, m, A1, A2, err):
    """Closed-form pivot scale s0 of a coupling-threshold regime.

    err is the exception type raised on a failed structural guard, so the
    landscape path reports bracketing failures while the threshold path
    reports violated side conditions.
    """
    if tid == "T1_4":
        A12 = A1 + A2
        if A12 <= 0.0:
            raise err("the pivot scale needs A1 + A2 > 0")
        return ((2.0 - m) / (2.0 * g1 * (2.0 * g1 - m) * A12)) ** (
            1.0 / (2.0 * g1 - 2.0)
        )
    if tid == "T1_9":
        if A1 <= 0.0 or A2 <= 0.0:
            raise err("the pivot scale needs positive self coefficients")
        A1p = 2.0 * g1 * (2.0 * g1 - m) * A1
        A2p = 2.0 * g2 * (2.0 * g2 - m) * A2
        return (((1.0 - g1) * A1p) / ((g2 - 1.0) * A2p)) ** (
            1.0 / (2.0 * g2 - 2.0 * g1)
        )
    if tid == "T1_10":
        if A2 <= 0.0:
            raise err("the pivot scale needs A2 > 0")
        return ((1.0 - g1) / ((g2 - g1) * 2.0 * g2 * A2)) ** (1.0 / (2.0 * g2 - 2.0))
    if tid == "T1_11":
        if A2 <= 0.0:
            raise err("the pivot scale needs A2 > 0")
        c2 = 1.0 - 2.0 * A1
        if c2 <= 0.0:
            raise err("1/2 - A1 > 0 fails, the quadratic part of h is not a well")
        return ((2.0 - m) * c2 / ((2.0 * g2 - m) * 2.0 * g2 * A2)) ** (
            1.0 / (2.0 * g2 - 2.0)
        )
    if tid == "T1_13":
        if A2 <= 0.0:
            raise err("the pivot scale needs A2 > 0")
        return ((2.0 - m) / ((2.0 * g2 - m) * 2.0 * g2 * A2)) ** (
            1.0 / (2.0 * g2 - 2.0)
        )
    raise WrongRegime(f"no pivot scale is defined for {tid!r}")


def landscape(
    coeffs: LandscapeCoeffs, exps: ExponentInfo, regime: RegimeClass
) -> ThresholdReport:
    """Critical points and level crossings of h for one regime.

    Returns the s-structure only; coupling thresholds and side conditions
    stay unresolved here.  Raises RootNotBracketed whenever the regime's
    predicted geometry fails numerically, which is the landscape-level
    signature of violated side conditions.
    """
    tid = regime.theorem_id
    if tid not in ALL_THEOREM_IDS:
        raise WrongRegime(
            f"the landscape geometry is defined for the classified regimes, not {tid!r}"
        )
    g1, g2 = exps.gamma_r1, exps.gamma_r2
    m = exps.gamma_p + exps.gamma_q
    A1, A2, A3, kr = coeffs.A1, coeffs.A2, coeffs.A3, coeffs.kappa_rho
    shape = _SHAPE_BY_ID[tid]
    notes = []

    if tid == "T1_3":
        # Every term scales like s^2: h = (1/2 - A1 - A2 - A3) s^2 - kr.
        c2 = 0.5 - (A1 + A2 + A3)
        notes.append(
            "fully mass-critical landscape is a pure quadratic with no "
            "interior critical point"
        )
        s1 = None
        if c2 > 0.0 and kr > 0.0:
            s1 = math.sqrt(2.0 * kr / c2)
        elif c2 <= 0.0:
            notes.append(
                "quadratic coefficient 1/2 - A1 - A2 - A3 is nonpositive, "
                "the landscape is unbounded below"
            )
        return ThresholdReport(
            regime=regime, landscape_shape=shape, s1=s1, notes=tuple(notes)
        )

    def gfn(s):
        return g_eval(coeffs, exps, s) - 1.0

    if tid == "T1_1":
        if _merged(m, 2.0 * g1):
            s0 = _guarded_power(
                2.0 * g1 * (A1 + A2 + A3),
                1.0 / (2.0 - 2.0 * g1),
                "the merged-sum well scale",
            )
        else:
            s0 = _monotone_root(gfn, 1.0, increasing=False, label="the well slope G = 1")
    elif tid == "T1_2":
        # Self terms are quadratic here: h = (1/2 - A1 - A2) s^2 - A3 s^m - kr.
        c2 = 1.0 - 2.0 * (A1 + A2)
        if c2 <= 0.0:
            raise RootNotBracketed(
                "the critical-sum well needs 1 - 2 (A1 + A2) > 0, got "
                f"{c2:g}"
            )
        if A3 <= 0.0:
            raise RootNotBracketed("the critical-sum well needs A3 > 0")
        s0 = (m * A3 / c2) ** (1.0 / (2.0 - m))
    elif tid == "T1_7":
        s0 = _monotone_root(gfn, 1.0, increasing=False, label="the well slope G = 1")
    elif tid == "T1_8":
        if _merged(m, 2.0 * g1):
            c2 = 1.0 - 2.0 * A2
            if c2 <= 0.0:
                raise RootNotBracketed(
                    f"the well scale needs 1 - 2 A2 > 0, got {c2:g}"
                )
            if A1 + A3 <= 0.0:
                raise RootNotBracketed("the well scale needs A1 + A3 > 0")
            s0 = (c2 / (2.0 * g1 * (A1 + A3))) ** (1.0 / (2.0 * g1 - 2.0))
            notes.append(
                "merged-sum closed form taken from h' = 0 directly, "
                "s0 = ((1 - 2 A2) / (2 gamma_r1 (A1 + A3)))^(1/(2 gamma_r1 - 2)); "
                "the variant with A2 and A3 interchanged does not solve h' = 0 "
                "and was rejected"
            )
        else:
            s0 = _monotone_root(gfn, 1.0, increasing=False, label="the well slope G = 1")
    elif tid == "T1_5":
        # Cross term is quadratic at the critical sum.
        A12 = A1 + A2
        c2 = 1.0 - 2.0 * A3
        if c2 <= 0.0:
            raise RootNotBracketed(f"the hump needs 1 - 2 A3 > 0, got {c2:g}")
        if A12 <= 0.0:
            raise RootNotBracketed("the hump needs A1 + A2 > 0")
        s0 = (c2 / (2.0 * g1 * A12)) ** (1.0 / (2.0 * g1 - 2.0))
    elif tid == "T1_6":
        if _merged(m, 2.0 * g1):
            total = A1 + A2 + A3
            if total <= 0.0:
                raise RootNotBracketed("the hump needs A1 + A2 + A3 > 0")
            s0 = (2.0 * g1 * total) ** (1.0 / (2.0 - 2.0 * g1))
        else:
            s0 = _monotone_root(gfn, 1.0, increasing=True, label="the hump slope G = 1")
    elif tid == "T1_12":
        # Self r1 and cross terms are both quadratic here.
        c2 = 1.0 - 2.0 * (A1 + A3)
        if c2 <= 0.0:
            raise RootNotBracketed(
                f"the hump needs 1 - 2 (A1 + A3) > 0, got {c2:g}"
            )
        if A2 <= 0.0:
            raise RootNotBracketed("the hump needs A2 > 0")
        s0 = (c2 / (2.0 * g2 * A2)) ** (1.0 / (2.0 * g2 - 2.0))
    elif tid in ("T1_14", "T1_15"):
        s0 = _monotone_root(gfn, 1.0, increasing=True, label="the hump slope G = 1")
    else:
        # T1_4, T1_9, T1_10, T1_11, T1_13: well-then-barrier pivots.
        s0 = _pivot_scale(tid, g1, g2, m, A1, A2, RootNotBracketed)

    if shape == MONOTONE_WELL:
        def level_gap(s):
            return _h_gap(coeffs, exps, kr, s)

        s1 = _directed_root(
            level_gap, s0, +1, "the coupling-level crossing h = kappa rho1 rho2"
        )
        return ThresholdReport(
            regime=regime, landscape_shape=shape, s0=s0, s1=s1, notes=tuple(notes)
        )

    if shape == SINGLE_HUMP:
        return ThresholdReport(
            regime=regime, landscape_shape=shape, s0=s0, notes=tuple(notes)
        )

    # Well-then-barrier geometry around the pivot.
    if gfn(s0) >= 0.0:
        raise RootNotBracketed(
            "the well-then-barrier geometry needs G(s0) < 1 at the pivot; "
            "the couplings are too large for this regime"
        )
    s1 = _directed_root(gfn, s0, -1, "the inner critical point G = 1")
    s2 = _directed_root(gfn, s0, +1, "the outer critical point G = 1")

    def level_gap(s):
        return _h_gap(coeffs, exps, kr, s)

    if level_gap(s2) <= 0.0:
        raise RootNotBracketed(
            "the barrier top h(s2) does not clear the level kappa rho1 rho2"
        )
    T0 = _refine(level_gap, s1, s2)
    T1 = _directed_root(level_gap, s2, +1, "the outer coupling-level crossing")
    return ThresholdReport(
        regime=regime,
        landscape_shape=shape,
        s0=s0,
        s1=s1,
        s2=s2,
        T0=T0,
        T1=T1,
        notes=tuple(notes),
    )


def _shape_product(g1, g2, A1, A2):
    # Weighted product of self coefficients controlling whether the
    # implicit coupling equation admits a positive root.
    return ((g2 - g1) / (g2 - 1.0) * 2.0 * g1 * A1) ** (g2 - 1.0) * (
        (g2 - g1) / (1.0 - g1) * 2.0 * g2 * A2
    ) ** (1.0 - g1)


def _t1_9_failures(g1, g2, m, A1, A2):
    if A1 <= 0.0 or A2 <= 0.0:
        return ["positive self coefficients"]
    A1p = 2.0 * g1 * (2.0 * g1 - m) * A1
    A2p = 2.0 * g2 * (2.0 * g2 - m) * A2
    s0 = (((1.0 - g1) * A1p) / ((g2 - 1.0) * A2p)) ** (1.0 / (2.0 * g2 - 2.0 * g1))
    failures = []
    f_s0 = A1p * s0 ** (2.0 * g1 - 2.0) + A2p * s0 ** (2.0 * g2 - 2.0)
    if not f_s0 < 2.0 - m:
        failures.append("f(s0) < 2 - gamma_p - gamma_q")
    g_s0 = (
        s0 ** (2.0 - m)
        - 2.0 * g1 * A1 * s0 ** (2.0 * g1 - m)
        - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - m)
    )
    if not g_s0 > 0.0:
        failures.append("g(s0) > 0")
    half = 0.5 * s0 ** 2 - A1 * s0 ** (2.0 * g1) - A2 * s0 ** (2.0 * g2)
    if not half > 0.0:
        failures.append("s0^2/2 - A1 s0^{2 gamma_r1} - A2 s0^{2 gamma_r2} > 0")
    if not _shape_product(g1, g2, A1, A2) < 1.0:
        failures.append("weighted self-coefficient product < 1")
    return failures


def _t1_10_failures(g1, g2, m, A1, A2):
    if A2 <= 0.0:
        return ["positive A2"]
    s0 = ((1.0 - g1) / ((g2 - g1) * 2.0 * g2 * A2)) ** (1.0 / (2.0 * g2 - 2.0))
    failures = []
    quad = s0 ** 2 - 2.0 * g1 * A1 * s0 ** (2.0 * g1) - 2.0 * g2 * A2 * s0 ** (2.0 * g2)
    if not quad > 0.0:
        failures.append("s0^2 - 2 gamma_r1 A1 s0^{2 gamma_r1} - 2 gamma_r2 A2 s0^{2 gamma_r2} > 0")
    half = 0.5 * s0 ** 2 - A1 * s0 ** (2.0 * g1) - A2 * s0 ** (2.0 * g2)
    if not half > 0.0:
        failures.append("s0^2/2 - A1 s0^{2 gamma_r1} - A2 s0^{2 gamma_r2} > 0")
    if not _shape_product(g1, g2, A1, A2) < 1.0:
        failures.append("weighted self-coefficient product < 1")
    return failures


def _t1_13_failures(g1, g2, m, A1, A2):
    if A2 <= 0.0:
        return ["positive A2"]
    s0 = ((2.0 - m) / ((2.0 * g2 - m) * 2.0 * g2 * A2)) ** (1.0 / (2.0 * g2 - 2.0))
    margin = (
        1.0
        - 2.0 * g1 * A1 * s0 ** (2.0 * g1 - 2.0)
        - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - 2.0)
    )
    if not margin > 0.0:
        return ["pivot slope margin 1 - G_self(s0) > 0"]
    return []


def _u_equation_beta(g1, g2, m, A1, A2, c_pq, masspow):
    """Implicit coupling threshold solved by bisection.

    The unknown enters affinely with a positive slope, so the equation is
    strictly monotone in beta; the bracket is doubled until the sign
    flips and then bisected.
    """
    U = ((1.0 - g1) / ((g2 - g1) * 2.0 * g2 * A2)) ** (1.0 / (g2 - 1.0))
    fixed = (g2 - g1) / (g2 - 1.0) * 2.0 * g1 * A1 * U ** g1
    slope = (2.0 * g2 - m) / (2.0 * g2 - 2.0) * m * c_pq * masspow * U ** (m / 2.0)

    def gap(b):
        return b * slope + fixed - U

    if gap(0.0) >= 0.0:
        raise SideConditionViolated(
            "the implicit coupling equation admits no positive solution"
        )
    hi = 1.0
    while gap(hi) < 0.0:
        hi *= 2.0
        if hi > _HUGE:
            raise RootNotBracketed("the implicit coupling equation never crosses zero")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def beta0(params: ProblemParams, gn: GNConstants, regime: RegimeClass) -> float:
    """Coupling threshold beta0 for the well-then-barrier regimes.

    Evaluates every beta route the regime defines at its pivot scale and
    returns the minimum.  Raises SideConditionViolated when a standing
    assumption fails with the supplied constants.
    """
    tid = regime.theorem_id
    if tid not in _COUPLING_THRESHOLD_IDS:
        raise WrongRegime(f"no coupling threshold is defined in regime {tid!r}")
    info = exponent_info(params)
    g1, g2 = info.gamma_r1, info.gamma_r2
    m = info.gamma_p + info.gamma_q
    cs = coeffs(params, gn)
    A1, A2 = cs.A1, cs.A2
    C = gn.c_pq
    masspow = (params.rho1 ** 2 + params.rho2 ** 2) ** (
        (params.p + params.q - m) / 2.0
    )
    try:
        if tid == "T1_4":
            if A1 + A2 == 0.0:
                return math.inf  # no self terms, every coupling stays admissible
            A12 = A1 + A2
            s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
            b1 = (
                s0 ** (2.0 - m) - 2.0 * g1 * A12 * s0 ** (2.0 * g1 - m)
            ) / (C * m * masspow)
            b2 = (0.5 * s0 ** (2.0 - m) - A12 * s0 ** (2.0 * g1 - m)) / (C * masspow)
            return min(b1, b2)
        if tid == "T1_9":
            failures = _t1_9_failures(g1, g2, m, A1, A2)
            if failures:
                raise SideConditionViolated(
                    "standing assumptions fail: " + "; ".join(failures)
                )
            s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
            b1 = _u_equation_beta(g1, g2, m, A1, A2, C, masspow)
            b2 = (
                s0 ** (2.0 - m)
                - 2.0 * g1 * A1 * s0 ** (2.0 * g1 - m)
                - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - m)
            ) / (C * m * masspow)
            b3 = (
                0.5 * s0 ** (2.0 - m)
                - A1 * s0 ** (2.0 * g1 - m)
                - A2 * s0 ** (2.0 * g2 - m)
            ) / (C * masspow)
            return min(b1, b2, b3)
        if tid == "T1_10":
            failures = _t1_10_failures(g1, g2, m, A1, A2)
            if failures:
                raise SideConditionViolated(
                    "standing assumptions fail: " + "; ".join(failures)
                )
            s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
            b1 = _u_equation_beta(g1, g2, m, A1, A2, C, masspow)
            # The merged sum makes the cross exponent 2 gamma_r1 exactly.
            b2 = (
                s0 ** (2.0 - 2.0 * g1)
                - 2.0 * g1 * A1
                - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - 2.0 * g1)
            ) / (C * 2.0 * g1 * masspow)
            b3 = (
                0.5 * s0 ** (2.0 - 2.0 * g1)
                - A1
                - A2 * s0 ** (2.0 * g2 - 2.0 * g1)
            ) / (C * masspow)
            return min(b1, b2, b3)
        if tid == "T1_11":
            s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
            c2 = 1.0 - 2.0 * A1
            b1 = (
                c2 * s0 ** (2.0 - m) - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - m)
            ) / (C * m * masspow)
            b2 = ((0.5 - A1) * s0 ** (2.0 - m) - A2 * s0 ** (2.0 * g2 - m)) / (
                C * masspow
            )
            return min(b1, b2)
        # T1_13
        failures = _t1_13_failures(g1, g2, m, A1, A2)
        if failures:
            raise SideConditionViolated(
                "standing assumptions fail: " + "; ".join(failures)
            )
        s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
        b1 = (
            s0 ** (2.0 - m)
            - 2.0 * g1 * A1 * s0 ** (2.0 * g1 - m)
            - 2.0 * g2 * A2 * s0 ** (2.0 * g2 - m)
        ) / (C * m * masspow)
        b2 = (
            0.5 * s0 ** (2.0 - m)
            - A1 * s0 ** (2.0 * g1 - m)
            - A2 * s0 ** (2.0 * g2 - m)
        ) / (C * masspow)
        if A1 == 0.0:
            b3 = math.inf
        else:
            b3 = (
                (2.0 * g1 - 2.0)
                * ((2.0 - m) / (2.0 * (2.0 * g1 - m) * 2.0 * g1 * A1))
                ** ((2.0 - m) / (2.0 * g1 - 2.0))
                / ((2.0 * g1 - m) * C * m * masspow)
            )
        b4 = (
            (2.0 * g1 - 2.0)
            * ((2.0 - m) / (2.0 * (2.0 * g2 - m) * 2.0 * g2 * A2))
            ** ((2.0 - m) / (2.0 * g2 - 2.0))
            / ((2.0 * g1 - m) * C * m * masspow)
        )
        return min(b1, b2, b3, b4)
    except OverflowError:
        # Vanishing self coefficients push the pivot scale and every beta
        # route beyond float range together.
        return math.inf


def kappa0(
    params: ProblemParams, gn: GNConstants, regime: RegimeClass, beta0: float
) -> float:
    """Level threshold kappa0 built from an already computed beta0.

    Evaluates the displayed quotient at the regime's pivot scale with the
    cross coefficient rebuilt from the passed beta0.  Raises NonPositive
    when the numerator is not positive, which happens identically on
    T1_4, T1_10 and T1_11 and whenever the half-energy beta route attains
    the minimum; the per-coupling reading kappa0(..., beta0=params.beta)
    stays informative there.
    """
    tid = regime.theorem_id
    if tid not in _COUPLING_THRESHOLD_IDS:
        raise WrongRegime(f"no level threshold is defined in regime {tid!r}")
    info = exponent_info(params)
    g1, g2 = info.gamma_r1, info.gamma_r2
    m = info.gamma_p + info.gamma_q
    cs = coeffs(params, gn)
    A1, A2 = cs.A1, cs.A2
    masspow = (params.rho1 ** 2 + params.rho2 ** 2) ** (
        (params.p + params.q - m) / 2.0
    )
    a3bar = beta0 * gn.c_pq * masspow
    s0 = _pivot_scale(tid, g1, g2, m, A1, A2, SideConditionViolated)
    if tid == "T1_4":
        num = 0.5 * s0 ** 2 - (A1 + A2) * s0 ** (2.0 * g1) - a3bar * s0 ** m
    elif tid in ("T1_9", "T1_13"):
        num = (
            0.5 * s0 ** 2
            - A1 * s0 ** (2.0 * g1)
            - A2 * s0 ** (2.0 * g2)
            - a3bar * s0 ** m
        )
    elif tid == "T1_10":
        num = 0.5 * s0 ** 2 - (A1 + a3bar) * s0 ** (2.0 * g1) - A2 * s0 ** (2.0 * g2)
    else:  # T1_11
        num = (0.5 - A1) * s0 ** 2 - A2 * s0 ** (2.0 * g2) - a3bar * s0 ** m
    if num <= 0.0:
        raise NonPositive(
            f"the level-threshold numerator is {num:g}; the displayed window "
            "is empty at this beta0"
        )
    return num / (2.0 * params.rho1 * params.rho2)


def check_side_conditions(
    params: ProblemParams, gn: GNConstants, regime: RegimeClass
) -> SideConditions:
    """Resolve the regime's named predicates with the supplied constants."""
    info = exponent_info(params)
    g1, g2 = info.gamma_r1, info.gamma_r2
    m = info.gamma_p + info.gamma_q
    cs = coeffs(params, gn)
    A1, A2, A3 = cs.A1, cs.A2, cs.A3
    checks = {}
    for name in regime.side_conditions:
        if name == "half_minus_a1a2_positive":
            value = 0.5 - (A1 + A2) > 0.0
        elif name == "half_minus_a1a3_positive":
            value = 0.5 - (A1 + A3) > 0.0
        elif name == "half_minus_a1_positive":
            value = 0.5 - A1 > 0.0
        elif name == "half_minus_a2_positive":
            value = 0.5 - A2 > 0.0
        elif name == "half_minus_a3_positive":
            value = 0.5 - A3 > 0.0
        elif name == "nonexistence_inequality":
            value = nonexistence_margin(params, gn) > 0.0
        elif name == "shape_condition_t1_9":
            value = not _t1_9_failures(g1, g2, m, A1, A2)
        elif name == "shape_condition_t1_10":
            value = not _t1_10_failures(g1, g2, m, A1, A2)
        elif name == "shape_condition_t1_13":
            value = not _t1_13_failures(g1, g2, m, A1, A2)
        elif name == "beta_below_beta0":
            try:
                value = params.beta < beta0(params, gn, regime)
            except (SideConditionViolated, RootNotBracketed):
                value = False
        elif name == "kappa_below_kappa0":
            try:
                b0 = beta0(params, gn, regime)
                value = params.kappa < kappa0(params, gn, regime, b0)
            except (SideConditionViolated, RootNotBracketed, NonPositive):
                value = False
        else:
            raise WrongRegime(f"unknown side condition {name!r}")
        checks[name] = value
    return SideConditions(checks=checks, gn_provenance=gn.provenance)


def nonexistence_margin(params: ProblemParams, gn: GNConstants) -> float:
    """Value of the inequality whose positivity rules out normalized solutions.

    Each self term carries its own estimate constant; in the fully
    mass-critical regime the two exponents agree, so consistent inputs
    make this the same as factoring one constant out.
    """
    N, alpha = params.N, params.alpha
    e_mass = (2.0 * alpha + 4.0) / N
    e_cross = (alpha + 2.0) / N
    prefactor = 2.0 * N / (N + alpha + 2.0) * 2.0 ** ((N + alpha + 2.0) / N)
    self_part = (
        params.lambda1 * gn.c_r1 * params.rho1 ** e_mass
        + params.lambda2 * gn.c_r2 * params.rho2 ** e_mass
    )
    cross = (
        2.0
        * params.beta
        * gn.c_pq
        * (params.rho1 ** 2 + params.rho2 ** 2) ** e_cross
    )
    return 1.0 - prefactor * self_part - cross


def nonexistence_check(params: ProblemParams, gn: GNConstants) -> bool:
    """True when the fully mass-critical inequality rules out solutions."""
    regime = classify_regime(params)
    if regime.theorem_id != "T1_3":
        raise WrongRegime(
            "the nonexistence inequality applies in the fully mass-critical "
            f"regime T1_3 only, parameters classify as {regime.theorem_id}"
        )
    return nonexistence_margin(params, gn) > 0.0


def full_report(params: ProblemParams, gn: GNConstants) -> ThresholdReport:
    """Classify, resolve side conditions, and assemble the whole report.

    Geometry or threshold computations that fail for the supplied
    constants leave their fields None and append an explanatory note
    instead of raising, so one call always yields a serializable report
    for any in-scope parameter set.
    """
    regime = classify_regime(params)
    if regime.theorem_id not in ALL_THEOREM_IDS:
        raise WrongRegime(
            "parameters fall outside the classified regimes: "
            + "; ".join(validate_params(params))
        )
    info = exponent_info(params)
    cs = coeffs(params, gn)
    side = check_side_conditions(params, gn, regime)
    regime = replace(regime, side_conditions=dict(side.checks))
    notes = []
    s_fields = {"s0": None, "s1": None, "s2": None, "T0": None, "T1": None}
    shape = _SHAPE_BY_ID[regime.theorem_id]
    try:
        geo = landscape(cs, info, regime)
        shape = geo.landscape_shape
        s_fields = {
            "s0": geo.s0,
            "s1": geo.s1,
            "s2": geo.s2,
            "T0": geo.T0,
            "T1": geo.T1,
        }
        notes.extend(geo.notes)
    except RootNotBracketed as exc:
        notes.append(f"landscape geometry unavailable: {exc}")
    b0 = k0 = None
    if regime.theorem_id in _COUPLING_THRESHOLD_IDS:
        try:
            b0 = beta0(params, gn, regime)
        except (SideConditionViolated, RootNotBracketed) as exc:
            notes.append(f"coupling threshold unavailable: {exc}")
        if b0 is not None:
            try:
                k0 = kappa0(params, gn, regime, b0)
            except NonPositive:
                notes.append(
                    "displayed level threshold degenerates to zero at beta0"
                )
                try:
                    k_at = kappa0(params, gn, regime, params.beta)
                    notes.append(
                        "level threshold at the supplied coupling: kappa "
                        f"below {k_at:.12g} keeps the well-then-barrier geometry"
                    )
                except (NonPositive, SideConditionViolated):
                    notes.append(
                        "no admissible level remains at the supplied coupling"
                    )
    return ThresholdReport(
        regime=regime,
        landscape_shape=shape,
        beta0=b0,
        kappa0=k0,
        side_conditions_resolved=dict(side.checks),
        gn_provenance=gn.provenance,
        notes=tuple(notes),
        **s_fields,
    )


def h_profile_csv(coeffs: LandscapeCoeffs, exps: ExponentInfo, s_values) -> str:
    """Two-column CSV of the landscape profile, header line 's,h'."""
    lines = ["s,h"]
    for s in s_values:
        s = float(s)
        lines.append("%.17g,%.17g" % (s, h_eval(coeffs, exps, s)))
    return "\n".join(lines) + "\n"
