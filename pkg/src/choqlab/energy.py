"""Energy, Pohozaev value, Lagrange multipliers, and the fiber map.

Every quantity here reduces to five scalars computed once per state:

    T    total Dirichlet integral of the pair
    D1   self-interaction of u at exponent r1
    D2   self-interaction of v at exponent r2
    Dpq  cross interaction between |u|^p and |v|^q
    L    the linear coupling integral int u v

The L2-preserving dilation t |-> t^{N/2} f(t r) multiplies each of the
interaction integrals by a known power of t and leaves L fixed, so the
fiber map Psi(t) = J(t diamond (u, v)) is an explicit finite sum of
powers.  The fiber logic therefore never resamples fields; profiles,
derivatives, and critical points all come from the breakdown scalars,
which keeps identities like t Psi'(t) = P(t diamond (u, v)) exact at
the floating-point level rather than interpolation-limited.

Gradients of the discrete energy are assembled from the same symmetric
kernel form used to evaluate it, so the assembled gradient IS the
discretized Euler-Lagrange operator: the factor 2 r from each quadratic
self term and the p, q factors on the cross term fall out of the chain
rule, matching the strong-form system coefficient by coefficient.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import GridMismatch
from .params import ProblemParams, classify_regime, exponent_info, gamma_of
from .radial import StatePair, kinetic_form
from .riesz import RieszKernel, apply, nonlocal_pair

__all__ = [
    "EnergyBreakdown",
    "CriticalPoint",
    "FiberProfile",
    "make_breakdown",
    "scale_breakdown",
    "energy",
    "pohozaev",
    "fiber",
    "gradients",
    "multipliers",
    "el_residual",
    "expected_critical_count",
]

# Regimes whose fiber geometry has a well followed by a barrier (two
# critical points); the single-well and single-barrier regimes have one;
# the degenerate fully-critical regime has none.
_TWO_CRITICAL = frozenset({"T1_4", "T1_9", "T1_10", "T1_11", "T1_13"})


@dataclass(frozen=True)
class EnergyBreakdown:
    """The five interaction scalars of a state plus its J and P values."""

    T: float
    D1: float
    D2: float
    Dpq: float
    L: float
    J: float
    P: float

    def to_json_dict(self) -> dict:
        return {
            "T": self.T,
            "D1": self.D1,
            "D2": self.D2,
            "Dpq": self.Dpq,
            "L": self.L,
            "J": self.J,
            "P": self.P,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def _combine_energy(
    params: ProblemParams, T: float, D1: float, D2: float, Dpq: float, L: float
) -> float:
    return (
        0.5 * T
        - params.lambda1 / (2.0 * params.r1) * D1
        - params.lambda2 / (2.0 * params.r2) * D2
        - params.beta * Dpq
        - params.kappa * L
    )


def _combine_pohozaev(
    params: ProblemParams, T: float, D1: float, D2: float, Dpq: float
) -> float:
    info = exponent_info(params)
    return (
        T
        - info.gamma_r1 / params.r1 * params.lambda1 * D1
        - info.gamma_r2 / params.r2 * params.lambda2 * D2
        - params.beta * (info.gamma_p + info.gamma_q) * Dpq
    )


def make_breakdown(
    params: ProblemParams, T: float, D1: float, D2: float, Dpq: float, L: float
) -> EnergyBreakdown:
    """Assemble a breakdown from raw integrals, filling J and P."""
    return EnergyBreakdown(
        T=T,
        D1=D1,
        D2=D2,
        Dpq=Dpq,
        L=L,
        J=_combine_energy(params, T, D1, D2, Dpq, L),
        P=_combine_pohozaev(params, T, D1, D2, Dpq),
    )


def scale_breakdown(
    bd: EnergyBreakdown, params: ProblemParams, t: float
) -> EnergyBreakdown:
    """Breakdown of the dilated state t diamond (u, v), exact in t.

    Each interaction integral picks up its dilation power; the coupling
    integral L is invariant because the dilation preserves L2 pairings.
    """
    info = exponent_info(params)
    return make_breakdown(
        params,
        T=bd.T * t**2,
        D1=bd.D1 * t ** (2.0 * info.gamma_r1),
        D2=bd.D2 * t ** (2.0 * info.gamma_r2),
        Dpq=bd.Dpq * t ** (info.gamma_p + info.gamma_q),
        L=bd.L,
    )


def energy(
    state: StatePair, params: ProblemParams, kernel: RieszKernel
) -> EnergyBreakdown:
    """Evaluate the five interaction integrals of a state on a kernel grid."""
    g = state.grid
    if g is not kernel.grid and not g.same_as(kernel.grid):
        raise GridMismatch("state and kernel discretized on different grids")
    G = kinetic_form(g)
    u, v = state.u.values, state.v.values
    T = float(u @ (G @ u)) + float(v @ (G @ v))
    D1 = nonlocal_pair(kernel, state.u, state.u, params.r1, params.r1)
    D2 = nonlocal_pair(kernel, state.v, state.v, params.r2, params.r2)
    Dpq = nonlocal_pair(kernel, state.u, state.v, params.p, params.q)
    L = float(np.dot(g.weights, u * v))
    return make_breakdown(params, T, D1, D2, Dpq, L)


def pohozaev(bd: EnergyBreakdown, params: ProblemParams) -> float:
    """The dilation-stationarity combination; the L term carries no weight."""
    return _combine_pohozaev(params, bd.T, bd.D1, bd.D2, bd.Dpq)


def _fiber_terms(
    bd: EnergyBreakdown, params: ProblemParams
) -> tuple[np.ndarray, np.ndarray, float]:
    """Coefficients c_k, exponents e_k, and constant so that

    Psi(t) = sum_k c_k t^{e_k} + const.
    """
    info = exponent_info(params)
    coeffs = np.array(
        [
            0.5 * bd.T,
            -params.lambda1 / (2.0 * params.r1) * bd.D1,
            -params.lambda2 / (2.0 * params.r2) * bd.D2,
            -params.beta * bd.Dpq,
        ]
    )
    exps = np.array(
        [
            2.0,
            2.0 * info.gamma_r1,
            2.0 * info.gamma_r2,
            info.gamma_p + info.gamma_q,
        ]
    )
    return coeffs, exps, -params.kappa * bd.L


def expected_critical_count(params: ProblemParams) -> int | None:
    """How many fiber critical points the regime's geometry predicts.

    None when the parameters fall outside the classified regimes (no
    prediction is made there).
    """
    regime = classify_regime(params)
    if regime.theorem_id == "T1_3":
        return 0
    if regime.theorem_id in _TWO_CRITICAL:
        return 2
    if regime.theorem_id.startswith("T1_"):
        return 1
    return None


@dataclass(frozen=True)
class CriticalPoint:
    t: float
    psi: float
    curvature: float
    kind: str  # "+", "0", or "-" by the sign of Psi'' at the point


@dataclass(frozen=True)
class FiberProfile:
    """Sampled fiber map of one breakdown with its critical points."""

    breakdown: EnergyBreakdown
    t: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    ddpsi: np.ndarray
    critical_points: tuple[CriticalPoint, ...]
    expected_count: int | None
    warnings: tuple[str, ...]

    @property
    def count_matches(self) -> bool | None:
        if self.expected_count is None:
            return None
        return len(self.critical_points) == self.expected_count

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,psi,dpsi,ddpsi\n")
        for row in zip(self.t, self.psi, self.dpsi, self.ddpsi):
            buf.write(",".join(f"{x:.17g}" for x in row) + "\n")
        return buf.getvalue()


def _psi_of(coeffs, exps, const, t):
    t = np.asarray(t, dtype=float)
    return np.sum(coeffs * t[..., None] ** exps, axis=-1) + const


def _dpsi_of(coeffs, exps, t):
    t = np.asarray(t, dtype=float)
    return np.sum(coeffs * exps * t[..., None] ** (exps - 1.0), axis=-1)


def _ddpsi_of(coeffs, exps, t):
    t = np.asarray(t, dtype=float)
    return np.sum(
        coeffs * exps * (exps - 1.0) * t[..., None] ** (exps - 2.0), axis=-1
    )


def fiber(
    bd: EnergyBreakdown,
    params: ProblemParams,
    t_range: tuple[float, float] = (1e-3, 1e3),
    samples: int = 512,
) -> FiberProfile:
    """Sample Psi, Psi', Psi'' analytically and locate fiber critical points.

    Roots of Psi' are found by bracketing on a geometric sample of the
    window (the power-law tails make log spacing the natural resolution)
    followed by a bracketed solve.  Each critical point is classified by
    the sign of Psi'' against a relative floor, membership "+", "0", or
    "-".  A mismatch between the found count and the regime's predicted
    count is reported as a warning, not an error: it is the numerical
    footprint of a failed side condition.
    """
    lo, hi = t_range
    if not (0.0 < lo < hi):
        raise ValueError("t_range must satisfy 0 < lo < hi")
    coeffs, exps, const = _fiber_terms(bd, params)
    t = np.geomspace(lo, hi, samples)
    psi = _psi_of(coeffs, exps, const, t)
    dpsi = _dpsi_of(coeffs, exps, t)
    ddpsi = _ddpsi_of(coeffs, exps, t)

    crits = []
    for i in range(samples - 1):
        a, b = t[i], t[i + 1]
        fa, fb = dpsi[i], dpsi[i + 1]
        if fa == 0.0:
            root = a
        elif fa * fb < 0.0:
            root = brentq(
                lambda x: float(_dpsi_of(coeffs, exps, x)),
                a,
                b,
                xtol=1e-30,
                rtol=1e-14,
            )
        else:
            continue
        curv = float(_ddpsi_of(coeffs, exps, root))
        floor = float(
            np.sum(np.abs(coeffs * exps * (exps - 1.0)) * root ** (exps - 2.0))
        )
        if abs(curv) <= 1e-9 * floor:
            kind = "0"
        else:
            kind = "+" if curv > 0.0 else "-"
        crits.append(
            CriticalPoint(
                t=float(root),
                psi=float(_psi_of(coeffs, exps, const, root)),
                curvature=curv,
                kind=kind,
            )
        )
    # a root sitting exactly on a sample point would be found twice
    deduped: list[CriticalPoint] = []
    for c in crits:
        if not deduped or abs(c.t - deduped[-1].t) > 1e-12 * c.t:
            deduped.append(c)

    expected = expected_critical_count(params)
    warnings: tuple[str, ...] = ()
    if expected is not None and len(deduped) != expected:
        warnings = (
            f"found {len(deduped)} fiber critical points where the regime "
            f"predicts {expected}; a side condition likely fails for these "
            "constants",
        )
    return FiberProfile(
        breakdown=bd,
        t=t,
        psi=psi,
        dpsi=dpsi,
        ddpsi=ddpsi,
        critical_points=tuple(deduped),
        expected_count=expected,
        warnings=warnings,
    )


def _odd_power(x: np.ndarray, s: float) -> np.ndarray:
    """|x|^{s-2} x with the x = 0 limit 0 (valid for s > 1)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.abs(x) ** (s - 2.0) * x
    return np.where(x == 0.0, 0.0, out)


def gradients(
    state: StatePair,
    params: ProblemParams,
    kernel: RieszKernel,
    scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Nodal gradient of the discrete energy with respect to (u, v).

    The directional derivative of J along (h, k) is g_u . h + g_v . k;
    the quadrature weights are folded in, so these are weak-form
    residuals against nodal test vectors.  Four kernel products cover
    all nonlocal terms.

    With scale = t != 1 the assembly returns the pullback of the
    gradient at the dilated state t o (u, v): each term carries the same
    power of t that it picks up along the fiber, because dilation acts
    on the discrete operators by exact power laws.  Evaluating at the
    fiber maximum this is the gradient of the reduced functional
    max_t J(t o (u, v)) by the envelope theorem, and it never resamples
    the state.
    """
    g = state.grid
    if g is not kernel.grid and not g.same_as(kernel.grid):
        raise GridMismatch("state and kernel discretized on different grids")
    G = kinetic_form(g)
    w = g.weights
    u, v = state.u.values, state.v.values
    p, q, r1, r2 = params.p, params.q, params.r1, params.r2
    t_kin = scale ** 2
    t_r1 = scale ** (2.0 * gamma_of(params, r1))
    t_r2 = scale ** (2.0 * gamma_of(params, r2))
    t_pq = scale ** (gamma_of(params, p) + gamma_of(params, q))

    pot_u = kernel.K @ (w * np.abs(u) ** r1)   # I_alpha * |u|^r1
    pot_v = kernel.K @ (w * np.abs(v) ** r2)   # I_alpha * |v|^r2
    pot_up = kernel.K @ (w * np.abs(u) ** p)   # I_alpha * |u|^p
    pot_vq = kernel.K @ (w * np.abs(v) ** q)   # I_alpha * |v|^q

    gu = (
        t_kin * (G @ u)
        - t_r1 * params.lambda1 * w * pot_u * _odd_power(u, r1)
        - t_pq * params.beta * p * w * pot_vq * _odd_power(u, p)
        - params.kappa * w * v
    )
    gv = (
        t_kin * (G @ v)
        - t_r2 * params.lambda2 * w * pot_v * _odd_power(v, r2)
        - t_pq * params.beta * q * w * pot_up * _odd_power(v, q)
        - params.kappa * w * u
    )
    return gu, gv


def multipliers(
    state: StatePair, params: ProblemParams, kernel: RieszKernel
) -> tuple[float, float]:
    """Lagrange multipliers of the two mass constraints.

    mu_i = -(1/rho_i^2) <grad_i J, component_i>, read off by pairing the
    assembled gradient with the state itself.
    """
    gu, gv = gradients(state, params, kernel)
    mu1 = -float(np.dot(gu, state.u.values)) / params.rho1**2
    mu2 = -float(np.dot(gv, state.v.values)) / params.rho2**2
    return mu1, mu2


def el_residual(
    state: StatePair,
    params: ProblemParams,
    kernel: RieszKernel,
    mu1: float,
    mu2: float,
) -> float:
    """Strong-form residual of both coupled equations, normalized by sqrt(T).

    The nodal gradient of J + mu1 |u|^2/2 + mu2 |v|^2/2 equals the
    quadrature weight times the strong residual at each node, so its
    weighted L2 norm is sum g^2 / w.
    """
    gu, gv = gradients(state, params, kernel)
    w = state.grid.weights
    u, v = state.u.values, state.v.values
    ru = gu + mu1 * w * u
    rv = gv + mu2 * w * v
    resid = math.sqrt(float(np.sum(ru**2 / w)) + float(np.sum(rv**2 / w)))
    G = kinetic_form(state.grid)
    T = float(u @ (G @ u)) + float(v @ (G @ v))
    if T <= 0.0:
        return resid
    return resid / math.sqrt(T)
