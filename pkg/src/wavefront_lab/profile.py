"""Wavefront profile computation by shooting in the traveling coordinate.

The second-order wave system conserves the combination
``D*eta*beta*beta' + c*(beta-1) + eta' + c*eta``; solving that relation for
``beta'`` reduces the problem to a first-order system in (eta, eta', beta)
which is integrated forward from the unique trajectory leaving the left
equilibrium (eta, beta) = (0, 1).  Event detection at the degenerate
endpoint beta -> 0 yields the front classification.

Numerical structure worth knowing:

* The launch region is stiff: deviations from the slow manifold relax at
  rate c/(D*eta), which is ~c/eta0 at the launch.  LSODA handles the stiff
  leg and switches itself once eta grows.
* The flux is evaluated through cancellation of O(c) terms, so its roundoff
  scale is ~1e-13*c; classical tails are terminated by the flux returning
  to that guard band (beta cannot reach the floor before the right-hand
  side becomes noise).
* Failed connections end on a square-root singularity (beta ~ sqrt(tau-xi));
  they are intercepted once the flux falls decisively below the sharp-front
  asymptote band |flux| <= c*beta, before adaptive stepping can stall on the
  singularity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .rates import decay_rate, lower_ratio
from .types import (
    DomainError,
    FrontClassification,
    FrontKind,
    Params,
    Profile,
    SingularStall,
)

__all__ = [
    "WaveState",
    "LaunchPoint",
    "rhs",
    "flux_of",
    "launch",
    "default_xi_max",
    "integrate_profile",
    "extend_beyond_tau",
]

BETA_FLOOR = 1e-10
BETA_STALL_ACCEPT = 1e-4
ETA_BLOWUP_MARGIN = 0.5


@dataclass(frozen=True)
class WaveState:
    """Point state (eta, eta', beta) along a left-to-right integration."""

    eta: float
    v: float
    beta: float


@dataclass(frozen=True)
class LaunchPoint:
    """First-order asymptotics of the unique trajectory leaving (0, 1)."""

    eta0: float
    v0: float
    beta0: float
    xi0: float = 0.0


def flux_of(state: WaveState, params: Params) -> float:
    """Degenerate flux D*eta*beta*beta' expressed through the first integral."""
    c = params.c
    return c * (1.0 - state.beta) - state.v - c * state.eta


def rhs(state: WaveState, params: Params) -> tuple[float, float, float]:
    """Reduced first-order right-hand side (d eta, d eta', d beta)/d xi.

    beta' is obtained from the conserved first integral, so the relation
    D*eta*beta*beta' + c*(beta-1) + eta' + c*eta = 0 holds by construction.
    """
    if state.eta <= 0.0 or state.beta <= 0.0:
        raise DomainError(
            "rhs is singular at eta <= 0 or beta <= 0; integration must stop "
            "at the endpoint event"
        )
    c, D = params.c, params.D
    deta = state.v
    dv = -c * state.v + state.eta * state.beta
    dbeta = flux_of(state, params) / (D * state.eta * state.beta)
    return deta, dv, dbeta


def launch(params: Params, eta0: float = 1e-6) -> LaunchPoint:
    """Launch state on the departing trajectory, normalized by eta(0) = eta0.

    Uses the exact first-order asymptotics eta'/eta -> decay_rate(c) and
    (1-beta)/eta -> 1/lower_ratio(c); the truncation error is O(eta0^2).
    """
    c = params.c
    s2 = decay_rate(c)
    if not (0.0 < eta0 < c / (c + s2)):
        raise DomainError(
            f"eta0 must lie in (0, {c / (c + s2):.6g}); got {eta0}"
        )
    return LaunchPoint(eta0=eta0, v0=s2 * eta0, beta0=1.0 - eta0 / lower_ratio(c))


def default_xi_max(params: Params) -> float:
    """Truncation horizon scaled to the slow left decay rate."""
    return 200.0 / decay_rate(params.c)


def _quad_extrapolate(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """(value, slope) at x=0 via a quadratic fit on a normalized abscissa."""
    scale = float(np.max(x))
    if x.size >= 3 and scale > 0.0:
        coeff = np.polynomial.polynomial.polyfit(x / scale, y, 2)
        return float(coeff[0]), float(coeff[1] / scale)
    return float(y[-1]), 0.0


class _Terminated:
    FLOOR = "floor"
    FLUX_ZERO = "flux_zero"
    FAIL_INTERCEPT = "fail_intercept"
    FLUX_POSITIVE = "flux_positive"
    ETA_CAP = "eta_cap"
    STALL = "stall"
    HORIZON = "horizon"
    HALF_BEFORE_ARM = "half_before_arm"


def _integrate_legs(params: Params, lp: LaunchPoint, xi_max: float):
    """Run the two integration legs; returns (samplers, reason, xi_end).

    Leg A integrates (eta, eta', 1-beta): near the left equilibrium the
    departure 1-beta is tiny, and carrying it directly keeps both the
    integration error and the flux cancellation noise proportional to the
    local scale.  Once eta clears an arming threshold (flux resolvable in
    the plain-beta chart and the stiff launch transient long dead), leg B
    switches to (eta, eta', beta) with all endpoint detectors armed.
    """
    c, D = params.c, params.D
    eta_cap = math.sqrt(math.exp(min(D, 600.0))) + ETA_BLOWUP_MARGIN
    ftol = params.tol.flux_tol * c
    eta_arm = min(max(3.0 * lp.eta0, 1e-4 * c / math.sqrt(D)), 0.9 * eta_cap)

    def ode_u(_xi, y):
        eta, v, u = y
        num = c * u - v - c * eta
        den = D * eta * max(1.0 - u, 1e-14)
        return (v, -c * v + eta * (1.0 - u), -num / den)

    def ode_b(_xi, y):
        eta, v, beta = y
        num = c * (1.0 - beta) - v - c * eta
        den = D * eta * max(beta, 1e-14)
        return (v, -c * v + eta * beta, num / den)

    def guard(eta):
        return 1e-13 * c * (1.0 + eta)

    def fluxv(y):
        return c * (1.0 - y[2]) - y[1] - c * y[0]

    def ev_eta_arm(_xi, y):
        return y[0] - eta_arm

    ev_eta_arm.terminal, ev_eta_arm.direction = True, 1.0

    def ev_u_half(_xi, y):
        return y[2] - 0.5

    ev_u_half.terminal, ev_u_half.direction = True, 1.0

    def ev_floor(_xi, y):
        return y[2] - BETA_FLOOR

    ev_floor.terminal, ev_floor.direction = True, -1.0

    def ev_off_sharp(_xi, y):
        # A collapsing support keeps |flux| bounded away from 0 while beta
        # shrinks, so the flux falls below the sharp-front asymptote band
        # |flux| <= c*beta; intercept there, before the square-root endpoint
        # can stall the stepper.  Fronts never trip this: classical fluxes
        # ride (D/c)*eta^2*beta^2 and sharp ones sit on c*beta exactly.
        # Disarmed at order-one beta, where legitimate fronts dip deep.
        ramp = 10.0 * (1.0 + c) * max(0.0, y[2] - 0.1)
        return fluxv(y) + 5.0 * max(ftol, c * y[2]) + ramp

    ev_off_sharp.terminal, ev_off_sharp.direction = True, -1.0

    def ev_cap(_xi, y):
        return y[0] - eta_cap

    ev_cap.terminal, ev_cap.direction = True, 1.0

    def ev_flux_pos(_xi, y):
        return fluxv(y) - guard(y[0])

    ev_flux_pos.terminal, ev_flux_pos.direction = True, 1.0

    def ev_flux_zero(_xi, y):
        return fluxv(y) + guard(y[0])

    ev_flux_zero.terminal, ev_flux_zero.direction = True, 1.0

    kw = dict(
        method="LSODA",
        dense_output=True,
        rtol=params.tol.ode_rtol,
        atol=params.tol.ode_atol,
    )

    u0 = lp.eta0 / lower_ratio(c)
    sol_a = solve_ivp(
        ode_u, (0.0, xi_max), (lp.eta0, lp.v0, u0),
        events=(ev_eta_arm, ev_u_half), **kw,
    )

    def sampler_a(t):
        eta, v, u = sol_a.sol(t)
        return np.vstack([eta, v, 1.0 - u])

    legs = [(float(sol_a.t[-1]), sampler_a)]
    reason = None
    if sol_a.status == 1 and sol_a.t_events[0].size > 0:
        reason = None  # armed; continue with leg B
    elif sol_a.status == 1:
        reason = _Terminated.HALF_BEFORE_ARM
    elif sol_a.status == -1:
        reason = _Terminated.STALL
    else:
        reason = _Terminated.HORIZON

    if reason is None:
        eta1, v1, u1 = sol_a.y[:, -1]
        sol_b = solve_ivp(
            ode_b, (sol_a.t[-1], xi_max), (eta1, v1, 1.0 - u1),
            events=(ev_floor, ev_off_sharp, ev_cap, ev_flux_pos, ev_flux_zero), **kw,
        )
        legs.append((float(sol_b.t[-1]), lambda t: np.vstack(sol_b.sol(t))))
        if sol_b.status == 1:
            hits = [ev.size > 0 for ev in sol_b.t_events]
            if hits[0]:
                reason = _Terminated.FLOOR
            elif hits[1]:
                reason = _Terminated.FAIL_INTERCEPT
            elif hits[2]:
                reason = _Terminated.ETA_CAP
            elif hits[3]:
                reason = _Terminated.FLUX_POSITIVE
            else:
                reason = _Terminated.FLUX_ZERO
        elif sol_b.status == -1:
            reason = _Terminated.STALL
        else:
            reason = _Terminated.HORIZON

    return legs, reason, legs[-1][0]


def integrate_profile(
    params: Params,
    eta0: float = 1e-6,
    xi_max: float | None = None,
    n_samples: int = 6001,
) -> Profile:
    """Integrate the reduced system from the launch point and classify the run.

    Returns the sampled profile re-indexed so that beta = 1/2 sits at xi = 0
    (profiles are unique up to shift).  Classification thresholds: sharp when
    a finite endpoint is reached with |limit flux| <= flux_tol*c, failed when
    the limit flux is below -flux_tol*c, classical when the bacteria level
    decays with vanishing slope and flux.
    """
    c, D = params.c, params.D
    lp = launch(params, eta0)
    if lp.beta0 <= 0.5:
        raise DomainError(
            "launch must start in the left tail (beta0 > 1/2): "
            f"eta0={eta0} gives beta0={lp.beta0:.4g}; reduce eta0 below "
            f"{0.5 * lower_ratio(c):.4g}"
        )
    if xi_max is None:
        xi_max = default_xi_max(params)
    if xi_max <= 0.0:
        raise DomainError("xi_max must be positive")

    legs, reason, xi_end = _integrate_legs(params, lp, xi_max)
    if reason == _Terminated.HALF_BEFORE_ARM:
        raise SingularStall(
            "beta fell to 1/2 before the flux detectors could arm; "
            "eta0 is too large for this speed"
        )

    grid = np.linspace(0.0, xi_end, n_samples)
    split = legs[0][0]
    parts = []
    if len(legs) == 1:
        parts.append((grid, legs[0][1]))
    else:
        parts.append((grid[grid <= split], legs[0][1]))
        parts.append((grid[grid > split], legs[1][1]))
    blocks = [sample(g) for g, sample in parts if g.size]
    eta = np.concatenate([b[0] for b in blocks])
    v = np.concatenate([b[1] for b in blocks])
    beta = np.concatenate([b[2] for b in blocks])
    beta = np.maximum(beta, 0.5 * BETA_FLOOR)

    flux = c * (1.0 - beta) - v - c * eta
    beta_prime = flux / (D * eta * beta)
    eta_end, v_end, b_end = float(eta[-1]), float(v[-1]), float(beta[-1])

    lim = max(1e-4, min(100.0 * b_end, b_end + 0.15))
    win = np.flatnonzero(beta <= lim)
    if win.size < 8:
        win = np.arange(max(0, beta.size - 8), beta.size)
    # flux(beta) is smooth through the endpoint, so both the limit value and
    # the corner slope come from its fit: beta'(tau-) = (d flux/d beta)/(D*eta)
    # with d flux/d beta -> 0 on classical runs and -> -c on sharp ones.
    flux0, flux_slope = _quad_extrapolate(beta[win], flux[win])
    slope0 = flux_slope / (D * eta_end)

    ftol = params.tol.flux_tol * c
    if reason in (_Terminated.ETA_CAP, _Terminated.FLUX_POSITIVE):
        kind, tau = FrontKind.FAILED, xi_end
        limit_slope, limit_flux = float(beta_prime[-1]), flux0
    elif reason == _Terminated.FLUX_ZERO:
        kind, tau = FrontKind.CLASSICAL, math.inf
        limit_slope, limit_flux = slope0, flux0
    elif reason in (_Terminated.FLOOR, _Terminated.FAIL_INTERCEPT) or (
        reason == _Terminated.STALL and b_end <= BETA_STALL_ACCEPT
    ):
        limit_flux = flux0
        if flux0 < -ftol:
            kind = FrontKind.FAILED
            limit_slope = float(beta_prime[-1])
            tau = xi_end + b_end * b_end * D * eta_end / (2.0 * abs(flux0))
        else:
            if flux_slope <= -0.5 * c:
                kind = FrontKind.SHARP
                limit_slope = slope0
                tau = xi_end + b_end / abs(limit_slope)
            else:
                kind, tau = FrontKind.CLASSICAL, math.inf
                limit_slope = slope0
    elif reason == _Terminated.STALL:
        raise SingularStall(
            f"step size underflow at xi={xi_end:.6g} with beta={b_end:.3g}",
            WaveState(eta_end, v_end, b_end),
        )
    else:
        if abs(beta_prime[-1]) > 1e-6 or abs(v_end) > 1e-4 * (1.0 + c):
            raise SingularStall(
                f"horizon xi_max={xi_max:.6g} reached before the profile "
                f"settled (beta={b_end:.3g}, beta'={beta_prime[-1]:.3g})",
                WaveState(eta_end, v_end, b_end),
            )
        kind, tau = FrontKind.CLASSICAL, math.inf
        limit_slope, limit_flux = slope0, flux0

    classification = FrontClassification(
        kind=kind, limit_slope=limit_slope, limit_flux=limit_flux
    )

    if beta[0] > 0.5 > beta[-1]:
        xi_half = float(np.interp(0.5, beta[::-1], grid[::-1]))
        grid = grid - xi_half
        if math.isfinite(tau):
            tau -= xi_half

    return Profile(
        xi=grid,
        eta=eta,
        eta_prime=v,
        beta=beta,
        beta_prime=beta_prime,
        flux=flux,
        tau=tau,
        classification=classification,
    )


def extend_beyond_tau(profile: Profile, params: Params, xi_end: float) -> Profile:
    """Append the closed-form continuation of a sharp front past its endpoint.

    Beyond tau the bacteria level is identically zero and the nutrient obeys
    eta'' + c*eta' = 0, i.e. eta(xi) = eta(tau) + eta'(tau)/c * (1 - e^{c(tau-xi)});
    the extrapolated limit eta(tau) + eta'(tau)/c must equal 1 for a true front.
    """
    if profile.classification.kind is not FrontKind.SHARP:
        raise ValueError("extension applies to sharp profiles only")
    if not math.isfinite(profile.tau):
        raise ValueError("sharp profile must carry a finite tau")
    tau = profile.tau
    if xi_end <= tau:
        raise DomainError("xi_end must exceed tau")

    c = params.c
    dt = tau - profile.xi[-1]
    eta_tau = float(profile.eta[-1] + profile.eta_prime[-1] * dt)
    v_tau = float(profile.eta_prime[-1])

    n_ext = max(16, int((xi_end - tau) * 50))
    xi_ext = np.linspace(tau, xi_end, n_ext)
    decay = np.exp(c * (tau - xi_ext))
    eta_ext = eta_tau + (v_tau / c) * (1.0 - decay)
    v_ext = v_tau * decay
    zeros = np.zeros_like(xi_ext)

    keep = profile.xi < tau
    return Profile(
        xi=np.concatenate([profile.xi[keep], xi_ext]),
        eta=np.concatenate([profile.eta[keep], eta_ext]),
        eta_prime=np.concatenate([profile.eta_prime[keep], v_ext]),
        beta=np.concatenate([profile.beta[keep], zeros]),
        beta_prime=np.concatenate([profile.beta_prime[keep], zeros]),
        flux=np.concatenate([profile.flux[keep], zeros]),
        tau=tau,
        classification=profile.classification,
    )
