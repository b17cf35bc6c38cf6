"""Phase-plane integration of the front parameterized by the bacteria level.

On the monotone part of the front, beta serves as independent variable and
the degenerate flux z(beta) = D*N(beta)*beta*beta' satisfies

    dz/dbeta = -c - D*N(beta)^2*beta^2 / z(beta),  z < 0 on (0, 1),

with z(1) = 0 at the launch equilibrium.  The sign of the extrapolated
endpoint value z(0+) is the front-existence witness: z(0+) = 0 for a
connecting front (classical slope 0, sharp slope -c), z(0+) < 0 when the
bacteria support collapses with nonzero flux (no front at this speed).

The companions (xi, N, V) = (xi(beta), eta, eta') ride along to make the
path self-contained.  z is integrated as an independent state, never
reconstructed by cancellation, so the endpoint witness stays resolvable far
below roundoff of the first integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .rates import decay_rate, lower_ratio
from .types import DomainError, Params, Profile, SingularStall

__all__ = [
    "PhasePath",
    "ComparisonReport",
    "phase_rhs",
    "integrate_z",
    "profile_to_phase",
    "front_flux_tol",
    "compare_with_aux",
]

BETA_FLOOR = 1e-8
Z_FLOOR = 1e-9
LAUNCH_DELTA = 1e-6
ETA_BLOWUP_MARGIN = 0.5
# Interior z ~ 0 can only be approached below this beta (classical tail);
# the early-collapse event is disarmed there to avoid spurious firing.
Z2_ARM_BETA = 0.02

TERM_FLOOR = "floor"
TERM_EARLY_ZERO = "flux_vanished_interior"
TERM_ETA_CAP = "eta_exceeded_bound"


def front_flux_tol(c: float) -> float:
    """Witness tolerance on |z(0+)| separating fronts from failed runs."""
    return 1e-7 * (1.0 + c)


@dataclass
class PhasePath:
    """beta-parameterized front path with the measured endpoint limits.

    ``beta`` decreases from ~1 toward 0; ``flux`` holds z(beta).
    ``slope_at_zero`` estimates dz/dbeta at 0+ (0 or -c on fronts, exactly
    -c on failed runs); ``flux_at_zero`` the extrapolated z(0+).
    """

    beta: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    flux: np.ndarray
    slope_at_zero: float
    flux_at_zero: float
    termination: str

    def is_front(self, c: float) -> bool:
        return (
            self.termination == TERM_FLOOR
            and abs(self.flux_at_zero) <= front_flux_tol(c)
        )

    def eta_at_zero(self) -> float:
        return float(self.eta[-1])


@dataclass(frozen=True)
class ComparisonReport:
    """Pointwise ordering report between a phase path and an aux solution."""

    beta_grid: np.ndarray
    gap: np.ndarray            # z - w on the grid
    min_gap: float
    argmin_beta: float
    max_flux: float            # max of z on the grid (must stay < 0)
    beta0: float
    holds: bool


def phase_rhs(
    beta: float, state: tuple[float, float, float, float], params: Params
) -> tuple[float, float, float, float]:
    """Derivatives of (xi, N, V, z) with respect to beta.

    Chain rule through d xi/d beta = D*N*beta/z plus the z-equation; requires
    z < 0, N > 0 and beta in (0, 1).
    """
    xi, N, V, z = state
    if z >= 0.0:
        raise DomainError("phase path requires z < 0 away from the endpoints")
    if N <= 0.0 or not (0.0 < beta < 1.0):
        raise DomainError("phase path requires N > 0 and beta in (0, 1)")
    c, D = params.c, params.D
    dxidb = D * N * beta / z
    return (
        dxidb,
        V * dxidb,
        (-c * V + N * beta) * dxidb,
        -c - D * N * N * beta * beta / z,
    )


def _slope_window(beta_floor: float) -> np.ndarray:
    return np.geomspace(max(1e3 * beta_floor, 1e-5), beta_floor, 48)


def _fit_endpoint(bgrid: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """(value, slope) at beta=0 from a quadratic fit on a normalized abscissa."""
    scale = bgrid.max()
    coeff = np.polynomial.polynomial.polyfit(bgrid / scale, values, 2)
    return float(coeff[0]), float(coeff[1] / scale)


def integrate_z(
    params: Params,
    delta: float = LAUNCH_DELTA,
    beta_floor: float = BETA_FLOOR,
    n_samples: int = 2001,
) -> PhasePath:
    """Integrate the phase system from beta = 1 - delta down to the floor.

    The launch sits on the slow manifold leaving (beta, z) = (1, 0):
    N = lower_ratio(c)*delta, V = decay_rate(c)*N and
    z = -(D*lower_ratio(c)^2/c)*delta^2, the second-order flux asymptotics
    (the first-order flux vanishes identically, so it cannot seed z).
    The 1/z relaxation onto the manifold is stiff at both endpoints, hence
    an implicit (Radau) integrator.
    """
    c, D = params.c, params.D
    if not (0.0 < delta < 0.5):
        raise DomainError("launch offset delta must lie in (0, 0.5)")
    if not (0.0 < beta_floor < 1.0 - delta):
        raise DomainError("beta_floor must lie in (0, 1 - delta)")

    L = lower_ratio(c)
    s2 = decay_rate(c)
    N0 = L * delta
    y0 = (0.0, N0, s2 * N0, -(D * L * L / c) * delta * delta)
    eta_cap = math.sqrt(math.exp(min(params.D, 600.0))) + ETA_BLOWUP_MARGIN

    def ode(beta, y):
        _xi, N, V, z = y
        dxidb = D * N * beta / z
        return (dxidb, V * dxidb, (-c * V + N * beta) * dxidb,
                -c - D * N * N * beta * beta / z)

    def ev_early_zero(beta, y):
        # Armed only at order-one beta; below, z ~ -(D/c)*N^2*beta^2 crosses
        # any fixed floor on every classical run.
        ramp = 1e3 * (1.0 + c) * max(0.0, Z2_ARM_BETA - beta)
        return y[3] + Z_FLOOR - ramp

    ev_early_zero.terminal = True
    ev_early_zero.direction = 1.0

    def ev_eta_cap(_beta, y):
        return y[1] - eta_cap

    ev_eta_cap.terminal = True
    ev_eta_cap.direction = 1.0

    # xi rides along for diagnostics only; near the launch its derivative is
    # -c/(L*delta) while its value is ~0, so it gets a loose absolute
    # tolerance of its own lest it throttle the first steps at large c.
    sol = solve_ivp(
        ode,
        (1.0 - delta, beta_floor),
        y0,
        method="Radau",
        dense_output=True,
        rtol=max(params.tol.ode_rtol, 1e-11),
        atol=(1e-6 * (1.0 + c), 1e-14, 1e-14, 1e-60),
        events=(ev_early_zero, ev_eta_cap),
    )
    if sol.status == -1:
        raise SingularStall(f"phase integration stalled: {sol.message}", sol)

    if sol.status == 1:
        termination = (
            TERM_EARLY_ZERO if sol.t_events[0].size else TERM_ETA_CAP
        )
    else:
        termination = TERM_FLOOR
    beta_end = float(sol.t[-1])

    # Log-spaced sampling resolves both the launch corner and the endpoint.
    b_hi = 1.0 - delta
    beta_grid = np.unique(
        np.concatenate(
            [
                np.linspace(b_hi, max(0.05, 2 * beta_end), n_samples // 2),
                np.geomspace(max(0.05, 2 * beta_end), beta_end, n_samples // 2),
                [beta_end],
            ]
        )
    )[::-1]
    beta_grid = beta_grid[beta_grid >= beta_end]
    xi, eta, eta_p, flux = sol.sol(beta_grid)

    if termination == TERM_FLOOR:
        win = _slope_window(beta_floor)
        zw = sol.sol(win)[3]
        flux0, slope0 = _fit_endpoint(win, zw)
    else:
        flux0 = float(flux[-1])
        slope0 = float(flux[-1] / beta_end)

    return PhasePath(
        beta=beta_grid,
        xi=xi,
        eta=eta,
        eta_prime=eta_p,
        flux=flux,
        slope_at_zero=slope0,
        flux_at_zero=flux0,
        termination=termination,
    )


def profile_to_phase(profile: Profile) -> PhasePath:
    """Reparameterize a computed profile by beta (round-trip oracle).

    Keeps the monotone part beta in (0, 1); endpoint estimates are copied
    from the profile classification.
    """
    keep = (profile.beta > 0.0) & (profile.beta < 1.0)
    order = np.argsort(profile.beta[keep])[::-1]
    idx = np.flatnonzero(keep)[order]
    return PhasePath(
        beta=profile.beta[idx],
        xi=profile.xi[idx],
        eta=profile.eta[idx],
        eta_prime=profile.eta_prime[idx],
        flux=profile.flux[idx],
        slope_at_zero=profile.classification.limit_slope,
        flux_at_zero=profile.classification.limit_flux,
        termination=TERM_FLOOR,
    )


def compare_with_aux(path: PhasePath, aux, params: Params) -> ComparisonReport:
    """Check the strict ordering w_aux < z_c < 0 on (0, beta0].

    ``beta0`` is where the path's nutrient level equals mu/(c + decay_rate(c))
    with mu = -max of the aux solution on [1/2, 1]; the comparison grid spans
    [1e-4, beta0] within the overlap of both solutions.
    """
    c = params.c
    in_band = (aux.beta >= 0.5) & (aux.beta <= 1.0)
    if not in_band.any():
        raise DomainError("aux solution must cover beta in [1/2, 1]")
    mu = -float(aux.w[in_band].max())
    if mu <= 0.0:
        raise DomainError("aux solution must be strictly negative on [1/2, 1]")
    eta0 = mu / (c + decay_rate(c))

    # beta0: where the path nutrient level crosses eta0 (eta increases as
    # beta decreases).
    eta_of_beta = path.eta
    if eta0 >= eta_of_beta[-1]:
        beta0 = float(path.beta[-1])
    elif eta0 <= eta_of_beta[0]:
        beta0 = float(path.beta[0])
    else:
        beta0 = float(np.interp(eta0, eta_of_beta, path.beta))

    lo = max(1e-4, float(path.beta[-1]), float(aux.beta.min()))
    if beta0 <= lo:
        grid = np.array([beta0])
    else:
        grid = np.concatenate([np.geomspace(lo, beta0, 400)])

    z_grid = np.interp(grid, path.beta[::-1], path.flux[::-1])
    w_grid = np.interp(grid, aux.beta[::-1], aux.w[::-1])
    gap = z_grid - w_grid
    i = int(np.argmin(gap))
    return ComparisonReport(
        beta_grid=grid,
        gap=gap,
        min_gap=float(gap[i]),
        argmin_beta=float(grid[i]),
        max_flux=float(z_grid.max()),
        beta0=beta0,
        holds=bool(gap.min() > 0.0 and z_grid.max() < 0.0),
    )
