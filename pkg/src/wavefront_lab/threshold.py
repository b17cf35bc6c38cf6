"""Threshold speed machinery: the scalar auxiliary problem and the bracket.

The auxiliary problem

    dw/dbeta = -sigma - g(beta)/w,   w < 0 on (0, 2),   w(0) = w(2) = 0,

with g(s) = D*e^D*s^2 on [0, 1], admits a solution exactly for sigma at or
above a positive threshold; that threshold certifies the upper endpoint of
the wave-speed bracket.  The bracket itself is found by bisection on the
phase-plane front witness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .phaseplane import PhasePath, front_flux_tol, integrate_z
from .rates import speed_lower_bound, speed_upper_bound
from .types import (
    BisectionError,
    DomainError,
    FrontClassification,
    FrontKind,
    Params,
    SingularStall,
    SpeedBracket,
    ToleranceSet,
)

__all__ = [
    "AuxReaction",
    "AuxSolution",
    "aux_reaction",
    "solve_aux",
    "find_aux_threshold",
    "classify_speed",
    "find_threshold_bracket",
]

AUX_BETA_FLOOR = 1e-8
AUX_LAUNCH_DELTA = 1e-6


def aux_reaction(s: float, D: float) -> float:
    """Comparison reaction g on [0, 2]: D*e^D*s^2 up to 1, then D*e^D*s*(2-s).

    The second branch is the simplest continuous choice with g(2) = 0 and
    0 < g(s)/s < D*e^D on (1, 2).
    """
    if not (D > 0.0):
        raise DomainError("D must be positive")
    if not (0.0 <= s <= 2.0):
        raise DomainError(f"aux reaction argument must lie in [0, 2], got {s}")
    amp = D * math.exp(D)
    if s <= 1.0:
        return amp * s * s
    return amp * s * (2.0 - s)


@dataclass(frozen=True)
class AuxReaction:
    """Evaluation rule for the comparison reaction at fixed D."""

    D: float

    def __post_init__(self):
        if not (self.D > 0.0 and math.isfinite(self.D)):
            raise DomainError("D must be positive")

    def __call__(self, s):
        amp = self.D * math.exp(self.D)
        s = np.asarray(s, dtype=float)
        if np.any((s < -1e-12) | (s > 2.0 + 1e-12)):
            raise DomainError("aux reaction argument must lie in [0, 2]")
        s = np.clip(s, 0.0, 2.0)
        return np.where(s <= 1.0, amp * s * s, amp * s * (2.0 - s))

    @property
    def amplitude(self) -> float:
        return self.D * math.exp(self.D)


@dataclass
class AuxSolution:
    """Shot of the auxiliary problem at one sigma, with endpoint estimates.

    ``exists`` records whether the trajectory lands at w(0+) = 0 within
    tolerance; otherwise w(0+) < 0 strictly and the problem has no solution
    at this sigma.  ``slope_at_zero`` is dw/dbeta at 0+: 0 above the
    threshold, -sigma at and below it.
    """

    sigma: float
    beta: np.ndarray          # decreasing from ~2 to ~0
    w: np.ndarray
    slope_at_zero: float
    w_at_zero: float
    exists: bool


def _aux_exists_tol(sigma: float, gspec: AuxReaction) -> float:
    # Witness scale: |w| ~ sqrt(amplitude); keep the tolerance far below
    # genuine failures yet far above integration error.
    return 1e-7 * (1.0 + sigma + math.sqrt(gspec.amplitude))


def solve_aux(
    sigma: float,
    gspec: AuxReaction,
    beta_floor: float = AUX_BETA_FLOOR,
    n_samples: int = 1601,
) -> AuxSolution:
    """Shoot the auxiliary problem from beta = 2 toward 0.

    The unique branch entering w < 0 at the right endpoint leaves with slope
    -a where a is the positive root of a^2 + sigma*a - 2*D*e^D = 0 (obtained
    by balancing dw/dbeta = -sigma - g/w against g ~ 2*D*e^D*(2-beta)).
    """
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise DomainError("sigma must be positive")
    amp = gspec.amplitude
    a = 0.5 * (-sigma + math.sqrt(sigma * sigma + 8.0 * amp))
    delta = AUX_LAUNCH_DELTA
    w0 = -a * delta

    def ode(beta, y):
        return (-sigma - gspec(beta) / y[0],)

    # max_step keeps the dense-output error at the level of the step error,
    # so the returned samples satisfy the defining equation to ~1e-8.
    sol = solve_ivp(
        ode,
        (2.0 - delta, beta_floor),
        (w0,),
        method="Radau",
        dense_output=True,
        rtol=1e-12,
        atol=(1e-60,),
        max_step=0.01,
    )
    if sol.status != 0:
        raise SingularStall(f"aux integration stalled: {sol.message}", sol)

    beta_grid = np.unique(
        np.concatenate(
            [
                np.linspace(2.0 - delta, 0.05, n_samples - n_samples // 3),
                np.geomspace(0.05, beta_floor, n_samples // 3),
            ]
        )
    )[::-1]
    w = sol.sol(beta_grid)[0]

    win = np.geomspace(max(1e3 * beta_floor, 1e-5), beta_floor, 48)
    ww = sol.sol(win)[0]
    scale = win.max()
    coeff = np.polynomial.polynomial.polyfit(win / scale, ww, 2)
    w_at_zero = float(coeff[0])
    slope_at_zero = float(coeff[1] / scale)

    return AuxSolution(
        sigma=sigma,
        beta=beta_grid,
        w=w,
        slope_at_zero=slope_at_zero,
        w_at_zero=w_at_zero,
        exists=abs(w_at_zero) <= _aux_exists_tol(sigma, gspec),
    )


def find_aux_threshold(
    gspec: AuxReaction, tol: float = 1e-6
) -> tuple[float, AuxSolution, AuxSolution]:
    """Bisect for the smallest sigma at which the auxiliary problem solves.

    Returns (sigma_star, last failing shot, certified existing shot); the
    returned sigma_star is the existing-side endpoint, so it is always an
    admissible speed.  The failing shot carries the -sigma endpoint slope
    that certifies the dichotomy.
    """
    if not (tol > 0.0):
        raise DomainError("tol must be positive")
    hi = 2.0 * math.sqrt(gspec.amplitude)
    sol_hi = solve_aux(hi, gspec)
    if not sol_hi.exists:
        raise BisectionError(
            f"auxiliary problem unsolvable at its certified bound {hi:.6g}",
            witnesses=(sol_hi,),
        )
    lo = min(0.01, 0.01 * hi)
    sol_lo = solve_aux(lo, gspec)
    shrink = 0
    while sol_lo.exists and shrink < 4:
        lo *= 0.1
        sol_lo = solve_aux(lo, gspec)
        shrink += 1
    if sol_lo.exists:
        raise BisectionError(
            f"auxiliary problem solvable down to sigma={lo:.3g}; no threshold",
            witnesses=(sol_lo, sol_hi),
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution exhausted
            break
        sol_mid = solve_aux(mid, gspec)
        if sol_mid.exists:
            hi, sol_hi = mid, sol_mid
        else:
            lo, sol_lo = mid, sol_mid
    # Dichotomy certificate: the failing side lands with slope -sigma.
    if abs(sol_lo.slope_at_zero + sol_lo.sigma) > 0.05 * sol_lo.sigma:
        raise BisectionError(
            "below-threshold aux slope is not -sigma; predicate unreliable",
            witnesses=(sol_lo, sol_hi),
        )
    return hi, sol_lo, sol_hi


def _phase_witness(path: PhasePath, params: Params) -> FrontClassification:
    """Map a phase-path outcome onto a front classification record."""
    c = params.c
    eta_end = path.eta_at_zero()
    slope_beta = path.slope_at_zero / (params.D * eta_end)
    if path.is_front(c):
        sharp_scale = c / (params.D * eta_end)
        if abs(slope_beta) >= 0.5 * sharp_scale:
            kind = FrontKind.SHARP
        else:
            kind = FrontKind.CLASSICAL
    else:
        kind = FrontKind.FAILED
    return FrontClassification(
        kind=kind, limit_slope=slope_beta, limit_flux=path.flux_at_zero
    )


def classify_speed(D: float, c: float, tol: ToleranceSet | None = None) -> tuple[bool, PhasePath]:
    """Front-existence predicate at one speed via the phase-plane witness."""
    params = Params(D=D, c=c, tol=tol or ToleranceSet())
    path = integrate_z(params)
    return path.is_front(c), path


def find_threshold_bracket(
    D: float,
    tol: float = 1e-3,
    sigma_star: float | None = None,
    tolerances: ToleranceSet | None = None,
) -> SpeedBracket:
    """Bracket the minimal front speed by bisection on the phase witness.

    The initial bracket is [max(analytic lower bound, probe floor),
    min(aux threshold, analytic upper bound)].  When the lower endpoint
    already carries a front (observed for D up to ~1: fronts persist to
    arbitrarily small speeds, consistent with the analytic lower bound
    degenerating to 0 for D <= 15), the measured threshold lies below the
    probe floor; the returned bracket hugs the floor and its lower witness
    is a front, which callers must treat as "threshold below resolution".
    """
    if not (D > 0.0 and math.isfinite(D)):
        raise DomainError("D must be positive")
    if not (tol > 0.0):
        raise DomainError("tol must be positive")
    tolerances = tolerances or ToleranceSet()

    if sigma_star is None:
        sigma_star, _, _ = find_aux_threshold(AuxReaction(D), tol=min(tol, 1e-4))

    floor = max(1e-4, min(tol, 1e-3))
    lo = max(speed_lower_bound(D), floor)

    # The certified endpoint sigma_star can sit far above the largest speed
    # whose phase path is resolvable in doubles (the z right-hand side loses
    # the nullcline below roundoff once eps*c ~ D/c); shrink geometrically
    # until classification succeeds.  Every front speed works as an upper
    # bisection endpoint.
    hi = min(sigma_star, speed_upper_bound(D))
    iterations = 0
    front_hi, path_hi = False, None
    while hi > 2.0 * lo:
        try:
            front_hi, path_hi = classify_speed(D, hi, tolerances)
        except SingularStall:
            hi *= 0.25
            continue
        iterations += 1
        break
    if path_hi is None:
        raise BisectionError(
            f"no classifiable speed at or below sigma_star={sigma_star:.6g}"
        )
    if not front_hi:
        raise BisectionError(
            f"no front at the certified upper endpoint c={hi:.6g} (D={D})",
            witnesses=(_phase_witness(path_hi, Params(D=D, c=hi)),),
        )

    front_lo, path_lo = classify_speed(D, lo, tolerances)
    iterations += 1

    if front_lo:
        # Threshold below resolution: certify fronts down to the floor.
        hi_deg = lo + tol
        front_hi2, path_hi2 = classify_speed(D, hi_deg, tolerances)
        iterations += 1
        if not front_hi2:
            raise BisectionError(
                "non-monotone witness just above the probe floor",
                witnesses=(
                    _phase_witness(path_lo, Params(D=D, c=lo)),
                    _phase_witness(path_hi2, Params(D=D, c=hi_deg)),
                ),
            )
        return SpeedBracket(
            c_lo=lo,
            c_hi=hi_deg,
            iterations=iterations,
            witness_lo=_phase_witness(path_lo, Params(D=D, c=lo)),
            witness_hi=_phase_witness(path_hi2, Params(D=D, c=hi_deg)),
        )

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # float resolution exhausted
            break
        front_mid, path_mid = classify_speed(D, mid, tolerances)
        iterations += 1
        if front_mid:
            hi, path_hi = mid, path_mid
        else:
            lo, path_lo = mid, path_mid

    return SpeedBracket(
        c_lo=lo,
        c_hi=hi,
        iterations=iterations,
        witness_lo=_phase_witness(path_lo, Params(D=D, c=lo)),
        witness_hi=_phase_witness(path_hi, Params(D=D, c=hi)),
    )
