"""Closed-form decay rates, ratio bounds and speed bounds of the wave system.

All quantities are exact algebraic functions of the wave speed c and the
bacterial diffusion coefficient D; no integration is involved.  They pin the
left-tail asymptotics of the front and bracket the threshold speed.
"""
from __future__ import annotations

import math

from .types import DomainError

__all__ = [
    "decay_rate",
    "lower_ratio",
    "speed_lower_bound",
    "speed_upper_bound",
    "beta_lower_bound",
]


def decay_rate(c: float, beta0: float = 1.0) -> float:
    """Exponential growth rate of the nutrient tail, 2*b0/(c + sqrt(c^2+4*b0)).

    With ``beta0=1`` this is the exact rate at the left equilibrium: the
    unique positive root of r^2 + c*r - 1 = 0.  For ``beta0 < 1`` it is the
    slower rate obtained when the consumption level is frozen at beta0; it
    increases monotonically in beta0.
    """
    if not (c > 0.0 and math.isfinite(c)):
        raise DomainError(f"speed c must be positive, got {c}")
    if not (0.0 < beta0 <= 1.0):
        raise DomainError(f"beta0 must lie in (0, 1], got {beta0}")
    return 2.0 * beta0 / (c + math.sqrt(c * c + 4.0 * beta0))


def lower_ratio(c: float) -> float:
    """Limit slope of eta against (1 - beta) in the left tail.

    Equals (c^2 + c*sqrt(c^2+4)) / (2 + c^2 + c*sqrt(c^2+4)), which is also
    c / (c + decay_rate(c)); every front satisfies eta >= lower_ratio(c)*(1-beta)
    pointwise.  Strictly increasing in c, with values in (0, 1).
    """
    if not (c > 0.0 and math.isfinite(c)):
        raise DomainError(f"speed c must be positive, got {c}")
    num = c * c + c * math.sqrt(c * c + 4.0)
    return num / (2.0 + num)


def speed_lower_bound(D: float) -> float:
    """Every admissible wave speed exceeds max(0, sqrt(D/15) - 1)."""
    if not (D > 0.0 and math.isfinite(D)):
        raise DomainError(f"D must be positive, got {D}")
    return max(0.0, math.sqrt(D / 15.0) - 1.0)


def speed_upper_bound(D: float) -> float:
    """The threshold speed is at most 2*sqrt(D*e^D).

    Computed as 2*sqrt(D)*e^(D/2) to postpone overflow; raises for D large
    enough that even that form cannot be represented.
    """
    if not (D > 0.0 and math.isfinite(D)):
        raise DomainError(f"D must be positive, got {D}")
    if D / 2.0 > 700.0:
        raise OverflowError(f"2*sqrt(D*e^D) overflows double precision for D={D}")
    return 2.0 * math.sqrt(D) * math.exp(D / 2.0)


def beta_lower_bound(c: float, eta0: float) -> float:
    """Floor for the bacterial level at xi=0 given the normalization eta(0)=eta0.

    Returns kappa = 1 - eta0*(c + decay_rate(c))/c, valid (positive) only for
    eta0 below c/(c + decay_rate(c)) = lower_ratio(c).
    """
    s2 = decay_rate(c)
    if not (0.0 < eta0 < c / (c + s2)):
        raise DomainError(
            f"eta0 must lie in (0, {c / (c + s2):.6g}) for kappa > 0, got {eta0}"
        )
    return 1.0 - eta0 * (c + s2) / c
