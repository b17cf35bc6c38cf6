"""Shared value types: run parameters, tolerances, profiles, classifications."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class DomainError(ValueError):
    """A parameter is outside the admissible range of an operation."""


class SingularStall(RuntimeError):
    """Adaptive stepping underflowed near the degenerate endpoint.

    Carries the last accepted state so callers can diagnose the run.
    """

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class BisectionError(RuntimeError):
    """Bisection endpoints do not witness the expected dichotomy."""

    def __init__(self, message: str, witnesses=None):
        super().__init__(message)
        self.witnesses = witnesses


class ConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge; keeps the residual history."""

    def __init__(self, message: str, history=None):
        super().__init__(message)
        self.history = history


@dataclass(frozen=True)
class ToleranceSet:
    """Solver tolerances threaded through every integration.

    Defaults are chosen so that verification-suite tolerances are dominated
    by truncation (domain horizon, launch amplitude), not integration error.
    """

    ode_rtol: float = 1e-10
    ode_atol: float = 1e-12
    event_tol: float = 1e-10      # localization of the beta-zero crossing
    flux_tol: float = 1e-6        # classification threshold on the limit flux

    def validate(self) -> None:
        for name in ("ode_rtol", "ode_atol", "event_tol", "flux_tol"):
            if getattr(self, name) <= 0.0:
                raise DomainError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class Params:
    """Physical and control parameters of one run: diffusion D and speed c."""

    D: float
    c: float
    tol: ToleranceSet = field(default_factory=ToleranceSet)

    def __post_init__(self):
        if not (self.D > 0.0 and math.isfinite(self.D)):
            raise DomainError(f"D must be a positive finite real, got {self.D}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise DomainError(f"c must be a positive finite real, got {self.c}")
        self.tol.validate()


class FrontKind(str, Enum):
    CLASSICAL = "classical"
    SHARP = "sharp"
    FAILED = "failed_connection"


@dataclass(frozen=True)
class FrontClassification:
    """Outcome of a profile run: kind plus the measured endpoint limits.

    ``limit_slope`` is the measured beta-derivative approaching the support
    endpoint, ``limit_flux`` the measured degenerate flux there.  A sharp
    front has flux ~ 0 with slope ~ -c/(D*eta_end); a classical front has
    slope ~ 0; a failed connection has strictly negative limit flux.
    """

    kind: FrontKind
    limit_slope: float
    limit_flux: float

    def is_front(self) -> bool:
        return self.kind in (FrontKind.CLASSICAL, FrontKind.SHARP)


@dataclass
class Profile:
    """A sampled wavefront trajectory in the traveling coordinate xi.

    Arrays are aligned samples of (xi, eta, eta', beta, beta', flux) with
    flux = D*eta*beta*beta'. ``tau`` is the finite support endpoint of beta
    (math.inf when beta stays positive), after the same shift normalization
    applied to xi.
    """

    xi: np.ndarray
    eta: np.ndarray
    eta_prime: np.ndarray
    beta: np.ndarray
    beta_prime: np.ndarray
    flux: np.ndarray
    tau: float
    classification: FrontClassification

    def __len__(self) -> int:
        return self.xi.size

    def eta_at_tau(self) -> float:
        """eta at the last sample with positive beta (~ eta(tau-))."""
        pos = self.beta > 0.0
        if not pos.any():
            return float(self.eta[0])
        return float(self.eta[np.flatnonzero(pos)[-1]])

    def eta_limit_right(self) -> float:
        """Extrapolated eta(+inf) from the exponential tail eta''+c*eta'~0."""
        return float(self.eta[-1])

    def validate(self, params: Params) -> None:
        """Structural invariants; raises AssertionError on violation."""
        if np.any(np.diff(self.xi) <= 0.0):
            raise AssertionError("xi samples must be strictly increasing")
        if np.any(np.diff(self.eta) < 0.0):
            raise AssertionError("eta must be nondecreasing along samples")
        pos = self.beta > 0.0
        if np.any(np.diff(self.beta[pos]) >= 0.0):
            raise AssertionError("beta must be strictly decreasing while positive")
        if np.any(self.eta <= 0.0):
            raise AssertionError("eta must stay positive")
        if np.any(self.beta > 1.0 + 1e-12):
            raise AssertionError("beta must not exceed 1")
        recon = params.D * self.eta * self.beta * self.beta_prime
        scale = np.maximum(np.abs(self.flux), 1e-300)
        bad = np.abs(recon - self.flux) > 1e-12 * scale + 1e-300
        if bad.any():
            raise AssertionError("flux samples inconsistent with D*eta*beta*beta'")


@dataclass(frozen=True)
class SpeedBracket:
    """Certified interval around the threshold speed with endpoint witnesses."""

    c_lo: float
    c_hi: float
    iterations: int
    witness_lo: FrontClassification
    witness_hi: FrontClassification

    def __post_init__(self):
        if not self.c_lo < self.c_hi:
            raise DomainError("bracket requires c_lo < c_hi")

    @property
    def width(self) -> float:
        return self.c_hi - self.c_lo
