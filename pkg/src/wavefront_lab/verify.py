"""Single-pass verification of computed profiles against the analytic facts.

Every check is a deterministic numerical assertion evaluated on the profile
samples: monotonicity, pointwise bounds, left-tail decay rates, the speed
identity c = integral of eta*beta, and the two flux-energy identities.
Integrals are completed with analytic exponential tails on both sides so
that the truncation horizon does not bias them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rates import decay_rate, lower_ratio, speed_lower_bound
from .types import FrontKind, Params, Profile

__all__ = [
    "CoverageError",
    "CheckEntry",
    "CheckReport",
    "profile_integrals",
    "verify_profile",
]


class CoverageError(ValueError):
    """Profile sampling too sparse or too narrow to evaluate the suite."""


@dataclass(frozen=True)
class CheckEntry:
    check_id: str
    description: str
    measured: float
    bound: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "description": self.description,
            "measured": self.measured,
            "bound": self.bound,
            "passed": self.passed,
        }


@dataclass
class CheckReport:
    entries: list[CheckEntry] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(e.passed for e in self.entries)

    def entry(self, check_id: str) -> CheckEntry:
        for e in self.entries:
            if e.check_id == check_id:
                return e
        raise KeyError(check_id)

    def as_dict(self) -> dict:
        return {
            "overall": self.overall,
            "entries": [e.as_dict() for e in self.entries],
        }


def _left_tail_rate(profile: Profile) -> float:
    """Empirical decay rate of eta over the first stretch of samples."""
    eta = profile.eta
    k = max(8, int(np.searchsorted(eta, 10.0 * eta[0])))
    k = min(k, eta.size - 1)
    return float(
        (math.log(eta[k]) - math.log(eta[0])) / (profile.xi[k] - profile.xi[0])
    )


def _right_tail_rate(profile: Profile) -> float:
    """Empirical decay rate of beta over the last decade of samples."""
    beta, xi = profile.beta, profile.xi
    pos = beta > 0.0
    b, x = beta[pos], xi[pos]
    j = np.searchsorted(-b, -10.0 * b[-1])
    j = min(max(0, j), b.size - 2)
    return float((math.log(b[j]) - math.log(b[-1])) / (x[-1] - x[j]))


def profile_integrals(profile: Profile, params: Params) -> dict:
    """Trapezoid quadrature of the identity integrands with analytic tails.

    Left tails use the exponential launch asymptotics (eta ~ e^{s2*xi},
    beta ~ 1, flux ~ -(D/c)*eta^2); the right tail of a classical run uses
    the measured geometric decay of beta.  Returns the four integrals used
    by the speed and energy identities.
    """
    c, D = params.c, params.D
    xi = profile.xi
    eta, beta, bp = profile.eta, profile.beta, profile.beta_prime

    speed = float(np.trapezoid(eta * beta, xi))
    beta_sq = float(np.trapezoid(eta * beta * beta, xi))
    e_diss = float(np.trapezoid(D * eta * beta * bp * bp, xi))
    e_flux = float(np.trapezoid(D * bp * eta * eta * beta * beta, xi))

    s2 = decay_rate(c)
    eta_f = float(eta[0])
    speed += eta_f / s2
    beta_sq += eta_f / s2
    e_diss += (D / (c * c)) * eta_f**3 / (3.0 * s2)
    e_flux += -(D / c) * eta_f**3 / (3.0 * s2)

    if not math.isfinite(profile.tau) and profile.beta[-1] > 0.0:
        r = _right_tail_rate(profile)
        if r > 0.0:
            eta_e, beta_e = float(eta[-1]), float(beta[-1])
            speed += eta_e * beta_e / r
            beta_sq += eta_e * beta_e * beta_e / (2.0 * r)

    return {
        "speed": speed,
        "eta_beta_sq": beta_sq,
        "dissipation": e_diss,
        "flux_energy": e_flux,
    }


def verify_profile(profile: Profile, params: Params) -> CheckReport:
    """Evaluate every applicable invariant on a computed profile.

    Front-only identities (speed, energy, pointwise wavefront bounds) are
    evaluated only on classical/sharp runs; structural checks (monotonicity,
    first integral, flux consistency, endpoint bound on eta) apply to every
    run including failed connections.
    """
    c, D = params.c, params.D
    kind = profile.classification.kind
    is_front = profile.classification.is_front()

    pos = profile.beta > 0.0
    span_lo = float(profile.beta[pos].min()) if pos.any() else 1.0
    span_hi = float(profile.beta.max())
    if len(profile) < 100 or span_hi < 0.99 or (is_front and span_lo > 0.01):
        raise CoverageError(
            f"need >= 100 samples spanning beta in [0.01, 0.99]; got "
            f"{len(profile)} samples on [{span_lo:.3g}, {span_hi:.3g}]"
        )

    report = CheckReport()
    add = report.entries.append

    # Structural checks (every run).
    eta_viol = int(np.sum(np.diff(profile.eta) < 0.0))
    add(CheckEntry("eta_monotone", "eta nondecreasing along samples",
                   float(eta_viol), 0.0, eta_viol == 0))
    b = profile.beta[pos]
    beta_viol = int(np.sum(np.diff(b) >= 0.0))
    add(CheckEntry("beta_monotone", "beta strictly decreasing while positive",
                   float(beta_viol), 0.0, beta_viol == 0))

    fi = np.abs(
        D * profile.eta * profile.beta * profile.beta_prime
        + c * (profile.beta - 1.0)
        + profile.eta_prime
        + c * profile.eta
    )
    fi_bound = 1e-9 * (1.0 + c)
    add(CheckEntry("first_integral", "conserved flux relation residual",
                   float(fi.max()), fi_bound, bool(fi.max() <= fi_bound)))

    recon = D * profile.eta * profile.beta * profile.beta_prime
    scale = np.maximum(np.abs(profile.flux), 1e-300)
    flux_rel = float((np.abs(recon - profile.flux) / scale).max())
    add(CheckEntry("flux_consistency", "flux equals D*eta*beta*beta'",
                   flux_rel, 1e-12, flux_rel <= 1e-12))

    if math.isfinite(profile.tau):
        eta_tau = profile.eta_at_tau()
        bound = math.sqrt(math.exp(min(D, 600.0))) + 1e-6
        add(CheckEntry("eta_tau_bound", "eta(tau-) <= sqrt(e^D)",
                       eta_tau, bound, eta_tau <= bound))

    # Left-tail rates against the closed forms.
    s2 = decay_rate(c)
    invL = 1.0 / lower_ratio(c)
    first = profile.eta <= 10.0 * profile.eta[0]
    if first.sum() >= 4:
        ratio_v = profile.eta_prime[first] / profile.eta[first]
        ratio_b = (1.0 - profile.beta[first]) / profile.eta[first]
        err_v = float(np.abs(ratio_v / s2 - 1.0).max())
        err_b = float(np.abs(ratio_b / invL - 1.0).max())
        add(CheckEntry("left_rate_eta", "eta'/eta matches the decay rate",
                       err_v, 1e-2, err_v <= 1e-2))
        add(CheckEntry("left_rate_beta", "(1-beta)/eta matches 1/lower_ratio",
                       err_b, 1e-2, err_b <= 1e-2))

    if is_front:
        eta_min, eta_max = float(profile.eta.min()), float(profile.eta.max())
        ok = eta_min > 0.0 and eta_max < 1.0 + 1e-12
        add(CheckEntry("eta_in_unit", "0 < eta < 1 on front profiles",
                       eta_max, 1.0, ok))
        vmax = float(profile.eta_prime.max())
        vmin = float(profile.eta_prime.min())
        add(CheckEntry("eta_prime_in_range", "0 < eta' < c on front profiles",
                       vmax, c, vmin > 0.0 and vmax < c))
        lb = float((profile.eta - lower_ratio(c) * (1.0 - profile.beta)).min())
        add(CheckEntry("ratio_lower_bound", "eta >= lower_ratio*(1-beta)",
                       lb, -1e-8, lb >= -1e-8))
        clb = speed_lower_bound(D)
        add(CheckEntry("speed_above_bound", "front speed above analytic bound",
                       c - clb, 0.0, c > clb))

        integ = profile_integrals(profile, params)
        speed_err = abs(c - integ["speed"]) / c
        add(CheckEntry("speed_identity", "c equals integral of eta*beta",
                       speed_err, 1e-3, speed_err <= 1e-3))
        est1 = abs(integ["eta_beta_sq"] - 0.5 * c - integ["dissipation"]) / c
        add(CheckEntry("energy_balance", "dissipation balances eta*beta^2 mass",
                       est1, 1e-3, est1 <= 1e-3))
        est2 = abs(c * integ["dissipation"] + integ["flux_energy"]) / c
        add(CheckEntry("flux_energy_balance", "flux-weighted energy identity",
                       est2, 1e-3, est2 <= 1e-3))
        est21 = integ["dissipation"]
        add(CheckEntry("dissipation_cap", "dissipation at most c/2",
                       est21, 0.5 * c + 1e-6, est21 <= 0.5 * c + 1e-6))

    ftol = params.tol.flux_tol * c
    lf = profile.classification.limit_flux
    if is_front:
        add(CheckEntry("limit_flux_zero", "endpoint flux vanishes on fronts",
                       abs(lf), ftol, abs(lf) <= ftol))
    else:
        add(CheckEntry("limit_flux_negative", "failed run has negative flux",
                       lf, -ftol, lf < -ftol))

    if kind is FrontKind.SHARP:
        eta_tau = profile.eta_at_tau()
        target = c / (D * eta_tau)
        slope_err = abs(profile.classification.limit_slope + target) / target
        add(CheckEntry("sharp_corner_slope", "corner slope is -c/(D*eta(tau))",
                       slope_err, 5e-2, slope_err <= 5e-2))
    elif kind is FrontKind.CLASSICAL:
        # Normalized against the sharp-corner alternative c/(D*eta_end).
        eta_end = float(profile.eta[-1]) if profile.beta[-1] > 0 else profile.eta_at_tau()
        rel = abs(profile.classification.limit_slope) * D * eta_end / c
        add(CheckEntry("classical_slope_zero", "endpoint beta-slope vanishes",
                       rel, 1e-3, rel <= 1e-3))

    return report
