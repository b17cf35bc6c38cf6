import numpy as np
import pytest

from wavefront_lab import DomainError, Params
from wavefront_lab.rates import beta_lower_bound, decay_rate
from wavefront_lab.semiwave import (
    BetaCandidate,
    shoot_beta0,
    solve_eta_bvp,
    solve_left_semiwavefront,
)


def _grid(c, n=40000):
    X = 100.0 / decay_rate(c)
    return np.linspace(-X, 0.0, n)


def test_bvp_constant_full_consumption():
    # beta == 1: upper and lower comparison functions coincide, so the
    # solution is exactly eta0 * exp(decay_rate * xi).
    c, eta0 = 1.5, 0.3
    xi = _grid(c)
    cand = BetaCandidate(xi=xi, values=np.ones_like(xi), kappa=0.1)
    sol = solve_eta_bvp(cand, c, eta0)
    s2 = decay_rate(c)
    assert abs(sol.ratio0() - s2) <= 1e-8
    exact = eta0 * np.exp(s2 * xi)
    assert np.abs(sol.eta - exact).max() <= 1e-8 * eta0


def test_bvp_constant_partial_consumption():
    # beta == M: exponential with the frozen rate 2M/(c + sqrt(c^2+4M)).
    c, eta0, M = 1.5, 0.3, 0.25
    xi = _grid(c)
    cand = BetaCandidate(xi=xi, values=np.full_like(xi, M), kappa=0.1)
    sol = solve_eta_bvp(cand, c, eta0)
    nu = decay_rate(c, M)
    assert nu == pytest.approx(0.5 / (1.5 + np.sqrt(3.25)), rel=1e-14)
    assert abs(sol.ratio0() - nu) <= 1e-8
    exact = eta0 * np.exp(nu * xi)
    assert np.abs(sol.eta - exact).max() <= 1e-7 * eta0


def test_bvp_ratio_window_for_varying_candidate():
    c, eta0 = 2.0, 0.4
    xi = _grid(c)
    kappa = beta_lower_bound(c, eta0)
    values = np.clip(1.0 - 0.2 * np.exp(0.3 * xi), kappa, 1.0)
    cand = BetaCandidate(xi=xi, values=values, kappa=kappa)
    sol = solve_eta_bvp(cand, c, eta0)
    lo = decay_rate(c, float(values.min()))
    hi = decay_rate(c)
    assert lo - 1e-8 <= sol.ratio0() <= hi + 1e-8
    # comparison bracket with the frozen extreme rates
    upper = eta0 * np.exp(lo * xi)   # slow decay rate bounds from above
    lower = eta0 * np.exp(hi * xi)
    assert np.all(sol.eta <= upper * (1.0 + 1e-9) + 1e-300)
    assert np.all(sol.eta >= lower * (1.0 - 1e-9) - 1e-300)


def test_candidate_bounds_enforced():
    xi = np.linspace(-10.0, 0.0, 100)
    with pytest.raises(DomainError):
        BetaCandidate(xi=xi, values=np.full_like(xi, 1.5), kappa=0.1)
    with pytest.raises(DomainError):
        BetaCandidate(xi=xi, values=np.full_like(xi, 0.05), kappa=0.1)


def test_first_map_application_stays_in_bounds():
    # One application of candidate -> bacteria from the constant candidate 1.
    params = Params(D=1.0, c=4.0)
    c, eta0 = params.c, 0.4
    kappa = beta_lower_bound(c, eta0)
    xi = _grid(c, 60000)
    cand = BetaCandidate(xi=xi, values=np.ones_like(xi), kappa=kappa)
    eta_sol = solve_eta_bvp(cand, c, eta0)
    alpha, y = shoot_beta0(eta_sol, params, kappa)
    assert kappa < alpha < 1.0
    assert np.all(y >= kappa - 1e-9) and np.all(y <= 1.0 + 1e-12)
    assert np.all(np.diff(y) <= 1e-12)          # nonincreasing in xi
    assert abs(y[0] - 1.0) <= 1e-3              # left end pinned at 1
    assert y[-1] == pytest.approx(alpha, abs=1e-6)
    # derivative bound: 0 < -y' < (s2 + c)/(D*kappa*e^{s2*xi})
    s2 = decay_rate(c)
    dy = np.gradient(y, xi)
    cap = (s2 + c) / (params.D * kappa * np.exp(s2 * xi))
    interior = slice(10, -1)
    assert np.all(dy[interior] <= 1e-12)
    assert np.all(-dy[interior] <= cap[interior] * (1.0 + 1e-6) + 1e-12)


def test_fixed_point_structure(semiwave_1_4):
    res = semiwave_1_4
    assert res.iterations <= 40
    assert res.residuals[-1] <= 1e-8
    # kappa floor from the normalization (strictly below beta(0))
    assert res.beta[-1] > res.kappa
    # conserved flux relation holds by construction at the fixed point
    c, D = 4.0, 1.0
    res_fi = np.abs(
        D * res.eta * res.beta * res.beta_prime + c * (res.beta - 1.0)
        + res.eta_prime + c * res.eta
    )
    assert res_fi.max() <= 1e-9
    assert np.all(np.diff(res.beta) <= 1e-12)
    assert np.all(res.eta_prime > 0.0)


def test_fixed_point_matches_shooting(prof_1_4, semiwave_1_4):
    res = semiwave_1_4
    lo = max(res.xi[0], prof_1_4.xi[0])
    grid = np.linspace(lo, 0.0, 4000)
    db = np.interp(grid, prof_1_4.xi, prof_1_4.beta) - np.interp(grid, res.xi, res.beta)
    de = np.interp(grid, prof_1_4.xi, prof_1_4.eta) - np.interp(grid, res.xi, res.eta)
    assert np.abs(db).max() <= 1e-3
    assert np.abs(de).max() <= 1e-3


def test_eta0_domain():
    with pytest.raises(DomainError):
        solve_left_semiwavefront(Params(D=1.0, c=1.5), eta0=0.8)
