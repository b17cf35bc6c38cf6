import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from wavefront_lab import DomainError, FrontKind, Params, compare_with_aux, integrate_z
from wavefront_lab.rates import speed_lower_bound, speed_upper_bound
from wavefront_lab.threshold import (
    AuxReaction,
    aux_reaction,
    find_aux_threshold,
    find_threshold_bracket,
    solve_aux,
)


def test_aux_reaction_values():
    assert aux_reaction(1.0, 1.0) == pytest.approx(math.e, rel=1e-15)
    assert aux_reaction(2.0, 1.0) == 0.0
    assert aux_reaction(1.5, 1.0) == pytest.approx(0.75 * math.e, rel=1e-15)
    # branch constraint: 0 < g(s)/s < D*e^D on (1, 2)
    for s in np.linspace(1.01, 1.99, 25):
        ratio = aux_reaction(float(s), 1.0) / s
        assert 0.0 < ratio < math.e


def test_aux_reaction_domain():
    with pytest.raises(DomainError):
        aux_reaction(-0.1, 1.0)
    with pytest.raises(DomainError):
        aux_reaction(2.1, 1.0)
    with pytest.raises(DomainError):
        aux_reaction(1.0, 0.0)


def test_aux_reaction_callable_matches_scalar():
    g = AuxReaction(2.0)
    s = np.linspace(0.0, 2.0, 33)
    vec = g(s)
    for i, si in enumerate(s):
        assert vec[i] == pytest.approx(aux_reaction(float(si), 2.0), rel=1e-14)


def test_solve_aux_exists_at_certified_bound():
    g = AuxReaction(1.0)
    sol = solve_aux(2.0 * math.sqrt(math.e), g)
    assert sol.exists
    assert np.all(sol.w < 0.0)


def test_solve_aux_fails_at_tiny_sigma():
    g = AuxReaction(1.0)
    sol = solve_aux(0.01, g)
    assert not sol.exists
    assert sol.w_at_zero < -0.1
    # endpoint slope is exactly -sigma on the failing branch
    assert sol.slope_at_zero == pytest.approx(-0.01, abs=1e-4)


def test_solve_aux_residual():
    # The reaction has a curvature kink at beta = 1 (branch switch), so the
    # solution is only C^1 there; check the defining equation on each smooth
    # branch separately.
    g = AuxReaction(1.0)
    sol = solve_aux(2.5, g)
    beta = sol.beta[::-1]
    w = sol.w[::-1]
    # evaluation windows stay clear of the kink (global-spline ringing) and
    # of the degenerate endpoint, where the 1/w term amplifies any sample
    # error by sigma^2/g ~ 1/beta^2
    for s_lo, s_hi, lo, hi in ((0.03, 0.97, 0.3, 0.9), (1.03, 1.93, 1.1, 1.9)):
        sel = (beta >= s_lo) & (beta <= s_hi)
        spline = CubicSpline(beta[sel], w[sel])
        dspline = spline.derivative()
        grid = np.linspace(lo, hi, 300)
        resid = np.abs(dspline(grid) + 2.5 + g(grid) / spline(grid))
        assert resid.max() <= 1e-8, (lo, hi, resid.max())


def test_find_aux_threshold_d1(aux_threshold_d1):
    _, sigma_star, sol_lo, sol_hi = aux_threshold_d1
    assert 0.0 < sigma_star <= 2.0 * math.sqrt(math.e) + 1e-3
    assert sol_hi.exists and not sol_lo.exists
    # dichotomy: failing side lands with slope -sigma
    assert sol_lo.slope_at_zero == pytest.approx(-sol_lo.sigma, rel=2e-2)


def test_aux_existence_monotone(aux_threshold_d1):
    g, sigma_star, _, _ = aux_threshold_d1
    pattern = [solve_aux(sigma_star + ds, g).exists
               for ds in (-0.3, -0.1, 0.1, 0.3, 0.5)]
    assert pattern == [False, False, True, True, True]


def test_aux_slope_above_threshold(aux_threshold_d1):
    g, sigma_star, _, _ = aux_threshold_d1
    sol = solve_aux(sigma_star + 0.5, g)
    assert sol.exists
    assert abs(sol.slope_at_zero) <= 0.02 * sigma_star


def test_comparison_with_phase_path(aux_threshold_d1):
    _, sigma_star, _, sol_hi = aux_threshold_d1
    for c in (sigma_star, 2.0 * sigma_star):
        params = Params(D=1.0, c=c)
        path = integrate_z(params)
        rep = compare_with_aux(path, sol_hi, params)
        assert rep.holds
        assert rep.min_gap > 0.0
        assert rep.max_flux < 0.0
        assert 0.5 < rep.beta0 < 1.0
    # larger speed separates the curves further at the shared minimum scale
    rep1 = compare_with_aux(integrate_z(Params(D=1.0, c=sigma_star)), sol_hi,
                            Params(D=1.0, c=sigma_star))
    rep2 = compare_with_aux(integrate_z(Params(D=1.0, c=2.0 * sigma_star)), sol_hi,
                            Params(D=1.0, c=2.0 * sigma_star))
    assert rep2.min_gap >= rep1.min_gap - 1e-9


def test_bracket_with_genuine_flip():
    bracket = find_threshold_bracket(2.0, tol=1e-3)
    assert bracket.width <= 1e-3 + 1e-12
    assert bracket.witness_lo.kind is FrontKind.FAILED
    assert bracket.witness_hi.kind is FrontKind.CLASSICAL
    assert speed_lower_bound(2.0) < bracket.c_lo
    assert bracket.c_hi <= speed_upper_bound(2.0)
    # measured location of the flip
    assert 0.48 < bracket.c_lo < bracket.c_hi < 0.50


def test_bracket_below_resolution_at_small_d():
    bracket = find_threshold_bracket(1.0, tol=1e-3, sigma_star=2.024)
    assert bracket.witness_lo.is_front()
    assert bracket.c_lo == pytest.approx(1e-3)
    assert bracket.width <= 1e-3 + 1e-12


def test_bracket_domain_errors():
    with pytest.raises(DomainError):
        find_threshold_bracket(-1.0, tol=1e-3)
    with pytest.raises(DomainError):
        find_threshold_bracket(1.0, tol=0.0)
