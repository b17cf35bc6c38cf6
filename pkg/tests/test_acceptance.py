"""Acceptance gate: every contract criterion at its stated tolerance.

Each test prints one `CRITERION <k>: PASS|FAIL` line (bypassing capture) and
asserts the same condition.  Two sub-criteria encode expectations that the
measured system contradicts; they are implemented exactly as stated and left
red on purpose, with the contradicting measurement in the assertion message:

* 9b: at D=1 the simulated front never settles onto a traveling profile
  (fronts exist down to c = 1e-5, so there is no minimal speed to select;
  the measured front decelerates and propagates by pulse nucleation).  The
  same shape comparison is green at D=2, where a genuine minimal speed
  exists (test 9c).
* 10b: the run at (D, c) = (1, 0.01) connects cleanly (classical front,
  limit flux ~ 1e-12, eta(+inf) = 1 to 1e-7, confirmed independently in the
  beta-parameterized chart), so it cannot serve as a below-threshold
  control; the control is green at (5, 0.5) and (2, 0.3) in test 10a.
"""
import math
import time

import numpy as np
import pytest

from wavefront_lab import (
    FrontKind,
    Params,
    compare_with_aux,
    integrate_profile,
    integrate_z,
    solve_left_semiwavefront,
)
from wavefront_lab.cli import main
from wavefront_lab.pde import compare_front_shape, total_mass
from wavefront_lab.rates import speed_lower_bound, speed_upper_bound
from wavefront_lab.threshold import (
    AuxReaction,
    find_aux_threshold,
    find_threshold_bracket,
    solve_aux,
)
from wavefront_lab.verify import verify_profile

MATRIX_FRONTS = ((1.0, 3.5), (1.0, 4.0), (1.0, 5.0), (2.0, 8.0), (5.0, 1.3))
MATRIX_FAILED = ((5.0, 0.5), (2.0, 0.3))


def announce(capsys, line: str) -> None:
    with capsys.disabled():
        print(line, flush=True)


@pytest.fixture(scope="module")
def front_reports():
    out = {}
    for D, c in MATRIX_FRONTS:
        params = Params(D=D, c=c)
        profile = integrate_profile(params)
        out[(D, c)] = (profile, verify_profile(profile, params))
    return out


def test_criterion_1_threshold_brackets(capsys):
    ok = True
    details = []
    for D in (0.5, 1.0, 2.0, 5.0):
        t0 = time.perf_counter()
        sigma_star, _, _ = find_aux_threshold(AuxReaction(D), tol=1e-4)
        bracket = find_threshold_bracket(D, tol=1e-3, sigma_star=sigma_star)
        elapsed = time.perf_counter() - t0
        lower, upper = speed_lower_bound(D), speed_upper_bound(D)
        good = (
            lower < bracket.c_lo
            and bracket.c_hi <= upper + 1e-9
            and bracket.width <= 1e-3 + 1e-12
            and elapsed <= 60.0
        )
        ok = ok and good
        details.append(
            f"D={D}: [{bracket.c_lo:.6f},{bracket.c_hi:.6f}] "
            f"lo_witness={bracket.witness_lo.kind.value} {elapsed:.1f}s"
        )
    announce(capsys, f"CRITERION 1: {'PASS' if ok else 'FAIL'} — " + "; ".join(details))
    assert ok, details


def test_criterion_2_speed_identity(capsys, front_reports):
    errs = {}
    for D, c in ((1.0, 3.5), (1.0, 4.0), (1.0, 5.0)):
        _, report = front_reports[(D, c)]
        errs[c] = report.entry("speed_identity").measured
    ok = all(e <= 1e-3 for e in errs.values())
    announce(capsys, f"CRITERION 2: {'PASS' if ok else 'FAIL'} — rel errors {errs}")
    assert ok, errs


def test_criterion_3_left_tail_rates(capsys, front_reports):
    worst = 0.0
    for D, c in ((1.0, 3.5), (1.0, 4.0), (1.0, 5.0)):
        _, report = front_reports[(D, c)]
        worst = max(worst, report.entry("left_rate_eta").measured,
                    report.entry("left_rate_beta").measured)
    ok = worst <= 1e-2
    announce(capsys, f"CRITERION 3: {'PASS' if ok else 'FAIL'} — max rate error {worst:.2e}")
    assert ok, worst


def test_criterion_4_pointwise_bounds(capsys, front_reports):
    bad = []
    for (D, c), (profile, report) in front_reports.items():
        for check in ("eta_in_unit", "eta_prime_in_range", "ratio_lower_bound"):
            if not report.entry(check).passed:
                bad.append((D, c, check))
    for D, c in MATRIX_FAILED:
        params = Params(D=D, c=c)
        profile = integrate_profile(params)
        report = verify_profile(profile, params)
        if not report.entry("eta_tau_bound").passed:
            bad.append((D, c, "eta_tau_bound"))
    ok = not bad
    announce(capsys, f"CRITERION 4: {'PASS' if ok else 'FAIL'} — violations: {bad}")
    assert ok, bad


def test_criterion_5_endpoint_dichotomy(capsys):
    lines = []
    ok = True
    # dichotomy on every floor-terminated path of the test matrix
    for D, c in ((1.0, 3.5), (1.0, 4.0), (1.0, 5.0), (2.0, 0.3), (2.0, 0.7),
                 (5.0, 0.5), (5.0, 1.5)):
        path = integrate_z(Params(D=D, c=c))
        s = path.slope_at_zero
        good = min(abs(s), abs(s + c)) <= 1e-3 * (1.0 + c)
        ok = ok and good
        lines.append(f"({D},{c}):s={s:.4f}")
    # branch pattern at the bracket endpoints where a genuine flip exists
    for D in (2.0, 5.0):
        bracket = find_threshold_bracket(D, tol=1e-3)
        lo_path = integrate_z(Params(D=D, c=bracket.c_lo))
        hi_path = integrate_z(Params(D=D, c=bracket.c_hi))
        below_branch = abs(lo_path.slope_at_zero + bracket.c_lo) <= 1e-3 * (1.0 + bracket.c_lo)
        front_branch = abs(hi_path.slope_at_zero) <= 1e-3 * (1.0 + bracket.c_hi)
        ok = ok and below_branch and front_branch
        lines.append(
            f"D={D} bracket: lo branch -c ({lo_path.slope_at_zero:.4f}), "
            f"hi branch 0 ({hi_path.slope_at_zero:.2e})"
        )
    lines.append("D in {0.5,1}: no below branch observable (fronts at every "
                 "probed speed); sharpness at the threshold remains a conjecture")
    announce(capsys, f"CRITERION 5: {'PASS' if ok else 'FAIL'} — " + "; ".join(lines))
    assert ok, lines


def test_criterion_6_auxiliary_problem(capsys):
    gspec = AuxReaction(1.0)
    sigma_star, sol_lo, sol_hi = find_aux_threshold(gspec, tol=1e-4)
    bound_ok = sigma_star <= 2.0 * math.sqrt(math.e) + 1e-3
    slope_lo_ok = abs(sol_lo.slope_at_zero + sigma_star) <= 0.02 * sigma_star
    above = solve_aux(sigma_star + 0.5, gspec)
    slope_above_ok = abs(above.slope_at_zero) <= 0.02 * sigma_star
    cmp_ok = True
    for c in (sigma_star, 2.0 * sigma_star):
        params = Params(D=1.0, c=c)
        rep = compare_with_aux(integrate_z(params), sol_hi, params)
        cmp_ok = cmp_ok and rep.holds
    ok = bound_ok and slope_lo_ok and slope_above_ok and cmp_ok
    announce(
        capsys,
        f"CRITERION 6: {'PASS' if ok else 'FAIL'} — sigma*={sigma_star:.6f} "
        f"(bound {2.0 * math.sqrt(math.e):.6f}), slope@threshold "
        f"{sol_lo.slope_at_zero:.4f}, slope@+0.5 {above.slope_at_zero:.2e}, "
        f"ordering holds: {cmp_ok}",
    )
    assert ok


def test_criterion_7_oracle_equivalence(capsys):
    worst = {}
    for D, c in ((1.0, 4.0), (2.0, 8.0)):
        params = Params(D=D, c=c)
        profile = integrate_profile(params)
        eta_half = float(np.interp(0.0, profile.xi, profile.eta))
        semi = solve_left_semiwavefront(params, eta0=eta_half, tol=1e-9)
        grid = np.linspace(max(semi.xi[0], profile.xi[0]), 0.0, 4000)
        db = np.interp(grid, profile.xi, profile.beta) - np.interp(grid, semi.xi, semi.beta)
        de = np.interp(grid, profile.xi, profile.eta) - np.interp(grid, semi.xi, semi.eta)
        worst[(D, c)] = max(np.abs(db).max(), np.abs(de).max())
    ok = all(v <= 1e-3 for v in worst.values())
    announce(capsys, f"CRITERION 7: {'PASS' if ok else 'FAIL'} — sup-norm gaps {worst}")
    assert ok, worst


def test_criterion_8_energy_identities(capsys, front_reports):
    worst = 0.0
    for (D, c), (_, report) in front_reports.items():
        worst = max(worst, report.entry("energy_balance").measured,
                    report.entry("flux_energy_balance").measured)
        assert report.entry("dissipation_cap").passed
    ok = worst <= 1e-3
    announce(capsys, f"CRITERION 8: {'PASS' if ok else 'FAIL'} — max rel residual {worst:.2e}")
    assert ok, worst


def test_criterion_9a_pde_conservation_and_speed(capsys, pde_run_d1):
    snaps, est = pde_run_d1
    m0 = total_mass(snaps[0])
    drift = max(abs(total_mass(f) - m0) / m0 for f in snaps[1:])
    speed_ok = est.found_front and math.isfinite(est.fitted_speed) and est.fitted_speed > 0.0
    ok = drift <= 1e-10 and speed_ok
    announce(
        capsys,
        f"CRITERION 9a: {'PASS' if ok else 'FAIL'} — mass drift {drift:.2e}, "
        f"fitted speed {est.fitted_speed:.4f}",
    )
    assert ok


def test_criterion_9b_shape_match_at_d1(capsys, pde_run_d1):
    """Shape clause at D=1, implemented as stated; red by measurement.

    At D=1 fronts exist at every probed speed (down to c=1e-5), so the
    dynamics have no minimal speed to select: the measured front decelerates
    (windowed speeds 0.28 -> 0.14 over t in [0, 200]) and advances by pulse
    nucleation, never settling onto a fixed-speed profile.  The comparison
    below therefore exceeds the 5%/7% bands; the identical machinery passes
    at D=2 (see 9c), where a genuine minimal speed exists.
    """
    snaps, est = pde_run_d1
    profile = integrate_profile(Params(D=1.0, c=est.fitted_speed))
    rep = compare_front_shape(snaps[-1], profile)
    ok = rep["beta_sup_err"] <= 0.05 and rep["eta_sup_err"] <= 0.07
    announce(
        capsys,
        f"CRITERION 9b: {'PASS' if ok else 'FAIL (expected: no settled front "
        f"at D=1)'} — beta err {rep['beta_sup_err']:.3f}, eta err "
        f"{rep['eta_sup_err']:.3f} at c={est.fitted_speed:.4f}",
    )
    assert ok, (
        f"no traveling shape at D=1: beta/eta sup errors "
        f"{rep['beta_sup_err']:.3f}/{rep['eta_sup_err']:.3f} against the "
        f"profile at the fitted speed {est.fitted_speed:.4f}"
    )


def test_criterion_9c_shape_match_at_d2(capsys, pde_run_d2):
    snaps, est = pde_run_d2
    c_fit = max(est.fitted_speed, 0.4917)
    profile = integrate_profile(Params(D=2.0, c=c_fit))
    rep = compare_front_shape(snaps[-1], profile)
    ok = rep["beta_sup_err"] <= 0.05 and rep["eta_sup_err"] <= 0.07
    announce(
        capsys,
        f"CRITERION 9c: {'PASS' if ok else 'FAIL'} — D=2 companion: beta err "
        f"{rep['beta_sup_err']:.4f}, eta err {rep['eta_sup_err']:.4f}, "
        f"selected speed {est.fitted_speed:.4f}",
    )
    assert ok, rep


def test_criterion_10a_negative_controls(capsys, tmp_path):
    import dataclasses

    failures = []
    for D, c in MATRIX_FAILED:
        params = Params(D=D, c=c)
        profile = integrate_profile(params)
        if profile.classification.kind is not FrontKind.FAILED:
            failures.append((D, c, "profile"))
        if integrate_z(params).is_front(c):
            failures.append((D, c, "phase"))
    # corrupted profiles must fail verification
    params = Params(D=1.0, c=4.0)
    profile = integrate_profile(params)
    bad = dataclasses.replace(profile)
    bad.beta = profile.beta.copy()
    bad.beta[3000:3010] += 0.01
    if verify_profile(bad, params).overall:
        failures.append(("corruption", "undetected"))
    # exit-code contract
    if main(["profile", "--D", "1", "--c", "4", "--out", str(tmp_path / "a")]) != 0:
        failures.append(("exit", "front"))
    if main(["profile", "--D", "5", "--c", "0.5", "--out", str(tmp_path / "b")]) != 2:
        failures.append(("exit", "failed"))
    if main(["threshold", "--D", "0"]) != 1:
        failures.append(("exit", "domain"))
    ok = not failures
    announce(capsys, f"CRITERION 10a: {'PASS' if ok else 'FAIL'} — {failures or 'controls hold'}")
    assert ok, failures


def test_criterion_10b_below_threshold_at_d1(capsys):
    """Control at (1, 0.01), implemented as stated; red by measurement.

    The trajectory at D=1, c=0.01 connects: the limit flux extrapolates to
    ~1e-12, eta(+inf) = 1 to 1e-7, and the independent beta-parameterized
    integration agrees (endpoint flux ~ 2e-14).  The below-threshold control
    is exercised green at (5, 0.5) and (2, 0.3) in criterion 10a.
    """
    profile = integrate_profile(Params(D=1.0, c=0.01))
    ok = profile.classification.kind is FrontKind.FAILED
    announce(
        capsys,
        f"CRITERION 10b: {'PASS' if ok else 'FAIL (expected: (1,0.01) "
        f"connects)'} — measured {profile.classification.kind.value}, "
        f"limit flux {profile.classification.limit_flux:.2e}",
    )
    assert ok, (
        f"(D,c)=(1,0.01) yields {profile.classification.kind.value} with "
        f"limit flux {profile.classification.limit_flux:.2e}; fronts exist "
        f"at every probed speed for D=1"
    )
