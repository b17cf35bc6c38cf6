import numpy as np
import pytest

from wavefront_lab import (
    FrontKind,
    Params,
    integrate_profile,
    run_to_front,
    solve_left_semiwavefront,
)
from wavefront_lab.threshold import AuxReaction, find_aux_threshold


def make_profile(D, c, **kw):
    return integrate_profile(Params(D=D, c=c), **kw)


@pytest.fixture(scope="session")
def prof_1_4():
    return make_profile(1.0, 4.0)


@pytest.fixture(scope="session")
def prof_1_35():
    return make_profile(1.0, 3.5)


@pytest.fixture(scope="session")
def prof_1_5():
    return make_profile(1.0, 5.0)


@pytest.fixture(scope="session")
def prof_2_8():
    return make_profile(2.0, 8.0)


@pytest.fixture(scope="session")
def prof_failed_5():
    return make_profile(5.0, 0.5)


@pytest.fixture(scope="session")
def prof_failed_2():
    return make_profile(2.0, 0.3)


@pytest.fixture(scope="session")
def sharp_profile():
    """Bisect inside the D=5 threshold window until the verdict is sharp."""
    lo, hi = 1.279, 1.281
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        p = make_profile(5.0, mid)
        kind = p.classification.kind
        if kind is FrontKind.SHARP:
            return mid, p
        if kind is FrontKind.FAILED:
            lo = mid
        else:
            hi = mid
    pytest.fail("no sharp-classified speed found in the threshold window")


@pytest.fixture(scope="session")
def aux_threshold_d1():
    gspec = AuxReaction(1.0)
    sigma_star, sol_lo, sol_hi = find_aux_threshold(gspec, tol=1e-4)
    return gspec, sigma_star, sol_lo, sol_hi


@pytest.fixture(scope="session")
def semiwave_1_4(prof_1_4):
    eta_half = float(np.interp(0.0, prof_1_4.xi, prof_1_4.eta))
    params = Params(D=1.0, c=4.0)
    return solve_left_semiwavefront(params, eta0=eta_half, tol=1e-9)


@pytest.fixture(scope="session")
def pde_run_d1():
    params = Params(D=1.0, c=1.0)
    return run_to_front(params, domain_length=200.0, t_max=50.0, n_cells=4096)


@pytest.fixture(scope="session")
def pde_run_d2():
    params = Params(D=2.0, c=1.0)
    return run_to_front(params, domain_length=250.0, t_max=120.0, n_cells=4096)
