import time

import pytest

from vortex_modes.eigensolver import lambda1_leading, solve_lambda
from vortex_modes.mode_assembly import assemble_mode, verify_integral_equations

SWEEP_EPS = (0.1, 0.07, 0.05, 0.035, 0.02)


@pytest.fixture(scope="session")
def lambda1_ref():
    return lambda1_leading(4).lambda1


@pytest.fixture(scope="session")
def sweep(lambda1_ref):
    """eps -> (EigenResult, ResidualReport) for n = 4, solved once per session.

    The wall time spent in the eigenvalue solves alone is kept under the key
    ``"solve_seconds"``.
    """
    out = {}
    spent = 0.0
    for eps in SWEEP_EPS:
        t0 = time.perf_counter()
        res = solve_lambda(eps, 4, lambda1_ref=lambda1_ref)
        spent += time.perf_counter() - t0
        out[eps] = (res, verify_integral_equations(assemble_mode(res)))
    out["solve_seconds"] = spent
    return out


@pytest.fixture(scope="session")
def solved_01(sweep):
    return sweep[0.1][0]
