import numpy as np
import pytest

from gjnewton import Domain, quadratic_ot, reflector, square_domain, twist_gamma_bound
from gjnewton.newton import Problem, SolverConfig, solve

# every report produced through the helpers below, for trajectory-wide checks
SOLVE_LOG = []
# (criterion, verdict line) pairs collected by the acceptance tests
ACCEPTANCE = []


def logged_solve(problem, config=None, psi0=None):
    rep = solve(problem, config, psi0)
    SOLVE_LOG.append(rep)
    return rep


def record_criterion(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} -- {detail}"
    ACCEPTANCE.append((number, line))
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line)


def random_instance(family, n, seed):
    """Random sites with a random admissible potential.

    The potential approximately solves the equation for a random target with
    weights in [0.5, 1.5] (normalized), so every cell carries mass near its
    target.  Quadratic instances live on the unit square, reflector ones on
    the [-1, 1]^2 preset with sites in [0, 1]^2.  Potentials are in solver
    coordinates with the first entry pinned to 0.
    """
    rng = np.random.default_rng(seed)
    sites = rng.random((n, 2))
    if family == "quadratic_ot":
        dom, spec = Domain.uniform(0, 1, 0, 1), quadratic_ot()
    else:
        dom = square_domain()
        spec = reflector(twist_gamma_bound(dom, sites))
    w = rng.uniform(0.5, 1.5, n)
    nu = w / w.sum()
    rep = logged_solve(Problem(spec, dom, sites, nu), SolverConfig(epsilon=0.1 * nu.min(), max_iterations=50))
    assert rep.converged, rep.status
    return spec, dom, sites, rep.psi_final, rep.H_final


@pytest.fixture
def two_site_quad():
    return quadratic_ot(), Domain.uniform(0, 1, 0, 1), np.array([[0.25, 0.5], [0.75, 0.5]])
