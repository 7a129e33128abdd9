"""Damped Newton iteration for ``H(psi) = nu``.

Each step solves ``DH u = H - nu`` with the first coordinate pinned, then
backtracks over ``tau = 1, 1/2, 1/4, ...`` until the trial point stays
admissible and the Euclidean residual contracts by ``1 - tau/2``.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .diagram import build_diagram
from .genfun import DomainError, Domain, GeneratingFunctionSpec
from .massmap import AdmissibleParams, MassJacobian, check_target, initial_potential, is_admissible, jacobian_from, masses_of

log = logging.getLogger(__name__)


class Status(enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    BACKTRACK_FLOOR = "BacktrackFloor"
    SINGULAR_SYSTEM = "SingularSystem"


class SingularSystem(RuntimeError):
    pass


class BacktrackFloor(RuntimeError):
    pass


@dataclass(frozen=True)
class Problem:
    spec: GeneratingFunctionSpec
    domain: Domain
    sites: np.ndarray
    nu: np.ndarray

    def __post_init__(self):
        sites = np.atleast_2d(np.asarray(self.sites, dtype=float))
        if sites.ndim != 2 or sites.shape[1] != 2:
            raise ValueError("sites must be an (N, 2) array")
        nu = check_target(self.nu)
        if nu.size != len(sites):
            raise ValueError(f"{len(sites)} sites but {nu.size} target weights")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "nu", nu)

    @property
    def n(self) -> int:
        return len(self.sites)


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-10
    max_iterations: int = 100
    tau_min: float = 2.0**-30
    delta: Optional[float] = None  # None: min(nu)/2, lowered to min H(psi0) if needed
    alpha: float = 0.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        m, e = math.frexp(self.tau_min)
        if not (0 < self.tau_min <= 1 and m == 0.5):
            raise ValueError("tau_min must be a power of two in ]0, 1]")
        if self.delta is not None and not self.delta > 0:
            raise ValueError("delta must be positive")

    def resolved_delta(self, nu) -> float:
        cap = float(np.min(nu)) / 2.0
        if self.delta is None:
            return cap
        if self.delta > cap * (1 + 1e-12):
            raise ValueError(f"delta {self.delta} exceeds min(nu)/2 = {cap}")
        return float(self.delta)


@dataclass
class SolverReport:
    psi_final: np.ndarray
    status: Status
    residual_history: List[float] = field(default_factory=list)
    residual_l1_history: List[float] = field(default_factory=list)
    tau_history: List[float] = field(default_factory=list)
    H_final: Optional[np.ndarray] = None
    delta: float = 0.0
    wall_ms: float = 0.0

    @property
    def iterations(self) -> int:
        return len(self.tau_history)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


class Evaluator:
    """Mass and Jacobian evaluation that keeps the last diagram around.

    The backtracking loop builds the diagram of the accepted trial point, so
    the next Jacobian reuses it instead of rebuilding.
    """

    def __init__(self, problem: Problem):
        self.problem = problem
        self._psi = None
        self._diagram = None
        self.n_diagrams = 0

    def _diagram_at(self, psi):
        if self._psi is None or not np.array_equal(psi, self._psi):
            p = self.problem
            self._diagram = build_diagram(p.spec, p.domain, p.sites, p.spec.to_raw(psi))
            self._psi = np.array(psi, dtype=float)
            self.n_diagrams += 1
        return self._diagram

    def mass(self, psi) -> np.ndarray:
        return masses_of(self._diagram_at(psi), self.problem.domain)

    def jacobian(self, psi) -> MassJacobian:
        p = self.problem
        return jacobian_from(self._diagram_at(psi), p.spec, p.domain, psi)


def newton_direction(mj: MassJacobian, nu) -> np.ndarray:
    """Solve ``(DH + e1 e1^T) u = H - nu``; the result has ``u[0] = 0``."""
    r = mj.H - np.asarray(nu, dtype=float)
    n = r.size
    if not np.any(r):
        return np.zeros(n)
    # both sides sum to 1; strip the rounding defect so M u = r is consistent
    r = r - r.mean()
    M = sp.csc_matrix(mj.DH + sp.csr_matrix(([1.0], ([0], [0])), shape=(n, n)))
    try:
        u = splu(M).solve(r)
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(u)):
        raise SingularSystem("non-finite Newton direction")
    # 1^T M u = u_0 equals 1^T r = 0 up to rounding
    u[0] = 0.0
    # compare against the rounding floor |DH| |u|, not |r| alone
    lin = np.abs(mj.DH @ u - r).max()
    scale = np.abs(r).max() + (abs(mj.DH) @ np.abs(u)).max()
    if lin > 1e-6 * scale:
        raise SingularSystem(f"linear residual {lin:.3g} too large")
    return u


def backtrack(psi, u, res0: float, nu, params: AdmissibleParams, mass_fn: Callable, tau_min: float = 2.0**-30):
    """Largest ``tau`` in ``1, 1/2, ..., tau_min`` passing both acceptance tests.

    Returns ``(tau, psi_new, H_new)``; raises ``BacktrackFloor`` otherwise.
    """
    tau = 1.0
    while tau >= tau_min:
        trial = psi - tau * u
        trial[0] = psi[0]
        try:
            H = mass_fn(trial)
        except DomainError:
            H = None
        if H is not None and is_admissible(H, params, trial):
            if np.linalg.norm(H - nu) <= (1.0 - tau / 2.0) * res0:
                return tau, trial, H
        tau *= 0.5
    raise BacktrackFloor(f"no step length >= {tau_min:g} accepted")


def solve(problem: Problem, config: Optional[SolverConfig] = None, psi0=None, callback=None) -> SolverReport:
    """Run the damped Newton loop from ``psi0`` (or an admissible default)."""
    config = config or SolverConfig()
    t_start = time.perf_counter()
    nu = problem.nu
    delta = config.resolved_delta(nu)
    params = AdmissibleParams(config.alpha, delta)
    ev = Evaluator(problem)
    if psi0 is None:
        if config.delta is None:
            psi = np.full(nu.size, config.alpha)
            if ev.mass(psi).min() <= 0:
                psi = initial_potential(problem.spec, problem.domain, problem.sites, nu, params, strategy="construct")
        else:
            psi = initial_potential(problem.spec, problem.domain, problem.sites, nu, params)
    else:
        psi = np.array(psi0, dtype=float)
        if psi.shape != nu.shape:
            raise ValueError("psi0 has the wrong length")
    H = ev.mass(psi)
    if config.delta is None:
        # any delta up to min(nu)/2 is valid; shrink it so the start is admissible
        delta = min(delta, float(H.min()))
        params = AdmissibleParams(config.alpha, delta)
    if not (delta > 0 and is_admissible(H, params, psi)):
        raise ValueError(f"starting potential is not admissible (min mass {H.min():.3g}, delta {delta:.3g})")

    report = SolverReport(psi, Status.MAX_ITERATIONS, delta=delta)

    def record(H):
        r = H - nu
        report.residual_history.append(float(np.linalg.norm(r)))
        report.residual_l1_history.append(float(np.abs(r).sum()))

    record(H)
    while True:
        res = report.residual_history[-1]
        if callback is not None:
            callback(report.iterations, psi, H)
        log.info("iter %d  res_l2 %.3e  res_l1 %.3e", report.iterations, res, report.residual_l1_history[-1])
        if res <= config.epsilon:
            report.status = Status.CONVERGED
            break
        if report.iterations >= config.max_iterations:
            report.status = Status.MAX_ITERATIONS
            break
        try:
            u = newton_direction(ev.jacobian(psi), nu)
            tau, psi, H = backtrack(psi, u, res, nu, params, ev.mass, config.tau_min)
        except SingularSystem as exc:
            log.warning("singular Newton system: %s", exc)
            report.status = Status.SINGULAR_SYSTEM
            break
        except BacktrackFloor as exc:
            log.warning("%s", exc)
            report.status = Status.BACKTRACK_FLOOR
            break
        report.tau_history.append(tau)
        record(H)

    report.psi_final = psi
    report.H_final = H
    report.wall_ms = 1e3 * (time.perf_counter() - t_start)
    return report
