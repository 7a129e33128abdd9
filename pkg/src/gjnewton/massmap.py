"""The mass map ``H(psi)``, its Jacobian, admissibility and initialization.

Potentials are given in solver coordinates unless ``raw=True``: for the
reflector those are unconstrained reals ``t`` with ``v = zeta(t)``; for the
quadratic family both coordinate systems coincide.

The Jacobian uses the convention ``DH[j, i] = dH_j / dpsi_i``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .diagram import LaguerreDiagram, build_cell, build_diagram
from .genfun import Domain, GeneratingFunctionSpec
from .geometry import area, edge_quadrature

log = logging.getLogger(__name__)


class InitializationError(RuntimeError):
    def __init__(self, index: int, message: str):
        super().__init__(f"site {index}: {message}")
        self.index = index


@dataclass
class MassJacobian:
    H: np.ndarray
    DH: sp.csr_matrix
    adjacency: Set[Tuple[int, int]]
    diagram: Optional[LaguerreDiagram] = field(default=None, repr=False)


@dataclass(frozen=True)
class AdmissibleParams:
    alpha: float = 0.0
    delta: float = 0.0


def check_target(nu) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    if nu.ndim != 1 or nu.size == 0:
        raise ValueError("target weights must be a non-empty vector")
    if np.any(nu <= 0):
        raise ValueError("target weights must be positive")
    if abs(nu.sum() - 1.0) > 1e-12:
        raise ValueError(f"target weights sum to {nu.sum():.15g}, not 1")
    return nu


def masses_of(diagram: LaguerreDiagram, domain: Domain) -> np.ndarray:
    return np.array([area(c, domain.density) for c in diagram.cells])


def mass(spec: GeneratingFunctionSpec, domain: Domain, sites, psi, raw: bool = False) -> np.ndarray:
    diagram = build_diagram(spec, domain, sites, spec.to_raw(psi, raw))
    return masses_of(diagram, domain)


def jacobian_from(diagram: LaguerreDiagram, spec, domain: Domain, psi, raw: bool = False) -> MassJacobian:
    """Assemble ``H`` and ``DH`` from an already built diagram.

    Off-diagonal entries integrate ``rho |dv G_i| / |grad G_j - grad G_i|``
    over the part of the boundary of cell j generated by site i.  The diagonal
    is fixed by the zero column-sum rule.
    """
    sites = diagram.sites
    v = diagram.psi
    n = len(diagram.cells)
    H = masses_of(diagram, domain)
    edges, rows, cols = [], [], []
    for j, cell in enumerate(diagram.cells):
        for e in cell.edges:
            if e.owner >= 0:
                edges.append(e)
                rows.append(j)
                cols.append(e.owner)
    if edges:
        pts, w, idx, _ = edge_quadrature(edges)
        rj = np.asarray(rows)[idx]
        ci = np.asarray(cols)[idx]
        num = np.abs(spec.dv(pts, sites[ci], v[ci]))
        den = np.linalg.norm(spec.grad_x(pts, sites[rj], v[rj]) - spec.grad_x(pts, sites[ci], v[ci]), axis=1)
        vals = w * domain.density(pts) * num / den
        off = np.bincount(rj * n + ci, weights=vals, minlength=n * n).reshape(n, n)
    else:
        off = np.zeros((n, n))
    if not raw:
        off = off * spec.zeta_prime(psi)[None, :]
    np.fill_diagonal(off, 0.0)
    D = off - np.diag(off.sum(axis=0))
    return MassJacobian(H, sp.csr_matrix(D), set(diagram.adjacency), diagram)


def jacobian(spec: GeneratingFunctionSpec, domain: Domain, sites, psi, raw: bool = False) -> MassJacobian:
    diagram = build_diagram(spec, domain, sites, spec.to_raw(psi, raw))
    return jacobian_from(diagram, spec, domain, psi, raw)


def is_admissible(H, params: AdmissibleParams, psi) -> bool:
    return bool(psi[0] == params.alpha and np.min(H) >= params.delta)


def _top_value(spec, domain: Domain, sites, alpha: float, raw: bool) -> float:
    """A potential so large that its cell is dominated by site 1 at ``alpha``."""
    if spec.is_reflector:
        top_raw = spec.gamma * (1.0 - 1e-6)
        return top_raw if raw else float(spec.zeta_inv(top_raw))
    pts = np.vstack([domain.corners, sites])
    diam2 = ((pts.max(axis=0) - pts.min(axis=0)) ** 2).sum()
    return alpha + diam2 + 1.0


def initial_potential(
    spec: GeneratingFunctionSpec,
    domain: Domain,
    sites,
    nu,
    params: AdmissibleParams,
    strategy: str = "auto",
    raw: bool = False,
    trace: Optional[list] = None,
) -> np.ndarray:
    """An admissible starting potential.

    ``strategy`` is ``"constant"`` (try ``psi = alpha`` everywhere),
    ``"construct"`` (greedy construction that fixes ``H_i = 2^{1-i}`` one
    site at a time) or ``"auto"``.  Auto tries the constant vector, then the
    construction; when ``delta`` exceeds what the construction guarantees, it
    continues with damped Newton steps under the smaller threshold
    ``min H`` until ``|H - nu|_2 <= min(nu) - delta``, which forces every
    ``H_i >= delta``.  When ``trace`` is a list, the mass vector after every
    construction step is appended to it.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    nu = check_target(nu)
    n = len(sites)
    alpha = params.alpha
    if strategy in ("auto", "constant"):
        psi = np.full(n, alpha, dtype=float)
        H = mass(spec, domain, sites, psi, raw)
        if is_admissible(H, params, psi) or strategy == "constant":
            return psi
        log.info("constant potential not admissible (min mass %.3g), constructing", H.min())

    top = _top_value(spec, domain, sites, alpha, raw)
    psi = np.full(n, top, dtype=float)
    psi[0] = alpha

    def cell_mass(i, value):
        trial = psi.copy()
        trial[i] = value
        cell = build_cell(spec, domain, sites, spec.to_raw(trial, raw), i)
        return area(cell, domain.density)

    for i in range(1, n):
        target = 0.5**i
        hi = top
        g_hi = cell_mass(i, hi) - target
        if g_hi > 0:
            raise InitializationError(i, "cell too large even at the top of the range")
        for expand in range(200):
            # raw focal parameters must stay positive, so shrink geometrically
            lo = top * 0.5 ** (expand + 1) if (spec.is_reflector and raw) else top - 2.0**expand
            g_lo = cell_mass(i, lo) - target
            if g_lo >= 0:
                break
        else:
            raise InitializationError(i, "could not bracket the target mass")
        for _ in range(200):
            if abs(g_lo) <= 1e-12:
                hi = lo
                break
            if abs(g_hi) <= 1e-12:
                break
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            g_mid = cell_mass(i, mid) - target
            if g_mid >= 0:
                lo, g_lo = mid, g_mid
            else:
                hi, g_hi = mid, g_mid
        err = min(abs(g_lo), abs(g_hi))
        if err > 1e-9:
            # the mass jumps across the target, e.g. for coincident sites
            raise InitializationError(i, f"bisection stalled {err:.3g} away from the target mass")
        psi[i] = lo if abs(g_lo) <= abs(g_hi) else hi
        if trace is not None:
            trace.append(mass(spec, domain, sites, psi, raw))
    if strategy == "construct":
        return psi
    H = mass(spec, domain, sites, psi, raw)
    if is_admissible(H, params, psi):
        return psi
    return _continue_to(spec, domain, sites, nu, params, psi, H, raw)


def _continue_to(spec, domain, sites, nu, params, psi, H, raw):
    from .newton import Problem, SolverConfig, solve

    if H.min() <= 0:
        raise InitializationError(int(np.argmin(H)), "empty cell after construction")
    log.info("constructed start has min mass %.3g < delta %.3g; continuing", H.min(), params.delta)
    psi_s = psi if not raw else spec.zeta_inv(psi) if spec.is_reflector else psi
    cfg = SolverConfig(epsilon=float(nu.min() - params.delta), delta=float(H.min()), alpha=params.alpha)
    rep = solve(Problem(spec, domain, sites, nu), cfg, psi0=psi_s)
    if not rep.converged:
        raise InitializationError(0, f"continuation stopped with status {rep.status.value}")
    out = spec.to_raw(rep.psi_final) if (raw and spec.is_reflector) else rep.psi_final
    return np.asarray(out, dtype=float)


@dataclass
class StructureReport:
    rank_defect: int
    kernel_vector: np.ndarray
    graph_connected: bool
    singular_values: np.ndarray
    kernel_uniform_sign: bool
    kernel_ratio: float

    @property
    def ok(self) -> bool:
        return self.rank_defect == 1 and self.kernel_uniform_sign and self.graph_connected


def structure_diagnostics(mj: MassJacobian, rel_tol: float = 1e-9, edge_tol: float = 1e-12) -> StructureReport:
    D = mj.DH.toarray()
    n = D.shape[0]
    _, s, vt = np.linalg.svd(D)
    smax = s.max() if s.size else 0.0
    defect = int(np.sum(s <= rel_tol * smax))
    w = vt[-1].copy()
    if w.sum() < 0:
        w = -w
    absw = np.abs(w)
    ratio = float(absw.min() / absw.max()) if absw.max() > 0 else 0.0
    uniform = bool(np.all(w > 0)) and ratio > 1e-6
    off = D.copy()
    np.fill_diagonal(off, 0.0)
    adj = sp.csr_matrix((off > edge_tol) | (off.T > edge_tol))
    ncomp, _ = connected_components(adj, directed=False)
    return StructureReport(defect, w, ncomp == 1, s, uniform, ratio)
