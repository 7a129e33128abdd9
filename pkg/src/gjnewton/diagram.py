"""Generalized Laguerre (Mobius) diagrams and their power-diagram lifting."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Set, Tuple

import numpy as np

from .genfun import DomainError, Domain, GeneratingFunctionSpec
from .geometry import ArcPolygon, CircleConstraint, clip

ADJACENCY_TOL = 1e-12
# constraints clipped between two refreshes of the bounding-box prefilter


def mobius_weights(spec: GeneratingFunctionSpec, v):
    """Weights ``(lambda, mu)`` such that ``-G(x, y, v) = lambda |x - y|^2 - mu``."""
    v = np.asarray(v, dtype=float)
    if spec.is_reflector:
        if np.any(v <= 0):
            raise DomainError("reflector focal parameter must be positive")
        return 0.5 * v, 0.5 / v
    return np.full_like(v, 0.5), -v


@dataclass
class LaguerreDiagram:
    cells: List[ArcPolygon]
    adjacency: Set[Tuple[int, int]]
    psi: np.ndarray
    sites: np.ndarray = field(repr=False, default=None)

    def __len__(self):
        return len(self.cells)


class _CellBuilder:
    """Clips the domain rectangle against the pairwise constraints of one site."""

    def __init__(self, spec, domain: Domain, sites, psi_raw):
        self.domain = domain
        self.P = np.asarray(sites, dtype=float)
        self.lam, self.mu = mobius_weights(spec, psi_raw)
        self.P2 = (self.P**2).sum(axis=1)
        self.rect = ArcPolygon.rectangle(domain.xmin, domain.xmax, domain.ymin, domain.ymax)

    def coefficients(self, i):
        P, lam, mu = self.P, self.lam, self.mu
        li = lam[i]
        a = li - lam
        a[np.abs(a) <= 1e-14 * (abs(li) + np.abs(lam))] = 0.0
        bx = li * P[i, 0] - lam * P[:, 0]
        by = li * P[i, 1] - lam * P[:, 1]
        k = li * self.P2[i] - lam * self.P2 - mu[i] + mu
        return a, bx, by, k

    def build(self, i) -> ArcPolygon:
        a, bx, by, k = self.coefficients(i)
        d2 = ((self.P - self.P[i]) ** 2).sum(axis=1)
        order = np.argsort(d2, kind="stable")
        order = order[order != i]
        poly = self.rect
        box = poly.bbox()
        # nearest sites first; each constraint is skipped when it holds on the
        # whole current bounding box
        for j, aj, bxj, byj, kj in zip(order.tolist(), a[order].tolist(), bx[order].tolist(), by[order].tolist(), k[order].tolist()):
            lo, hi = _box_range(aj, bxj, byj, kj, box)
            if hi <= 0.0:
                continue
            if lo > 0.0:
                return ArcPolygon.empty()
            poly = clip(poly, CircleConstraint.from_quadric(aj, bxj, byj, kj, j))
            if poly.is_empty:
                return poly
            box = poly.bbox()
        return poly


def _range_1d(a, b, t0, t1):
    """Bounds of ``a t^2 - 2 b t`` for ``t`` in ``[t0, t1]``."""
    f0 = a * t0 * t0 - 2.0 * b * t0
    f1 = a * t1 * t1 - 2.0 * b * t1
    lo, hi = (f0, f1) if f0 <= f1 else (f1, f0)
    if a != 0.0:
        t = b / a
        if t0 < t < t1:
            fe = -b * t
            if a > 0.0:
                lo = fe
            else:
                hi = fe
    return lo, hi


def _box_range(a, bx, by, k, box):
    """Bounds of ``f = a|x|^2 - 2b.x + k`` over an axis-aligned box."""
    x0, x1, y0, y1 = box
    # f is separable in x and y
    lx, hx = _range_1d(a, bx, x0, x1)
    ly, hy = _range_1d(a, by, y0, y1)
    return lx + ly + k, hx + hy + k


def build_cell(spec, domain: Domain, sites, psi_raw, i: int) -> ArcPolygon:
    return _CellBuilder(spec, domain, sites, psi_raw).build(i)


def build_diagram(spec: GeneratingFunctionSpec, domain: Domain, sites, psi_raw) -> LaguerreDiagram:
    """Cells ``X  n  (intersection over j != i of {G_i >= G_j})`` for raw potentials."""
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    psi_raw = np.asarray(psi_raw, dtype=float)
    builder = _CellBuilder(spec, domain, sites, psi_raw)
    cells = [builder.build(i) for i in range(len(sites))]
    return LaguerreDiagram(cells, adjacency_of(cells), psi_raw.copy(), sites)


def adjacency_of(cells: List[ArcPolygon]) -> Set[Tuple[int, int]]:
    lengths = {}
    for j, cell in enumerate(cells):
        for e in cell.edges:
            if e.owner >= 0:
                key = (min(j, e.owner), max(j, e.owner))
                lengths[key] = lengths.get(key, 0.0) + e.length()
    return {key for key, L in sorted(lengths.items()) if L > ADJACENCY_TOL}


# ---------------------------------------------------------------------------
# lifting to a 3D power diagram


@dataclass(frozen=True)
class LiftedPoint:
    p: np.ndarray
    r: float


def lift_to_power(site, psi_i: float) -> LiftedPoint:
    """Weighted point whose power cell, cut by the paraboloid, projects to the cell."""
    if psi_i <= 0:
        raise DomainError("lifting needs a positive focal parameter")
    y = np.asarray(site, dtype=float)
    y2 = float(y @ y)
    p = np.array([0.5 * psi_i * y[0], 0.5 * psi_i * y[1], -0.25 * psi_i])
    r = psi_i**2 / 16 + psi_i**2 * y2 / 4 - psi_i * y2 / 2 + 1 / (2 * psi_i)
    return LiftedPoint(p, r)


def lift_all(sites, psi_raw) -> List[LiftedPoint]:
    return [lift_to_power(y, float(v)) for y, v in zip(np.asarray(sites, float), psi_raw)]


def power_distances(x, lifted: List[LiftedPoint]) -> np.ndarray:
    """``|x_hat - p_j|^2 - r_j`` for all j, with ``x_hat = (x, |x|^2)``."""
    x = np.asarray(x, dtype=float)
    xh = np.concatenate([x, [x @ x]])
    P = np.array([lp.p for lp in lifted])
    r = np.array([lp.r for lp in lifted])
    return ((xh - P) ** 2).sum(axis=1) - r


def lifted_membership(x, i: int, lifted: List[LiftedPoint], tol: float = 0.0) -> bool:
    pw = power_distances(x, lifted)
    return bool(np.all(pw[i] <= pw + tol))


def mobius_membership(spec, x, i: int, sites, psi_raw, tol: float = 0.0) -> bool:
    """Direct test ``G(x, y_i, psi_i) >= G(x, y_j, psi_j)`` for all j."""
    g = spec.G(np.asarray(x, float)[None, :], np.asarray(sites, float), np.asarray(psi_raw, float))
    return bool(np.all(g[i] + tol >= g))
