"""Brute-force reference evaluators that never touch the cell geometry.

Mass estimates assign each sample point to ``argmax_j G(x, y_j, psi_j)``
directly (ties go to the lowest index).  Random streams use the counter-based
Philox generator keyed by the seed, one counter block per fixed-size chunk, so
results depend only on ``(inputs, seed, n_samples)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import massmap
from .genfun import DomainError, Domain, GeneratingFunctionSpec

CHUNK = 1 << 14


@dataclass(frozen=True)
class SampleConfig:
    n_samples: int = 10**5
    seed: int = 0
    grid_resolution: int = 256

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.grid_resolution < 2:
            raise ValueError("grid_resolution must be >= 2")


def assign(spec: GeneratingFunctionSpec, x, sites, psi_raw) -> np.ndarray:
    """Index of the site maximizing ``G`` at each point of ``x``."""
    g = spec.G(x[:, None, :], np.asarray(sites, float)[None, :, :], np.asarray(psi_raw, float)[None, :])
    return np.argmax(g, axis=1)


def _chunk_points(domain: Domain, seed: int, chunk: int, size: int) -> np.ndarray:
    bitgen = np.random.Philox(key=seed, counter=[0, 0, chunk, 0])
    u = np.random.Generator(bitgen).random((size, 2))
    lo = np.array([domain.xmin, domain.ymin])
    hi = np.array([domain.xmax, domain.ymax])
    return lo + u * (hi - lo)


def mc_mass(spec, domain: Domain, sites, psi, cfg: SampleConfig, raw: bool = False):
    """Monte-Carlo cell masses and their standard errors.

    Points are drawn uniformly on the rectangle; a non-uniform density enters
    as the importance weight ``rho(x) |X|``.
    """
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    v = spec.to_raw(psi, raw)
    n_sites = len(sites)
    s1 = np.zeros(n_sites)
    s2 = np.zeros(n_sites)
    n = cfg.n_samples
    for c, start in enumerate(range(0, n, CHUNK)):
        size = min(CHUNK, n - start)
        x = _chunk_points(domain, cfg.seed, c, size)
        idx = assign(spec, x, sites, v)
        if domain.density.is_uniform:
            w = np.ones(size)
        else:
            w = domain.density(x) * domain.area
        s1 += np.bincount(idx, weights=w, minlength=n_sites)
        s2 += np.bincount(idx, weights=w * w, minlength=n_sites)
    est = s1 / n
    var = np.maximum(s2 / n - est**2, 0.0)
    return est, np.sqrt(var / n)


def grid_mass(spec, domain: Domain, sites, psi, cfg: SampleConfig, raw: bool = False) -> np.ndarray:
    """Midpoint rule on a ``resolution x resolution`` grid with argmax assignment."""
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    v = spec.to_raw(psi, raw)
    r = cfg.grid_resolution
    xs = domain.xmin + (np.arange(r) + 0.5) * (domain.xmax - domain.xmin) / r
    ys = domain.ymin + (np.arange(r) + 0.5) * (domain.ymax - domain.ymin) / r
    out = np.zeros(len(sites))
    for yrow in ys:
        x = np.column_stack([xs, np.full(r, yrow)])
        idx = assign(spec, x, sites, v)
        w = None if domain.density.is_uniform else domain.density(x) * domain.area
        out += np.bincount(idx, weights=w, minlength=len(sites))
    # uniform case: integer counts, so a single cell gets exactly 1
    return out / (r * r)


def fd_jacobian(spec, domain: Domain, sites, psi, h: float = 1e-6, raw: bool = False) -> np.ndarray:
    """Central differences of the exact mass map, one column per coordinate.

    A step that leaves the valid range is halved, at most ten times.
    """
    psi = np.asarray(psi, dtype=float)
    n = psi.size
    J = np.zeros((n, n))
    for i in range(n):
        step = h
        for _ in range(11):
            e = np.zeros(n)
            e[i] = step
            try:
                hp = massmap.mass(spec, domain, sites, psi + e, raw)
                hm = massmap.mass(spec, domain, sites, psi - e, raw)
                break
            except DomainError:
                step *= 0.5
        else:
            raise DomainError(f"no valid finite-difference step for coordinate {i}")
        J[:, i] = (hp - hm) / (2.0 * step)
    return J
