"""
Checking exact cell masses against brute force
==============================================

The solver integrates over arc polygons exactly.  The oracles never build a
cell: they assign sample points to the site with the largest G.  Here both
are run on the same random reflector instance.
"""

import time

import numpy as np

from gjnewton import Problem, SolverConfig, reflector, solve, square_domain, twist_gamma_bound
from gjnewton.massmap import jacobian, mass
from gjnewton.oracle import SampleConfig, fd_jacobian, grid_mass, mc_mass

N = 12
rng = np.random.default_rng(7)
sites = rng.random((N, 2))
dom = square_domain()
spec = reflector(twist_gamma_bound(dom, sites))
# a few loose Newton steps towards uneven targets give a generic potential
w = rng.uniform(0.5, 1.5, N)
nu = w / w.sum()
psi = solve(Problem(spec, dom, sites, nu), SolverConfig(epsilon=0.1 * nu.min())).psi_final

t = time.perf_counter()
H = mass(spec, dom, sites, psi)
print(f"exact masses in {1e3 * (time.perf_counter() - t):.1f} ms, sum - 1 = {H.sum() - 1:.1e}")

# Monte Carlo: each estimate should sit within a few standard errors
est, se = mc_mass(spec, dom, sites, psi, SampleConfig(n_samples=10**6, seed=1))
z = np.abs(est - H) / se
print(f"Monte Carlo, 1e6 points: max z-score {z.max():.2f}, {np.sum(z <= 3)}/{N} within 3 sigma")

# midpoint grid: the error comes from cells cut by a boundary
for r in (64, 256, 1024):
    g = grid_mass(spec, dom, sites, psi, SampleConfig(grid_resolution=r))
    print(f"grid {r:4d}^2: max |error| = {np.abs(g - H).max():.2e}  (r * error = {r * np.abs(g - H).max():.3f})")

# Jacobian: edge integrals against central differences of the exact masses
D = jacobian(spec, dom, sites, psi).DH.toarray()
for h in (1e-3, 1e-4, 1e-5):
    F = fd_jacobian(spec, dom, sites, psi, h=h)
    print(f"finite differences h = {h:.0e}: max |DH - FD| = {np.abs(D - F).max():.2e}")
print(f"column sums of DH: {np.abs(D.sum(axis=0)).max():.1e}")
