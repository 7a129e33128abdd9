"""
Two sites, one moving boundary
==============================

Quadratic transport on the unit square with sites at (1/4, 1/2) and
(3/4, 1/2).  With potentials (0, p) the cell boundary is the vertical line
x = 1/2 - 2p, so asking for masses (1/4, 3/4) has the exact answer p = -1/8.
"""

import numpy as np

from gjnewton import Domain, Problem, SolverConfig, quadratic_ot, solve
from gjnewton.massmap import jacobian, mass

spec = quadratic_ot()
dom = Domain.uniform(0, 1, 0, 1)
sites = np.array([[0.25, 0.5], [0.75, 0.5]])

# equal potentials split the square down the middle
print("H(0, 0)      =", mass(spec, dom, sites, [0.0, 0.0]))

# the boundary has length 1 and the sites are 1/2 apart, so each
# off-diagonal entry of the Jacobian is 1 / (1/2) = 2
print("DH(0, 0)     =\n", jacobian(spec, dom, sites, [0.0, 0.0]).DH.toarray())

# H is affine in p here, so a single full Newton step lands on the answer
rep = solve(Problem(spec, dom, sites, [0.25, 0.75]), SolverConfig(epsilon=1e-12))
print("status       =", rep.status.value, "after", rep.iterations, "iteration(s)")
print("psi          =", rep.psi_final)
print("error vs 1/8 =", abs(rep.psi_final[1] + 0.125))
