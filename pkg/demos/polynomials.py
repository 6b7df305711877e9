"""
Polynomials on the torus
========================

Sup-norms over ``T^k`` are estimated on a uniform grid. The grid value is a
lower bound that only grows as the grid is refined.
"""

import numpy as np

from dilatron import MultiPoly, eval_matrix, holbrook_polynomial, sup_norm_torus

p = holbrook_polynomial()
print("p(1, 1, 1) =", p(1, 1, 1))
for m in (16, 64, 256):
    print(m, sup_norm_torus(p, m))

###############################################################################
# ``1 + z`` attains its sup at the grid point ``z = 1``.
print(sup_norm_torus(MultiPoly(1, {(0,): 1, (1,): 1}), 8))

###############################################################################
# Polynomials in commuting matrices. The commutator term cancels.
q = MultiPoly.monomial((1, 1)) - MultiPoly.monomial((1, 1)) + MultiPoly.constant(2)
x = np.diag([0.3, -0.5])
y = np.diag([0.9, 0.1j])
print(eval_matrix(q, [x, y]))
