"""
Von Neumann certificates and torus cubature
===========================================

Diagonalizing the dilating unitaries jointly gives finitely many points
``w^i`` on the torus and positive operators ``A_i`` summing to the identity
with ``p(T) = sum_i p(w^i) A_i`` for every polynomial of degree at most the
dilation order. For a scalar point this is a cubature rule with ``(N+1)^k``
nodes.
"""

import numpy as np

from dilatron import (
    MultiPoly,
    egervary_dilation,
    eval_matrix,
    random_poly,
    scalar_cubature,
    sup_norm_torus,
    vn_certificate,
    vn_check,
)

###############################################################################
# The point 0 in the disc: nodes 1 and -1 with weight one half each.
rule = scalar_cubature([0.0], 1)
print(rule.points.ravel(), rule.weights)

###############################################################################
# A two-variable rule is exact on every monomial of degree at most 2.
t = [0.5, 0.3j]
rule = scalar_cubature(t, 2)
print(rule.size, "nodes")
for e in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
    p = MultiPoly.monomial(e)
    print(e, np.round(p(*t), 12), np.round(rule.apply(p), 12))

###############################################################################
# A matrix certificate from a 2x2 contraction dilated to order 3.
rng = np.random.default_rng(3)
a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
a /= 1.1 * np.linalg.norm(a, 2)
cert = vn_certificate(egervary_dilation(a, 3), a)
print("points", cert.size)
print("sum A_i - I:", cert.weight_sum_residual())
print("monomial reconstruction:", cert.reconstruction_residual(a))

###############################################################################
# The certificate bound sits between ``||p(T)||`` and the sup over the torus.
p = random_poly(rng, 1, 3)
print(np.linalg.norm(eval_matrix(p, [a]), 2), cert.bound(p), sup_norm_torus(p))
print(vn_check([a], p, cert=cert).to_dict())
