"""
Doubly commuting tuples and regular dilations
=============================================

When every ``T_i`` commutes with every ``T_j`` and ``T_j*`` the tuple can be
dilated one coordinate at a time. The result also reproduces the mixed
operators ``T(m)`` for multi-indices with negative entries, which is the
regular dilation property.
"""

import numpy as np

from dilatron import (
    ContractionTuple,
    brehmer_check,
    dilate_commutant_pair,
    dilation_stages,
    doubly_commuting_dilation,
    t_of_m,
    verify_dilation,
    verify_regular,
)

###############################################################################
# A diagonal pair is doubly commuting.
t1 = np.diag([0.5, 0.2])
t2 = np.diag([0.1, 0.9j])
ct = ContractionTuple((t1, t2))
print("commute", ct.commute_residual, "double commute", ct.double_commute_residual)

dil = doubly_commuting_dilation(ct, 2)
print("dimension", dil.dim)
print("plain:", verify_dilation(dil, ct, 2).passed, "regular:", verify_regular(dil, ct, 2).passed)

###############################################################################
# Each stage of the construction already compresses to the right operators.
for j, stage in enumerate(dilation_stages(ct, 2)):
    print("stage", j, "size", stage[0].shape[0])
print(t_of_m(ct, (1, -1)).round(4))

###############################################################################
# The Brehmer sums are all positive for a doubly commuting tuple ...
print(brehmer_check(ct).min_eigenvalues)

###############################################################################
# ... and fail for two copies of the nilpotent shift.
s = np.array([[0.0, 1.0], [0.0, 0.0]])
rep = brehmer_check([s, s])
print(rep.passed, rep.min_eigenvalues)

###############################################################################
# A unitary and a contraction commuting with it only need the contraction
# unfolded.
theta = 0.4
u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
pair = dilate_commutant_pair(u, 0.7 * np.eye(2), 3)
print("pair dimension", pair.dim, "pass", verify_dilation(pair, [u, 0.7 * np.eye(2)], 3).passed)
