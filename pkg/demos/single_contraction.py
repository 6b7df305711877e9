"""
Unitary dilations of one contraction
====================================

A contraction ``T`` on ``C^n`` has a unitary 1-dilation on ``C^(2n)`` built
from its defect operators. Asking for agreement of the first ``N`` powers
costs more room, and the smallest room that works has dimension
``n + N d_T`` where ``d_T`` is the defect rank.
"""

import numpy as np

from dilatron import (
    NDilation,
    check_n_minimality,
    defect,
    egervary_dilation,
    halmos_dilation,
    verify_dilation,
)

np.set_printoptions(precision=4, suppress=True)

###############################################################################
# The scalar 0.5 and its 2x2 dilation
t = np.array([[0.5]])
hal = halmos_dilation(t)
print(hal.unitary.real)

###############################################################################
# The corner of ``U`` is ``T`` but the corner of ``U^2`` is 1, not 0.25.
for order in (1, 2):
    rep = verify_dilation(hal, t, order)
    print(f"order {order}: pass={rep.passed} max residual={rep.max_residual:.4f}")

###############################################################################
# A block construction reproduces the first N powers on the smallest
# possible space.
rng = np.random.default_rng(0)
w, _ = np.linalg.qr(rng.standard_normal((3, 3)))
v, _ = np.linalg.qr(rng.standard_normal((3, 3)))
t3 = w @ np.diag([1.0, 0.6, 0.2]) @ v.T
print("defect rank:", defect(t3).d_rank)

dil = egervary_dilation(t3, 4)
rep = verify_dilation(dil, t3, 4)
print("dimension", dil.dim, "pass", rep.passed, f"max residual {rep.max_residual:.1e}")
print("N-minimal, span dimension:", check_n_minimality(dil))

###############################################################################
# Padding the dilation with an unrelated 1x1 unitary keeps it a dilation
# but the extra coordinate is never reached from H.
m = dil.dim
big = np.eye(m + 1, dtype=complex)
big[:m, :m] = dil.unitary
padded = NDilation((big,), h_dim=3, order=4)
print("padded passes:", verify_dilation(padded, t3, 4).passed)
print("padded minimal, span:", check_n_minimality(padded))

###############################################################################
# Dilations are not unique. Both matrices below are 1-dilations of 0 and
# they have different spectra, so they are not unitarily equivalent.
zero = np.zeros((1, 1))
for u in (np.array([[0, 1], [1, 0]]), np.array([[0, -1], [1, 0]])):
    d = NDilation((u.astype(complex),), h_dim=1, order=1)
    print(verify_dilation(d, zero, 1).passed, np.round(np.linalg.eigvals(u), 6))
