"""
Cesaro means do not commute with dilation
=========================================

For ``T = 0`` the averages ``(1/(N+1)) sum_k T^k`` equal ``1/(N+1)`` and
tend to zero. Dilate ``T`` to order ``2N+1``: the dilation is a cyclic
shift, and its Cesaro mean applied to a suitable eigenvector stays near
``2/pi`` no matter how large ``N`` is.
"""

import numpy as np

from dilatron import egervary_dilation, ergodic_demo

###############################################################################
# The order-3 dilation of 0 is the 4x4 cyclic shift.
print(egervary_dilation(np.zeros((1, 1)), 3).unitary.real)

###############################################################################
# Residual modulus against the limiting value for growing N.
print(f"{'N':>6} {'residual':>10} {'2/pi':>10} {'mean of T':>10}")
for n_order in (1, 10, 100, 500):
    rep = ergodic_demo(n_order)
    print(f"{n_order:>6} {rep.residual_modulus:10.6f} {rep.limit_target:10.6f} {rep.compression_modulus:10.6f}")

###############################################################################
# ``N = 1`` is a two-term sum at ``u = i``, so the modulus is ``|1 + i| / 2``.
print(ergodic_demo(1).residual_modulus, np.sqrt(2) / 2)
