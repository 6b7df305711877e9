"""
Completely positive maps and their index
========================================

A linear map on ``n x n`` matrices is completely positive exactly when its
Choi matrix is positive semidefinite. The rank of that matrix is the
smallest number of Kraus operators, called the index.
"""

import numpy as np

from dilatron import (
    CPMap,
    automorphism_compression_check,
    depolarizing_map,
    index,
    is_cp,
    kraus_decompose,
    transpose_map,
)

###############################################################################
# Transposition is positive but not completely positive.
print(transpose_map(2).choi.real)
print(is_cp(transpose_map(2)))

###############################################################################
# The completely depolarizing map needs all four Kraus operators.
phi = depolarizing_map(2)
print("index", index(phi))
for k in kraus_decompose(phi):
    print(np.round(k, 4))

###############################################################################
# Averaging two conjugations gives index 2.
u = np.diag([1.0, -1.0])
avg = CPMap.from_function(lambda x: 0.5 * (x + u @ x @ u.T), 2)
print("index", index(avg))

###############################################################################
# Compressing ``X -> U X U*`` to a corner always has a single Kraus operator.
rng = np.random.default_rng(0)
q, _ = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
print("index", index(automorphism_compression_check(q, 2)))
