"""Finite-dimensional unitary N-dilations of contractions and their consequences.

Submodules
----------
linalg      dense complex kernel (PSD square root, norms, rank, blocks)
dilation    Halmos and Egervary dilations of one contraction, verification
multi       doubly commuting tuples, regular dilations, Brehmer conditions
polynomial  multivariate polynomials, matrix evaluation, torus sup-norm
spectral    joint diagonalization, von Neumann certificates, torus cubature
cpmap       Choi matrices, Kraus decompositions and the index of CP maps
io          JSON schemas
cli         the ``dilatron`` command
"""

from .cpmap import (
    CPMap,
    automorphism_compression_check,
    choi_matrix,
    depolarizing_map,
    index,
    is_cp,
    kraus_decompose,
    transpose_map,
)
from .dilation import (
    DefectData,
    NDilation,
    VerificationReport,
    check_n_minimality,
    defect,
    egervary_dilation,
    ergodic_demo,
    graded_indices,
    halmos_dilation,
    invariant_vector_check,
    verify_dilation,
)
from .errors import *  # noqa: F401,F403
from .linalg import block_assemble, numerical_rank, operator_norm, psd_sqrt
from .multi import (
    ContractionTuple,
    brehmer_check,
    dilate_commutant_pair,
    dilation_stages,
    doubly_commuting_dilation,
    t_of_m,
    u_of_m,
    verify_regular,
)
from .polynomial import MultiPoly, eval_matrix, eval_scalar, holbrook_polynomial, random_poly, sup_norm_torus
from .spectral import (
    CubatureRule,
    VNCertificate,
    joint_diagonalize,
    scalar_cubature,
    vn_certificate,
    vn_check,
)

__version__ = "0.1.0"
