"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; this module adds
the validated spectral primitives the dilation code is built on (Hermitian
eigendecomposition, SVD, PSD square root, operator norm, numerical rank and
block assembly) together with the default tolerances used package-wide.
"""

from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import NotHermitian, NotPSD, ShapeMismatch

__all__ = [
    "EPS_EIG",
    "EPS_HERM",
    "EPS_PSD",
    "RANK_TOL",
    "EPS_DIL",
    "EPS_DC",
    "HermEig",
    "Svd",
    "as_cmatrix",
    "adjoint",
    "herm_eig",
    "svd",
    "psd_sqrt",
    "operator_norm",
    "numerical_rank",
    "block_assemble",
    "unitarity_residual",
    "commutator_norm",
]

EPS_EIG = 1e-10
EPS_HERM = 1e-8
EPS_PSD = 1e-8
RANK_TOL = 1e-10
# dilation identities T^a = P U^a P
EPS_DIL = 1e-10
# acceptance of user supplied (double) commutation
EPS_DC = 1e-8


class HermEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class Svd(NamedTuple):
    """``a = u @ diag(singular_values) @ v.conj().T``, singular values descending."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray


def as_cmatrix(a, name: str = "a") -> np.ndarray:
    """Return ``a`` as a finite 2-D ``complex128`` array.

    Scalars become 1x1 matrices. A copy is made only when needed.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name}: expected a 2-D matrix, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ShapeMismatch(f"{name}: matrix must have positive dimensions")
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
        raise ValueError(f"{name}: non-finite entry at index {bad}")
    return arr


def _square(a, name):
    arr = as_cmatrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeMismatch(f"{name}: expected a square matrix, got {arr.shape}")
    return arr


def adjoint(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def herm_eig(a) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Only the lower triangle is referenced, as in LAPACK ``zheevd``; callers
    wanting a symmetry check should use :func:`psd_sqrt` or check themselves.
    """
    a = _square(a, "a")
    w, q = np.linalg.eigh(a)
    return HermEig(w, q)


def svd(a) -> Svd:
    a = as_cmatrix(a)
    u, s, vh = np.linalg.svd(a)
    return Svd(u, s, adjoint(vh))


def operator_norm(a) -> float:
    """Largest singular value (spectral norm)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def psd_sqrt(a, eps_herm: float = EPS_HERM, eps_psd: float = EPS_PSD) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-eps_psd, 0)`` are clamped to zero before rooting; this
    is routine for ``I - T*T`` when ``T`` has norm one.

    Raises
    ------
    NotHermitian
        If ``||a - a*|| > eps_herm * ||a||``.
    NotPSD
        If the smallest eigenvalue is below ``-eps_psd``.
    """
    a = _square(a, "a")
    scale = operator_norm(a)
    asym = operator_norm(a - adjoint(a))
    if asym > eps_herm * scale:
        raise NotHermitian(f"matrix is not Hermitian: ||a - a*|| = {asym:.3e}")
    w, q = np.linalg.eigh(0.5 * (a + adjoint(a)))
    if w[0] < -eps_psd:
        raise NotPSD(f"matrix is not PSD: min eigenvalue {w[0]:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (q * root) @ adjoint(q)
    return 0.5 * (s + adjoint(s))


def numerical_rank(a, tol: float = RANK_TOL) -> int:
    """Number of singular values exceeding ``tol * max(1, sigma_max)``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def block_assemble(
    blocks: Sequence[Sequence[Optional[np.ndarray]]],
    row_dims: Sequence[int],
    col_dims: Sequence[int],
) -> np.ndarray:
    """Assemble a dense matrix from a grid of blocks; ``None`` slots are zero."""
    if len(blocks) != len(row_dims):
        raise ShapeMismatch(f"grid has {len(blocks)} block rows but {len(row_dims)} row dims")
    row_off = np.concatenate([[0], np.cumsum(row_dims)]).astype(int)
    col_off = np.concatenate([[0], np.cumsum(col_dims)]).astype(int)
    out = np.zeros((row_off[-1], col_off[-1]), dtype=np.complex128)
    for i, row in enumerate(blocks):
        if len(row) != len(col_dims):
            raise ShapeMismatch(f"block row {i} has {len(row)} entries, expected {len(col_dims)}")
        for j, blk in enumerate(row):
            if blk is None:
                continue
            blk = np.asarray(blk, dtype=np.complex128)
            if blk.ndim == 0:
                blk = blk.reshape(1, 1)
            if blk.shape != (row_dims[i], col_dims[j]):
                raise ShapeMismatch(
                    f"block ({i}, {j}) has shape {blk.shape}, slot is {(row_dims[i], col_dims[j])}"
                )
            out[row_off[i]:row_off[i + 1], col_off[j]:col_off[j + 1]] = blk
    return out


def unitarity_residual(u: np.ndarray) -> float:
    """``||U*U - I||``."""
    u = np.asarray(u, dtype=np.complex128)
    return operator_norm(adjoint(u) @ u - np.eye(u.shape[1]))


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return operator_norm(a @ b - b @ a)
