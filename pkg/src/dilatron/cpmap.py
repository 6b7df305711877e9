"""Completely positive maps on ``M_n``: Choi matrix, Kraus form and index.

Conventions. Matrix units ``E_ab`` are enumerated row-major (``a`` outer,
``b`` inner). The Choi matrix is the ``n^2 x n^2`` block matrix whose
``(a, b)`` block is ``phi(E_ab)``, i.e.
``choi[a*n + i, b*n + j] = phi(E_ab)[i, j]``. With this layout a Kraus
operator ``A`` contributes ``vec(A) vec(A)*`` where ``vec`` stacks the
columns of ``A`` (``vec(A)[a*n + i] = A[i, a]``).
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import NotCP, NotUnitary, ShapeMismatch
from .linalg import EPS_EIG, EPS_PSD, RANK_TOL, adjoint, as_cmatrix, numerical_rank, operator_norm, unitarity_residual

__all__ = [
    "CPMap",
    "vec",
    "unvec",
    "matrix_units",
    "choi_matrix",
    "is_cp",
    "kraus_decompose",
    "index",
    "automorphism_compression_check",
    "transpose_map",
    "depolarizing_map",
]


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(a).T.reshape(-1)


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v).reshape(n, n).T


def matrix_units(n: int) -> List[np.ndarray]:
    """``E_00, E_01, ..., E_{n-1,n-1}`` in row-major order."""
    units = []
    for a in range(n):
        for b in range(n):
            e = np.zeros((n, n), dtype=np.complex128)
            e[a, b] = 1.0
            units.append(e)
    return units


def _choi_from_images(images: Sequence[np.ndarray], n: int) -> np.ndarray:
    choi = np.zeros((n * n, n * n), dtype=np.complex128)
    for idx, img in enumerate(images):
        a, b = divmod(idx, n)
        choi[a * n:(a + 1) * n, b * n:(b + 1) * n] = img
    return choi


def _choi_from_kraus(kraus: Sequence[np.ndarray]) -> np.ndarray:
    vs = np.array([vec(k) for k in kraus])
    return vs.T @ np.conj(vs)


@dataclass(frozen=True)
class CPMap:
    """A linear map on ``n x n`` matrices, held as its Choi matrix.

    ``kraus`` is kept when the map was given in Kraus form; it need not be
    minimal. Build instances with :meth:`from_kraus`,
    :meth:`from_unit_images` or :meth:`from_function`.
    """

    dim: int
    choi: np.ndarray = field(repr=False)
    kraus: Optional[tuple] = field(default=None, repr=False)

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray]) -> "CPMap":
        ks = [as_cmatrix(k, f"kraus[{i}]") for i, k in enumerate(kraus)]
        if not ks:
            raise ShapeMismatch("need at least one Kraus operator")
        n = ks[0].shape[0]
        for i, k in enumerate(ks):
            if k.shape != (n, n):
                raise ShapeMismatch(f"kraus[{i}] has shape {k.shape}, expected {(n, n)}")
        return cls(n, _choi_from_kraus(ks), tuple(ks))

    @classmethod
    def from_unit_images(cls, images: Sequence[np.ndarray], dim: Optional[int] = None) -> "CPMap":
        imgs = [as_cmatrix(x, f"unit_images[{i}]") for i, x in enumerate(images)]
        n = dim if dim is not None else int(round(np.sqrt(len(imgs))))
        if len(imgs) != n * n:
            raise ShapeMismatch(f"expected {n * n} matrix-unit images, got {len(imgs)}")
        for i, x in enumerate(imgs):
            if x.shape != (n, n):
                raise ShapeMismatch(f"unit_images[{i}] has shape {x.shape}, expected {(n, n)}")
        return cls(n, _choi_from_images(imgs, n))

    @classmethod
    def from_function(cls, phi: Callable[[np.ndarray], np.ndarray], dim: int) -> "CPMap":
        return cls.from_unit_images([phi(e) for e in matrix_units(dim)], dim)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        n = self.dim
        if x.shape != (n, n):
            raise ShapeMismatch(f"argument has shape {x.shape}, map acts on {(n, n)}")
        blocks = self.choi.reshape(n, n, n, n)  # [a, i, b, j]
        return np.einsum("ab,aibj->ij", x, blocks)

    def unit_images(self) -> List[np.ndarray]:
        n = self.dim
        return [self.choi[a * n:(a + 1) * n, b * n:(b + 1) * n].copy() for a in range(n) for b in range(n)]

    def compose(self, other: "CPMap") -> "CPMap":
        """``self o other``."""
        if other.dim != self.dim:
            raise ShapeMismatch("maps act on different dimensions")
        return CPMap.from_function(lambda x: self(other(x)), self.dim)

    def contractivity(self) -> float:
        """``||phi(I)||``; informational only."""
        return operator_norm(self(np.eye(self.dim)))


def choi_matrix(phi) -> np.ndarray:
    """Choi matrix of a :class:`CPMap` or of a list of Kraus operators."""
    if isinstance(phi, CPMap):
        return phi.choi
    return CPMap.from_kraus(phi).choi


def _choi_eig(phi: CPMap):
    c = phi.choi
    return np.linalg.eigh(0.5 * (c + adjoint(c)))


def is_cp(phi: CPMap, eps_psd: float = EPS_PSD):
    """Return ``(completely_positive, min_choi_eigenvalue)``."""
    w, _ = _choi_eig(phi)
    return bool(w[0] >= -eps_psd), float(w[0])


def index(phi: CPMap, tol: float = RANK_TOL, eps_psd: float = EPS_PSD) -> int:
    """Minimal number of Kraus operators, the rank of the Choi matrix."""
    cp, lam = is_cp(phi, eps_psd)
    if not cp:
        raise NotCP(f"map is not completely positive (min Choi eigenvalue {lam:.3e})")
    return numerical_rank(phi.choi, tol)


def kraus_decompose(phi: CPMap, tol: float = RANK_TOL, eps_psd: float = EPS_PSD) -> List[np.ndarray]:
    """Minimal Kraus family from the spectral decomposition of the Choi matrix.

    Returns exactly ``index(phi)`` operators, largest eigenvalue first.
    """
    d = index(phi, tol, eps_psd)
    w, q = _choi_eig(phi)
    out = []
    for j in range(len(w) - 1, len(w) - 1 - d, -1):
        out.append(np.sqrt(w[j]) * unvec(q[:, j], phi.dim))
    return out


def automorphism_compression_check(u, h_dim: int, eps_unit: float = EPS_EIG) -> CPMap:
    """The map ``T -> (P U P) T (P U P)*`` induced on ``M_n`` by ``Ad U``.

    A single Kraus operator, the top-left ``n x n`` corner of ``u``, so the
    index is 1 (or 0 when that corner vanishes). A CP map of index above 1
    therefore never arises as such a compression of an automorphism of a
    finite-dimensional ``B(K)``.
    """
    u = as_cmatrix(u, "u")
    if u.shape[0] != u.shape[1]:
        raise ShapeMismatch(f"u must be square, got {u.shape}")
    r = unitarity_residual(u)
    if r > eps_unit:
        raise NotUnitary(f"u is not unitary (residual {r:.3e})")
    if not 1 <= h_dim <= u.shape[0]:
        raise ShapeMismatch(f"h_dim={h_dim} must lie in [1, {u.shape[0]}]")
    return CPMap.from_kraus([u[:h_dim, :h_dim]])


def transpose_map(n: int) -> CPMap:
    return CPMap.from_function(lambda x: x.T, n)


def depolarizing_map(n: int) -> CPMap:
    """``T -> tr(T) I / n``."""
    return CPMap.from_function(lambda x: np.trace(x) * np.eye(n) / n, n)
