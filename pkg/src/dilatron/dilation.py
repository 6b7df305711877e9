"""Unitary N-dilations of a single contraction.

A unitary ``U`` on ``C^m`` (``m >= n``) is a unitary N-dilation of the
``n x n`` contraction ``T`` when ``T^k = P U^k P`` for ``k = 1..N``, where
``P`` compresses to the first ``n`` coordinates. This module builds the
Halmos 1-dilation, the minimal Egervary N-dilation of dimension
``n + N * d_T``, and the checks that go with them.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotContraction, NotInvariant, ShapeMismatch
from .linalg import (
    EPS_DIL,
    EPS_PSD,
    RANK_TOL,
    adjoint,
    as_cmatrix,
    block_assemble,
    commutator_norm,
    numerical_rank,
    operator_norm,
    unitarity_residual,
)

__all__ = [
    "CONSTRUCTIONS",
    "DefectData",
    "NDilation",
    "VerificationReport",
    "ErgodicReport",
    "defect",
    "halmos_dilation",
    "egervary_dilation",
    "verify_dilation",
    "check_n_minimality",
    "invariant_vector_check",
    "ergodic_demo",
    "graded_indices",
]

CONSTRUCTIONS = frozenset(
    {"halmos", "egervary", "doubly_commuting", "commutant_pair", "external"}
)

# Singular values this close to 1 carry no defect. Dropping a direction with
# sigma = 1 - s costs ~2s in unitarity, so s must stay well below EPS_DIL.
_UNIT_SNAP = 1e-12


@dataclass(frozen=True)
class DefectData:
    """Defect operators of a contraction ``T``.

    ``d_op = (I - T*T)^{1/2}``, ``d_star_op = (I - TT*)^{1/2}``; the columns of
    ``iso_basis`` (``iso_basis_star``) are an orthonormal basis of the range
    of ``d_op`` (``d_star_op``), paired so that the unitary ``V`` between the
    two defect spaces maps ``iso_basis[:, i]`` to ``iso_basis_star[:, i]``.
    """

    d_op: np.ndarray
    d_star_op: np.ndarray
    d_rank: int
    iso_basis: np.ndarray
    iso_basis_star: np.ndarray
    # singular values of T and defect values sqrt(1 - s^2) on the paired columns
    sigma: np.ndarray = field(repr=False)
    delta: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class NDilation:
    """Commuting unitaries on ``C^m`` whose first ``h_dim`` coordinates carry H."""

    unitaries: Tuple[np.ndarray, ...]
    h_dim: int
    order: int
    construction: str = "external"

    def __post_init__(self):
        us = tuple(as_cmatrix(u, f"unitaries[{i}]") for i, u in enumerate(self.unitaries))
        if not us:
            raise ShapeMismatch("a dilation needs at least one unitary")
        m = us[0].shape[0]
        for i, u in enumerate(us):
            if u.shape != (m, m):
                raise ShapeMismatch(f"unitaries[{i}] has shape {u.shape}, expected {(m, m)}")
        if not 1 <= self.h_dim <= m:
            raise ShapeMismatch(f"h_dim={self.h_dim} must lie in [1, {m}]")
        if self.order < 0:
            raise ValueError("order must be nonnegative")
        if self.construction not in CONSTRUCTIONS:
            raise ValueError(f"unknown construction {self.construction!r}")
        object.__setattr__(self, "unitaries", us)

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def unitary(self) -> np.ndarray:
        """The single unitary of a one-operator dilation."""
        if len(self.unitaries) != 1:
            raise ShapeMismatch(f"dilation has {len(self.unitaries)} unitaries")
        return self.unitaries[0]


@dataclass
class VerificationReport:
    """Residuals of a dilation check, keyed by multi-index."""

    passed: bool
    order: int
    tol: float
    max_residual: float
    first_failure: Optional[Tuple[int, ...]]
    residuals: Dict[Tuple[int, ...], float]
    unitarity_residual: float
    commutation_residual: float

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "order": self.order,
            "tol": self.tol,
            "max_residual": self.max_residual,
            "first_failure": None if self.first_failure is None else list(self.first_failure),
            "unitarity_residual": self.unitarity_residual,
            "commutation_residual": self.commutation_residual,
            "residuals": {",".join(map(str, k)): v for k, v in self.residuals.items()},
        }


def _check_contraction(t, name="t", eps_psd=EPS_PSD) -> np.ndarray:
    t = as_cmatrix(t, name)
    if t.shape[0] != t.shape[1]:
        raise ShapeMismatch(f"{name}: expected a square matrix, got {t.shape}")
    nrm = operator_norm(t)
    if nrm > 1.0 + eps_psd:
        raise NotContraction(f"{name}: operator norm {nrm:.12g} exceeds 1")
    return t


def defect(t, eps_psd: float = EPS_PSD, rank_tol: float = RANK_TOL) -> DefectData:
    """Defect operators, defect rank and paired defect-space bases of ``t``.

    Everything is read off one SVD ``T = W diag(s) V0*``: ``D_T =
    V0 diag(sqrt(1 - s^2)) V0*`` and ``D_{T*} = W diag(sqrt(1 - s^2)) W*``.
    This keeps ``T D_T = D_{T*} T`` exact up to rounding, which the
    dilations below need for unitarity at the 1e-10 level.
    """
    t = _check_contraction(t, eps_psd=eps_psd)
    u, s, vh = np.linalg.svd(t)
    v0 = adjoint(vh)
    gap = np.clip(1.0 - s * s, 0.0, None)
    gap[s >= 1.0 - _UNIT_SNAP] = 0.0
    delta = np.sqrt(gap)
    d_op = (v0 * delta) @ vh
    d_star = (u * delta) @ adjoint(u)
    d_op = 0.5 * (d_op + adjoint(d_op))
    d_star = 0.5 * (d_star + adjoint(d_star))
    d_rank = numerical_rank(d_op, rank_tol)
    # svd orders s descending, so the largest defects sit in the last columns
    cols = np.argsort(delta, kind="stable")[::-1][:d_rank]
    cols = np.sort(cols)
    return DefectData(
        d_op=d_op,
        d_star_op=d_star,
        d_rank=d_rank,
        iso_basis=v0[:, cols],
        iso_basis_star=u[:, cols],
        sigma=s[cols],
        delta=delta[cols],
    )


def halmos_dilation(t, eps_psd: float = EPS_PSD) -> NDilation:
    """The 2n x 2n unitary ``[[T, D_{T*}], [D_T, -T*]]``; a 1-dilation only."""
    t = _check_contraction(t, eps_psd=eps_psd)
    dd = defect(t, eps_psd=eps_psd)
    n = t.shape[0]
    u = block_assemble([[t, dd.d_star_op], [dd.d_op, -adjoint(t)]], [n, n], [n, n])
    return NDilation((u,), h_dim=n, order=1, construction="halmos")


def egervary_dilation(t, n_order: int, eps_psd: float = EPS_PSD) -> NDilation:
    """Minimal unitary N-dilation of ``t`` on ``C^(n + N d_T)``.

    The dilation space is ``H + D_{T*} + ... + D_{T*}`` (N copies), each copy
    written in the ``d_T`` coordinates of ``DefectData.iso_basis_star``:

        [ T        0 ... 0   D_{T*} ]
        [ V D_T    0 ... 0   -V T*  ]
        [ 0        I         0      ]
        [             ...           ]
        [ 0        ...   I   0      ]

    ``V`` sends the i-th right singular vector of the defect space to the
    i-th left one, so ``V D_T`` is ``diag(delta) V0*`` and ``-V T*`` is
    ``-diag(sigma)`` in these coordinates. A unitary ``t`` is returned as is.
    """
    if n_order < 1:
        raise ValueError("n_order must be a positive integer")
    t = _check_contraction(t, eps_psd=eps_psd)
    n = t.shape[0]
    dd = defect(t, eps_psd=eps_psd)
    d = dd.d_rank
    if d == 0:
        return NDilation((t.copy(),), h_dim=n, order=n_order, construction="egervary")
    grid: List[List[Optional[np.ndarray]]] = [[None] * (n_order + 1) for _ in range(n_order + 1)]
    grid[0][0] = t
    grid[0][n_order] = dd.iso_basis_star * dd.delta
    grid[1][0] = dd.delta[:, None] * adjoint(dd.iso_basis)
    grid[1][n_order] = -np.diag(dd.sigma).astype(np.complex128)
    eye = np.eye(d, dtype=np.complex128)
    for j in range(1, n_order):
        grid[j + 1][j] = eye
    dims = [n] + [d] * n_order
    u = block_assemble(grid, dims, dims)
    return NDilation((u,), h_dim=n, order=n_order, construction="egervary")


def graded_indices(k: int, order: int) -> List[Tuple[int, ...]]:
    """Nonnegative multi-indices of length ``k`` with total degree <= ``order``.

    Ordered by degree, then lexicographically.
    """
    out = [a for a in itertools.product(range(order + 1), repeat=k) if sum(a) <= order]
    out.sort(key=lambda a: (sum(a), a))
    return out


def _ops_of(tuple_) -> List[np.ndarray]:
    ops = getattr(tuple_, "ops", tuple_)
    if isinstance(ops, np.ndarray) and ops.ndim == 2:
        ops = [ops]
    return [as_cmatrix(o, f"ops[{i}]") for i, o in enumerate(ops)]


def _power_table(mats: Sequence[np.ndarray], top: int) -> List[List[np.ndarray]]:
    table = []
    for a in mats:
        pw = [np.eye(a.shape[0], dtype=np.complex128)]
        for _ in range(top):
            pw.append(pw[-1] @ a)
        table.append(pw)
    return table


def _check_shapes(dil: NDilation, ops: Sequence[np.ndarray]) -> int:
    if len(ops) != len(dil.unitaries):
        raise ShapeMismatch(
            f"tuple has {len(ops)} operators but dilation has {len(dil.unitaries)} unitaries"
        )
    n = ops[0].shape[0]
    for i, o in enumerate(ops):
        if o.shape != (n, n):
            raise ShapeMismatch(f"ops[{i}] has shape {o.shape}, expected {(n, n)}")
    if n != dil.h_dim:
        raise ShapeMismatch(f"operators are {n}x{n} but dilation h_dim is {dil.h_dim}")
    return n


def _structural_residuals(dil: NDilation) -> Tuple[float, float]:
    unit = max(unitarity_residual(u) for u in dil.unitaries)
    comm = 0.0
    for a, b in itertools.combinations(dil.unitaries, 2):
        comm = max(comm, commutator_norm(a, b))
    return unit, comm


def _finish(residuals, order, tol, unit, comm) -> VerificationReport:
    first = next((m for m, r in residuals.items() if not r <= tol), None)
    worst = max(residuals.values()) if residuals else 0.0
    passed = first is None and unit <= tol and comm <= tol
    return VerificationReport(
        passed=passed,
        order=order,
        tol=tol,
        max_residual=worst,
        first_failure=first,
        residuals=residuals,
        unitarity_residual=unit,
        commutation_residual=comm,
    )


def verify_dilation(dil: NDilation, tuple_, n_order: int, tol: float = EPS_DIL) -> VerificationReport:
    """Check ``T_1^a_1 ... T_k^a_k = P U_1^a_1 ... U_k^a_k P`` for ``|a| <= n_order``.

    ``tuple_`` may be a :class:`~dilatron.multi.ContractionTuple`, a sequence
    of matrices, or a single matrix. Passing also requires the unitaries to
    be unitary and pairwise commuting within ``tol``.
    """
    ops = _ops_of(tuple_)
    n = _check_shapes(dil, ops)
    tp = _power_table(ops, n_order)
    up = _power_table(dil.unitaries, n_order)
    residuals = {}
    for alpha in graded_indices(len(ops), n_order):
        lhs = np.eye(n, dtype=np.complex128)
        rows = up[0][alpha[0]][:n, :]
        for i, a in enumerate(alpha):
            lhs = lhs @ tp[i][a]
            if i:
                rows = rows @ up[i][a]
        residuals[alpha] = operator_norm(lhs - rows[:, :n])
    unit, comm = _structural_residuals(dil)
    return _finish(residuals, n_order, tol, unit, comm)


def check_n_minimality(dil: NDilation, n_order: Optional[int] = None, rank_tol: float = RANK_TOL):
    """Return ``(is_minimal, dim span{U^k h : h in H, 0 <= k <= N})``.

    The dilation is N-minimal exactly when that span is the whole space.
    """
    u = dil.unitary
    order = dil.order if n_order is None else n_order
    n = dil.h_dim
    block = np.eye(u.shape[0], n, dtype=np.complex128)
    cols = [block]
    for _ in range(order):
        block = u @ block
        cols.append(block)
    span_dim = numerical_rank(np.hstack(cols), rank_tol)
    return span_dim == u.shape[0], span_dim


def invariant_vector_check(t, h, tol: float = 1e-10) -> float:
    """Relative residual ``||T* h - h|| / ||h||`` for an invariant vector ``h`` of ``T``.

    For a contraction, ``T h = h`` forces ``T* h = h``; callers assert the
    returned value is small.
    """
    t = _check_contraction(t)
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    if h.shape[0] != t.shape[0]:
        raise ShapeMismatch(f"vector has length {h.shape[0]}, matrix is {t.shape}")
    hn = np.linalg.norm(h)
    if hn == 0:
        raise NotInvariant("the zero vector is not admissible")
    if np.linalg.norm(t @ h - h) > tol * hn:
        raise NotInvariant("h is not an invariant vector of t")
    return float(np.linalg.norm(adjoint(t) @ h - h) / hn)


@dataclass
class ErgodicReport:
    order: int
    dilation_order: int
    dimension: int
    # (1/(N+1)) sum_{k<=N} u^k at u = exp(2 pi i / (2N+2))
    scalar_sum: complex
    residual_modulus: float
    # same quantity read off U_N acting on its u-eigenvector
    matrix_residual_modulus: float
    eigen_residual: float
    # P (1/(N+1)) sum U_N^k P, i.e. the true Cesaro mean of T = 0
    compression_modulus: float
    limit_target: float

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "dilation_order": self.dilation_order,
            "dimension": self.dimension,
            "scalar_sum": [self.scalar_sum.real, self.scalar_sum.imag],
            "residual_modulus": self.residual_modulus,
            "matrix_residual_modulus": self.matrix_residual_modulus,
            "eigen_residual": self.eigen_residual,
            "compression_modulus": self.compression_modulus,
            "limit_target": self.limit_target,
        }


def ergodic_demo(n_order: int) -> ErgodicReport:
    """Cesaro means of a (2N+1)-dilation of ``T = 0`` need not approach 0.

    ``U_N`` is the (2N+2)-cyclic shift. Its compression reproduces the mean of
    ``T^k``, which is ``1/(N+1)``, yet on the eigenvector for ``u =
    exp(2 pi i/(2N+2))`` the mean of ``U_N^k`` is ``2/((N+1)(1-u))``, whose
    modulus tends to ``2/pi``.
    """
    if n_order < 1:
        raise ValueError("n_order must be a positive integer")
    dil = egervary_dilation(np.zeros((1, 1)), 2 * n_order + 1)
    big_u = dil.unitary
    m = big_u.shape[0]
    u = np.exp(2j * np.pi / m)
    powers = u ** np.arange(n_order + 1)
    scalar = complex(powers.sum() / (n_order + 1))

    # U e_j = e_{j+1 mod m}, so v_j = u^{-j} is the u-eigenvector
    v = u ** (-np.arange(m)) / np.sqrt(m)
    e0 = np.zeros(m, dtype=np.complex128)
    e0[0] = 1.0
    acc_v = np.zeros(m, dtype=np.complex128)
    acc_e = np.zeros(m, dtype=np.complex128)
    xv, xe = v.copy(), e0.copy()
    for _ in range(n_order + 1):
        acc_v += xv
        acc_e += xe
        xv = big_u @ xv
        xe = big_u @ xe
    acc_v /= n_order + 1
    acc_e /= n_order + 1
    return ErgodicReport(
        order=n_order,
        dilation_order=2 * n_order + 1,
        dimension=m,
        scalar_sum=scalar,
        residual_modulus=abs(scalar),
        matrix_residual_modulus=float(abs(np.vdot(v, acc_v))),
        eigen_residual=float(np.linalg.norm(big_u @ v - u * v)),
        compression_modulus=float(abs(acc_e[0])),
        limit_target=2.0 / np.pi,
    )
