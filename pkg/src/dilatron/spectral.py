"""Joint spectra of commuting unitaries, von Neumann certificates and torus cubature.

If commuting unitaries ``U_1..U_k`` on ``C^m`` N-dilate ``T_1..T_k`` and
``e_1..e_m`` is a joint eigenbasis with joint eigenvalues ``w^i``, then for
every polynomial of degree at most N

    p(T) = sum_i p(w^i) A_i,    A_i = (P e_i)(P e_i)*,

with PSD ``A_i`` summing to the identity. For scalar ``t`` in the open
polydisc the ``A_i`` are nonnegative numbers, giving a cubature rule on the
torus that reproduces ``p(t)`` exactly.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from .dilation import NDilation, _ops_of, graded_indices, verify_dilation
from .errors import DegenerateFailure, DegreeExceedsOrder, DilatronError, NotCommuting, NotInDisc, NotUnitary
from .linalg import EPS_DC, EPS_DIL, EPS_EIG, adjoint, as_cmatrix, commutator_norm, operator_norm, unitarity_residual
from .multi import ContractionTuple, doubly_commuting_dilation
from .polynomial import MultiPoly, default_grid, eval_matrix, sup_norm_torus

__all__ = [
    "EPS_JD",
    "JointDiag",
    "VNCertificate",
    "CubatureRule",
    "VNCheckReport",
    "joint_diagonalize",
    "vn_certificate",
    "scalar_cubature",
    "vn_check",
]

EPS_JD = 1e-8
_CLUSTER_GAP = 1e-7
_MAX_DEPTH = 5
_WEIGHT_CLAMP = 1e-12

SeedLike = Union[None, int, np.random.Generator]


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(42 if seed is None else seed)


@dataclass
class JointDiag:
    """``U_j = Q diag(spectra[j]) Q*`` for every j."""

    basis: np.ndarray
    spectra: np.ndarray
    residual: float


def _clusters(values: np.ndarray, gap: float) -> List[np.ndarray]:
    # single linkage: values closer than gap end up in one cluster
    m = len(values)
    parent = list(range(m))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    dist = np.abs(values[:, None] - values[None, :])
    for a, b in zip(*np.nonzero(np.triu(dist < gap, 1))):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    groups = {}
    for a in range(m):
        groups.setdefault(find(a), []).append(a)
    return [np.array(g) for g in groups.values()]


def _offdiag_residual(mats, q) -> float:
    worst = 0.0
    for a in mats:
        d = adjoint(q) @ a @ q
        worst = max(worst, operator_norm(d - np.diag(np.diag(d))))
    return worst


def _split(mats, rng, depth, eps_jd):
    k = len(mats)
    c = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    z = sum(cj * a for cj, a in zip(c, mats))
    _, q = scipy.linalg.schur(z, output="complex")
    if _offdiag_residual(mats, q) <= eps_jd:
        return q
    if depth >= _MAX_DEPTH:
        raise DegenerateFailure(
            f"joint diagonalization residual above {eps_jd:.1e} after {_MAX_DEPTH} refinements"
        )
    lam = np.diag(adjoint(q) @ z @ q)
    for idx in _clusters(lam, _CLUSTER_GAP):
        if len(idx) == 1:
            continue
        qc = q[:, idx]
        sub = [adjoint(qc) @ a @ qc for a in mats]
        q[:, idx] = qc @ _split(sub, rng, depth + 1, eps_jd)
    return q


def _sort_key(points: np.ndarray):
    ang = np.mod(np.angle(points), 2 * np.pi)
    ang[ang > 2 * np.pi - 1e-12] = 0.0
    ang = np.round(ang, 9)
    # lexsort treats the last key as primary
    return np.lexsort(ang.T[::-1])


def joint_diagonalize(
    unitaries: Sequence[np.ndarray],
    seed: SeedLike = None,
    eps_jd: float = EPS_JD,
    eps_dc: float = EPS_DC,
    eps_unit: float = EPS_EIG,
) -> JointDiag:
    """Common eigenbasis of commuting unitaries.

    A random complex combination ``Z = sum c_j U_j`` is normal and generically
    separates joint eigenspaces, so its Schur basis diagonalizes every
    ``U_j``. Where it does not (colliding eigenvalues of Z), the clusters are
    refined with fresh combinations, at most five levels deep. Columns are
    ordered lexicographically by ``(arg w_1, ..., arg w_k)`` in ``[0, 2 pi)``.
    """
    mats = [as_cmatrix(u, f"unitaries[{i}]") for i, u in enumerate(unitaries)]
    if not mats:
        raise ValueError("need at least one unitary")
    for i, a in enumerate(mats):
        r = unitarity_residual(a)
        if r > eps_unit:
            raise NotUnitary(f"unitaries[{i}] is not unitary (residual {r:.3e})")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            r = commutator_norm(mats[i], mats[j])
            if r > eps_dc:
                raise NotCommuting(f"unitaries[{i}] and [{j}] do not commute (residual {r:.3e})")
    q = _split(mats, _rng(seed), 0, eps_jd)
    spectra = np.array([np.diag(adjoint(q) @ a @ q) for a in mats])
    spectra = spectra / np.abs(spectra)
    order = _sort_key(spectra.T)
    q = q[:, order]
    spectra = spectra[:, order]
    residual = max(operator_norm(a @ q - q * w) for a, w in zip(mats, spectra))
    if residual > eps_jd:
        raise DegenerateFailure(f"joint eigenbasis residual {residual:.3e} exceeds {eps_jd:.1e}")
    return JointDiag(q, spectra, residual)


def _monomials(points: np.ndarray, exps) -> np.ndarray:
    out = np.ones(points.shape[0], dtype=np.complex128)
    for j, e in enumerate(exps):
        if e:
            out = out * points[:, j] ** e
    return out


def _poly_at(p: MultiPoly, points: np.ndarray) -> np.ndarray:
    vals = np.zeros(points.shape[0], dtype=np.complex128)
    for exps, coef in p.terms.items():
        vals += coef * _monomials(points, exps)
    return vals


@dataclass
class VNCertificate:
    """Torus points ``w^i`` (rows of ``points``) and PSD weight operators ``A_i``."""

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def evaluate(self, p: MultiPoly) -> np.ndarray:
        """``sum_i p(w^i) A_i``."""
        return np.tensordot(_poly_at(p, self.points), self.weights, axes=1)

    def bound(self, p: MultiPoly) -> float:
        return float(np.max(np.abs(_poly_at(p, self.points))))

    def weight_sum_residual(self) -> float:
        n = self.weights.shape[1]
        return operator_norm(self.weights.sum(axis=0) - np.eye(n))

    def min_weight_eigenvalue(self) -> float:
        return float(min(np.linalg.eigvalsh(a)[0] for a in self.weights))

    def reconstruction_residual(self, tuple_) -> float:
        """Max over monomials of degree <= order of ``||T^a - sum (w^i)^a A_i||``."""
        ops = _ops_of(tuple_)
        worst = 0.0
        for exps in graded_indices(len(ops), self.order):
            worst = max(
                worst,
                operator_norm(eval_matrix(MultiPoly.monomial(exps), ops) - self.evaluate(MultiPoly.monomial(exps))),
            )
        return worst


@dataclass
class CubatureRule:
    """Torus points with nonnegative weights summing to one."""

    points: np.ndarray
    weights: np.ndarray
    order: int

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def apply(self, p: MultiPoly) -> complex:
        """``sum_i a_i p(w^i)``."""
        return complex(np.dot(self.weights, _poly_at(p, self.points)))


def vn_certificate(dil: NDilation, tuple_, seed: SeedLike = None, tol: float = EPS_DIL) -> VNCertificate:
    """Von Neumann certificate read off a joint eigenbasis of the dilation.

    The dilation is verified at its own order first; a failing dilation
    raises :class:`~dilatron.errors.DilatronError`.
    """
    report = verify_dilation(dil, tuple_, dil.order, tol)
    if not report.passed:
        raise DilatronError(
            f"dilation fails verification at order {dil.order}: max residual "
            f"{report.max_residual:.3e}, unitarity {report.unitarity_residual:.3e}"
        )
    jd = joint_diagonalize(dil.unitaries, seed=seed)
    head = jd.basis[: dil.h_dim, :]
    weights = np.einsum("ai,bi->iab", head, np.conj(head))
    weights = 0.5 * (weights + np.conj(np.transpose(weights, (0, 2, 1))))
    return VNCertificate(points=jd.spectra.T.copy(), weights=weights, order=dil.order)


def scalar_cubature(t_point: Sequence[complex], n_order: int, seed: SeedLike = None) -> CubatureRule:
    """``(N+1)^k``-point rule with ``p(t) = sum a_i p(w^i)`` for ``deg p <= N``.

    ``t_point`` must lie in the open polydisc; points within 1e-12 of the
    boundary are rejected.
    """
    t = np.atleast_1d(np.asarray(t_point, dtype=np.complex128))
    if t.ndim != 1 or t.size == 0:
        raise ValueError("t_point must be a nonempty list of complex numbers")
    if not np.all(np.isfinite(t)):
        raise ValueError("t_point has non-finite coordinates")
    if np.any(np.abs(t) > 1.0 - 1e-12):
        raise NotInDisc(f"every |t_i| must be < 1 - 1e-12, got {np.abs(t).max():.17g}")
    ct = ContractionTuple(tuple(np.array([[ti]]) for ti in t))
    dil = doubly_commuting_dilation(ct, n_order)
    cert = vn_certificate(dil, ct, seed=seed)
    a = cert.weights[:, 0, 0].real.copy()
    if a.min() < -_WEIGHT_CLAMP:
        raise DilatronError(f"negative cubature weight {a.min():.3e}")
    a[a < 0] = 0.0
    a /= a.sum()
    return CubatureRule(points=cert.points, weights=a, order=n_order)


@dataclass
class VNCheckReport:
    lhs: float
    cert_bound: Optional[float]
    sup_bound: float
    grid_per_dim: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "cert_bound": self.cert_bound,
            "sup_bound": self.sup_bound,
            "grid_per_dim": self.grid_per_dim,
            "pass": self.passed,
        }


def vn_check(
    tuple_,
    p: MultiPoly,
    cert: Optional[VNCertificate] = None,
    grid_per_dim: Optional[int] = None,
    cert_slack: float = 1e-8,
    sup_slack: float = 1e-6,
) -> VNCheckReport:
    """Compare ``||p(T)||`` with the certificate bound and the torus sup-norm."""
    if cert is not None and p.total_degree > cert.order:
        raise DegreeExceedsOrder(
            f"polynomial degree {p.total_degree} exceeds certificate order {cert.order}"
        )
    lhs = operator_norm(eval_matrix(p, tuple_))
    m = default_grid(p) if grid_per_dim is None else grid_per_dim
    sup = sup_norm_torus(p, m)
    ok = lhs <= sup + sup_slack
    cert_bound = None
    if cert is not None:
        cert_bound = cert.bound(p)
        ok = ok and lhs <= cert_bound + cert_slack
    return VNCheckReport(lhs=lhs, cert_bound=cert_bound, sup_bound=sup, grid_per_dim=m, passed=bool(ok))
