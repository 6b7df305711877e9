"""Commuting tuples of contractions: doubly commuting dilations and regularity.

The dilation of a doubly commuting tuple is built one coordinate at a time.
At stage ``j`` every operator is copied onto ``N + 1`` orthogonal copies of
the current space; the ``j``-th one is replaced by its unfolded unitary

    [ X     0 ... 0   D_{X*} ]
    [ D_X   0 ... 0   -X*    ]
    [ 0     I         0      ]
    [          ...           ]
    [ 0     ...   I   0      ]

and the others by ``diag(Y, ..., Y)``. After ``k`` stages the space has
dimension ``(N + 1)^k n`` and the unitaries reproduce ``T(m)`` for every
integer multi-index with ``|m| <= N``.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .dilation import (
    NDilation,
    VerificationReport,
    _check_shapes,
    _finish,
    _ops_of,
    _power_table,
    _structural_residuals,
    defect,
)
from .errors import (
    FugledeResidual,
    NotCommuting,
    NotContraction,
    NotDoublyCommuting,
    NotUnitary,
    ShapeMismatch,
)
from .linalg import (
    EPS_DC,
    EPS_DIL,
    EPS_EIG,
    EPS_PSD,
    adjoint,
    as_cmatrix,
    block_assemble,
    commutator_norm,
    operator_norm,
    unitarity_residual,
)

__all__ = [
    "ContractionTuple",
    "BrehmerReport",
    "doubly_commuting_dilation",
    "dilation_stages",
    "integer_indices",
    "t_of_m",
    "u_of_m",
    "verify_regular",
    "brehmer_check",
    "dilate_commutant_pair",
]


def _max_pair(ops, fn, ordered=False) -> float:
    pairs = itertools.permutations(ops, 2) if ordered else itertools.combinations(ops, 2)
    return max((fn(a, b) for a, b in pairs), default=0.0)


@dataclass(frozen=True)
class ContractionTuple:
    """Same-size contractions with their (double) commutation residuals.

    ``commute_residual`` is ``max ||T_i T_j - T_j T_i||`` and
    ``double_commute_residual`` is ``max_{i != j} ||T_i T_j* - T_j* T_i||``;
    both are computed on construction. Commutation itself is not enforced
    here; operations that need it check the residuals.
    """

    ops: Tuple[np.ndarray, ...]
    commute_residual: float = field(init=False)
    double_commute_residual: float = field(init=False)
    eps_psd: float = field(default=EPS_PSD, repr=False, compare=False)

    def __post_init__(self):
        raw = self.ops
        if isinstance(raw, np.ndarray) and raw.ndim == 2:
            raw = [raw]
        ops = tuple(as_cmatrix(o, f"ops[{i}]") for i, o in enumerate(raw))
        if not ops:
            raise ShapeMismatch("a tuple needs at least one operator")
        n = ops[0].shape[0]
        for i, o in enumerate(ops):
            if o.shape != (n, n):
                raise ShapeMismatch(f"ops[{i}] has shape {o.shape}, expected {(n, n)}")
            nrm = operator_norm(o)
            if nrm > 1.0 + self.eps_psd:
                raise NotContraction(f"ops[{i}]: operator norm {nrm:.12g} exceeds 1")
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "commute_residual", _max_pair(ops, commutator_norm))
        object.__setattr__(
            self,
            "double_commute_residual",
            _max_pair(ops, lambda a, b: commutator_norm(a, adjoint(b)), ordered=True),
        )

    @property
    def k(self) -> int:
        return len(self.ops)

    @property
    def n(self) -> int:
        return self.ops[0].shape[0]

    def __len__(self):
        return len(self.ops)


def _as_tuple(tuple_) -> ContractionTuple:
    if isinstance(tuple_, ContractionTuple):
        return tuple_
    return ContractionTuple(tuple(_ops_of(tuple_)))


def _unfold(x, dx, dxs, order):
    s = x.shape[0]
    grid: List[List[Optional[np.ndarray]]] = [[None] * (order + 1) for _ in range(order + 1)]
    grid[0][0] = x
    grid[0][order] = dxs
    grid[1][0] = dx
    grid[1][order] = -adjoint(x)
    eye = np.eye(s, dtype=np.complex128)
    for r in range(2, order + 1):
        grid[r][r - 1] = eye
    dims = [s] * (order + 1)
    return block_assemble(grid, dims, dims)


def _stages(ops: Sequence[np.ndarray], order: int, skip: Iterable[int] = ()) -> List[List[np.ndarray]]:
    skip = set(skip)
    defects = {j: defect(t) for j, t in enumerate(ops) if j not in skip}
    current = [np.array(t, dtype=np.complex128) for t in ops]
    history = [current]
    copies = 1
    eye_lift = np.eye(order + 1)
    for j in range(len(ops)):
        if j in skip:
            continue
        # current[j] == kron(I_copies, T_j), so its defects lift the same way
        rep = np.eye(copies)
        dx = np.kron(rep, defects[j].d_op)
        dxs = np.kron(rep, defects[j].d_star_op)
        nxt = []
        for i, y in enumerate(current):
            if i == j:
                nxt.append(_unfold(y, dx, dxs, order))
            else:
                nxt.append(np.kron(eye_lift, y))
        current = nxt
        copies *= order + 1
        history.append(current)
    return history


def doubly_commuting_dilation(tuple_, n_order: int, eps_dc: float = EPS_DC) -> NDilation:
    """Unitary N-dilation of a doubly commuting tuple on ``C^((N+1)^k n)``.

    The result is also a regular N-dilation, see :func:`verify_regular`.
    """
    if n_order < 1:
        raise ValueError("n_order must be a positive integer")
    ct = _as_tuple(tuple_)
    if ct.double_commute_residual > eps_dc:
        raise NotDoublyCommuting(
            f"double commutation residual {ct.double_commute_residual:.3e} exceeds {eps_dc:.1e}"
        )
    final = _stages(ct.ops, n_order)[-1]
    return NDilation(tuple(final), h_dim=ct.n, order=n_order, construction="doubly_commuting")


def dilation_stages(tuple_, n_order: int) -> List[List[np.ndarray]]:
    """Operator tuples after each stage of :func:`doubly_commuting_dilation`.

    Entry 0 is the input tuple and entry ``j`` lives on ``(N+1)^j n``
    dimensions. Every entry compresses to ``T(m)`` on H for ``|m| <= N``.
    """
    ct = _as_tuple(tuple_)
    return _stages(ct.ops, n_order)


def integer_indices(k: int, order: int) -> List[Tuple[int, ...]]:
    """All ``m`` in ``Z^k`` with ``|m_1| + ... + |m_k| <= order``, graded then lexicographic."""
    out = [
        m for m in itertools.product(range(-order, order + 1), repeat=k)
        if sum(abs(x) for x in m) <= order
    ]
    out.sort(key=lambda m: (sum(abs(x) for x in m), m))
    return out


def _signed_product(mats: Sequence[np.ndarray], m: Sequence[int]) -> np.ndarray:
    """(prod A_i^{m_i-})* (prod A_i^{m_i+}) evaluated literally."""
    dim = mats[0].shape[0]
    neg = np.eye(dim, dtype=np.complex128)
    pos = np.eye(dim, dtype=np.complex128)
    for a, mi in zip(mats, m):
        if mi > 0:
            pos = pos @ np.linalg.matrix_power(a, mi)
        elif mi < 0:
            neg = neg @ np.linalg.matrix_power(a, -mi)
    return adjoint(neg) @ pos


def t_of_m(tuple_, m: Sequence[int]) -> np.ndarray:
    """``T(m) = (T_1^{m_1-} ... T_k^{m_k-})* T_1^{m_1+} ... T_k^{m_k+}``."""
    ops = _ops_of(tuple_)
    if len(m) != len(ops):
        raise ShapeMismatch(f"multi-index has length {len(m)}, tuple has {len(ops)} operators")
    return _signed_product(ops, [int(x) for x in m])


def u_of_m(unitaries: Sequence[np.ndarray], m: Sequence[int]) -> np.ndarray:
    """Same positive/negative-part product for a unitary tuple (``U^-1 = U*``)."""
    if len(m) != len(unitaries):
        raise ShapeMismatch(f"multi-index has length {len(m)}, tuple has {len(unitaries)} operators")
    return _signed_product([as_cmatrix(u) for u in unitaries], [int(x) for x in m])


def verify_regular(dil: NDilation, tuple_, n_order: int, tol: float = EPS_DIL) -> VerificationReport:
    """Check ``T(m) = P U(m) P`` for all ``m`` in ``Z^k`` with ``|m| <= n_order``."""
    ops = _ops_of(tuple_)
    n = _check_shapes(dil, ops)
    k = len(ops)
    tp = _power_table(ops, n_order)
    full = _power_table(dil.unitaries, n_order)
    # the rightmost factor only needs its first n columns
    up = [[p[:, :n] for p in row] for row in full]
    residuals: Dict[Tuple[int, ...], float] = {}
    for m in integer_indices(k, n_order):
        lhs_neg = np.eye(n, dtype=np.complex128)
        lhs_pos = np.eye(n, dtype=np.complex128)
        neg_cols = None
        pos_cols = None
        for i in reversed(range(k)):
            mi = m[i]
            if mi > 0:
                pos_cols = up[i][mi] if pos_cols is None else full[i][mi] @ pos_cols
            elif mi < 0:
                neg_cols = up[i][-mi] if neg_cols is None else full[i][-mi] @ neg_cols
        for i in range(k):
            mi = m[i]
            if mi > 0:
                lhs_pos = lhs_pos @ tp[i][mi]
            elif mi < 0:
                lhs_neg = lhs_neg @ tp[i][-mi]
        lhs = adjoint(lhs_neg) @ lhs_pos
        if neg_cols is None:
            neg_cols = np.eye(dil.dim, n, dtype=np.complex128)
        if pos_cols is None:
            pos_cols = np.eye(dil.dim, n, dtype=np.complex128)
        residuals[m] = operator_norm(lhs - adjoint(neg_cols) @ pos_cols)
    unit, comm = _structural_residuals(dil)
    return _finish(residuals, n_order, tol, unit, comm)


@dataclass
class BrehmerReport:
    """Minimum eigenvalue of each Brehmer sum, keyed by the (0-based) subset."""

    min_eigenvalues: Dict[Tuple[int, ...], float]
    passed: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tol": self.tol,
            "min_eigenvalues": {
                ",".join(map(str, u)): v for u, v in self.min_eigenvalues.items()
            },
        }


def brehmer_check(tuple_, tol: float = EPS_PSD, max_k: int = 12) -> BrehmerReport:
    """Evaluate ``sum_{v in u} (-1)^|v| T(e(v))* T(e(v)) >= 0`` for every nonempty ``u``.

    Subsets are visited in bitmask order. ``T(e(v))`` is the product of the
    operators indexed by ``v``.
    """
    ops = _ops_of(tuple_)
    k = len(ops)
    if k > max_k:
        raise ValueError(f"k={k} exceeds max_k={max_k}; 2^k sums would be formed")
    n = ops[0].shape[0]
    gram = {}
    for mask in range(1 << k):
        prod = np.eye(n, dtype=np.complex128)
        for i in range(k):
            if mask >> i & 1:
                prod = prod @ ops[i]
        gram[mask] = adjoint(prod) @ prod
    mins: Dict[Tuple[int, ...], float] = {}
    for mask in range(1, 1 << k):
        total = np.zeros((n, n), dtype=np.complex128)
        sub = mask
        # walk all submasks of mask, including 0
        while True:
            sign = -1.0 if bin(sub).count("1") % 2 else 1.0
            total += sign * gram[sub]
            if sub == 0:
                break
            sub = (sub - 1) & mask
        total = 0.5 * (total + adjoint(total))
        u = tuple(i for i in range(k) if mask >> i & 1)
        mins[u] = float(np.linalg.eigvalsh(total)[0])
    passed = all(v >= -tol for v in mins.values())
    return BrehmerReport(mins, passed, tol)


def dilate_commutant_pair(
    u_mat, v_mat, n_order: int, eps_dc: float = EPS_DC, eps_unit: float = EPS_EIG
) -> NDilation:
    """Joint unitary N-dilation of a unitary ``u`` and a commuting contraction ``v``.

    Since ``u`` is normal, commuting with ``v`` forces commuting with ``v*``;
    that is checked numerically rather than assumed. Only ``v`` is unfolded,
    so the result lives on ``C^((N+1) m)``.
    """
    if n_order < 1:
        raise ValueError("n_order must be a positive integer")
    u_mat = as_cmatrix(u_mat, "u_mat")
    v_mat = as_cmatrix(v_mat, "v_mat")
    if u_mat.shape != v_mat.shape or u_mat.shape[0] != u_mat.shape[1]:
        raise ShapeMismatch(f"u_mat {u_mat.shape} and v_mat {v_mat.shape} must be equal and square")
    ures = unitarity_residual(u_mat)
    if ures > eps_unit:
        raise NotUnitary(f"u_mat is not unitary: ||u*u - I|| = {ures:.3e}")
    ct = ContractionTuple((u_mat, v_mat))
    if ct.commute_residual > eps_dc:
        raise NotCommuting(f"||uv - vu|| = {ct.commute_residual:.3e} exceeds {eps_dc:.1e}")
    if ct.double_commute_residual > eps_dc:
        raise FugledeResidual(
            f"||uv* - v*u|| = {ct.double_commute_residual:.3e} exceeds {eps_dc:.1e}"
        )
    final = _stages(ct.ops, n_order, skip=(0,))[-1]
    return NDilation(tuple(final), h_dim=ct.n, order=n_order, construction="commutant_pair")
