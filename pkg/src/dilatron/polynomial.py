"""Sparse multivariate polynomials with complex coefficients."""

from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .dilation import graded_indices
from .errors import NotCommuting, ShapeMismatch
from .linalg import EPS_DC, as_cmatrix, commutator_norm

__all__ = [
    "MultiPoly",
    "eval_scalar",
    "eval_matrix",
    "sup_norm_torus",
    "default_grid",
    "holbrook_polynomial",
    "random_poly",
]

Exponent = Tuple[int, ...]


@dataclass(frozen=True)
class MultiPoly:
    """``sum_e c_e z_1^e_1 ... z_k^e_k`` stored as an exponent -> coefficient map.

    Zero coefficients are dropped on construction.
    """

    num_vars: int
    terms: Mapping[Exponent, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be positive")
        clean: Dict[Exponent, complex] = {}
        for exps, coef in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.num_vars:
                raise ShapeMismatch(f"exponent {exps} does not have {self.num_vars} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coef = complex(coef)
            if not np.isfinite(coef):
                raise ValueError(f"non-finite coefficient for {exps}")
            clean[exps] = clean.get(exps, 0) + coef
        clean = {e: c for e, c in clean.items() if c != 0}
        object.__setattr__(self, "terms", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, exps: Sequence[int], coef: complex = 1.0) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): coef})

    @classmethod
    def constant(cls, num_vars: int, value: complex = 1.0) -> "MultiPoly":
        return cls(num_vars, {(0,) * num_vars: value})

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        if other.num_vars != self.num_vars:
            raise ShapeMismatch("cannot add polynomials in different numbers of variables")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.num_vars, out)

    def __mul__(self, scalar: complex) -> "MultiPoly":
        return MultiPoly(self.num_vars, {e: c * scalar for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + other * -1.0

    def __call__(self, *z):
        return eval_scalar(self, z)


def eval_scalar(p: MultiPoly, z: Sequence[complex]) -> complex:
    z = [complex(x) for x in z]
    if len(z) != p.num_vars:
        raise ShapeMismatch(f"point has {len(z)} coordinates, polynomial has {p.num_vars} variables")
    total = 0j
    for exps, coef in p.terms.items():
        term = coef
        for zi, e in zip(z, exps):
            term *= zi ** e
        total += term
    return total


def eval_matrix(p: MultiPoly, tuple_, eps_dc: float = EPS_DC) -> np.ndarray:
    """``p(T_1, ..., T_k)`` for a commuting tuple; powers are computed once each."""
    ops = getattr(tuple_, "ops", tuple_)
    if isinstance(ops, np.ndarray) and ops.ndim == 2:
        ops = [ops]
    ops = [as_cmatrix(o, f"ops[{i}]") for i, o in enumerate(ops)]
    if len(ops) != p.num_vars:
        raise ShapeMismatch(f"tuple has {len(ops)} operators, polynomial has {p.num_vars} variables")
    n = ops[0].shape[0]
    for i, o in enumerate(ops):
        if o.shape != (n, n):
            raise ShapeMismatch(f"ops[{i}] has shape {o.shape}, expected {(n, n)}")
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            r = commutator_norm(ops[i], ops[j])
            if r > eps_dc:
                raise NotCommuting(f"ops[{i}] and ops[{j}] do not commute (residual {r:.3e})")
    cache: Dict[Tuple[int, int], np.ndarray] = {}

    def power(i, e):
        if (i, e) not in cache:
            cache[(i, e)] = np.eye(n, dtype=np.complex128) if e == 0 else power(i, e - 1) @ ops[i]
        return cache[(i, e)]

    out = np.zeros((n, n), dtype=np.complex128)
    for exps, coef in p.terms.items():
        term = np.eye(n, dtype=np.complex128)
        for i, e in enumerate(exps):
            if e:
                term = term @ power(i, e)
        out += coef * term
    return out


def default_grid(p: MultiPoly) -> int:
    return max(64, 16 * p.total_degree)


def sup_norm_torus(p: MultiPoly, grid_per_dim: Optional[int] = None, chunk: int = 1 << 20) -> float:
    """Max of ``|p|`` over the grid ``{exp(2 pi i j / M)}^k``.

    This is a lower bound for the sup-norm over the torus; it converges as
    ``M`` grows. ``M`` defaults to ``max(64, 16 deg p)``.
    """
    m = default_grid(p) if grid_per_dim is None else int(grid_per_dim)
    if m < 1:
        raise ValueError("grid_per_dim must be >= 1")
    if not p.terms:
        return 0.0
    k = p.num_vars
    exps = np.array(list(p.terms.keys()), dtype=np.int64)
    coefs = np.array(list(p.terms.values()), dtype=np.complex128)
    # z_j^e on the grid depends only on (j * e) mod M
    phase = np.exp(2j * np.pi * np.arange(m) / m)
    best = 0.0
    # iterate over the first k-1 coordinates in blocks, vectorize the last one
    rows_per_chunk = max(1, chunk // m)
    total_outer = m ** (k - 1)
    last = np.arange(m)
    last_phase = phase[(np.outer(exps[:, -1], last)) % m]  # terms x M
    for start in range(0, total_outer, rows_per_chunk):
        idx = np.arange(start, min(total_outer, start + rows_per_chunk))
        outer_phase = np.ones((len(coefs), len(idx)), dtype=np.complex128)
        rem = idx.copy()
        for var in range(k - 2, -1, -1):
            j = rem % m
            rem //= m
            outer_phase *= phase[(np.outer(exps[:, var], j)) % m]
        vals = np.einsum("t,to,tl->ol", coefs, outer_phase, last_phase, optimize=True)
        best = max(best, float(np.abs(vals).max()))
    return best


def holbrook_polynomial() -> MultiPoly:
    """``x^2 + y^2 + z^2 - 2xy - 2xz - 2yz`` (Kaijser-Varopoulos / Holbrook)."""
    return MultiPoly(
        3,
        {
            (2, 0, 0): 1,
            (0, 2, 0): 1,
            (0, 0, 2): 1,
            (1, 1, 0): -2,
            (1, 0, 1): -2,
            (0, 1, 1): -2,
        },
    )


def random_poly(rng: np.random.Generator, num_vars: int, degree: int, density: float = 1.0) -> MultiPoly:
    """Random complex polynomial of total degree at most ``degree``."""
    terms = {}
    for e in graded_indices(num_vars, degree):
        if density >= 1.0 or rng.random() < density:
            terms[e] = complex(rng.normal(), rng.normal())
    return MultiPoly(num_vars, terms)
