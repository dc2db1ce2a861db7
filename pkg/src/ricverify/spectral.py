"""Symmetric-operator eigenvalue sums and the m-positivity criterion.

A symmetric operator is *m-positive* when the sum of its m smallest
eigenvalues is positive, equivalently when every sum of m eigenvalues is.
For the directional curvature operator ``R_X`` this is the test for
``Ric_k > 0`` with ``m = k + 1`` (``X`` itself is always a null vector).
The test is sufficient; reports carry the margin, not a claim of necessity.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import BadCount, NonSymmetric, TooLarge

SYM_TOL = 1e-9
EIG_TOL = 1e-12
BRUTE_FORCE_MAX_DIM = 12


@dataclass(frozen=True)
class SymmetricOperator:
    """A real symmetric matrix, validated on construction.

    The stored matrix is symmetrized (``(A + A.T) / 2``) after the asymmetry
    check so downstream eigen-solves see an exactly symmetric input.
    """

    entries: np.ndarray
    sym_tol: float = SYM_TOL

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise NonSymmetric(f"expected a non-empty square matrix, got shape {a.shape}")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        if asym > self.sym_tol:
            raise NonSymmetric(f"max asymmetry {asym:.3e} exceeds {self.sym_tol:.1e}")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self):
        return self.entries.shape[0]

    def __mul__(self, c):
        return SymmetricOperator(float(c) * self.entries, self.sym_tol)

    __rmul__ = __mul__


def as_operator(op):
    if isinstance(op, SymmetricOperator):
        return op
    return SymmetricOperator(op)


def sorted_eigenvalues(op):
    """All eigenvalues in ascending order (dense symmetric solver)."""
    op = as_operator(op)
    return np.linalg.eigvalsh(op.entries)


def _check_count(m, dim):
    if not (1 <= int(m) <= dim):
        raise BadCount(f"m={m} outside [1, {dim}]")
    return int(m)


def sum_smallest(op, m):
    """Sum of the ``m`` smallest eigenvalues."""
    op = as_operator(op)
    m = _check_count(m, op.dim)
    return float(np.sum(sorted_eigenvalues(op)[:m]))


def is_m_positive(op, m, tol=0.0):
    """Return ``(verdict, margin)`` with ``margin = sum_smallest(op, m)``.

    The inequality is strict: ``verdict`` is ``margin > tol``.
    """
    margin = sum_smallest(op, m)
    return margin > tol, margin


def brute_force_min_subset_sum(op, m):
    """Oracle for :func:`sum_smallest`: enumerate all C(dim, m) subsets."""
    op = as_operator(op)
    if op.dim > BRUTE_FORCE_MAX_DIM:
        raise TooLarge(f"dim {op.dim} > {BRUTE_FORCE_MAX_DIM}")
    m = _check_count(m, op.dim)
    return _backend.min_subset_sum(sorted_eigenvalues(op), m)


def batch_sum_smallest(mats, m):
    """Vectorized :func:`sum_smallest` over a stack ``(s, n, n)`` of matrices.

    Used in scans; the matrices are assumed symmetric (they come from
    curvature tensors that already passed validation) and are symmetrized.
    """
    mats = np.asarray(mats, dtype=np.float64)
    m = _check_count(m, mats.shape[-1])
    sym = 0.5 * (mats + np.swapaxes(mats, -1, -2))
    return np.sum(np.linalg.eigvalsh(sym)[..., :m], axis=-1)
