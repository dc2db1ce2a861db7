"""Pointwise curvature tensors in an orthonormal frame.

Convention: ``comp[a, b, c, d] = <R(e_a, e_b) e_c, e_d>`` with
``R(A, B)C = nabla_B nabla_A C - nabla_A nabla_B C + nabla_[A,B] C``.
With this sign the sectional curvature of an orthonormal pair is
``K(v, w) = comp(v, w, v, w)``; the round unit sphere has
``comp[a, b, c, d] = d_ac d_bd - d_ad d_bc``.

The directional operator ``R_X`` is represented by the matrix
``M[i, j] = comp(X, e_i, X, e_j)``, so that ``<R_X Y, Y> = K(X, Y)`` and the
eigenvalue sums of ``M`` are intermediate Ricci curvatures.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import BadK, NotOrthonormal, NotUnit
from .spectral import SymmetricOperator, batch_sum_smallest

TENSOR_TOL = 1e-9
UNIT_TOL = 1e-12


@dataclass(frozen=True)
class CurvatureTensor:
    comp: np.ndarray

    def __post_init__(self):
        c = np.array(self.comp, dtype=np.float64)
        n = c.shape[0] if c.ndim else 0
        if c.ndim != 4 or c.shape != (n,) * 4:
            raise ValueError(f"curvature components must have shape (n,n,n,n), got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "comp", c)

    @property
    def dim(self):
        return self.comp.shape[0]

    def __add__(self, other):
        return CurvatureTensor(self.comp + other.comp)

    def __mul__(self, s):
        return CurvatureTensor(float(s) * self.comp)

    __rmul__ = __mul__


def symmetry_violations(comp):
    c = np.asarray(comp)
    return {
        "antisym_ab": float(np.max(np.abs(c + c.transpose(1, 0, 2, 3)), initial=0.0)),
        "antisym_cd": float(np.max(np.abs(c + c.transpose(0, 1, 3, 2)), initial=0.0)),
        "pair": float(np.max(np.abs(c - c.transpose(2, 3, 0, 1)), initial=0.0)),
        # R_abcd + R_bcad + R_cabd
        "bianchi": float(
            np.max(np.abs(c + c.transpose(2, 0, 1, 3) + c.transpose(1, 2, 0, 3)), initial=0.0)
        ),
    }


@dataclass(frozen=True)
class SymmetryReport:
    violations: dict
    tol: float

    @property
    def passed(self):
        return all(v <= self.tol for v in self.violations.values())

    @property
    def max_violation(self):
        return max(self.violations.values())


def validate_symmetries(R, tol=TENSOR_TOL):
    """Max violation of each algebraic curvature identity (never raises)."""
    comp = R.comp if isinstance(R, CurvatureTensor) else np.asarray(R)
    return SymmetryReport(symmetry_violations(comp), tol)


def _unit(v, name, tol=UNIT_TOL):
    v = np.asarray(v, dtype=np.float64)
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise NotUnit(f"{name} has norm {np.linalg.norm(v):.15g}")
    return v


def sectional(R, v, w, tol=1e-10):
    """Sectional curvature of the plane spanned by orthonormal ``v``, ``w``."""
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if (
        abs(v @ v - 1.0) > tol
        or abs(w @ w - 1.0) > tol
        or abs(v @ w) > tol
    ):
        raise NotOrthonormal("sectional curvature needs an orthonormal pair")
    return float(np.einsum("abcd,a,b,c,d->", R.comp, v, w, v, w))


def directional_operator(R, X):
    """Matrix of ``R_X`` in the frame; ``X`` is a null vector of it."""
    X = _unit(X, "X")
    M = _backend.directional_batch(R.comp, X[None, :])[0]
    return SymmetricOperator(M)


def ric_k(R, vectors):
    """``sum_i K(v_0, v_i)`` for an orthonormal family ``v_0, ..., v_k``."""
    v0, *rest = [np.asarray(v, dtype=np.float64) for v in vectors]
    return float(sum(sectional(R, v0, v) for v in rest))


@dataclass(frozen=True)
class UnitDirectionSample:
    vectors: np.ndarray
    scheme: str
    count: int = field(init=False)

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_TOL):
            raise NotUnit("sample vectors must be unit length")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "count", v.shape[0])


MIX_ANGLES = (np.pi / 8, np.pi / 4, 3 * np.pi / 8)


def frame_and_random_sample(dim, n_rand=512, seed=0, angles=MIX_ANGLES):
    """Frame vectors, pairwise frame mixtures at ``angles``, then random unit vectors."""
    eye = np.eye(dim)
    vecs = [eye]
    for i in range(dim):
        for j in range(i + 1, dim):
            vecs.append(np.array([np.cos(a) * eye[i] + np.sin(a) * eye[j] for a in angles]))
    if n_rand:
        g = np.random.default_rng(seed).standard_normal((n_rand, dim))
        vecs.append(g / np.linalg.norm(g, axis=1, keepdims=True))
    v = np.concatenate([np.atleast_2d(x) for x in vecs if len(x)], axis=0)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return UnitDirectionSample(v, f"frame+mix{len(angles)}+random{n_rand}@seed{seed}")


@dataclass(frozen=True)
class KPositivityReport:
    k: int
    margins: np.ndarray
    min_margin: float
    worst_direction: np.ndarray
    verdict: bool
    scheme: str
    label: str = "sampled"


def ric_k_scan(R, k, samples, tol=0.0):
    """Check (k+1)-positivity of ``R_X`` for every sampled unit ``X``."""
    n = R.dim
    if not (1 <= int(k) <= n - 1):
        raise BadK(f"k={k} outside [1, {n - 1}]")
    if not isinstance(samples, UnitDirectionSample):
        samples = UnitDirectionSample(samples, "explicit")
    mats = _backend.directional_batch(R.comp, samples.vectors)
    margins = batch_sum_smallest(mats, int(k) + 1)
    i = int(np.argmin(margins))
    return KPositivityReport(
        k=int(k),
        margins=margins,
        min_margin=float(margins[i]),
        worst_direction=samples.vectors[i].copy(),
        verdict=bool(np.all(margins > tol)),
        scheme=samples.scheme,
    )


def from_plane_curvatures(K):
    """Tensor whose curvature operator is diagonal in ``e_a ^ e_b``.

    ``K[a, b]`` (symmetric, diagonal ignored) is the sectional curvature of
    the frame plane ``(e_a, e_b)``.
    """
    K = np.asarray(K, dtype=np.float64)
    n = K.shape[0]
    comp = np.zeros((n, n, n, n))
    for a in range(n):
        for b in range(n):
            if a != b:
                comp[a, b, a, b] = K[a, b]
                comp[a, b, b, a] = -K[a, b]
    return CurvatureTensor(comp)
