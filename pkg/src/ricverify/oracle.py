"""Independent curvature oracle: left-invariant metrics on Lie groups.

The connection comes from the Koszul formula for left-invariant fields
(brackets are constant, so all derivative terms drop out); the curvature is
then pure tensor algebra in the bracket basis.  This path shares no code with
the submersion assembler and is used to check it.

Normalization: ``su(2)`` with ``[e1, e2] = 2 e3`` (cyclic) and the identity
metric is the round ``S^3(1)``; the Hopf map goes to ``S^2(1/2)``, whose
curvature is 4.  The Berger metric ``diag(t, 1, 1)`` scales the Hopf fibre.
"""
from dataclasses import dataclass

import numpy as np

from .errors import BadDim, BadModel
from .tensor import CurvatureTensor

JACOBI_TOL = 1e-12
HOPF_BASE_CURVATURE = 4.0


@dataclass(frozen=True)
class LieAlgebraModel:
    """Structure constants ``c[i, j, k]`` (``[e_i, e_j] = sum_k c[i,j,k] e_k``)
    and a diagonal metric ``<e_i, e_j> = metric[i] delta_ij``."""

    structure_constants: np.ndarray
    metric: np.ndarray

    def __post_init__(self):
        c = np.array(self.structure_constants, dtype=np.float64)
        g = np.array(self.metric, dtype=np.float64).ravel()
        n = g.shape[0]
        if c.shape != (n, n, n):
            raise BadModel(f"structure constants shape {c.shape} != {(n, n, n)}")
        if np.any(g <= 0):
            raise BadModel("metric entries must be positive")
        if np.max(np.abs(c + c.transpose(1, 0, 2)), initial=0.0) > JACOBI_TOL:
            raise BadModel("structure constants not antisymmetric")
        jac = np.einsum("ijl,lkm->ijkm", c, c)
        jac = jac + jac.transpose(1, 2, 0, 3) + jac.transpose(2, 0, 1, 3)
        if np.max(np.abs(jac), initial=0.0) > JACOBI_TOL:
            raise BadModel("Jacobi identity fails")
        c.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "structure_constants", c)
        object.__setattr__(self, "metric", g)

    @property
    def dim(self):
        return self.metric.shape[0]

    def with_metric(self, metric):
        return LieAlgebraModel(self.structure_constants, metric)


def su2(metric=(1.0, 1.0, 1.0)):
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 2.0
        c[j, i, k] = -2.0
    return LieAlgebraModel(c, metric)


def berger(t):
    """``su(2)`` with the Hopf direction ``e1`` scaled by ``t``."""
    return su2((t, 1.0, 1.0))


def abelian(n, metric=None):
    return LieAlgebraModel(np.zeros((n, n, n)), np.ones(n) if metric is None else metric)


def koszul_connection(model):
    """``G[i, j, k]`` with ``nabla_{e_i} e_j = sum_k G[i, j, k] e_k``.

    ``<nabla_i e_j, e_k> = (<[e_i,e_j],e_k> - <[e_j,e_k],e_i> + <[e_k,e_i],e_j>) / 2``.
    """
    c = model.structure_constants
    g = model.metric
    term1 = np.einsum("ijk,k->ijk", c, g)  # <[e_i,e_j], e_k>
    term2 = np.einsum("jki,i->ijk", c, g)  # <[e_j,e_k], e_i>
    term3 = np.einsum("kij,j->ijk", c, g)  # <[e_k,e_i], e_j>
    lowered = 0.5 * (term1 - term2 + term3)
    return lowered / g[None, None, :]


def connection_residuals(model, G):
    """Max violation of metric compatibility and of torsion-freeness."""
    g = model.metric
    low = G * g[None, None, :]
    compat = low + low.transpose(0, 2, 1)
    torsion = G - G.transpose(1, 0, 2) - model.structure_constants
    return float(np.max(np.abs(compat))), float(np.max(np.abs(torsion)))


def curvature_from_connection(model, G=None):
    """Curvature tensor in the orthonormal frame ``e_i / sqrt(metric[i])``."""
    if G is None:
        G = koszul_connection(model)
    c = model.structure_constants
    g = model.metric
    # R(e_a,e_b)e_c = nabla_b nabla_a e_c - nabla_a nabla_b e_c + nabla_[a,b] e_c
    coef = (
        np.einsum("acl,blm->abcm", G, G)
        - np.einsum("bcl,alm->abcm", G, G)
        + np.einsum("abl,lcm->abcm", c, G)
    )
    raw = coef * g[None, None, None, :]
    s = 1.0 / np.sqrt(g)
    return CurvatureTensor(np.einsum("abcd,a,b,c,d->abcd", raw, s, s, s, s))


def constant_curvature_tensor(n, kappa):
    """``R_abcd = kappa (d_ac d_bd - d_ad d_bc)``."""
    if int(n) < 1:
        raise BadDim(f"n={n}")
    n = int(n)
    d = np.eye(n)
    comp = kappa * (np.einsum("ac,bd->abcd", d, d) - np.einsum("ad,bc->abcd", d, d))
    return CurvatureTensor(comp)


def sphere_tensor(n, radius=1.0):
    if int(n) < 2:
        raise BadDim(f"sphere dimension must be >= 2, got {n}")
    return constant_curvature_tensor(n, 1.0 / radius**2)


def product_tensor(R1, R2):
    """Block tensor of a Riemannian product (factor 1 indices first)."""
    n1, n2 = R1.dim, R2.dim
    comp = np.zeros((n1 + n2,) * 4)
    comp[:n1, :n1, :n1, :n1] = R1.comp
    comp[n1:, n1:, n1:, n1:] = R2.comp
    return CurvatureTensor(comp)


def a_tensor_full(G, p):
    """O'Neill A-tensor of left-invariant fields for the split V = span(e_0..e_{p-1}).

    ``A_E F = H nabla_{HE} (VF) + V nabla_{HE} (HF)``; returned as
    ``A[e, f, m]`` (component ``m`` of ``A_{e_e} e_f``).
    """
    n = G.shape[0]
    V = np.zeros(n)
    V[:p] = 1.0
    H = 1.0 - V
    # nabla_{H e_e} e_f restricted to horizontal e_e
    nab = G * H[:, None, None]
    return (
        nab * V[None, :, None] * H[None, None, :]
        + nab * H[None, :, None] * V[None, None, :]
    )


def covariant_derivative_of_a(G, A):
    """``(nabla_{e_g} A)_{e_e} e_f`` as ``DA[g, e, f, m]`` (left-invariant fields)."""
    return (
        np.einsum("efl,glm->gefm", A, G)
        - np.einsum("gel,lfm->gefm", G, A)
        - np.einsum("gfl,elm->gefm", G, A)
    )


def berger_submersion_data():
    """Pointwise data of the Hopf submersion ``S^3(1) -> S^2(1/2)`` at ``t = 1``.

    Vertical index 0 (Hopf fibre ``e1``), horizontal indices 1, 2.
    """
    from .submersion import SubmersionPointData

    model = su2()
    G = koszul_connection(model)
    p, q = 1, 2
    A = a_tensor_full(G, p)
    DA = covariant_derivative_of_a(G, A)
    h = slice(p, p + q)
    v = slice(0, p)
    return SubmersionPointData(
        p=p,
        q=q,
        fibre_R=constant_curvature_tensor(1, 0.0),
        base_R=constant_curvature_tensor(2, HOPF_BASE_CURVATURE),
        A_hh=A[h, h, v],
        nablaA_v=DA[v, h, h, v],
        nablaA_h=DA[h, h, h, v],
        label="berger-hopf",
    )
