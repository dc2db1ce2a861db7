"""Curvature of a Riemannian submersion with totally geodesic fibres.

Pointwise Gray-O'Neill assembly for the canonical variation ``g_t`` (fibre
directions scaled by ``t``), the directional operator ``R_Psi`` for
``Psi = lambda U_t + mu X``, a block-order audit and a sampled search for the
threshold ``tau`` below which ``R_Psi`` is (k+1)-positive.

Frame layout: vertical indices ``0..p-1`` first, horizontal ``p..p+q-1``.
Data components (all in a g_1-orthonormal frame):

* ``A_hh[x, y, u] = <A_X Y, U>``
* ``A_hv[x, u, y] = <A_X U, Y> = -A_hh[x, y, u]``
* ``nablaA_v[u, x, y, v] = <(nabla_U A)_X Y, V>``
* ``nablaA_h[z, x, y, u] = <(nabla_Z A)_X Y, U>``

Everything here is pointwise.  Synthetic data only has to respect the
algebraic symmetries, not come from a global submersion.
"""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import BadData, BadK, BadLambda, BadT, InsufficientGrid, NotUnit
from .spectral import SymmetricOperator, batch_sum_smallest
from .tensor import (
    UNIT_TOL,
    CurvatureTensor,
    frame_and_random_sample,
    symmetry_violations,
    validate_symmetries,
)

DATA_TOL = 1e-12
ZERO_NORM = 1e-13
EXPONENT_SLACK = 0.1


def _antisym_err(a, axes):
    return float(np.max(np.abs(a + np.swapaxes(a, *axes)), initial=0.0))


def _cyclic(a):
    """Cyclic sum over the first three axes."""
    return a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)


@dataclass(frozen=True)
class SubmersionPointData:
    p: int
    q: int
    fibre_R: CurvatureTensor
    base_R: CurvatureTensor
    A_hh: np.ndarray
    nablaA_v: np.ndarray
    nablaA_h: np.ndarray
    A_hv: np.ndarray = None
    label: str = ""
    tol: float = DATA_TOL

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if p < 1 or q < 1:
            raise BadData(f"need p, q >= 1, got p={p}, q={q}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        for name, dim in (("fibre_R", p), ("base_R", q)):
            R = getattr(self, name)
            if not isinstance(R, CurvatureTensor):
                R = CurvatureTensor(R)
                object.__setattr__(self, name, R)
            if R.dim != dim:
                raise BadData(f"{name} has dim {R.dim}, expected {dim}")
            rep = validate_symmetries(R)
            if not rep.passed:
                raise BadData(f"{name} violates curvature symmetries by {rep.max_violation:.3e}")

        shapes = {
            "A_hh": (q, q, p),
            "nablaA_v": (p, q, q, p),
            "nablaA_h": (q, q, q, p),
        }
        for name, shape in shapes.items():
            a = np.array(getattr(self, name), dtype=np.float64)
            if a.shape != shape:
                raise BadData(f"{name} has shape {a.shape}, expected {shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)

        derived = -np.transpose(self.A_hh, (0, 2, 1))
        if self.A_hv is not None:
            given = np.asarray(self.A_hv, dtype=np.float64)
            if given.shape != (q, p, q):
                raise BadData(f"A_hv has shape {given.shape}, expected {(q, p, q)}")
            err = float(np.max(np.abs(given - derived)))
            if err > self.tol:
                raise BadData(f"A_hv is not adjoint to A_hh (error {err:.3e})")
        derived.setflags(write=False)
        object.__setattr__(self, "A_hv", derived)

        scale = max(1.0, float(np.max(np.abs(self.A_hh), initial=0.0)))
        checks = {
            "A_hh antisymmetry in (X, Y)": _antisym_err(self.A_hh, (0, 1)),
            "nablaA_v antisymmetry in (X, Y)": _antisym_err(self.nablaA_v, (1, 2)),
            # forced by pair symmetry of <R(X,U)Y,V>
            "nablaA_v antisymmetry in (U, V)": _antisym_err(self.nablaA_v, (0, 3)),
            "nablaA_h antisymmetry in (X, Y)": _antisym_err(self.nablaA_h, (1, 2)),
            # forced by the first Bianchi identity on (X, Y, Z, U)
            "nablaA_h cyclic sum": float(np.max(np.abs(_cyclic(self.nablaA_h)), initial=0.0)),
        }
        for what, err in checks.items():
            if err > self.tol * scale:
                raise BadData(f"{what} fails by {err:.3e}")

    @property
    def dim(self):
        return self.p + self.q


def _products(data):
    A = data.A_hh
    # aa[x, u, y, v] = <A_X U, A_Y V>
    aa = np.einsum("xzu,yzv->xuyv", A, A)
    # vv[x, y, z, w] = <A_X Y, A_Z W>
    vv = np.einsum("xyu,zwu->xyzw", A, A)
    return aa, vv


def _assemble(data, t, unit):
    p, q = data.p, data.q
    n = p + q
    V, H = slice(0, p), slice(p, n)
    Nv, Nh = data.nablaA_v, data.nablaA_h
    aa, vv = _products(data)

    # components of g_t in the original frame
    f_vvvv = t * data.fibre_R.comp
    # <R(X,U)Y,V>
    f3 = (
        t * Nv.transpose(1, 0, 2, 3)
        + t * aa
        + (t * t - t) * aa.transpose(0, 3, 2, 1)
    )
    # <R(U,V)X,Y>
    f4 = t * (Nv.transpose(0, 3, 1, 2) - Nv.transpose(3, 0, 1, 2)) + (2 * t - t * t) * (
        aa.transpose(1, 3, 0, 2) - aa.transpose(3, 1, 0, 2)
    )
    # <R(X,Y)Z,U>
    f5 = t * Nh.transpose(1, 2, 0, 3)
    # <R(X,Y)Z,W>
    f6 = data.base_R.comp + t * (
        -2.0 * vv + vv.transpose(2, 0, 1, 3) - vv.transpose(0, 2, 1, 3)
    )

    if unit:
        # U_t = U / sqrt(t): one factor per vertical slot
        s = 1.0 / np.sqrt(t)
        f_vvvv = f_vvvv * (s**4)
        f3 = f3 * (s * s)
        f4 = f4 * (s * s)
        f5 = f5 * s

    c = np.zeros((n, n, n, n))
    c[V, V, V, V] = f_vvvv
    c[H, V, H, V] = f3
    c[V, H, V, H] = f3.transpose(1, 0, 3, 2)
    c[V, H, H, V] = -f3.transpose(1, 0, 2, 3)
    c[H, V, V, H] = -f3.transpose(0, 1, 3, 2)
    c[V, V, H, H] = f4
    c[H, H, V, V] = f4.transpose(2, 3, 0, 1)
    c[H, H, H, V] = f5
    c[H, H, V, H] = -f5.transpose(0, 1, 3, 2)
    c[H, V, H, H] = f5.transpose(2, 3, 0, 1)
    c[V, H, H, H] = -f5.transpose(3, 2, 0, 1)
    c[H, H, H, H] = f6
    return CurvatureTensor(c)


def _check_t(t):
    t = float(t)
    if not (t > 0 and np.isfinite(t)):
        raise BadT(f"t must be positive and finite, got {t}")
    return t


def assemble_g1(data):
    """Curvature tensor of the submersion metric itself."""
    return _assemble(data, 1.0, unit=False)


def assemble_gt(data, t):
    """Curvature of ``g_t`` in the original (g_1-orthonormal) frame."""
    return _assemble(data, _check_t(t), unit=False)


def assemble_gt_unit(data, t):
    """Curvature of ``g_t`` in the g_t-orthonormal frame ``(U / sqrt(t), X)``."""
    return _assemble(data, _check_t(t), unit=True)


def _check_lambda(lam):
    lam = float(lam)
    if not (0.0 <= lam <= 1.0):
        raise BadLambda(f"lambda must lie in [0, 1], got {lam}")
    return lam


def psi_vector(p, q, lam, U, X):
    """``lambda U_t + mu X`` in the g_t-orthonormal frame."""
    lam = _check_lambda(lam)
    U = np.asarray(U, dtype=np.float64).ravel()
    X = np.asarray(X, dtype=np.float64).ravel()
    if U.shape != (p,) or abs(np.linalg.norm(U) - 1.0) > UNIT_TOL:
        raise NotUnit(f"U must be a unit vector of length {p}")
    if X.shape != (q,) or abs(np.linalg.norm(X) - 1.0) > UNIT_TOL:
        raise NotUnit(f"X must be a unit vector of length {q}")
    mu = np.sqrt(max(0.0, 1.0 - lam * lam))
    return np.concatenate([lam * U, mu * X])


def r_psi_operator(data, t, lam, U, X):
    """Matrix of ``R^t_Psi`` in the g_t-orthonormal frame."""
    R = assemble_gt_unit(data, t)
    psi = psi_vector(data.p, data.q, lam, U, X)
    return SymmetricOperator(_backend.directional_batch(R.comp, psi[None, :])[0])


def _frame_pairs(p, q):
    for i in range(p):
        for j in range(q):
            yield np.eye(p)[i], np.eye(q)[j]


# ---------------------------------------------------------------------------
# block audit


@dataclass(frozen=True)
class BlockFit:
    name: str
    expected: float
    exponent: float  # None when the deviation vanishes identically
    norms: tuple
    status: str  # "exact", "fit" or "n/a"

    @property
    def passed(self):
        if self.status != "fit":
            return True
        return self.exponent >= self.expected - EXPONENT_SLACK


@dataclass(frozen=True)
class BlockAuditReport:
    t_list: tuple
    lambda_list: tuple
    fits: tuple

    @property
    def passed(self):
        return all(f.passed for f in self.fits)

    def fit(self, name):
        for f in self.fits:
            if f.name == name:
                return f
        raise KeyError(name)


def _loglog_slope(x, y):
    x = np.log(np.asarray(x, dtype=np.float64))
    y = np.log(np.asarray(y, dtype=np.float64))
    return float(np.polyfit(x, y, 1)[0])


def _make_fit(name, expected, xs, norms, refs=None):
    """Log-log fit; a deviation counts as zero below rounding of the block it is taken from."""
    norms = np.asarray(norms, dtype=np.float64)
    floor = ZERO_NORM if refs is None else np.maximum(ZERO_NORM, 64 * np.finfo(float).eps * np.asarray(refs))
    if np.all(norms <= floor):
        return BlockFit(name, expected, None, tuple(norms), "exact")
    if np.any(norms <= floor):
        # partially vanishing: fit on the nonzero part only
        keep = norms > floor
        if keep.sum() < 2:
            return BlockFit(name, expected, None, tuple(norms), "n/a")
        xs = np.asarray(xs)[keep]
        norms_fit = norms[keep]
    else:
        norms_fit = norms
    return BlockFit(name, expected, _loglog_slope(xs, norms_fit), tuple(norms), "fit")


def _blocks(data, t, lam, U, X):
    p = data.p
    M = r_psi_operator(data, t, lam, U, X).entries
    return M[:p, :p], M[:p, p:], M[p:, p:]


def block_scaling_audit(data, t_list, lambda_list=(0.0, 0.25, 0.5, 0.75)):
    """Fit growth exponents of the deviations of ``R^t_Psi`` from its leading blocks.

    Blocks (norms are maxima over frame pairs ``(U, X)``):

    * ``vertical[lambda]``: ``top-left - (lambda^2 / t) R_hat_U``, expected O(t)
    * ``offdiag``: off-diagonal block at ``lambda = 0``, expected O(sqrt t)
    * ``horizontal``: ``bottom-right - R_check_X`` at ``lambda = 0``, expected O(sqrt t)
    * ``lambda``: ``offdiag(lambda) - mu^2 offdiag(0)`` at the smallest ``t``,
      regressed on ``lambda * mu`` (the cross term is bilinear); expected O(lambda)
    """
    t_list = np.sort(np.asarray(t_list, dtype=np.float64))[::-1]
    if t_list.size < 4 or np.any(t_list <= 0):
        raise InsufficientGrid("need at least 4 positive t values")
    if np.log10(t_list[0] / t_list[-1]) < 2.0 - 1e-12:
        raise InsufficientGrid("t values must span at least two decades")
    lams = tuple(_check_lambda(x) for x in lambda_list)
    pairs = list(_frame_pairs(data.p, data.q))

    def rhat(U):
        return np.einsum("aicj,a,c->ij", data.fibre_R.comp, U, U)

    def rcheck(X):
        return np.einsum("aicj,a,c->ij", data.base_R.comp, X, X)

    fits = []
    for lam in lams:
        if lam >= 1.0:
            continue
        norms, refs = [], []
        for t in t_list:
            worst = ref = 0.0
            for U, X in pairs:
                tl, _, _ = _blocks(data, t, lam, U, X)
                worst = max(worst, np.linalg.norm(tl - (lam * lam / t) * rhat(U), 2))
                ref = max(ref, np.linalg.norm(tl, 2))
            norms.append(worst)
            refs.append(ref)
        fits.append(_make_fit(f"vertical[{lam:g}]", 1.0, t_list, norms, refs))

    off, hor = [], []
    for t in t_list:
        wo = wh = 0.0
        for U, X in pairs:
            _, od, br = _blocks(data, t, 0.0, U, X)
            wo = max(wo, np.linalg.norm(od, 2))
            wh = max(wh, np.linalg.norm(br - rcheck(X), 2))
        off.append(wo)
        hor.append(wh)
    fits.append(_make_fit("offdiag", 0.5, t_list, off))
    fits.append(_make_fit("horizontal", 0.5, t_list, hor))

    lam_pos = [x for x in lams if 0.0 < x < 1.0]
    if len(lam_pos) >= 2:
        t_min = t_list[-1]
        norms = []
        for lam in lam_pos:
            mu2 = 1.0 - lam * lam
            worst = 0.0
            for U, X in pairs:
                _, od, _ = _blocks(data, t_min, lam, U, X)
                _, od0, _ = _blocks(data, t_min, 0.0, U, X)
                worst = max(worst, np.linalg.norm(od - mu2 * od0, 2))
            norms.append(worst)
        xs = [x * np.sqrt(1.0 - x * x) for x in lam_pos]
        fits.append(_make_fit("lambda", 1.0, xs, norms))
    else:
        fits.append(BlockFit("lambda", 1.0, None, (), "n/a"))

    return BlockAuditReport(tuple(t_list), lams, tuple(fits))


# ---------------------------------------------------------------------------
# tau search


def default_t_grid(n=25, t_max=1.0, t_min=1e-4):
    return tuple(np.geomspace(t_max, t_min, n))


DEFAULT_LAMBDA_GRID = tuple(np.round(np.linspace(0.0, 1.0, 11), 12))


@dataclass
class CanonicalVariationSweep:
    """Sweep configuration; ``tau_scan`` fills ``results`` and ``tau_estimate``.

    ``results`` rows are ``(t, lambda, sample_id, margin, passed)``.
    """

    t_grid: tuple = field(default_factory=default_t_grid)
    k: int = None
    lambda_grid: tuple = DEFAULT_LAMBDA_GRID
    n_random: int = 16
    seed: int = 0
    tol: float = 0.0
    results: list = field(default_factory=list)
    tau_estimate: float = None
    pass_by_t: tuple = ()
    min_margin_by_t: tuple = ()

    def __post_init__(self):
        g = np.asarray(self.t_grid, dtype=np.float64)
        if g.size == 0 or np.any(~(g > 0)):
            raise BadT("t_grid values must be strictly positive")
        if np.any(np.diff(g) >= 0):
            raise BadT("t_grid must be strictly descending")
        self.t_grid = tuple(float(x) for x in g)
        self.lambda_grid = tuple(_check_lambda(x) for x in self.lambda_grid)


def sample_pairs(p, q, n_random=16, seed=0):
    """Unit ``(U, X)`` pairs: all products of frame and mixed directions, then random pairs."""
    Us = frame_and_random_sample(p, n_rand=0).vectors
    Xs = frame_and_random_sample(q, n_rand=0).vectors
    pairs = [(u, x) for u in Us for x in Xs]
    rng = np.random.default_rng(seed)
    for _ in range(int(n_random)):
        u = rng.standard_normal(p)
        x = rng.standard_normal(q)
        pairs.append((u / np.linalg.norm(u), x / np.linalg.norm(x)))
    return pairs


def _resolve_threads(threads):
    if threads is None:
        threads = int(os.environ.get("RICVERIFY_THREADS", "") or (os.cpu_count() or 1))
    return max(1, int(threads))


def _margins_at(data, t, psis, m):
    R = assemble_gt_unit(data, t)
    mats = _backend.directional_batch(R.comp, psis)
    return batch_sum_smallest(mats, m)


def tau_scan(data, k, sweep=None, threads=None):
    """Evaluate (k+1)-positivity of ``R^t_Psi`` over the sweep grid.

    ``tau_estimate`` is the largest grid ``t`` such that every grid value
    ``<= t`` passes for every sample; ``None`` if the smallest one fails.
    This is a pointwise, sampled surrogate for the global threshold.
    """
    n = data.dim
    k = int(k)
    if not (1 <= k <= n - 1):
        raise BadK(f"k={k} outside [1, {n - 1}]")
    if sweep is None:
        sweep = CanonicalVariationSweep(k=k)
    sweep.k = k
    pairs = sample_pairs(data.p, data.q, sweep.n_random, sweep.seed)
    keys, psis = [], []
    for lam in sweep.lambda_grid:
        for sid, (U, X) in enumerate(pairs):
            keys.append((lam, sid))
            psis.append(psi_vector(data.p, data.q, lam, U, X))
    psis = np.array(psis)

    def work(t):
        return _margins_at(data, t, psis, k + 1)

    nthreads = _resolve_threads(threads)
    if nthreads > 1:
        with ThreadPoolExecutor(nthreads) as ex:
            per_t = list(ex.map(work, sweep.t_grid))
    else:
        per_t = [work(t) for t in sweep.t_grid]

    results, ok_by_t, min_by_t = [], [], []
    for t, margins in zip(sweep.t_grid, per_t):
        ok = margins > sweep.tol
        for (lam, sid), mg, flag in zip(keys, margins, ok):
            results.append((t, lam, sid, float(mg), bool(flag)))
        ok_by_t.append(bool(np.all(ok)))
        min_by_t.append(float(np.min(margins)))

    tau = None
    for t, ok in zip(reversed(sweep.t_grid), reversed(ok_by_t)):
        if not ok:
            break
        tau = t
    sweep.results = results
    sweep.pass_by_t = tuple(ok_by_t)
    sweep.min_margin_by_t = tuple(min_by_t)
    sweep.tau_estimate = tau
    return sweep


# ---------------------------------------------------------------------------
# synthetic data


def project_curvature(comp):
    """Orthogonal projection onto algebraic curvature tensors."""
    c = np.asarray(comp, dtype=np.float64)
    c = 0.5 * (c - c.transpose(1, 0, 2, 3))
    c = 0.5 * (c - c.transpose(0, 1, 3, 2))
    c = 0.5 * (c + c.transpose(2, 3, 0, 1))
    b = c + c.transpose(2, 0, 1, 3) + c.transpose(1, 2, 0, 3)
    return c - b / 3.0


def synthetic_datum(
    p,
    q,
    fibre_kappa=1.0,
    base_kappa=1.0,
    perturb=0.05,
    a_scale=0.5,
    nabla_scale=0.3,
    seed=0,
):
    """Random pointwise datum respecting every algebraic constraint.

    Factor tensors are constant curvature plus a small projected perturbation;
    ``A`` and ``nabla A`` are random, then projected onto their symmetry
    subspaces.  Not claimed to come from a global submersion.
    """
    from .oracle import constant_curvature_tensor

    rng = np.random.default_rng(seed)

    def factor(n, kappa):
        base = constant_curvature_tensor(n, kappa).comp
        return CurvatureTensor(base + perturb * project_curvature(rng.standard_normal((n,) * 4)))

    A = rng.standard_normal((q, q, p))
    A = a_scale * 0.5 * (A - A.transpose(1, 0, 2))
    Nv = rng.standard_normal((p, q, q, p))
    Nv = 0.5 * (Nv - Nv.transpose(0, 2, 1, 3))
    Nv = nabla_scale * 0.5 * (Nv - Nv.transpose(3, 1, 2, 0))
    Nh = rng.standard_normal((q, q, q, p))
    Nh = 0.5 * (Nh - Nh.transpose(0, 2, 1, 3))
    Nh = nabla_scale * (Nh - _cyclic(Nh) / 3.0)
    return SubmersionPointData(
        p=p,
        q=q,
        fibre_R=factor(p, fibre_kappa),
        base_R=factor(q, base_kappa),
        A_hh=A,
        nablaA_v=Nv,
        nablaA_h=Nh,
        label=f"synthetic(p={p},q={q},seed={seed})",
    )


def product_datum(fibre_R, base_R):
    p, q = fibre_R.dim, base_R.dim
    return SubmersionPointData(
        p=p,
        q=q,
        fibre_R=fibre_R,
        base_R=base_R,
        A_hh=np.zeros((q, q, p)),
        nablaA_v=np.zeros((p, q, q, p)),
        nablaA_h=np.zeros((q, q, q, p)),
        label="product",
    )


# ---------------------------------------------------------------------------
# serialization (0-based indices)


def _sparse(a):
    idx = np.argwhere(a != 0.0)
    return [[int(i) for i in ix] + [float(a[tuple(ix)])] for ix in idx]


def _dense(entries, shape, name):
    out = np.zeros(shape)
    for row in entries:
        if len(row) != len(shape) + 1:
            raise BadData(f"{name}: entry {row!r} should have {len(shape)} indices and a value")
        *ix, val = row
        ix = tuple(int(i) for i in ix)
        if any(not (0 <= i < s) for i, s in zip(ix, shape)):
            raise BadData(f"{name}: index {ix} out of range for shape {shape}")
        out[ix] = float(val)
    return out


def data_to_dict(data):
    return {
        "p": data.p,
        "q": data.q,
        "fibre_R": data.fibre_R.comp.ravel().tolist(),
        "base_R": data.base_R.comp.ravel().tolist(),
        "A_hh": _sparse(data.A_hh),
        "nablaA_v": _sparse(data.nablaA_v),
        "nablaA_h": _sparse(data.nablaA_h),
        "label": data.label,
    }


def data_from_dict(d):
    """Inverse of :func:`data_to_dict`; raises ``BadData`` on malformed input."""
    try:
        p, q = int(d["p"]), int(d["q"])
        fib = np.asarray(d["fibre_R"], dtype=np.float64)
        base = np.asarray(d["base_R"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadData(f"malformed submersion datum: {exc}") from exc
    if fib.size != p**4 or base.size != q**4:
        raise BadData("flattened curvature tensors have the wrong length")
    return SubmersionPointData(
        p=p,
        q=q,
        fibre_R=CurvatureTensor(fib.reshape((p,) * 4)),
        base_R=CurvatureTensor(base.reshape((q,) * 4)),
        A_hh=_dense(d.get("A_hh", []), (q, q, p), "A_hh"),
        nablaA_v=_dense(d.get("nablaA_v", []), (p, q, q, p), "nablaA_v"),
        nablaA_h=_dense(d.get("nablaA_h", []), (q, q, q, p), "nablaA_h"),
        label=str(d.get("label", "")),
    )


def sweep_rows(sweep):
    """CSV rows ``(t, lambda, sample_id, margin, pass)``."""
    return [(f"{t:.17g}", f"{lam:.17g}", sid, f"{m:.17g}", int(ok)) for t, lam, sid, m, ok in sweep.results]


def tensor_symmetry_summary(R):
    return symmetry_violations(R.comp)
