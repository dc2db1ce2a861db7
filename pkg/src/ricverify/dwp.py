"""Doubly warped products ``dt^2 + h(t)^2 ds_p^2 + f(t)^2 ds_q^2``.

In the adapted orthonormal frame (``d/dt``, p h-directions, q f-directions)
the curvature operator is diagonal, with plane curvatures

=============  ==========================
radial, h      ``-h''/h``
radial, f      ``-f''/f``
h, h           ``(1 - h'^2) / h^2``
f, f           ``(1 - f'^2) / f^2``
h, f           ``-f'h' / (f h)``
=============  ==========================

The four expressions checked by :func:`lhs_quadruple` are sums of k of these
for the three kinds of frame direction:

1. ``-(k-q) h''/h - q f''/f``
2. ``-h''/h + (k-q-1)(1-h'^2)/h^2 - q f'h'/(fh)``
3. ``(k-q)(1-h'^2)/h^2 - q f'h'/(fh)``
4. ``-f''/f - p f'h'/(fh) + (k-p-1)(1-f'^2)/f^2``

When ``h', f'`` lie in ``[0, 1)``, ``h'' <= 0 <= f''`` and
``max(p, q) + 1 <= k <= p + q - 1`` these are the smallest (k+1)-sums of
eigenvalues of ``R_X`` (the h-direction sum is the smaller of (2) and (3)),
so the inequalities and the eigenvalue criterion on frame directions agree.

Strictness is measured relative to the size of the terms: an expression
passes when ``lhs > tol * sum(|terms|)``.  Absolute tolerances are useless
once ``t`` (and hence every term) spans many orders of magnitude.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import BadDim, NonPositiveWarp, OutOfDomain
from .functions import function_from_config
from .spectral import SymmetricOperator, is_m_positive
from .tensor import frame_and_random_sample, from_plane_curvatures, ric_k_scan

DWP_TOL = 1e-9


@dataclass(frozen=True)
class WarpPair:
    """``h`` warps the p-sphere, ``f`` the q-sphere."""

    h: object
    f: object
    p: int
    q: int
    domain: tuple = None

    def __post_init__(self):
        if int(self.p) < 1 or int(self.q) < 1:
            raise BadDim("sphere dimensions must be positive")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "q", int(self.q))
        if self.domain is None:
            lo = max(self.h.domain[0], self.f.domain[0])
            hi = min(self.h.domain[1], self.f.domain[1])
            object.__setattr__(self, "domain", (lo, hi))
        else:
            object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

    @property
    def dim(self):
        return 1 + self.p + self.q

    def check_interior(self, t):
        t = np.asarray(t, dtype=np.float64)
        lo, hi = self.domain
        if np.any(~((t > lo) & (t < hi))):
            raise OutOfDomain(f"t must lie in the open interval ({lo:g}, {hi:g})")
        return t

    def jets(self, t):
        """``(h, h', h'', 1-h'^2, f, f', f'', 1-f'^2)`` on ``t``."""
        t = self.check_interior(t)
        h = [np.asarray(self.h(t, j), dtype=np.float64) for j in range(3)]
        f = [np.asarray(self.f(t, j), dtype=np.float64) for j in range(3)]
        if np.any(h[0] <= 0) or np.any(f[0] <= 0):
            raise NonPositiveWarp("warping functions must be positive")
        omh = np.asarray(self.h.one_minus_slope_sq(t), dtype=np.float64)
        omf = np.asarray(self.f.one_minus_slope_sq(t), dtype=np.float64)
        return h[0], h[1], h[2], omh, f[0], f[1], f[2], omf


def lhs_and_scale(w, k, t):
    """LHS of (1)-(4) and the sums of absolute values of their terms, shape ``(4,) + t.shape``."""
    return _backend.lhs_grid(*w.jets(t), w.p, w.q, int(k))


def lhs_quadruple(w, k, t):
    lhs, _ = lhs_and_scale(w, k, np.asarray([float(t)]))
    return tuple(float(x) for x in lhs[:, 0])


def plane_curvatures(w, t):
    """Frame-plane sectional curvatures at ``t`` as a dict."""
    h, h1, h2, omh, f, f1, f2, omf = (float(x) for x in np.ravel(w.jets(np.asarray([float(t)]))))
    return {
        "radial_h": -h2 / h,
        "radial_f": -f2 / f,
        "h_h": omh / h / h,
        "f_f": omf / f / f,
        "h_f": -(f1 / f) * (h1 / h),
    }


def plane_matrix(w, t):
    """Symmetric matrix ``K[a, b]`` of frame-plane curvatures (index 0 = radial)."""
    c = plane_curvatures(w, t)
    p, q = w.p, w.q
    n = 1 + p + q
    K = np.zeros((n, n))
    H = slice(1, 1 + p)
    F = slice(1 + p, n)
    K[0, H] = K[H, 0] = c["radial_h"]
    K[0, F] = K[F, 0] = c["radial_f"]
    K[H, H] = c["h_h"]
    K[F, F] = c["f_f"]
    K[H, F] = c["h_f"]
    K[F, H] = c["h_f"]
    np.fill_diagonal(K, 0.0)
    return K


FRAME_DIRECTIONS = ("radial", "h", "f")


def _frame_index(w, direction):
    if direction in ("radial", "t"):
        return 0
    if direction == "h":
        return 1
    if direction == "f":
        return 1 + w.p
    if isinstance(direction, int) and 0 <= direction < w.dim:
        return direction
    raise ValueError(f"unknown frame direction {direction!r}")


def frame_curvature_operator(w, t, direction):
    """Diagonal matrix of ``R_X`` for a frame vector ``X``.

    ``direction`` is ``"radial"``, ``"h"`` (first h-direction), ``"f"``
    (first f-direction) or an integer frame index.
    """
    K = plane_matrix(w, t)
    i = _frame_index(w, direction)
    return SymmetricOperator(np.diag(K[i]))


def curvature_tensor(w, t):
    """Full curvature tensor at ``t`` (diagonal curvature operator)."""
    return from_plane_curvatures(plane_matrix(w, t))


@dataclass(frozen=True)
class InequalityReport:
    grid: np.ndarray
    lhs: np.ndarray  # (4, n)
    scale: np.ndarray  # (4, n)
    strict: tuple
    tol: float

    @property
    def lhs1(self):
        return self.lhs[0]

    @property
    def lhs2(self):
        return self.lhs[1]

    @property
    def lhs3(self):
        return self.lhs[2]

    @property
    def lhs4(self):
        return self.lhs[3]

    @property
    def minima(self):
        return tuple(float(np.min(x)) for x in self.lhs)

    @property
    def relative(self):
        """``lhs / scale`` (0 where every term vanishes)."""
        with np.errstate(invalid="ignore", divide="ignore"):
            r = np.where(self.scale > 0, self.lhs / self.scale, 0.0)
        return r

    @property
    def relative_minima(self):
        return tuple(float(np.min(x)) for x in self.relative)

    def passes(self):
        """Per-expression verdicts."""
        out = []
        for i in range(4):
            thr = self.tol * self.scale[i]
            ok = self.lhs[i] > thr if self.strict[i] else self.lhs[i] >= -thr
            out.append(bool(np.all(ok)))
        return tuple(out)

    @property
    def verdict(self):
        return all(self.passes())

    def worst(self, i):
        """Grid point of the smallest relative margin of expression ``i``."""
        return float(self.grid[int(np.argmin(self.relative[i]))])

    def failures(self, i):
        thr = self.tol * self.scale[i]
        bad = ~(self.lhs[i] > thr) if self.strict[i] else ~(self.lhs[i] >= -thr)
        return self.grid[bad]


def interior_grid(domain, n_points):
    lo, hi = domain
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise OutOfDomain("uniform grids need a bounded domain")
    return np.linspace(lo, hi, int(n_points) + 2)[1:-1]


def verify_on_grid(w, k, n_points=1000, strict=(True, True, True, True), grid=None, tol=DWP_TOL):
    """Evaluate (1)-(4) on a grid (uniform interior grid unless ``grid`` is given)."""
    if grid is None:
        if int(n_points) < 2:
            raise ValueError("n_points must be >= 2")
        grid = interior_grid(w.domain, n_points)
    grid = np.asarray(grid, dtype=np.float64)
    if isinstance(strict, bool):
        strict = (strict,) * 4
    lhs, scale = lhs_and_scale(w, k, grid)
    return InequalityReport(grid, lhs, scale, tuple(bool(s) for s in strict), float(tol))


@dataclass(frozen=True)
class CrossCheckReport:
    consistent: bool
    counterexamples: tuple
    inequality_pass: np.ndarray
    frame_margins: np.ndarray  # (n, 3): radial, h, f
    mixed_min_margin: float = None


def cross_check(w, k, grid, tol=DWP_TOL, mixed_samples=0, seed=0):
    """Check that passing (1)-(4) implies (k+1)-positivity of ``R_X`` on frame directions.

    With ``mixed_samples > 0`` the full tensor is also scanned over random
    unit directions and the smallest margin is reported (informational).
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    k = int(k)
    rep = verify_on_grid(w, k, grid=grid, tol=tol)
    thr = tol * rep.scale
    ineq = np.all(rep.lhs > thr, axis=0)
    margins = np.zeros((grid.size, 3))
    bad = []
    mixed = None
    for i, t in enumerate(grid):
        K = plane_matrix(w, t)
        size = float(np.max(np.abs(K)))
        ok_all = True
        for j, d in enumerate(FRAME_DIRECTIONS):
            ok, m = is_m_positive(SymmetricOperator(np.diag(K[_frame_index(w, d)])), k + 1, tol * size)
            margins[i, j] = m
            ok_all &= ok
        if ineq[i] and not ok_all:
            bad.append(float(t))
        if mixed_samples:
            R = from_plane_curvatures(K)
            s = frame_and_random_sample(w.dim, n_rand=int(mixed_samples), seed=seed + i)
            mm = ric_k_scan(R, k, s).min_margin
            mixed = mm if mixed is None else min(mixed, mm)
    return CrossCheckReport(not bad, tuple(bad), ineq, margins, mixed)


def warp_pair_from_config(d):
    """``{"h": {...}, "f": {...}, "p": .., "q": .., "domain": [lo, hi]}``."""
    return WarpPair(
        h=function_from_config(d["h"]),
        f=function_from_config(d["f"]),
        p=d["p"],
        q=d["q"],
        domain=tuple(d["domain"]) if "domain" in d else None,
    )


def report_rows(rep):
    """CSV rows ``(t, lhs1, lhs2, lhs3, lhs4)``."""
    return [
        (f"{t:.17g}",) + tuple(f"{v:.17g}" for v in rep.lhs[:, i])
        for i, t in enumerate(rep.grid)
    ]
