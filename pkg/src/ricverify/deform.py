"""Warping-function deformation for the doubly warped product.

Stages (each returns a new :class:`DeformationState`):

``base``
    ``h`` = sine cap plus power tail (with an exponential far tail past
    ``t2 / tail_ratio``), ``f = rho' * f_C`` with ``f_C'' = sigma f_C``.
``extended``
    ``f`` replaced by its tangent line ``L`` after ``t2``, where ``f'(t2) = Delta``.
``smoothed``
    The corner at ``t2`` removed on ``(t2 - eps, t2 + eps)``.
``bent``
    ``h`` replaced by ``h o phi`` so that ``h' = 0`` from ``t3 + delta`` on.
``final``
    A small concave bend of ``f`` from ``t3 - delta`` to ``a`` restores strict (1).

The default families are not the ones of the original construction; they
are chosen to have every property the argument uses (signs of the
derivatives, ``h''' > 0`` on the tail, ``h' -> 0``, ``f' -> infinity``,
``f = rho' * f_C``), and those properties are re-checked here.
"""
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .dwp import DWP_TOL, WarpPair, verify_on_grid
from .errors import (
    BadLambda,
    BadParams,
    BendTooLarge,
    DegenerateSlope,
    GuardViolated,
    NoBracket,
    PipelineFailed,
    RicVerifyError,
    SlopeMismatch,
    WrongStage,
)
from .functions import (
    Bent,
    Composed,
    CurvatureDrivenProfile,
    Linear,
    PhiFunction,
    Piecewise,
    PowerCapH,
    Scaled,
    TailedH,
    WindowSmoothed,
    smoothstep5,
    smoothstep5_d,
)

STAGES = ("base", "extended", "smoothed", "bent", "final")

DEFAULTS = {
    "t_join": 0.45,
    "alpha": 0.06,
    "theta": 0.8,
    "r_prime": 0.2,
    "ramp_end": 0.5,
    "tail_ratio": 1.25,
    "eps_rel": 1e-3,
    "delta_rel": 1e-2,
    "bend_fraction": 0.25,
    "grid_points": 10000,
    "tol": DWP_TOL,
}


def _params(options):
    out = dict(DEFAULTS)
    if options:
        unknown = set(options) - set(DEFAULTS) - {"verify", "n_halvings"}
        if unknown:
            raise BadParams(f"unknown options {sorted(unknown)}")
        out.update(options)
    if not (0.0 < out["r_prime"] < 0.25):
        raise BadParams("R' must lie in (0, 1/4)")
    return out


# ---------------------------------------------------------------------------
# families


def default_h(params=None):
    """Sine cap on ``[0, t_join]`` glued C^2 to a concave power law."""
    p = _params(params)
    return PowerCapH(p["t_join"], p["alpha"])


def default_f(params):
    """``rho' * f_C``: equal to ``rho'`` on ``[0, R']``, convex, ``f' -> infinity``.

    ``params`` must contain ``rho_prime``, ``k`` and ``q`` (``k > q``).
    """
    try:
        rho, k, q = float(params["rho_prime"]), int(params["k"]), int(params["q"])
    except KeyError as exc:
        raise BadParams(f"default_f needs {exc}") from exc
    if rho <= 0:
        raise BadParams("rho_prime must be positive")
    p = _params({k_: v for k_, v in params.items() if k_ not in ("rho_prime", "k", "q")})
    prof = CurvatureDrivenProfile(
        k, q, p["theta"], p["t_join"], p["alpha"], p["r_prime"], p["ramp_end"]
    )
    return Scaled(prof, rho)


# ---------------------------------------------------------------------------
# stages


def find_t2(f, delta, lo=None, hi=None):
    """Unique ``t`` with ``f'(t) = delta`` (``f'`` increasing through ``delta``)."""
    lo = max(f.domain[0], 0.0) if lo is None else float(lo)
    hi = f.domain[1] if hi is None else float(hi)

    def g(t):
        with np.errstate(over="ignore", invalid="ignore"):
            return float(f(t, 1)) - delta

    if not np.isfinite(hi):
        hi = max(1.0, 2.0 * lo)
        while g(hi) <= 0 and hi < 1e300:
            hi *= 2.0
    g_lo, g_hi = g(lo), g(hi)
    if not (g_lo < 0 < g_hi or (g_lo < 0 and g_hi == np.inf)):
        raise NoBracket(f"f' does not cross {delta} on [{lo:g}, {hi:g}]")
    # bracket on a geometric grid, then refine
    pts = np.unique(np.concatenate([[lo], np.geomspace(max(lo, 1e-6), hi, 2000), [hi]]))
    with np.errstate(over="ignore", invalid="ignore"):
        vals = np.asarray(f(pts, 1)) - delta
    i = int(np.argmax(vals > 0))
    a, b = pts[max(i - 1, 0)], pts[i]
    t2 = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return float(t2)


def linear_extension(f, t2, delta, tol=1e-10):
    """``f`` up to ``t2``, the tangent line ``L(t) = f(t2) + delta (t - t2)`` after."""
    slope = float(f(t2, 1))
    if abs(slope - delta) > tol:
        raise SlopeMismatch(f"f'(t2) = {slope!r} differs from delta = {delta!r}")
    L = Linear(float(f(t2)), float(delta), float(t2), domain=f.domain)
    return Piecewise(f, L, t2)


_BUMP_WIDTH = 0.6
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(40)


def _bump(x):
    u = np.clip(np.asarray(x) / _BUMP_WIDTH, 0.0, 1.0)
    return 64.0 * (u * (1.0 - u)) ** 3


def _bump_d(x):
    u = np.clip(np.asarray(x) / _BUMP_WIDTH, 0.0, 1.0)
    return 192.0 * (u * (1.0 - u)) ** 2 * (1.0 - 2.0 * u) / _BUMP_WIDTH


def _breaks(s):
    return sorted({0.0, s - 0.25, s + 0.25, _BUMP_WIDTH, 1.0})


def _quad(fn, breaks):
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        x = 0.5 * (b - a) * _NODES + 0.5 * (a + b)
        total += 0.5 * (b - a) * float(np.dot(_WEIGHTS, fn(x)))
    return total


def c1_smooth(g, t2, eps, guard=None):
    """Replace the corner of a piecewise ``g`` at ``t2`` by a C^3 bridge on ``[t2-eps, t2+eps]``.

    The bridge's second derivative is a smoothstep blend of the two one-sided
    second derivatives plus a small positive bump; the blend position and the
    bump height are solved so that value and slope match the right piece at
    ``t2 + eps``.  A corner where ``g''`` drops from ``c > 0`` to 0 cannot be
    bridged with ``g''`` confined to ``[0, c]`` (the first moment of the
    step is extremal), so the bridge overshoots ``c`` by a few percent.

    ``guard(smoothed, lo, hi)`` re-verifies whatever must survive; a falsy
    result raises ``GuardViolated``.  Non-piecewise input is returned as is.
    """
    if not isinstance(g, Piecewise) or g.split != float(t2):
        return g
    left, right = g.left, g.right
    lo, hi = float(t2) - eps, float(t2) + eps
    w = hi - lo

    def gl2(x):
        return np.asarray(left(lo + w * np.asarray(x), 2))

    def gr2(x):
        return np.asarray(right(lo + w * np.asarray(x), 2))

    def blend(x, s):
        return smoothstep5((np.asarray(x) - (s - 0.25)) / 0.5)

    d1 = (float(right(hi, 1)) - float(left(lo, 1))) / w
    d0 = (float(right(hi)) - float(left(lo)) - w * float(left(lo, 1))) / (w * w)

    def alpha_of(s):
        br = _breaks(s)
        base = _quad(lambda x: (1 - blend(x, s)) * gl2(x) + blend(x, s) * gr2(x), br)
        return (d1 - base) / _quad(_bump, br)

    def residual(s):
        br = _breaks(s)
        a = alpha_of(s)
        mom = _quad(lambda x: (1 - x) * ((1 - blend(x, s)) * gl2(x) + blend(x, s) * gr2(x) + a * _bump(x)), br)
        return mom - d0

    try:
        s = brentq(residual, 0.25, 0.75, xtol=1e-15)
    except ValueError as exc:
        raise GuardViolated(f"no smoothing bridge on [{lo:g}, {hi:g}]: {exc}") from exc
    alpha = alpha_of(s)

    def g2(x):
        W = blend(x, s)
        return (1 - W) * gl2(x) + W * gr2(x) + alpha * _bump(x)

    def g3(x):
        x = np.asarray(x)
        t = lo + w * x
        z = (x - (s - 0.25)) / 0.5
        W = smoothstep5(z)
        inner = (1 - W) * np.asarray(left(t, 3)) + W * np.asarray(right(t, 3))
        return w * inner + (gr2(x) - gl2(x)) * smoothstep5_d(z) / 0.5 + alpha * _bump_d(x)

    out = WindowSmoothed(left, right, lo, hi, g2, g3, _breaks(s))
    out.blend_centre, out.bump_height = s, alpha
    if guard is not None:
        res = guard(out, lo, hi)
        ok = getattr(res, "verdict", res)
        if not ok:
            raise GuardViolated(f"inequalities fail on the smoothing window [{lo:g}, {hi:g}]")
    return out


def lambda_t2(h, t2):
    """``h''(t2)/h'(t2) - h'(t2)/h(t2)`` (negative for concave increasing ``h``).

    Degeneracy of the slope is judged scale-free, by ``t2 h'(t2) / h(t2)``.
    """
    h0, h1, h2 = (float(h(t2, j)) for j in range(3))
    if h1 <= 0 or abs(t2) * h1 / h0 <= 1e-14:
        raise DegenerateSlope(f"h'({t2:g}) = {h1:g} is degenerate")
    lam = h2 / h1 - h1 / h0
    if h2 < 0 and not lam < 0:  # pragma: no cover - both terms are negative
        raise BadLambda("lambda_t2 must be negative for concave h")
    return lam


def build_phi(h, t2, delta_rel=DEFAULTS["delta_rel"]):
    """Smoothed ``psi``; returns ``(phi, t3)`` with ``t3 = t2 - 1/lambda``."""
    lam = lambda_t2(h, t2)
    if not lam < 0:
        raise BadLambda(f"lambda_t2 = {lam} is not negative")
    t3 = t2 - 1.0 / lam
    delta = delta_rel * (t3 - t2)
    return PhiFunction(t2, lam, delta), t3


def psi_prime(t, t2, lam):
    t = np.asarray(t, dtype=np.float64)
    return np.clip(1.0 + lam * (t - t2), 0.0, 1.0) * (t >= t2) + (t < t2)


def psi(t, t2, lam):
    """``int_0^t psi'``."""
    t = np.asarray(t, dtype=np.float64)
    t3 = t2 - 1.0 / lam
    u = np.clip(t, t2, t3) - t2
    return np.minimum(t, t2) + u + 0.5 * lam * u * u


def bend_h(h, phi):
    """``h o phi`` (identical to ``h`` before the first smoothing window)."""
    return Composed(h, phi, identity_until=phi.start)


def concave_bend_f(f, t3, delta, bend, until=None):
    """Subtract ``bend * II`` with ``II''`` ramping 0 -> 1 on ``[t3 - delta, t3]``.

    ``f''`` becomes negative from ``t3 - delta`` on; ``until`` is the end of the
    domain of interest, where ``f'`` is smallest.
    """
    if bend == 0:
        return f
    out = Bent(f, t3 - delta, t3, bend)
    end = t3 + 2 * delta if until is None else until
    slope = float(out(end, 1))
    if slope < 0:
        raise BendTooLarge(f"f' = {slope:g} < 0 at t = {end:g}")
    return out


# ---------------------------------------------------------------------------
# state and pipeline


@dataclass(frozen=True)
class DeformationState:
    p: int
    q: int
    k: int
    delta: float
    rho_prime: float
    h: object
    f: object
    stage: str = "base"
    r_prime: float = DEFAULTS["r_prime"]
    t0: float = None
    t2: float = None
    t3: float = None
    a: float = None
    lambda_t2: float = None
    eps: float = None
    delta_phi: float = None
    bend: float = 0.0
    phi: object = None
    h_base: object = None
    f_base: object = None
    f_smooth: object = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise BadParams(f"unknown stage {self.stage!r}")
        if not (0.0 < self.delta < 1.0):
            raise BadParams("Delta must lie in (0, 1)")
        if not (0.0 < self.r_prime < 0.25):
            raise BadParams("R' must lie in (0, 1/4)")
        if self.rho_prime <= 0:
            raise BadParams("rho' must be positive")
        if STAGES.index(self.stage) >= STAGES.index("bent"):
            if not (self.t0 < self.t2 < self.t3 and (self.a is None or self.t3 < self.a)):
                raise BadParams("need t0 < t2 < t3 < a")
            if not self.lambda_t2 < 0:
                raise BadParams("lambda_t2 must be negative")
            if abs(self.t3 - (self.t2 - 1.0 / self.lambda_t2)) > 1e-12 * abs(self.t3):
                raise BadParams("t3 must equal t2 - 1/lambda_t2")

    def warp_pair(self, hi=None):
        hi = self.a * (1 + 1e-9) if hi is None and self.a is not None else hi
        return WarpPair(self.h, self.f, self.p, self.q, (0.0, hi if hi is not None else self.f.domain[1]))


def pipeline_grid(state, n=DEFAULTS["grid_points"]):
    """At least ``n`` points on ``(0, a]``, refined near ``t2``, ``t3`` and ``a``."""
    t2, t3, a = state.t2, state.t3, state.a
    eps, dl = state.eps, state.delta_phi
    parts = [
        np.linspace(1e-3, 1.0, n // 5),
        np.geomspace(1.0, a, n // 5),
        np.linspace(t2 - 2 * eps, t2 + 2 * eps, n // 10),
        np.linspace(t2, t3 - dl, n // 10),
        np.linspace(t3 - 2 * dl, a, n // 5),
    ]
    tail_start = getattr(state.h_base, "T", None)
    if tail_start is not None:
        parts.append(np.linspace(tail_start * 0.99, tail_start * 1.01, n // 20))
    used = sum(len(x) for x in parts)
    parts.append(np.linspace(0.2, 0.6, max(0, n - used)))
    g = np.unique(np.concatenate(parts))
    g = g[(g > 0) & (g <= a)]
    if g.size < n:
        # parts overlap; top up between the cap and 1
        g = np.union1d(g, np.linspace(0.6, 1.0, n - g.size + 2)[1:-1])
    return g


def _verify_window(p, q, k, h, tol):
    def guard(fs, lo, hi):
        w = WarpPair(h, fs, p, q, (0.0, fs.domain[1]))
        grid = np.linspace(lo, hi, 401)
        return verify_on_grid(w, k, grid=grid, tol=tol)

    return guard


def _stage(name, fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except RicVerifyError as exc:
        if isinstance(exc, PipelineFailed):
            raise
        raise PipelineFailed(name, f"{type(exc).__name__}: {exc}") from exc


def build_state(p, q, k, delta, rho_prime, options=None, until="final"):
    """Run the construction stages up to ``until`` (no final verification)."""
    opt = _params(options)
    if p < 2 or q < 2:
        raise BadParams("need p, q >= 2")
    if not k > q:
        raise BadParams("need k > q")
    fparams = {k_: opt[k_] for k_ in ("theta", "t_join", "alpha", "r_prime", "ramp_end")}
    h0 = _stage("base", default_h, opt)
    f = _stage("base", default_f, dict(fparams, rho_prime=rho_prime, k=k, q=q))
    t0 = opt["r_prime"]
    t2 = _stage("base", find_t2, f, delta, lo=t0)
    h = _stage("base", TailedH, h0, t2 / opt["tail_ratio"])
    st = DeformationState(p, q, k, delta, rho_prime, h, f, "base", opt["r_prime"], t0=t0, t2=t2,
                          h_base=h, f_base=f, options=opt)
    if until == "base":
        return st

    fbar = _stage("extended", linear_extension, f, t2, delta)
    st = replace(st, f=fbar, stage="extended")
    if until == "extended":
        return st

    eps = opt["eps_rel"] * (t2 - t0)
    guard = _verify_window(p, q, k, h, opt["tol"])
    fs = _stage("smoothed", c1_smooth, fbar, t2, eps, guard)
    st = replace(st, f=fs, f_smooth=fs, eps=eps, stage="smoothed")
    if until == "smoothed":
        return st

    lam = _stage("bent", lambda_t2, h, t2)
    phi, t3 = _stage("bent", build_phi, h, t2, opt["delta_rel"])
    ht = _stage("bent", bend_h, h, phi)
    st = replace(st, h=ht, phi=phi, t3=t3, lambda_t2=lam, delta_phi=phi.delta, stage="bent")
    if until == "bent":
        return st

    dl = phi.delta
    a = t3 + 2 * dl
    bend = opt["bend_fraction"] * delta / (a - (t3 - dl))
    ff = _stage("final", concave_bend_f, fs, t3, dl, bend, until=a)
    return replace(st, f=ff, a=a, bend=bend, stage="final")


def final_report(state, grid=None):
    if grid is None:
        grid = pipeline_grid(state, state.options.get("grid_points", DEFAULTS["grid_points"]))
    return verify_on_grid(state.warp_pair(), state.k, grid=grid, tol=state.options.get("tol", DWP_TOL))


def run_pipeline(p, q, k, delta, rho_prime, options=None):
    """All stages plus strict verification of (1)-(4) on the composite grid.

    Returns ``(state, report)``.  Stage errors surface as ``PipelineFailed``
    tagged with the stage; a failed final verification is reported, not raised.
    """
    state = build_state(p, q, k, delta, rho_prime, options)
    return state, final_report(state)


def estimate_rho0(p, q, k, delta, lo=1e-4, hi=0.5, steps=8, options=None):
    """Largest tested ``rho'`` for which the pipeline passes (log-bisection)."""

    def ok(rho):
        try:
            st, rep = run_pipeline(p, q, k, delta, rho, options)
        except PipelineFailed:
            return False
        return rep.verdict and check_S_properties(st, sequence=False).passed

    if ok(hi):
        return hi
    if not ok(lo):
        return None
    a, b = np.log(lo), np.log(hi)
    for _ in range(int(steps)):
        m = 0.5 * (a + b)
        if ok(np.exp(m)):
            a = m
        else:
            b = m
    return float(np.exp(a))


# ---------------------------------------------------------------------------
# property audits


@dataclass(frozen=True)
class PropertyReport:
    results: dict  # name -> bool
    details: dict
    informational: tuple = ("S3",)

    @property
    def passed(self):
        return all(v for k, v in self.results.items() if k not in self.informational)


def _h_chain(state, rho):
    """``h o phi`` for another ``rho'`` with every other parameter unchanged."""
    st = build_state(state.p, state.q, state.k, state.delta, rho, state.options, until="bent")
    return st


def check_S_properties(state, sequence=True, n_halvings=5, grid=None):
    """Evaluate S1-S9 on grids (S3 informational, S2 exempts the bend window)."""
    if state.stage != "final":
        raise WrongStage(f"state is at stage {state.stage!r}, need 'final'")
    a, t3, dl = state.a, state.t3, state.delta_phi
    rp = state.r_prime
    h, f = state.h, state.f
    grid = pipeline_grid(state) if grid is None else np.asarray(grid)
    res, det = {}, {}

    cap = np.linspace(0.0, rp, 2001)
    res["S1"] = bool(np.all(f(cap) == state.rho_prime))
    det["S1"] = float(np.max(np.abs(f(cap) - state.rho_prime)))

    bend_lo = t3 - dl
    keep = grid < bend_lo
    f0, f1, f2 = (np.asarray(f(grid, j)) for j in range(3))
    res["S2"] = bool(np.all(f0 > 0) and np.all(f1[keep] >= 0) and np.all(f2[keep] >= 0))
    det["S2"] = {
        "min_f": float(f0.min()),
        "min_f1": float(f1.min()),
        "min_f2_outside_bend": float(f2[keep].min()),
        "exempt_window": [float(bend_lo), float(a)],
        "min_f2_on_window": float(f2[~keep].min()) if np.any(~keep) else None,
    }

    near_a = np.linspace(a - dl, a, 201)
    dev = float(np.max(np.abs(np.asarray(f(near_a, 1)) - state.delta)))
    res["S3"] = dev <= 1e-12
    det["S3"] = {"max_abs_f1_minus_delta_near_a": dev}

    res["S4"] = bool(np.all(h(cap) == np.sin(cap)))
    det["S4"] = float(np.max(np.abs(h(cap) - np.sin(cap))))

    half = np.linspace(0.0, 0.5, 2001)
    if sequence:
        other = _h_chain(state, state.rho_prime / 2.0)
        same = np.array_equal(np.asarray(h(half)), np.asarray(other.h(half)))
        res["S5"] = bool(same)
        det["S5"] = {"compared_rho_prime": state.rho_prime / 2.0}
    h0, h1, h2 = (np.asarray(h(grid, j)) for j in range(3))
    scale2 = float(np.max(np.abs(h2)))
    res["S6"] = bool(np.all(h0 > 0) and np.all(h1 >= 0) and np.all(h2 <= 1e-12 * scale2))
    det["S6"] = {"min_h": float(h0.min()), "min_h1": float(h1.min()), "max_h2": float(h2.max())}

    nbhd = np.linspace(t3 + dl, a, 201)
    res["S7"] = bool(np.all(np.asarray(h(nbhd, 1)) == 0.0))
    det["S7"] = {"window": [float(t3 + dl), float(a)]}

    low = np.union1d(half, [state.options.get("t_join", DEFAULTS["t_join"])])
    sup_low = float(np.max(np.abs(h(low, 2))))
    high = grid[grid > 0.5]
    sup_high = float(np.max(np.abs(h(high, 2)))) if high.size else 0.0
    res["S8"] = sup_high <= sup_low
    det["S8"] = {"sup_0_half": sup_low, "sup_beyond_half": sup_high}

    if sequence:
        rhos = [state.rho_prime * 0.5**i for i in range(n_halvings + 1)]
        ratios = []
        for r in rhos:
            st = state if r == state.rho_prime else build_state(state.p, state.q, state.k, state.delta, r, state.options)
            ratios.append(float(st.h(st.a) / st.f(st.a)))
        dec = all(b < a_ for a_, b in zip(ratios, ratios[1:]))
        res["S9"] = bool(dec)
        det["S9"] = {"rho_prime": rhos, "h(a)/f(a)": ratios}
    return PropertyReport(res, det)


def s8_sup_check(h, t2, delta_rel=DEFAULTS["delta_rel"], n=20001):
    """S8 for ``h o phi`` bent at a chosen ``t2``: ``(holds, sup_[0,1/2], sup_(1/2, a])``.

    With small ``t2`` the term ``|h'(t2) lambda|`` is large and S8 fails,
    which is why ``t2`` must be taken large.
    """
    phi, t3 = build_phi(h, t2, delta_rel)
    ht = bend_h(h, phi)
    low = float(np.max(np.abs(h(np.linspace(0.0, 0.5, 2001), 2))))
    high = float(np.max(np.abs(ht(np.linspace(0.5, t3 + 2 * phi.delta, n)[1:], 2))))
    return high <= low, low, high


def f_comparison_holds(f1, f2, grid):
    """``f1'/f1 > f2'/f2`` on every grid point (the conclusion of the comparison lemma)."""
    g = np.asarray(grid)
    lhs = np.asarray(f1(g, 1)) * np.asarray(f2(g)) - np.asarray(f2(g, 1)) * np.asarray(f1(g))
    return bool(np.all(lhs > 0)), lhs


def random_comparison_pairs(n=200, seed=0, T=0.0, span=5.0, n_grid=200):
    """Seeded pairs with ``f1''/f1 > f2''/f2`` on ``(T, T+span]`` and equal 1-jets at ``T``.

    Each pair solves ``f_i'' = sigma_i f_i`` with ``sigma_1 = sigma_2 + gap``,
    ``gap > 0``; returns a list of ``(ok, min_wronskian)``.  All pairs are
    integrated together as one linear system.
    """
    n = int(n)
    if n == 0:
        return []
    rng = np.random.default_rng(seed)
    a, w, ph = np.empty((n, 3)), np.empty((n, 3)), np.empty((n, 3))
    g0, g1, gw = np.empty(n), np.empty(n), np.empty(n)
    y0 = np.empty((n, 2))
    for i in range(n):
        a[i] = rng.uniform(0.0, 1.0, 3)
        w[i] = rng.uniform(0.5, 3.0, 3)
        ph[i] = rng.uniform(0, 2 * np.pi, 3)
        g0[i], g1[i], gw[i] = rng.uniform(0.01, 0.5), rng.uniform(0.0, 1.0), rng.uniform(0.5, 3.0)
        y0[i] = rng.uniform(0.1, 2.0), rng.uniform(0.0, 1.0)
    grid = np.linspace(T, T + span, n_grid + 1)[1:]

    def rhs(t, y):
        s2 = np.sum(a * np.sin(w * (t - T) + ph) ** 2, axis=1)
        s1 = s2 + g0 + g1 * np.sin(gw * (t - T)) ** 2
        f1, d1, f2, d2 = y.reshape(4, n)
        return np.concatenate([d1, s1 * f1, d2, s2 * f2])

    start = np.concatenate([y0[:, 0], y0[:, 1], y0[:, 0], y0[:, 1]])
    sol = solve_ivp(rhs, [T, T + span], start, t_eval=grid, rtol=1e-10, atol=1e-12)
    f1, d1, f2, d2 = sol.y.reshape(4, n, -1)
    wr = d1 * f2 - d2 * f1
    ok = np.all(wr > 0, axis=1) & np.all(f1 > 0, axis=1) & np.all(f2 > 0, axis=1)
    return [(bool(o), float(m)) for o, m in zip(ok, wr.min(axis=1))]


@dataclass(frozen=True)
class LemmaReport:
    results: dict
    details: dict

    @property
    def passed(self):
        return all(self.results.values())


def check_support_lemmas(state, n_pairs=200, seed=0, n_grid=4000):
    """Audits of the lemmas the construction relies on.

    * ``f_comparison_random``: the comparison lemma on seeded random pairs
    * ``f_comparison_pipeline``: applied to ``(f, L)`` after ``t2``
    * ``hprime_f_decreasing``: ``(h' f)' <= 0`` on ``[t2, a]`` for the base families
    * ``phi_half_bounds`` and ``phi_chain``: the two half-bounds and the
      resulting bound on ``|h~''|`` over ``[t2, t3]``
    * ``star``: ``phi' <= h'(t) h(t2) / (h(t) h'(t2))`` after ``t2 - delta``
    * ``log_derivative``: ``h~'/h~ <= h'/h``
    * ``monotone_improvement``: replacing ``f`` by ``L`` and ``h`` by ``h~``
      never lowers LHS (2)-(4) after ``t2 + eps``
    """
    if STAGES.index(state.stage) < STAGES.index("extended"):
        raise WrongStage("support lemmas need at least the extended stage")
    res, det = {}, {}
    pairs = random_comparison_pairs(n_pairs, seed)
    res["f_comparison_random"] = all(ok for ok, _ in pairs)
    det["f_comparison_random"] = {"pairs": len(pairs), "counterexamples": sum(not ok for ok, _ in pairs)}

    t2 = state.t2
    fb, hb = state.f_base, state.h_base
    L = Linear(float(fb(t2)), state.delta, t2)
    end = state.t3 if state.t3 is not None else 2 * t2
    g = np.linspace(t2, end, n_grid + 1)[1:]
    ok, wr = f_comparison_holds(fb, L, g)
    res["f_comparison_pipeline"] = ok
    det["f_comparison_pipeline"] = float(np.min(wr))

    a = state.a if state.a is not None else end
    g2 = np.linspace(t2, a, n_grid)
    deriv = np.asarray(hb(g2, 2)) * np.asarray(fb(g2)) + np.asarray(hb(g2, 1)) * np.asarray(fb(g2, 1))
    res["hprime_f_decreasing"] = bool(np.all(deriv <= 0))
    det["hprime_f_decreasing"] = float(np.max(deriv))

    if state.phi is None:
        return LemmaReport(res, det)

    lam, t3, dl = state.lambda_t2, state.t3, state.delta_phi
    ref = abs(float(hb(0.5, 2)))
    b1 = abs(float(hb(t2, 2)))
    b2 = abs(float(hb(t2, 1)) * lam)
    res["phi_half_bounds"] = b1 < ref / 2 and b2 < ref / 2
    det["phi_half_bounds"] = {"|h''(t2)|": b1, "|h'(t2) lambda|": b2, "|h''(1/2)|/2": ref / 2}
    gw = np.linspace(t2, t3, n_grid)
    sup = float(np.max(np.abs(state.h(gw, 2))))
    res["phi_chain"] = sup <= b1 + b2 and b1 + b2 < ref
    det["phi_chain"] = {"sup_[t2,t3] |h~''|": sup, "bound": b1 + b2, "|h''(1/2)|": ref}

    gs = np.linspace(t2 - dl, a, n_grid)
    rhs = np.asarray(hb(gs, 1)) * float(hb(t2)) / (np.asarray(hb(gs)) * float(hb(t2, 1)))
    php = np.asarray(state.phi(gs, 1))
    res["star"] = bool(np.all(php <= rhs))
    det["star"] = float(np.min(rhs - php))

    ld = np.asarray(state.h(gs, 1)) / np.asarray(state.h(gs)) - np.asarray(hb(gs, 1)) / np.asarray(hb(gs))
    res["log_derivative"] = bool(np.all(ld <= 0))
    det["log_derivative"] = float(np.max(ld))

    if state.eps is not None:
        from .dwp import lhs_and_scale

        gm = np.linspace(t2 + state.eps, t3, n_grid)
        w0 = WarpPair(hb, fb, state.p, state.q, (0.0, np.inf))
        w1 = WarpPair(hb, L, state.p, state.q, (0.0, np.inf))
        w2 = WarpPair(state.h, L, state.p, state.q, (0.0, np.inf))
        l0, _ = lhs_and_scale(w0, state.k, gm)
        l1, _ = lhs_and_scale(w1, state.k, gm)
        l2, _ = lhs_and_scale(w2, state.k, gm)
        # relative comparison: the terms are O(1/t^2)
        s = gm**2
        d01 = ((l1 - l0) * s)[1:]
        d12 = ((l2 - l1) * s)[1:]
        tol = 1e-9
        res["monotone_improvement"] = bool(np.all(d01[:2] >= -tol) and np.all(d12 >= -tol))
        det["monotone_improvement"] = {
            "f_to_L_min_change_(2),(3)": float(np.min(d01[:2])),
            "h_to_h~_min_change_(2)-(4)": float(np.min(d12)),
        }
    return LemmaReport(res, det)
