"""Scalar functions with derivatives up to order 3.

Every function is vectorized over ``t`` and answers ``fn(t, order)`` for
``order`` in 0..3.  Closed-form families use analytic derivatives; piecewise
and composed functions combine the derivatives of their parts (chain rule,
closed-form smoothstep integrals) instead of differencing.

``one_minus_slope_sq`` returns ``1 - fn'(t)^2``; families where this
cancels badly (``sin``, ``cos``) override it with the exact identity.
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import solve_ivp
from scipy.interpolate import make_interp_spline

from .errors import BadParams, OutOfDomain

INF = np.inf


def _arr(t):
    return np.asarray(t, dtype=np.float64)


class ScalarFunction:
    """Base class: subclasses implement ``_eval(t, order)`` on arrays."""

    name = "function"
    smoothness = 3

    def __init__(self, domain=(-INF, INF), params=None):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise BadParams(f"empty domain [{lo}, {hi}]")
        self.domain = (lo, hi)
        self.params = dict(params or {})

    def __call__(self, t, order=0):
        if order not in (0, 1, 2, 3):
            raise ValueError(f"derivative order must be 0..3, got {order}")
        ta = _arr(t)
        lo, hi = self.domain
        if np.any(ta < lo) or np.any(ta > hi) or np.any(np.isnan(ta)):
            raise OutOfDomain(f"{self.name}: t outside [{lo:g}, {hi:g}]")
        out = self._eval(ta, order)
        return float(out) if np.ndim(out) == 0 else out

    def _eval(self, t, order):
        raise NotImplementedError

    def one_minus_slope_sq(self, t):
        d1 = _arr(self(t, 1))
        return (1.0 - d1) * (1.0 + d1)

    def jet(self, t):
        """Values and first three derivatives, stacked on a new leading axis."""
        return np.stack([_arr(self(t, k)) for k in range(4)])

    def describe(self):
        return {"family": self.name, "params": self.params, "domain": list(self.domain)}

    def __repr__(self):
        return f"{type(self).__name__}({self.params})"


# ---------------------------------------------------------------------------
# closed-form families


class Sine(ScalarFunction):
    name = "sine"

    def __init__(self):
        super().__init__()

    def _eval(self, t, order):
        return (np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))[order](t)

    def one_minus_slope_sq(self, t):
        return np.sin(_arr(t)) ** 2


class Cosine(ScalarFunction):
    name = "cosine"

    def __init__(self):
        super().__init__()

    def _eval(self, t, order):
        return (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin)[order](t)

    def one_minus_slope_sq(self, t):
        return np.cos(_arr(t)) ** 2


class Constant(ScalarFunction):
    name = "constant"

    def __init__(self, value):
        super().__init__(params={"value": float(value)})
        self.value = float(value)

    def _eval(self, t, order):
        return np.full_like(t, self.value if order == 0 else 0.0)

    def one_minus_slope_sq(self, t):
        return np.ones_like(_arr(t))


class Linear(ScalarFunction):
    """``value + slope * (t - t0)``."""

    name = "linear"

    def __init__(self, value, slope, t0=0.0, domain=(-INF, INF)):
        super().__init__(domain, {"value": float(value), "slope": float(slope), "t0": float(t0)})
        self.value, self.slope, self.t0 = float(value), float(slope), float(t0)

    def _eval(self, t, order):
        if order == 0:
            return self.value + self.slope * (t - self.t0)
        return np.full_like(t, self.slope if order == 1 else 0.0)

    def one_minus_slope_sq(self, t):
        return np.full_like(_arr(t), (1.0 - self.slope) * (1.0 + self.slope))


class ExpSaturation(ScalarFunction):
    """``A - B exp(-sigma t)``: concave, increasing, ``h''' > 0``."""

    name = "exp-saturation"

    def __init__(self, A=2.0, B=1.0, sigma=1.0):
        if B <= 0 or sigma <= 0:
            raise BadParams("need B > 0 and sigma > 0")
        super().__init__(params={"A": A, "B": B, "sigma": sigma})
        self.A, self.B, self.sigma = float(A), float(B), float(sigma)

    def _eval(self, t, order):
        e = self.B * np.exp(-self.sigma * t)
        if order == 0:
            return self.A - e
        return -((-self.sigma) ** order) * e


class CoshProfile(ScalarFunction):
    """``rho * cosh(kappa (t - t0))``."""

    name = "cosh"

    def __init__(self, rho=1.0, kappa=1.0, t0=0.0):
        if rho <= 0:
            raise BadParams("need rho > 0")
        super().__init__(params={"rho": rho, "kappa": kappa, "t0": t0})
        self.rho, self.kappa, self.t0 = float(rho), float(kappa), float(t0)

    def _eval(self, t, order):
        x = self.kappa * (t - self.t0)
        base = np.cosh(x) if order % 2 == 0 else np.sinh(x)
        return self.rho * self.kappa**order * base


class PowerCapH(ScalarFunction):
    """``sin t`` up to ``t_join``, then a C^2-matched power law.

    Beyond the join ``h = sin(t_j) + B c^a ((t + s)^a / c^a - 1)`` with
    ``c = t_j + s = (1 - a) / tan(t_j)`` and ``B = cos(t_j) c^(1-a) / a``.
    The tail is increasing, concave, has ``h''' > 0`` and ``h' -> 0``.
    """

    name = "power-cap"

    def __init__(self, t_join=0.45, alpha=0.06):
        if not (0.0 < t_join < 0.5) or not (0.0 < alpha < 1.0):
            raise BadParams("need 0 < t_join < 1/2 and 0 < alpha < 1")
        super().__init__((0.0, INF), {"t_join": t_join, "alpha": alpha})
        self.tj, self.alpha = float(t_join), float(alpha)
        self.c = (1.0 - alpha) / np.tan(t_join)
        self.s = self.c - t_join
        self.B = np.cos(t_join) * self.c ** (1.0 - alpha) / alpha

    def _tail(self, t, order):
        a, x = self.alpha, t + self.s
        if order == 0:
            return np.sin(self.tj) + self.B * self.c**a * np.expm1(a * np.log(x / self.c))
        coef = self.B * a
        for j in range(1, order):
            coef *= a - j
        return coef * x ** (a - order)

    def _eval(self, t, order):
        cap = t <= self.tj
        out = np.empty_like(t)
        out[cap] = Sine()._eval(t[cap], order)
        out[~cap] = self._tail(t[~cap], order)
        return out

    def scaled_curvature(self, t):
        """``-t^2 h''/h``, finite for arbitrarily large ``t``."""
        t = _arr(t)
        out = np.empty_like(t)
        cap = t <= self.tj
        out[cap] = t[cap] ** 2
        tt = t[~cap]
        x = tt + self.s
        a = self.alpha
        out[~cap] = self.B * a * (1.0 - a) * (tt / x) ** 2 * x**a / self._tail(tt, 0)
        return out

    def one_minus_slope_sq(self, t):
        t = _arr(t)
        d1 = self(t, 1)
        return np.where(t <= self.tj, np.sin(np.minimum(t, self.tj)) ** 2, (1.0 - d1) * (1.0 + d1))


class TailedH(ScalarFunction):
    """``base`` up to ``T``, then the C^2 exponential tail ``h' = h'(T) exp(-sigma (t - T))``."""

    name = "tailed"

    def __init__(self, base, T):
        super().__init__(base.domain, {"base": base.describe(), "T": float(T)})
        self.base, self.T = base, float(T)
        self.hT, self.h1T, h2T = (base(self.T, k) for k in range(3))
        if self.h1T <= 0 or h2T >= 0:
            raise BadParams("tail needs h' > 0 and h'' < 0 at the join")
        self.sigma = -h2T / self.h1T

    def _eval(self, t, order):
        left = t <= self.T
        out = np.empty_like(t)
        out[left] = _arr(self.base(t[left], order))
        x = t[~left] - self.T
        e = np.exp(-self.sigma * x)
        if order == 0:
            out[~left] = self.hT - self.h1T * np.expm1(-self.sigma * x) / self.sigma
        else:
            out[~left] = self.h1T * (-self.sigma) ** (order - 1) * e
        return out

    def one_minus_slope_sq(self, t):
        t = _arr(t)
        d1 = self(t, 1)
        return np.where(t <= self.T, self.base.one_minus_slope_sq(np.minimum(t, self.T)), (1 - d1) * (1 + d1))


def smoothstep5(z):
    z = np.clip(z, 0.0, 1.0)
    return z**3 * (10.0 - 15.0 * z + 6.0 * z * z)


def smoothstep5_d(z):
    """Derivative of :func:`smoothstep5` in ``z``."""
    z = np.clip(z, 0.0, 1.0)
    return 30.0 * z * z * (1.0 - z) ** 2


def smoothstep5_d2(z):
    z = np.clip(z, 0.0, 1.0)
    return 60.0 * z * (1.0 - z) * (1.0 - 2.0 * z)


def smoothstep5_int(z):
    """``int_0^z smoothstep5``, continued linearly for ``z > 1``."""
    z = np.maximum(z, 0.0)
    zc = np.minimum(z, 1.0)
    w1 = 2.5 * zc**4 - 3.0 * zc**5 + zc**6
    return w1 + np.maximum(z - 1.0, 0.0)


def smoothstep5_int2(z):
    """``int_0^z int_0^y smoothstep5``, continued quadratically for ``z > 1``."""
    z = np.maximum(z, 0.0)
    zc = np.minimum(z, 1.0)
    w2 = 0.5 * zc**5 - 0.5 * zc**6 + zc**7 / 7.0
    e = np.maximum(z - 1.0, 0.0)
    return w2 + 0.5 * e + 0.5 * e * e


class Ramped(ScalarFunction):
    """Smoothstep in ``t`` from 0 at ``lo`` to 1 at ``hi``."""

    name = "ramp"

    def __init__(self, lo, hi):
        super().__init__(params={"lo": lo, "hi": hi})
        self.lo, self.w = float(lo), float(hi) - float(lo)

    def _eval(self, t, order):
        z = (t - self.lo) / self.w
        if order == 0:
            return smoothstep5(z)
        if order == 1:
            return smoothstep5_d(z) / self.w
        if order == 2:
            return smoothstep5_d2(z) / self.w**2
        zc = np.clip(z, 0.0, 1.0)
        inside = (z > 0) & (z < 1)
        return np.where(inside, 60.0 * (1.0 - 6.0 * zc + 6.0 * zc * zc), 0.0) / self.w**3


# ---------------------------------------------------------------------------
# f profile solved from f'' = sigma f


@lru_cache(maxsize=32)
def _solve_profile(k, q, theta, t_join, alpha, r_prime, ramp_end, u_max):
    h0 = PowerCapH(t_join, alpha)
    ramp = Ramped(r_prime, ramp_end)
    c = theta * (k - q) / q

    import math

    tj, a, sft, B = h0.tj, h0.alpha, h0.s, h0.B
    h_join, cA = math.sin(tj), B * h0.c**a
    w = ramp_end - r_prime

    def t2_sigma(t):
        # c * t^2 * (-h0''/h0) * ramp, scalar and overflow-free
        if t <= r_prime:
            return 0.0
        z = min((t - r_prime) / w, 1.0)
        r = z**3 * (10.0 - 15.0 * z + 6.0 * z * z)
        if t <= tj:
            return c * t * t * r
        x = t + sft
        h = h_join + cA * math.expm1(a * math.log(x / h0.c))
        return c * B * a * (1.0 - a) * (t / x) ** 2 * x**a / h * r

    def rhs(u, y):
        t = math.exp(u)
        return [y[1], y[1] + t2_sigma(t) * y[0]]

    sol = solve_ivp(
        rhs,
        [np.log(r_prime), u_max],
        [1.0, 0.0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    if not sol.success:  # pragma: no cover
        raise BadParams(f"profile integration failed: {sol.message}")
    return sol.sol, h0, ramp, c


class CurvatureDrivenProfile(ScalarFunction):
    """Unit-height profile with ``f'' = sigma f``, ``f = 1`` on ``[0, r_prime]``.

    ``sigma = theta (k - q) / q * (-h0''/h0) * ramp``, so inequality (1)
    holds with margin ``1 - theta`` wherever the ramp is on.  Solved once per
    parameter set in log-time ``u = log t`` with state ``(f, t f')``.
    """

    name = "curvature-driven"

    def __init__(self, k, q, theta=0.8, t_join=0.45, alpha=0.06, r_prime=0.2, ramp_end=0.5, u_max=400.0):
        if k <= q or q < 1:
            raise BadParams("need k > q >= 1")
        if not (0.0 < theta < 1.0):
            raise BadParams("theta must lie in (0, 1)")
        if not (0.0 < r_prime < ramp_end):
            raise BadParams("need 0 < r_prime < ramp_end")
        params = dict(k=k, q=q, theta=theta, t_join=t_join, alpha=alpha, r_prime=r_prime, ramp_end=ramp_end, u_max=u_max)
        super().__init__((0.0, float(np.exp(u_max))), params)
        self._sol, self.h0, self.ramp, self.c = _solve_profile(
            int(k), int(q), float(theta), float(t_join), float(alpha), float(r_prime), float(ramp_end), float(u_max)
        )
        self.r_prime = float(r_prime)

    def sigma(self, t, order=0):
        g = -self.h0(t, 2) / self.h0(t)
        r = self.ramp(t)
        if order == 0:
            return self.c * g * r
        h, h1, h2, h3 = (self.h0(t, j) for j in range(4))
        g1 = -(h3 * h - h2 * h1) / (h * h)
        return self.c * (g1 * r + g * self.ramp(t, 1))

    def _eval(self, t, order):
        out = np.zeros_like(t) if order else np.ones_like(t)
        live = t > self.r_prime
        if not np.any(live):
            return out
        tl = t[live]
        y = self._sol(np.log(tl))
        f, f1 = y[0], y[1] / tl
        if order == 0:
            out[live] = f
        elif order == 1:
            out[live] = f1
        elif order == 2:
            out[live] = self.sigma(tl) * f
        else:
            out[live] = self.sigma(tl, 1) * f + self.sigma(tl) * f1
        return out


class Scaled(ScalarFunction):
    """``factor * base``."""

    def __init__(self, base, factor):
        super().__init__(base.domain, {"base": base.describe(), "factor": float(factor)})
        self.base, self.factor = base, float(factor)
        self.name = f"scaled-{base.name}"

    def _eval(self, t, order):
        return self.factor * _arr(self.base._eval(t, order))


# ---------------------------------------------------------------------------
# piecewise and composed functions


class Piecewise(ScalarFunction):
    """``left`` for ``t <= split``, ``right`` beyond."""

    name = "piecewise"

    def __init__(self, left, right, split):
        lo, hi = left.domain[0], right.domain[1]
        super().__init__((lo, hi), {"split": float(split), "left": left.describe(), "right": right.describe()})
        self.left, self.right, self.split = left, right, float(split)

    def _eval(self, t, order):
        out = np.empty_like(t)
        m = t <= self.split
        out[m] = _arr(self.left._eval(t[m], order))
        out[~m] = _arr(self.right._eval(t[~m], order))
        return out

    def one_minus_slope_sq(self, t):
        t = _arr(t)
        m = t <= self.split
        out = np.empty_like(t)
        out[m] = self.left.one_minus_slope_sq(t[m])
        out[~m] = self.right.one_minus_slope_sq(t[~m])
        return out


class WindowSmoothed(ScalarFunction):
    """``left`` before ``lo``, ``right`` after ``hi``, a C^3 bridge in between.

    The bridge is described by its second derivative ``g2(x)`` on
    ``x = (t - lo) / (hi - lo)``; values and slopes come from piecewise
    Chebyshev antiderivatives anchored at the left end.
    """

    name = "window-smoothed"

    def __init__(self, left, right, lo, hi, g2, g3, breaks, deg=40):
        super().__init__((left.domain[0], right.domain[1]), {"lo": float(lo), "hi": float(hi)})
        self.left, self.right = left, right
        self.lo, self.hi = float(lo), float(hi)
        self.width = self.hi - self.lo
        self._g2, self._g3 = g2, g3
        y0 = float(left(self.lo))
        d0 = float(left(self.lo, 1))
        w = self.width
        self.pieces = []
        v, d = y0, d0
        for a, b in zip(breaks[:-1], breaks[1:]):
            s2 = C.Chebyshev.interpolate(g2, deg, domain=[a, b])
            s1 = s2.integ(lbnd=a) * w + d  # slope in t-units
            s0 = s1.integ(lbnd=a) * w + v
            self.pieces.append((a, b, s0, s1))
            v, d = float(s0(b)), float(s1(b))
        self.end_value, self.end_slope = v, d

    def _eval(self, t, order):
        out = np.empty_like(t)
        left = t < self.lo
        right = t > self.hi
        mid = ~(left | right)
        out[left] = _arr(self.left._eval(t[left], order))
        out[right] = _arr(self.right._eval(t[right], order))
        if np.any(mid):
            x = (t[mid] - self.lo) / self.width
            if order == 2:
                out[mid] = self._g2(x)
            elif order == 3:
                out[mid] = self._g3(x) / self.width
            else:
                val = np.empty_like(x)
                for i, (a, b, s0, s1) in enumerate(self.pieces):
                    last = i == len(self.pieces) - 1
                    m = (x >= a) & ((x <= b) if last else (x < b))
                    val[m] = (s0 if order == 0 else s1)(x[m])
                out[mid] = val
        return out


class Composed(ScalarFunction):
    """``outer(inner(t))`` by the chain rule; equals ``outer`` where ``inner`` is the identity."""

    name = "composed"

    def __init__(self, outer, inner, identity_until=-INF):
        super().__init__(inner.domain, {"outer": outer.describe(), "inner": inner.describe()})
        self.outer, self.inner = outer, inner
        self.identity_until = float(identity_until)

    def _eval(self, t, order):
        out = np.empty_like(t)
        ident = t <= self.identity_until
        out[ident] = _arr(self.outer._eval(t[ident], order))
        ts = t[~ident]
        p = [_arr(self.inner._eval(ts, j)) for j in range(order + 1)]
        g = [_arr(self.outer._eval(p[0], j)) for j in range(order + 1)]
        if order == 0:
            r = g[0]
        elif order == 1:
            r = g[1] * p[1]
        elif order == 2:
            r = g[2] * p[1] ** 2 + g[1] * p[2]
        else:
            r = g[3] * p[1] ** 3 + 3.0 * g[2] * p[1] * p[2] + g[1] * p[3]
        out[~ident] = r
        return out

    def one_minus_slope_sq(self, t):
        t = _arr(t)
        ident = t <= self.identity_until
        out = np.empty_like(t)
        out[ident] = self.outer.one_minus_slope_sq(t[ident])
        d1 = _arr(self._eval(t[~ident], 1))
        out[~ident] = (1 - d1) * (1 + d1)
        return out


class PhiFunction(ScalarFunction):
    """Smoothed reparametrization with ``phi'' = lam * (S1 - S3)``.

    ``S1`` and ``S3`` are quintic smoothsteps of half-width ``delta`` centred
    at ``t2`` and ``t3 = t2 - 1/lam``.  So ``phi(t) = t`` before
    ``t2 - delta``, ``phi' = 1 + lam (t - t2)`` between the windows and
    ``phi`` is constant after ``t3 + delta``.
    """

    name = "phi"

    def __init__(self, t2, lam, delta):
        super().__init__(params={"t2": float(t2), "lam": float(lam), "delta": float(delta)})
        self.t2, self.lam, self.delta = float(t2), float(lam), float(delta)
        self.t3 = self.t2 - 1.0 / self.lam
        self.start = self.t2 - self.delta
        self.stop = self.t3 + self.delta
        self.end_value = float(self._raw(np.array([self.stop]), 0)[0])

    def _raw(self, t, order):
        w = 2.0 * self.delta
        z1 = (t - self.start) / w
        z3 = (t - (self.t3 - self.delta)) / w
        lam = self.lam
        if order == 0:
            return t + lam * w * w * (smoothstep5_int2(z1) - smoothstep5_int2(z3))
        if order == 1:
            return 1.0 + lam * w * (smoothstep5_int(z1) - smoothstep5_int(z3))
        if order == 2:
            return lam * (smoothstep5(z1) - smoothstep5(z3))
        return lam * (smoothstep5_d(z1) - smoothstep5_d(z3)) / w

    def _eval(self, t, order):
        out = np.empty_like(t)
        before = t <= self.start
        after = t >= self.stop
        mid = ~(before | after)
        if order == 0:
            out[before] = t[before]
            out[after] = self.end_value
        else:
            out[before] = 1.0 if order == 1 else 0.0
            out[after] = 0.0
        out[mid] = self._raw(t[mid], order)
        return out


class Bent(ScalarFunction):
    """``base - kappa * II(t)`` where ``II'' `` ramps from 0 at ``start`` to 1 at ``full``."""

    name = "bent"

    def __init__(self, base, start, full, kappa):
        super().__init__(base.domain, {"base": base.describe(), "start": float(start), "full": float(full), "kappa": float(kappa)})
        self.base = base
        self.start, self.w, self.kappa = float(start), float(full) - float(start), float(kappa)

    def bend_jet(self, t, order):
        z = (t - self.start) / self.w
        if order == 0:
            return self.w**2 * smoothstep5_int2(z)
        if order == 1:
            return self.w * smoothstep5_int(z)
        if order == 2:
            return smoothstep5(z)
        return smoothstep5_d(z) / self.w

    def _eval(self, t, order):
        out = np.array(_arr(self.base._eval(t, order)), copy=True)
        m = t > self.start
        out[m] -= self.kappa * self.bend_jet(t[m], order)
        return out


class SampledSpline(ScalarFunction):
    """Interpolating B-spline through a sampled table."""

    name = "spline"

    def __init__(self, t, y, degree=5):
        t = _arr(t)
        y = _arr(y)
        if t.ndim != 1 or t.shape != y.shape or t.size < degree + 1:
            raise BadParams("need matching 1-d tables with more points than the degree")
        if np.any(np.diff(t) <= 0):
            raise BadParams("sample abscissae must increase strictly")
        super().__init__((t[0], t[-1]), {"n": int(t.size), "degree": int(degree)})
        self.smoothness = max(0, int(degree) - 1)
        self._spl = [make_interp_spline(t, y, k=int(degree))]
        for j in range(1, 4):
            self._spl.append(self._spl[0].derivative(j) if j <= degree else None)

    def _eval(self, t, order):
        s = self._spl[order]
        return s(t) if s is not None else np.zeros_like(t)


class CallableFunction(ScalarFunction):
    """Values from a callable; derivatives by central differences."""

    name = "callable"

    def __init__(self, fn, domain=(-INF, INF), label="callable"):
        super().__init__(domain, {"label": label})
        self.fn = fn

    def _eval(self, t, order):
        if order == 0:
            return _arr(self.fn(t))
        return finite_difference(self.fn, t, order)


# ---------------------------------------------------------------------------
# finite differences

_FD_STENCILS = {
    1: (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
    2: (np.array([-2, -1, 0, 1, 2]), np.array([-1, 16, -30, 16, -1]) / 12.0),
    3: (np.array([-3, -2, -1, 1, 2, 3]), np.array([1, -8, 13, -13, 8, -1]) / 8.0),
}
_FD_STEP_SCALE = {1: 1.0, 2: 100.0, 3: 1000.0}


def fd_step(t, order=1):
    """``max(1e-5, 1e-6 |t|)``, widened for higher orders to bound round-off."""
    return np.maximum(1e-5, 1e-6 * np.abs(_arr(t))) * _FD_STEP_SCALE[order]


def finite_difference(fn, t, order, step=None):
    """Central-difference derivative of ``fn`` (fourth order accurate)."""
    t = _arr(t)
    h = fd_step(t, order) if step is None else step
    offs, w = _FD_STENCILS[order]
    acc = np.zeros_like(t)
    for o, c in zip(offs, w):
        acc = acc + c * _arr(fn(t + o * h))
    return acc / h**order


# ---------------------------------------------------------------------------
# config


def _spline_from_config(t, y, degree=5):
    return SampledSpline(t, y, degree)


def _profile_from_config(rho_prime, k, q, **kw):
    return Scaled(CurvatureDrivenProfile(k, q, **kw), rho_prime)


FAMILIES = {
    "sine": Sine,
    "cosine": Cosine,
    "constant": Constant,
    "linear": Linear,
    "exp-saturation": ExpSaturation,
    "cosh": CoshProfile,
    "power-cap": PowerCapH,
    "curvature-driven": _profile_from_config,
    "spline": _spline_from_config,
}


def function_from_config(d):
    """Build a function from ``{"family": name, **params}``."""
    if not isinstance(d, dict) or "family" not in d:
        raise BadParams("function config needs a 'family' key")
    name = d["family"]
    if name not in FAMILIES:
        raise BadParams(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
    params = {k: v for k, v in d.items() if k != "family"}
    try:
        return FAMILIES[name](**params)
    except TypeError as exc:
        raise BadParams(f"bad parameters for {name!r}: {exc}") from exc
