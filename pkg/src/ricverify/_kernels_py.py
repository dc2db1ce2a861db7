"""Reference (numpy) implementations of the hot kernels.

``_kernels.pyx`` mirrors these signatures exactly; ``_backend`` picks one at
import time.
"""
from itertools import combinations

import numpy as np

BACKEND = "python"


def directional_batch(comp, X):
    """Stack of matrices ``M[s, i, j] = R(X_s, e_i, X_s, e_j)``."""
    comp = np.ascontiguousarray(comp, dtype=np.float64)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    return np.einsum("sa,aicj,sc->sij", X, comp, X, optimize=True)


def min_subset_sum(values, m):
    """Minimum over all ``m``-element subsets of ``values`` of their sum."""
    values = [float(v) for v in values]
    best = np.inf
    for combo in combinations(values, int(m)):
        s = 0.0
        for v in combo:
            s += v
        if s < best:
            best = s
    return float(best)


def lhs_grid(h, h1, h2, omh, f, f1, f2, omf, p, q, k):
    """Left-hand sides of the four warped-product inequalities on a grid.

    ``omh``/``omf`` are ``1 - h'^2`` and ``1 - f'^2``, passed separately so
    callers with closed forms avoid the cancellation near ``h' = 1``.

    Returns ``(lhs, scale)``, both of shape ``(4, n)``; ``scale`` is the sum
    of absolute values of the terms of each expression and is what relative
    tolerances are measured against.
    """
    h, h1, h2, omh = (np.asarray(a, dtype=np.float64) for a in (h, h1, h2, omh))
    f, f1, f2, omf = (np.asarray(a, dtype=np.float64) for a in (f, f1, f2, omf))
    H2 = h2 / h
    Hq = (omh / h) / h
    F2 = f2 / f
    Fq = (omf / f) / f
    M = (f1 / f) * (h1 / h)

    t1 = (-(k - q) * H2, -q * F2)
    t2 = (-H2, (k - q - 1) * Hq, -q * M)
    t3 = ((k - q) * Hq, -q * M)
    t4 = (-F2, -p * M, (k - p - 1) * Fq)

    lhs = np.empty((4,) + H2.shape)
    scale = np.empty_like(lhs)
    for i, terms in enumerate((t1, t2, t3, t4)):
        lhs[i] = sum(terms)
        scale[i] = sum(np.abs(x) for x in terms)
    return lhs, scale
