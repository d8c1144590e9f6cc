"""Batched helpers for maximizing information functionals over probability simplices."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

LOG2E = 1.0 / np.log(2.0)


def xlogx(p):
    """Elementwise p*log2(p) with 0 log 0 = 0."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    m = p > 0
    out[m] = p[m] * np.log2(p[m])
    return out


def safe_log2(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    m = p > 0
    out[m] = np.log2(p[m])
    return out


def row_entropies(m) -> np.ndarray:
    """Entropy of each row of a stochastic matrix (last axis)."""
    return -xlogx(m).sum(axis=-1)


def input_mi(p, mat) -> np.ndarray:
    """I(X;O) for a batch of input laws ``p`` (..., |X|) and a kernel ``mat`` (|X|, |O|)."""
    p = np.asarray(p, dtype=float)
    out = p @ mat
    return -xlogx(out).sum(axis=-1) - p @ row_entropies(mat)


def input_mi_grad(p, mat) -> np.ndarray:
    """Gradient of :func:`input_mi` in ``p`` up to an additive constant per batch row."""
    out = np.asarray(p, dtype=float) @ mat
    # d/dp(x) = -sum_o T(o|x) log2 P(o) - H(T_x)  (constant terms dropped)
    return -safe_log2(out) @ mat.T - row_entropies(mat)


def binary_maximize(fun, grid: float):
    """Maximize a vectorized function of ``q = P(X=1)`` on [0, 1].

    A uniform grid of step ``grid`` is scanned, then the best cell is refined
    with a bounded scalar search. Returns ``(value, q)``.
    """
    n = max(2, int(round(1.0 / grid)) + 1)
    qs = np.linspace(0.0, 1.0, n)
    vals = fun(qs)
    i = int(np.argmax(vals))
    best_v, best_q = float(vals[i]), float(qs[i])
    lo, hi = qs[max(i - 1, 0)], qs[min(i + 1, n - 1)]
    if hi > lo:
        res = minimize_scalar(lambda q: -float(fun(np.array([q]))[0]), bounds=(lo, hi),
                              method="bounded", options={"xatol": 1e-12})
        if -res.fun > best_v:
            best_v, best_q = float(-res.fun), float(res.x)
    return best_v, best_q


def eg_step(x, g, step):
    """Exponentiated-gradient update of row-stochastic ``x`` along ``g`` (last axis)."""
    with np.errstate(divide="ignore"):
        z = np.log(x) + step[..., None] * g
    z -= z.max(axis=-1, keepdims=True)
    y = np.exp(z)
    return y / y.sum(axis=-1, keepdims=True)


def simplex_maximize(fun, grad, starts, iters: int = 400, step0: float = 1.0):
    """Batched exponentiated-gradient ascent with per-row adaptive steps.

    ``fun(P) -> (B,)`` and ``grad(P) -> (B, k)`` act on a batch ``P`` of
    points on the k-simplex. Rejected steps halve the step size, accepted
    ones grow it by 20%, so the objective never decreases.
    """
    x = np.array(starts, dtype=float)
    f = fun(x)
    step = np.full(x.shape[0], step0)
    for _ in range(iters):
        cand = eg_step(x, grad(x), step)
        fc = fun(cand)
        ok = fc >= f
        x[ok], f[ok] = cand[ok], fc[ok]
        step = np.where(ok, step * 1.2, step * 0.5)
        if np.all(step < 1e-10):
            break
    return x, f


def random_simplex(rng, shape, k):
    """Dirichlet(1) points; returns array of ``shape + (k,)``."""
    return rng.dirichlet(np.ones(k), size=shape)


def simplex_starts(k: int, restarts: int, rng) -> np.ndarray:
    """Uniform law, the vertices and Dirichlet draws; at least ``restarts`` rows."""
    pts = [np.full(k, 1.0 / k)]
    eye = np.eye(k)
    pts.extend(0.98 * eye + 0.02 / k)
    extra = max(0, restarts - len(pts))
    if extra:
        pts.extend(random_simplex(rng, (extra,), k))
    return np.array(pts)
