"""Secret-key capacity bounds for a pair of opposite-direction broadcast channels.

All values are bits per channel use. Auxiliary-variable searches are
non-convex; the returned values are achievable points found by restarted
ascent, so a lower bound computed here is itself only a lower bound on the
true maximum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

from . import _simplex as sx
from .channel import (
    DegradednessReport,
    Dmbc,
    Split,
    TwoDmbc,
    analyze_degraded,
    find_degraded_split,
    subchannel,
)
from .infotheory import (
    INFO_TOL,
    Distribution,
    JointDistribution,
    Kernel,
    conditional_mutual_information,
    is_markov_chain,
    mutual_information,
)

CONSTRAINT_SLACK = 1e-12


# data types -----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AuxScheme:
    """Test channels for the two-round scheme.

    ``kernel_V`` is P(v|y) on the channel whose output is covered;
    ``dist_W2``, ``kernel_W1_given_W2`` and ``kernel_X_given_W1`` form the
    superposition chain W2 -> W1 -> X on the other channel.
    """

    kernel_V: Kernel
    dist_W2: Distribution
    kernel_W1_given_W2: Kernel
    kernel_X_given_W1: Kernel

    def __post_init__(self):
        for name, cls in (("kernel_V", Kernel), ("dist_W2", Distribution),
                          ("kernel_W1_given_W2", Kernel), ("kernel_X_given_W1", Kernel)):
            v = getattr(self, name)
            if not isinstance(v, cls):
                object.__setattr__(self, name, cls(np.asarray(v)))
        if self.dist_W2.size != self.kernel_W1_given_W2.input_size:
            raise ValueError("dist_W2 size must match kernel_W1_given_W2 input size")
        if self.kernel_W1_given_W2.output_size != self.kernel_X_given_W1.input_size:
            raise ValueError("W1 alphabet mismatch between kernels")

    @property
    def card_V(self) -> int:
        return self.kernel_V.output_size

    @property
    def card_W1(self) -> int:
        return self.kernel_W1_given_W2.output_size

    @property
    def card_W2(self) -> int:
        return self.dist_W2.size

    def w1_law(self) -> Distribution:
        return Distribution(self.dist_W2.probs @ self.kernel_W1_given_W2.rows)

    def x_law(self) -> Distribution:
        """Induced input law of the superposition-coded channel."""
        return Distribution(self.w1_law().probs @ self.kernel_X_given_W1.rows)

    @classmethod
    def simple(cls, y_size: int, x_size: int, input_law=None) -> "AuxScheme":
        """V = Y, W1 = X with law ``input_law`` (uniform by default), W2 constant."""
        q = Distribution.uniform(x_size) if input_law is None else Distribution(np.asarray(input_law))
        return cls(Kernel.identity(y_size), Distribution([1.0]), Kernel(q.probs[None, :]),
                   Kernel.identity(x_size))

    def as_dict(self) -> dict:
        return {
            "kernel_V": self.kernel_V.rows.tolist(),
            "dist_W2": self.dist_W2.probs.tolist(),
            "kernel_W1_given_W2": self.kernel_W1_given_W2.rows.tolist(),
            "kernel_X_given_W1": self.kernel_X_given_W1.rows.tolist(),
        }


@dataclass(frozen=True)
class RateTerms:
    """Per-use rate terms of one direction of the two-round scheme.

    ``r_s1`` is the covering-side rate, ``r_s2`` the superposition-side rate
    (before clamping), and the constraint reads
    ``n_init * constraint_lhs < n_resp * constraint_rhs``.
    """

    r_s1: float
    r_s2: float
    constraint_lhs: float
    constraint_rhs: float
    parts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BoundResult:
    value: float
    argmax: dict
    ratio: Optional[tuple] = None
    method: dict = field(default_factory=dict)
    feasible: bool = True
    detail: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "feasible": self.feasible,
            "ratio": list(self.ratio) if self.ratio is not None else None,
            "argmax": self.argmax,
            "method": self.method,
            "detail": self.detail,
        }


# exact joints -----------------------------------------------------------------


def covering_joint(ch: Dmbc, input_law, kernel_V) -> JointDistribution:
    """Joint of (X, Y, Z, V) with V drawn from Y through ``kernel_V``."""
    p = np.asarray(Distribution(np.asarray(input_law)).probs)
    q = np.asarray(Kernel(np.asarray(kernel_V)).rows)
    if p.size != ch.x_size or q.shape[0] != ch.sizes[1]:
        raise ValueError("scheme cardinalities incompatible with channel alphabets")
    t = p[:, None, None, None] * ch.tensor[:, :, :, None] * q[None, :, None, :]
    return JointDistribution(t, ("x", "y", "z", "v"))


def superposition_joint(ch: Dmbc, scheme: AuxScheme) -> JointDistribution:
    """Joint of (W2, W1, X, Y, Z) along W2 -> W1 -> X -> (Y, Z)."""
    if scheme.kernel_X_given_W1.output_size != ch.x_size:
        raise ValueError("scheme cardinalities incompatible with channel alphabets")
    r = scheme.dist_W2.probs
    k = scheme.kernel_W1_given_W2.rows
    kx = scheme.kernel_X_given_W1.rows
    t = np.einsum("a,ab,bx,xyz->abxyz", r, k, kx, ch.tensor)
    return JointDistribution(t, ("w2", "w1", "x", "y", "z"))


def _sides(two: TwoDmbc, direction: str):
    if direction == "A":
        return two.forward, two.backward
    if direction == "B":
        return two.backward, two.forward
    raise ValueError("direction must be 'A' or 'B'")


def rate_terms(two: TwoDmbc, scheme: AuxScheme, input_f, *, direction: str = "A",
               literal_eve_term: bool = False) -> RateTerms:
    """Exact rate terms on the induced joint tensors.

    Direction ``"A"``: V covers the forward output, (W1, W2) code the
    backward channel, ``input_f`` is the forward input law. Direction
    ``"B"`` swaps the channels (``input_f`` is then the backward input law).
    With ``literal_eve_term`` the covering-side leakage in direction B is
    measured against the other channel's eavesdropper output, which is
    independent of V, so that term is exactly zero.
    """
    cover_ch, sup_ch = _sides(two, direction)
    fj = covering_joint(cover_ch, input_f, scheme.kernel_V)
    bj = superposition_joint(sup_ch, scheme)
    if not is_markov_chain(fj, "v", "y", ("x", "z")):
        raise ValueError("covering joint violates V <-> Y <-> (X, Z)")
    if not (is_markov_chain(bj, "w2", "w1", ("x", "y", "z"))
            and is_markov_chain(bj, ("w2", "w1"), "x", ("y", "z"))):
        raise ValueError("superposition joint violates W2 <-> W1 <-> X <-> (Y, Z)")
    i_vx = mutual_information(fj, "v", "x")
    i_vy = mutual_information(fj, "v", "y")
    i_vz = 0.0 if (literal_eve_term and direction == "B") else mutual_information(fj, "v", "z")
    i_vy_x = conditional_mutual_information(fj, "v", "y", "x")
    i_w1y_w2 = conditional_mutual_information(bj, "w1", "y", "w2")
    i_w1z_w2 = conditional_mutual_information(bj, "w1", "z", "w2")
    i_w1y = mutual_information(bj, "w1", "y")
    parts = {
        "I(V;X)": i_vx, "I(V;Y)": i_vy, "I(V;Z)": i_vz, "I(V;Y|X)": i_vy_x,
        "I(W1;Y)": i_w1y, "I(W2;Y)": mutual_information(bj, "w2", "y"),
        "I(W1;Z)": mutual_information(bj, "w1", "z"), "I(W2;Z)": mutual_information(bj, "w2", "z"),
        "I(W1;Y|W2)": i_w1y_w2, "I(W1;Z|W2)": i_w1z_w2,
    }
    return RateTerms(r_s1=i_vx - i_vz, r_s2=i_w1y_w2 - i_w1z_w2,
                     constraint_lhs=i_vy_x, constraint_rhs=i_w1y, parts=parts)


# single-channel optimizations -------------------------------------------------


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _maximize_input(ch: Dmbc, terms, grid: float, restarts: int, seed) -> tuple:
    """Maximize ``sum(c * I(X; O_c))`` over the input simplex.

    ``terms`` is a list of (coefficient, kernel matrix) pairs.
    """
    def fun(p):
        return sum(c * sx.input_mi(p, m) for c, m in terms)

    if ch.x_size == 1:
        return float(fun(np.ones((1, 1)))[0]), np.ones(1)
    if ch.x_size == 2:
        v, q = sx.binary_maximize(lambda qs: fun(np.stack([1 - qs, qs], axis=-1)), grid)
        return v, np.array([1 - q, q])

    def grad(p):
        return sum(c * sx.input_mi_grad(p, m) for c, m in terms)

    starts = sx.simplex_starts(ch.x_size, restarts, _rng(seed))
    x, f = sx.simplex_maximize(fun, grad, starts)
    i = int(np.argmax(f))
    return float(f[i]), x[i]


def _kernels(ch: Dmbc):
    nx, ny, nz = ch.sizes
    return ch.tensor.sum(axis=2), ch.tensor.sum(axis=1), ch.tensor.reshape(nx, ny * nz)


def secrecy_capacity_simple(ch: Dmbc, grid: float = 0.001, restarts: int = 20,
                            seed=0) -> BoundResult:
    """max over P_X of [I(X;Y) - I(X;Z)]_+."""
    ty, tz, _ = _kernels(ch)
    v, p = _maximize_input(ch, [(1.0, ty), (-1.0, tz)], grid, restarts, seed)
    return BoundResult(value=max(0.0, v), argmax={"input": p.tolist(), "raw_objective": v},
                       method={"grid": grid, "restarts": restarts,
                               "optimizer": "grid+scalar" if ch.x_size == 2 else "exp-gradient"})


def conditional_capacity(ch: Dmbc, grid: float = 0.001, restarts: int = 20, seed=0) -> tuple:
    """max over P_X of I(X;Y|Z), which is concave in P_X. Returns (value, input law)."""
    _, tz, tyz = _kernels(ch)
    v, p = _maximize_input(ch, [(1.0, tyz), (-1.0, tz)], grid, restarts, seed)
    return max(0.0, v), p


def conditional_mi(ch: Dmbc, input_law) -> float:
    """I(X;Y|Z) for one input law, on the explicit joint."""
    return conditional_mutual_information(ch.joint(input_law), "x", "y", "z")


# batched superposition / covering objectives ------------------------------------


def _mi_pmi(j):
    """Batched I(A;B) and pointwise MI (bits) of 2-d joints ``j`` of shape (B, a, b)."""
    pa = j.sum(axis=2, keepdims=True)
    pb = j.sum(axis=1, keepdims=True)
    denom = pa * pb
    pmi = np.zeros_like(j)
    m = (j > 0) & (denom > 0)
    pmi[m] = np.log2(j[m] / denom[m])
    return (j * pmi).sum(axis=(1, 2)), pmi


def _col(c, ndim):
    """Coefficient that may be scalar or per batch row, shaped for broadcasting."""
    c = np.asarray(c, dtype=float)
    return c.reshape((-1,) + (1,) * (ndim - 1)) if c.ndim else c


class _Covering:
    """Objective a_x I(V;X) + a_z I(V;Z) + a_y I(V;Y) over (P_X, P_{V|Y})."""

    def __init__(self, ch: Dmbc):
        self.t = ch.tensor
        self.ty = ch.tensor.sum(axis=2)

    def terms(self, p, q):
        pxy = p[:, :, None] * self.ty[None]
        jvx = np.einsum("bxy,byv->bvx", pxy, q)
        jvy = np.einsum("by,byv->bvy", pxy.sum(axis=1), q)
        d = np.einsum("bx,xyz->byz", p, self.t)
        jvz = np.einsum("byz,byv->bvz", d, q)
        return pxy, d, (jvx, jvz, jvy)

    def values(self, p, q):
        _, _, js = self.terms(p, q)
        return tuple(_mi_pmi(j)[0] for j in js)

    def fun(self, coef, p, q):
        return sum(c * v for c, v in zip(coef, self.values(p, q)))

    def grad(self, coef, p, q):
        pxy, d, js = self.terms(p, q)
        (_, g1), (_, g2), (_, g3) = (_mi_pmi(j) for j in js)
        g1, g2, g3 = (_col(coef[i], 3) * g for i, g in enumerate((g1, g2, g3)))
        dp = (np.einsum("bvx,xy,byv->bx", g1, self.ty, q)
              + np.einsum("bvz,xyz,byv->bx", g2, self.t, q)
              + np.einsum("bvy,xy,byv->bx", g3, self.ty, q))
        dq = (np.einsum("bvx,bxy->byv", g1, pxy)
              + np.einsum("bvz,byz->byv", g2, d)
              + np.einsum("bvy,by->byv", g3, pxy.sum(axis=1)))
        return dp, dq


class _Superposition:
    """Objective sum over O in {Y, Z} of c1_O I(W1;O) + c2_O I(W2;O)."""

    def __init__(self, ch: Dmbc):
        self.mats = (ch.tensor.sum(axis=2), ch.tensor.sum(axis=1))

    def _joints(self, r, k, kx):
        out = []
        for t in self.mats:
            m = kx @ t
            j = r[:, :, None, None] * k[:, :, :, None] * m[:, None, :, :]
            out.append((m, j))
        return out

    def values(self, r, k, kx):
        vals = []
        for _, j in self._joints(r, k, kx):
            vals.append(_mi_pmi(j.sum(axis=1))[0])
            vals.append(_mi_pmi(j.sum(axis=2))[0])
        # order: I(W1;Y), I(W2;Y), I(W1;Z), I(W2;Z)
        return tuple(vals)

    def fun(self, coef, r, k, kx):
        return sum(c * v for c, v in zip(coef, self.values(r, k, kx)))

    def grad(self, coef, r, k, kx):
        dr = np.zeros_like(r)
        dk = np.zeros_like(k)
        dkx = np.zeros_like(kx)
        for o, (t, (m, j)) in enumerate(zip(self.mats, self._joints(r, k, kx))):
            c1, c2 = coef[2 * o], coef[2 * o + 1]
            _, g1 = _mi_pmi(j.sum(axis=1))   # (B, w1, o)
            _, g2 = _mi_pmi(j.sum(axis=2))   # (B, w2, o)
            g = _col(c1, 4) * g1[:, None, :, :] + _col(c2, 4) * g2[:, :, None, :]
            dr += np.einsum("baco,bac,bco->ba", g, k, m)
            dk += np.einsum("baco,ba,bco->bac", g, r, m)
            dm = np.einsum("baco,ba,bac->bco", g, r, k)
            dkx += np.einsum("bco,xo->bcx", dm, t)
        return dr, dk, dkx


def _ascent(fun, grad, blocks, iters: int):
    """Joint exponentiated-gradient ascent over several row-stochastic blocks."""
    blocks = [np.array(b, dtype=float) for b in blocks]
    f = fun(*blocks)
    step = np.ones(f.shape[0])
    for _ in range(iters):
        gs = grad(*blocks)
        cand = []
        for b, g in zip(blocks, gs):
            s = step.reshape((-1,) + (1,) * (b.ndim - 2)) if b.ndim > 2 else step
            cand.append(sx.eg_step(b, g, s))
        fc = fun(*cand)
        ok = fc >= f
        for b, c in zip(blocks, cand):
            b[ok] = c[ok]
        f = np.where(ok, fc, f)
        step = np.where(ok, step * 1.2, step * 0.5)
        if np.all(step < 1e-9):
            break
    return blocks, f


def _padded_identity(n_in: int, n_out: int) -> np.ndarray:
    m = np.full((n_in, n_out), 1.0 / n_out)
    k = min(n_in, n_out)
    m[:k] = 0.0
    m[np.arange(k), np.arange(k)] = 1.0
    return m


def _smooth(a, eps=1e-3):
    a = np.asarray(a, dtype=float)
    return (1 - eps) * a + eps / a.shape[-1]


def _covering_candidates(ch: Dmbc, card_v: int, multipliers, restarts, iters, rng,
                         eve_weight: float, input_seeds):
    """Points (R1, cost, p, Q) from ascent on R1 - nu * I(V;Y|X) for each nu."""
    nx, ny, _ = ch.sizes
    obj = _Covering(ch)
    struct_p = [np.full(nx, 1.0 / nx)] + [np.asarray(p) for p in input_seeds]
    struct = []
    for p in struct_p:
        struct.append((p, _padded_identity(ny, card_v)))       # V = Y
        struct.append((p, np.tile(np.eye(card_v)[0], (ny, 1))))  # V constant
    m = len(multipliers)
    p0 = np.concatenate([sx.random_simplex(rng, (m * restarts,), nx),
                         np.tile([_smooth(p) for p, _ in struct], (m, 1))])
    q0 = np.concatenate([sx.random_simplex(rng, (m * restarts, ny), card_v),
                         np.tile([_smooth(q) for _, q in struct], (m, 1, 1))])
    nu = np.concatenate([np.repeat(multipliers, restarts), np.repeat(multipliers, len(struct))])
    coef = (1.0 + nu, -eve_weight * np.ones_like(nu), -nu)
    (p, q), _ = _ascent(lambda a, b: obj.fun(coef, a, b),
                        lambda a, b: obj.grad(coef, a, b), [p0, q0], iters)
    ps = [p, np.array([p for p, _ in struct])]
    qs = [q, np.array([q for _, q in struct])]
    p, q = np.concatenate(ps), np.concatenate(qs)
    i_vx, i_vz, i_vy = obj.values(p, q)
    return i_vx - eve_weight * i_vz, np.maximum(i_vy - i_vx, 0.0), p, q


def _superposition_candidates(ch: Dmbc, card_w1: int, card_w2: int, multipliers,
                              restarts, iters, rng, input_seeds):
    """Points (R2, I(W1;Y), r, K, Kx) from ascent on R2 + mu * I(W1;Y) for each mu."""
    nx = ch.x_size
    obj = _Superposition(ch)
    kx_id = _padded_identity(card_w1, nx)
    struct = []
    for q in [np.full(nx, 1.0 / nx)] + [np.asarray(p) for p in input_seeds]:
        q1 = np.zeros(card_w1)
        q1[:min(nx, card_w1)] = q[:card_w1]
        q1 /= q1.sum()
        # W2 constant, W1 = X
        r = np.eye(card_w2)[0]
        struct.append((r, np.tile(q1, (card_w2, 1)), kx_id))
        # W2 = W1 = X: zero superposition rate, full decoding rate
        if card_w2 >= min(nx, card_w1):
            r2 = np.zeros(card_w2)
            r2[:min(nx, card_w1)] = q1[:min(nx, card_w1)]
            struct.append((r2 / r2.sum(), _padded_identity(card_w2, card_w1), kx_id))
    m, ns = len(multipliers), len(struct)
    r0 = np.concatenate([sx.random_simplex(rng, (m * restarts,), card_w2),
                         np.tile([_smooth(t[0]) for t in struct], (m, 1))])
    k0 = np.concatenate([sx.random_simplex(rng, (m * restarts, card_w2), card_w1),
                         np.tile([_smooth(t[1]) for t in struct], (m, 1, 1))])
    kx0 = np.concatenate([sx.random_simplex(rng, (m * restarts, card_w1), nx),
                          np.tile([_smooth(t[2]) for t in struct], (m, 1, 1))])
    mu = np.concatenate([np.repeat(multipliers, restarts), np.repeat(multipliers, ns)])
    one = np.ones_like(mu)
    coef = (1.0 + mu, -one, -one, one)
    (r, k, kx), _ = _ascent(lambda a, b, c: obj.fun(coef, a, b, c),
                            lambda a, b, c: obj.grad(coef, a, b, c), [r0, k0, kx0], iters)
    rs = [r, np.array([t[0] for t in struct])]
    ks = [k, np.array([t[1] for t in struct])]
    kxs = [kx, np.array([t[2] for t in struct])]
    r, k, kx = np.concatenate(rs), np.concatenate(ks), np.concatenate(kxs)
    i1y, i2y, i1z, i2z = obj.values(r, k, kx)
    return (i1y - i2y) - (i1z - i2z), i1y, r, k, kx


# ratio grid -------------------------------------------------------------------


def default_ratio_grid() -> list:
    """Reduced ratios i:j for 1 <= i, j <= 9, the extremes 1:99 and 99:1, and
    the limit points 0:1 and 1:0 (one channel's share vanishing)."""
    pts = {(i // gcd(i, j), j // gcd(i, j)) for i in range(1, 10) for j in range(1, 10)}
    pts |= {(1, 99), (99, 1), (0, 1), (1, 0)}
    return sorted(pts, key=lambda r: Fraction(r[0], r[0] + r[1]))


def parse_ratio_grid(text: str) -> list:
    """Parse ``"1:9,1:1,9:1"`` into a list of (n_f, n_b) pairs."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = (int(v) for v in item.split(":"))
        except ValueError as exc:
            raise ValueError(f"bad ratio {item!r}; expected 'nf:nb'") from exc
        if a < 0 or b < 0 or a + b == 0:
            raise ValueError(f"bad ratio {item!r}")
        out.append((a, b))
    if not out:
        raise ValueError("empty ratio grid")
    return out


def _best_pair(r1, c1, r2, c2, ratios):
    """Best feasible (cover point, superposition point, ratio) for
    ``(n_i r1 + n_r [r2]_+) / (n_i + n_r)`` subject to ``n_i c1 <= n_r c2 - slack``.

    ``ratios`` are (n_init, n_resp) pairs.
    """
    r2p = np.maximum(r2, 0.0)
    best = (-np.inf, None, None, None)
    for ni, nr in ratios:
        tot = ni + nr
        val = (ni * r1[:, None] + nr * r2p[None, :]) / tot
        ok = (ni * c1[:, None]) <= (nr * c2[None, :]) - CONSTRAINT_SLACK
        if not ok.any():
            continue
        val = np.where(ok, val, -np.inf)
        i, j = np.unravel_index(int(np.argmax(val)), val.shape)
        if val[i, j] > best[0]:
            best = (float(val[i, j]), int(i), int(j), (ni, nr))
    return best


def default_caps(two: TwoDmbc) -> dict:
    """|V| <= |Y|+1, |W1| <= |X|+1, |W2| <= |X| on the respective channels."""
    return {
        "A": (two.forward.sizes[1] + 1, two.backward.x_size + 1, two.backward.x_size),
        "B": (two.backward.sizes[1] + 1, two.forward.x_size + 1, two.forward.x_size),
    }


MULTIPLIERS = (0.0, 0.25, 1.0, 4.0, 16.0)


def direction_bound(two: TwoDmbc, direction: str, caps=None, grid: float = 0.01,
                    restarts: int = 20, ratio_grid=None, seed=0, iters: int = 250,
                    literal_eve_term: bool = False, multipliers=MULTIPLIERS) -> BoundResult:
    """One direction of the two-round lower bound (``"A"``: Alice initiates)."""
    cover_ch, sup_ch = _sides(two, direction)
    card_v, card_w1, card_w2 = caps if caps is not None else default_caps(two)[direction]
    if min(card_v, card_w1, card_w2) < 1:
        raise ValueError("cardinality caps must be >= 1")
    ratios = list(ratio_grid) if ratio_grid is not None else default_ratio_grid()
    if direction == "B":
        ratios_dir = [(nb, nf) for nf, nb in ratios]
    else:
        ratios_dir = ratios
    rng = np.random.default_rng(seed)
    eve_w = 0.0 if (literal_eve_term and direction == "B") else 1.0

    cover_seeds = [secrecy_capacity_simple(cover_ch, grid=grid).argmax["input"]]
    sup_seeds = [secrecy_capacity_simple(sup_ch, grid=grid).argmax["input"],
                 _maximize_input(sup_ch, [(1.0, _kernels(sup_ch)[0])], grid, restarts, seed)[1]]
    r1, c1, p, q = _covering_candidates(cover_ch, card_v, multipliers, restarts, iters, rng,
                                        eve_w, cover_seeds)
    r2, c2, r, k, kx = _superposition_candidates(sup_ch, card_w1, card_w2, multipliers + (1e3,),
                                                 restarts, iters, rng, sup_seeds)
    val, i, j, rat = _best_pair(r1, c1, r2, c2, ratios_dir)
    method = {"grid": grid, "restarts": restarts, "iters": iters, "multipliers": list(multipliers),
              "caps": {"V": card_v, "W1": card_w1, "W2": card_w2}, "ratios": len(ratios),
              "literal_eve_term": literal_eve_term}
    if i is None:
        return BoundResult(0.0, {"direction": direction}, None, method, feasible=False)
    scheme = AuxScheme(Kernel(q[i]), Distribution(r[j] / r[j].sum()), Kernel(k[j]), Kernel(kx[j]))
    input_c = Distribution(p[i] / p[i].sum())
    terms = rate_terms(two, scheme, input_c, direction=direction, literal_eve_term=literal_eve_term)
    ni, nr = rat
    # exact re-evaluation on explicit tensors
    exact = (ni * terms.r_s1 + nr * max(terms.r_s2, 0.0)) / (ni + nr)
    feasible = ni * terms.constraint_lhs <= nr * terms.constraint_rhs - CONSTRAINT_SLACK
    ratio = (ni, nr) if direction == "A" else (nr, ni)
    argmax = {"direction": direction, "input_cover": input_c.probs.tolist(),
              "input_superposition": scheme.x_law().probs.tolist(), "scheme": scheme.as_dict(),
              "rate_terms": {"r_s1": terms.r_s1, "r_s2": terms.r_s2,
                             "constraint_lhs": terms.constraint_lhs,
                             "constraint_rhs": terms.constraint_rhs}}
    if not feasible:
        return BoundResult(0.0, argmax, ratio, method, feasible=False)
    return BoundResult(max(0.0, exact), argmax, ratio, method,
                       detail={"search_value": val})


def lower_bound(two: TwoDmbc, caps=None, grid: float = 0.01, restarts: int = 20,
                ratio_grid=None, seed=0, iters: int = 250,
                literal_eve_term: bool = False) -> BoundResult:
    """max{L_A, L_B} over capped auxiliaries, input laws and the ratio grid.

    ``caps`` is ``None`` (defaults) or a dict ``{"A": (V, W1, W2), "B": ...}``
    or a single triple used for both directions.
    """
    if caps is None:
        caps = default_caps(two)
    elif not isinstance(caps, dict):
        caps = {"A": tuple(caps), "B": tuple(caps)}
    res = {d: direction_bound(two, d, caps[d], grid, restarts, ratio_grid, seed, iters,
                              literal_eve_term) for d in ("A", "B")}
    best = max(res.values(), key=lambda r: (r.feasible, r.value))
    detail = {f"L_{d}": {"value": r.value, "feasible": r.feasible,
                         "ratio": list(r.ratio) if r.ratio else None}
              for d, r in res.items()}
    feasible = any(r.feasible for r in res.values())
    return BoundResult(best.value if feasible else 0.0, best.argmax, best.ratio,
                       best.method, feasible, detail)


def upper_bound(two: TwoDmbc, grid: float = 0.01, restarts: int = 20, seed=0) -> BoundResult:
    """max{ max_P I(Xf;Yf|Zf), max_P I(Xb;Yb|Zb) }."""
    vf, pf = conditional_capacity(two.forward, grid, restarts, seed)
    vb, pb = conditional_capacity(two.backward, grid, restarts, seed)
    return BoundResult(max(vf, vb),
                       {"forward": {"value": vf, "input": pf.tolist()},
                        "backward": {"value": vb, "input": pb.tolist()},
                        "channel": "forward" if vf >= vb else "backward"},
                       method={"grid": grid, "restarts": restarts})


class DegradednessError(ValueError):
    def __init__(self, which: str, report: Optional[DegradednessReport]):
        self.which, self.report = which, report
        if report is None:
            msg = f"{which} channel: no degraded split found"
        else:
            worst = max(report.residuals.items(), key=lambda kv: kv[1])
            msg = (f"{which} channel is not degraded under split {report.split}: "
                   f"residual {worst[0]} = {worst[1]:.3e} > tol {report.tol:g}")
        super().__init__(msg)


def degraded_capacity(two: TwoDmbc, splits=(None, None), grid: float = 0.01,
                      restarts: int = 20, seed=0, tol: float = INFO_TOL) -> BoundResult:
    """Capacity of a degraded pair: the larger obverse-part conditional capacity.

    ``splits`` gives a :class:`Split` (or its string form) per channel;
    ``None`` triggers the exhaustive search for small alphabets.
    """
    out = {}
    for name, ch, split in zip(("forward", "backward"), (two.forward, two.backward), splits):
        if split is None:
            rep = find_degraded_split(ch, tol=tol)
            if rep is None:
                raise DegradednessError(name, None)
        else:
            split = Split.parse(split) if isinstance(split, str) else split
            rep = analyze_degraded(ch, split, tol=tol)
            if not rep.degraded:
                raise DegradednessError(name, rep)
        sub = subchannel(ch, rep.split, "o")
        v, p = conditional_capacity(sub, grid, restarts, seed)
        out[name] = {"value": v, "input_obverse": p.tolist(), "split": str(rep.split),
                     "residuals": rep.residuals}
    value = max(out["forward"]["value"], out["backward"]["value"])
    return BoundResult(value, out, method={"grid": grid, "restarts": restarts, "tol": tol})


def secrecy_capacity_aux(ch: Dmbc, card_W: int, grid: float = 0.01, restarts: int = 50,
                         seed=0, iters: int = 300) -> BoundResult:
    """max over P_W, P_{X|W} of [I(W;Y) - I(W;Z)]_+ with W <-> X <-> (Y, Z)."""
    if card_W < 1:
        raise ValueError("card_W must be >= 1")
    simple = secrecy_capacity_simple(ch, grid=grid)
    if card_W == 1:
        return BoundResult(0.0, {"dist_W": [1.0], "kernel_X_given_W": [[1 / ch.x_size] * ch.x_size]},
                           method={"restarts": restarts})
    rng = np.random.default_rng(seed)
    obj = _Superposition(ch)
    coef = (1.0, 0.0, -1.0, 0.0)
    nx = ch.x_size
    one = np.ones((restarts + 1, 1))
    k0 = sx.random_simplex(rng, (restarts, 1), card_W)
    kx0 = sx.random_simplex(rng, (restarts, card_W), nx)
    q = np.zeros(card_W)
    m = min(nx, card_W)
    q[:m] = np.asarray(simple.argmax["input"])[:m]
    q = q / q.sum() if q.sum() > 0 else np.full(card_W, 1.0 / card_W)
    k0 = np.concatenate([k0, [[_smooth(q)]]])
    kx0 = np.concatenate([kx0, [_smooth(_padded_identity(card_W, nx))]])
    (_, k, kx), f = _ascent(lambda a, b, c: obj.fun(coef, a, b, c),
                            lambda a, b, c: obj.grad(coef, a, b, c), [one, k0, kx0], iters)
    i = int(np.argmax(f))
    best, law, kern = float(f[i]), k[i, 0], kx[i]
    # W = X (padded) is always feasible when card_W >= |X|
    if card_W >= nx and simple.argmax["raw_objective"] > best:
        best, law, kern = simple.argmax["raw_objective"], q, _padded_identity(card_W, nx)
    return BoundResult(max(0.0, best), {"dist_W": law.tolist(), "kernel_X_given_W": kern.tolist()},
                       method={"grid": grid, "restarts": restarts, "iters": iters})
