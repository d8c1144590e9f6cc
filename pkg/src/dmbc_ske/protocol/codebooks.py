"""Random codebooks and index maps of the two-level construction.

Index layout (all 0-based, bit-packed):

* ``f`` indexes the V pool; ``t = f >> (eta_f - eta_t)`` picks the block,
  so every block holds exactly ``2**(eta_f - eta_t)`` sequences.
* ``t = (t2 << eta_t1) | t1`` and ``b = (b2 << eta_b1) | b1``.
* The superposition codeword for (t, b) is ``c1[outer, inner1]`` with
  ``outer = (t2 << eta_b2) | b2`` and ``inner1 = (t1 << eta_b1) | b1``.
* The key packs the cloud bits lowest: ``code = (inner << eta_2) | outer``
  with ``inner = (((t1 << (eta_f - eta_t)) | rest) << eta_b1) | b1`` and
  ``S = code >> gamma``. Each key value therefore has exactly ``2**gamma``
  preimages, and fixing (S, t2, b2) leaves ``2**(gamma - eta_2)`` of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bounds import AuxScheme
from ..typicality import typical_mask
from .params import CodingParameters

MAX_DRAW_ROUNDS = 200
MEMORY_BUDGET = 1 << 26  # symbols held in one codebook set


class CodebookError(RuntimeError):
    pass


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _first_unique(rows: np.ndarray) -> np.ndarray:
    """Indices of first occurrences of each distinct row, in original order."""
    if rows.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    # compare whole rows as opaque byte strings; much faster than unique(axis=0)
    r = np.ascontiguousarray(rows, dtype=np.int8)
    keys = r.view(np.dtype((np.void, r.shape[1]))).ravel() if r.shape[1] else np.zeros(len(r))
    _, idx = np.unique(keys, return_index=True)
    return np.sort(idx)


def _draw_iid(rng, p, shape):
    cdf = np.cumsum(p)
    u = rng.random(shape)
    out = np.zeros(shape, dtype=np.int8)
    for c in cdf[:-1]:  # alphabets are small, so k-1 comparisons beat searchsorted
        out += u >= c
    return out


def _draw_conditional(rng, kernel, given):
    """Draw one symbol per entry of ``given`` from ``kernel[given]``."""
    cdf = np.cumsum(kernel, axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(given.shape)
    return (u[..., None] >= cdf[given]).sum(axis=-1).astype(np.int8)


def draw_typical_pool(rng, p_v, n: int, count: int, epsilon: float) -> np.ndarray:
    """``count`` distinct epsilon-typical n-sequences drawn i.i.d. from ``p_v`` with rejection."""
    p_v = np.asarray(p_v, dtype=float)
    kept = np.zeros((0, n), dtype=np.int8)
    batch = max(1024, 2 * count)
    for _ in range(MAX_DRAW_ROUNDS):
        cand = _draw_iid(rng, p_v, (batch, n))
        cand = cand[typical_mask(cand, p_v, epsilon)]
        kept = np.concatenate([kept, cand])
        kept = kept[_first_unique(kept)]
        if kept.shape[0] >= count:
            return np.ascontiguousarray(kept[:count])
    raise CodebookError(f"found only {kept.shape[0]} of {count} distinct typical sequences")


@dataclass(frozen=True, eq=False)
class CodebookSet:
    params: CodingParameters
    scheme: AuxScheme
    v_pool: np.ndarray   # (2**eta_f, n_f)
    c2: np.ndarray       # (2**eta_2, n_b)
    c1: np.ndarray       # (2**eta_2, 2**eta_1, n_b)
    seed: object = None

    # index maps ---------------------------------------------------------

    @property
    def block_bits(self) -> int:
        return self.params.eta_f - self.params.eta_t

    def t_of_f(self, f):
        return np.asarray(f) >> self.block_bits

    def split_t(self, t):
        t = np.asarray(t)
        return t >> self.params.eta_t1, t & ((1 << self.params.eta_t1) - 1)

    def split_b(self, b):
        b = np.asarray(b)
        return b >> self.params.eta_b1, b & ((1 << self.params.eta_b1) - 1)

    def codeword_index(self, t, b):
        """Flat index into ``c1_flat`` of Enc(t, b)."""
        p = self.params
        t2, t1 = self.split_t(t)
        b2, b1 = self.split_b(b)
        outer = (t2 << p.eta_b2) | b2
        inner1 = (t1 << p.eta_b1) | b1
        return (outer << p.eta_1) | inner1

    def tb_of_codeword(self, idx):
        p = self.params
        idx = np.asarray(idx)
        outer, inner1 = idx >> p.eta_1, idx & ((1 << p.eta_1) - 1)
        t2, b2 = outer >> p.eta_b2, outer & ((1 << p.eta_b2) - 1)
        t1, b1 = inner1 >> p.eta_b1, inner1 & ((1 << p.eta_b1) - 1)
        return (t2 << p.eta_t1) | t1, (b2 << p.eta_b1) | b1

    @property
    def c1_flat(self) -> np.ndarray:
        return self.c1.reshape(-1, self.c1.shape[-1])

    def enc(self, t: int, b: int) -> np.ndarray:
        return self.c1_flat[int(self.codeword_index(t, b))]

    def key(self, f, b):
        """g(f, b), vectorized."""
        p = self.params
        f, b = np.asarray(f, dtype=np.int64), np.asarray(b, dtype=np.int64)
        t = f >> self.block_bits
        rest = f & ((1 << self.block_bits) - 1)
        t2, t1 = self.split_t(t)
        b2, b1 = self.split_b(b)
        inner = (((t1 << self.block_bits) | rest) << p.eta_b1) | b1
        outer = (t2 << p.eta_b2) | b2
        return ((inner << p.eta_2) | outer) >> p.gamma

    def key_preimages(self, s: int, t2=None, b2=None):
        """All (f, b) with g(f, b) = s, optionally restricted to cloud indices (t2, b2)."""
        p = self.params
        codes = (np.int64(s) << p.gamma) + np.arange(1 << p.gamma, dtype=np.int64)
        outer = codes & ((1 << p.eta_2) - 1)
        inner = codes >> p.eta_2
        c_t2, c_b2 = outer >> p.eta_b2, outer & ((1 << p.eta_b2) - 1)
        keep = np.ones(codes.size, dtype=bool)
        if t2 is not None:
            keep &= c_t2 == t2
        if b2 is not None:
            keep &= c_b2 == b2
        inner, c_t2, c_b2 = inner[keep], c_t2[keep], c_b2[keep]
        b1 = inner & ((1 << p.eta_b1) - 1)
        fi = inner >> p.eta_b1
        rest = fi & ((1 << self.block_bits) - 1)
        t1 = fi >> self.block_bits
        t = (c_t2 << p.eta_t1) | t1
        f = (t << self.block_bits) | rest
        b = (c_b2 << p.eta_b1) | b1
        return f, b


def build_codebooks(params: CodingParameters, scheme: AuxScheme, rng_seed) -> CodebookSet:
    """Draw the V pool, the cloud codebook and the satellite codebooks.

    The V pool holds ``2**eta_f`` distinct typical sequences; satellite
    codewords are redrawn until all ``2**(eta_t + eta_b)`` are distinct so
    that (t, b) is recoverable from the codeword.
    """
    p = params
    size = (1 << p.eta_f) * p.n_f + (1 << (p.eta_1 + p.eta_2)) * p.n_b
    if size > MEMORY_BUDGET:
        raise CodebookError(f"codebooks need {size} symbols, budget is {MEMORY_BUDGET}")
    rng = _rng(rng_seed)
    p_v = np.asarray(p.info["P_V"])
    pool = draw_typical_pool(rng, p_v, p.n_f, 1 << p.eta_f, p.epsilon)
    c2 = _draw_iid(rng, scheme.dist_W2.probs, (1 << p.eta_2, p.n_b))
    given = np.broadcast_to(c2[:, None, :], (1 << p.eta_2, 1 << p.eta_1, p.n_b))
    k = scheme.kernel_W1_given_W2.rows
    c1 = _draw_conditional(rng, k, given.astype(np.int64))
    flat = c1.reshape(-1, p.n_b)
    for _ in range(MAX_DRAW_ROUNDS):
        first = _first_unique(flat)
        if first.size == flat.shape[0]:
            break
        dup = np.setdiff1d(np.arange(flat.shape[0]), first)
        g = np.broadcast_to(c2[:, None, :], c1.shape).reshape(-1, p.n_b)[dup]
        flat[dup] = _draw_conditional(rng, k, g.astype(np.int64))
    else:
        raise CodebookError("could not draw distinct satellite codewords")
    v_pool, c2, c1 = pool, np.ascontiguousarray(c2), flat.reshape(c1.shape)
    for a in (v_pool, c2, c1):
        a.setflags(write=False)
    return CodebookSet(params, scheme, v_pool, c2, c1, rng_seed if not
                       isinstance(rng_seed, np.random.Generator) else None)
