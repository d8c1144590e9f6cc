"""Eavesdropper decoders.

Both use bipartite joint typicality of the concatenated codeword pair
``v || w1`` with Eve's observation ``z_f || z_b`` under the laws
``P(V, Z_f)`` and ``P(W1, Z_b)``. The log-probabilities are additive across
the two sub-blocks, so every check splits into a forward term indexed by
``f`` plus a backward term indexed by ``(t(f), b)``.
"""

from __future__ import annotations

import numpy as np

from ..infotheory import entropy_of
from ..typicality import TypicalityParams, _bip_target, _within, log2_table
from .codebooks import CodebookSet
from .params import CodingParameters
from .run import NULL, ProtocolJoints


def _lp(table, *idx):
    if idx[0].shape[-1] == 0:
        return np.zeros(idx[0].shape[:-1])
    return log2_table(table)[idx].sum(axis=-1)


class _Scorer:
    """Per-sub-block log-probabilities of the three bipartite typicality checks."""

    def __init__(self, params: CodingParameters, joints: ProtocolJoints):
        self.tp = TypicalityParams(params.epsilon, params.n_f, params.n_b)
        self.jf, self.jb = joints.v_z, joints.w1_z
        jf, jb, tp = self.jf, self.jb, self.tp
        self.h = [_bip_target(tp, entropy_of(jf.sum(1)), entropy_of(jb.sum(1))),
                  _bip_target(tp, entropy_of(jf.sum(0)), entropy_of(jb.sum(0))),
                  _bip_target(tp, entropy_of(jf), entropy_of(jb))]

    def forward(self, v, z_f):
        jf = self.jf
        return (_lp(jf.sum(1), v), _lp(jf.sum(0), z_f), _lp(jf, v, np.broadcast_to(z_f, v.shape)))

    def backward(self, w1, z_b):
        jb = self.jb
        return (_lp(jb.sum(1), w1), _lp(jb.sum(0), z_b), _lp(jb, w1, np.broadcast_to(z_b, w1.shape)))

    def accept(self, fwd, bwd):
        ok = True
        for a, b, h in zip(fwd, bwd, self.h):
            ok = ok & _within(np.add(a, b), self.tp.N, h, self.tp.epsilon)
        return ok


def eve_candidates(books: CodebookSet, params: CodingParameters, s: int, t2: int, b2: int):
    """Index pairs (f, b) with g(f, b) = s and cloud indices (t2, b2)."""
    return books.key_preimages(s, t2, b2)


def eve_reconstruct(books: CodebookSet, params: CodingParameters, s: int, t2: int, b2: int,
                    z_f, z_b, joints: ProtocolJoints):
    """Genie-aided decoder: given the key and the cloud indices, recover (F, B).

    Returns ``(f, b)`` for the unique bipartite-jointly-typical candidate, the
    only candidate if the set is a singleton, and ``None`` otherwise.
    """
    if not (0 <= s < (1 << params.kappa)):
        raise ValueError("key value out of range")
    if not (0 <= t2 < (1 << params.eta_t2) and 0 <= b2 < (1 << params.eta_b2)):
        raise ValueError("cloud index out of range")
    f, b = eve_candidates(books, params, s, t2, b2)
    if f.size == 1:
        return int(f[0]), int(b[0])
    if f.size == 0:
        return None
    sc = _Scorer(params, joints)
    z_f, z_b = np.asarray(z_f, dtype=np.int64), np.asarray(z_b, dtype=np.int64)
    v = books.v_pool[f].astype(np.int64)
    w1 = books.c1_flat[books.codeword_index(books.t_of_f(f), b)].astype(np.int64)
    ok = sc.accept(sc.forward(v, z_f), sc.backward(w1, z_b))
    hits = np.flatnonzero(ok)
    if hits.size != 1:
        return None
    return int(f[hits[0]]), int(b[hits[0]])


def eve_attack(books: CodebookSet, params: CodingParameters, z_f, z_b,
               joints: ProtocolJoints) -> int:
    """Blind key guess: the common key of every typical (f, b), or NULL.

    Without side information Eve scans all ``2**eta`` index pairs; she commits
    to a key only when all typical candidates map to the same key value.
    """
    sc = _Scorer(params, joints)
    z_f, z_b = np.asarray(z_f, dtype=np.int64), np.asarray(z_b, dtype=np.int64)
    fwd = sc.forward(books.v_pool.astype(np.int64), z_f)                 # (2^eta_f,)
    t_all = np.arange(1 << params.eta_t)[:, None]
    b_all = np.arange(1 << params.eta_b)[None, :]
    cw = books.c1_flat[books.codeword_index(t_all, b_all)].astype(np.int64)
    bwd = sc.backward(cw, z_b)                                          # (2^eta_t, 2^eta_b)
    tf = books.t_of_f(np.arange(books.v_pool.shape[0]))
    ok = sc.accept([np.reshape(a, (-1, 1)) if np.ndim(a) else a for a in fwd],
                   [np.asarray(c)[tf] if np.ndim(c) else c for c in bwd])
    ok = np.broadcast_to(ok, (books.v_pool.shape[0], 1 << params.eta_b))
    f_hit, b_hit = np.nonzero(ok)
    if f_hit.size == 0:
        return NULL
    keys = np.unique(books.key(f_hit, b_hit))
    return int(keys[0]) if keys.size == 1 else NULL
