"""One execution of the two-round key agreement scheme (Alice initiates)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..bounds import AuxScheme
from ..channel import TwoDmbc, transmit
from ..typicality import joint_typical_mask
from .codebooks import CodebookSet, _draw_conditional, _draw_iid
from .params import CodingParameters

NULL = -1


@dataclass(frozen=True)
class ProtocolJoints:
    """Single-letter joints used by the decoders, rows indexed by the codeword symbol."""

    v_y: np.ndarray    # P(V, Y_f)
    v_x: np.ndarray    # P(V, X_f)
    v_z: np.ndarray    # P(V, Z_f)
    w1_y: np.ndarray   # P(W1, Y_b)
    w1_z: np.ndarray   # P(W1, Z_b)


def protocol_joints(two: TwoDmbc, scheme: AuxScheme, input_f) -> ProtocolJoints:
    p_x = np.asarray(input_f, dtype=float)
    kv = scheme.kernel_V.rows
    t = p_x[:, None, None] * two.forward.tensor                  # (x, y, z)
    v_y = (t.sum(axis=2) * 1.0).sum(axis=0)[:, None] * kv        # (y, v)
    v_x = np.einsum("xy,yv->vx", t.sum(axis=2), kv)
    v_z = np.einsum("xyz,yv->vz", t, kv)
    w1 = scheme.w1_law().probs
    kb = scheme.kernel_X_given_W1.rows
    w1_y = w1[:, None] * (kb @ two.backward.tensor.sum(axis=2))
    w1_z = w1[:, None] * (kb @ two.backward.tensor.sum(axis=1))
    return ProtocolJoints(v_y.T.copy(), v_x, v_z, w1_y, w1_z)


@dataclass
class Transcript:
    x_f: np.ndarray
    y_f: np.ndarray
    z_f: np.ndarray
    v: np.ndarray | None
    F: int
    T: int
    B: int
    T1: int
    T2: int
    B1: int
    B2: int
    w1: np.ndarray
    x_b: np.ndarray
    y_b: np.ndarray
    z_b: np.ndarray
    T_hat: int
    B_hat: int
    V_hat: np.ndarray | None
    F_hat: int
    S: int
    S_hat: int
    null_flags: dict = field(default_factory=dict)

    @property
    def agreed(self) -> bool:
        return self.S != NULL and self.S == self.S_hat

    def check(self, books: CodebookSet) -> None:
        """Consistency of the variable chain when no phase returned NULL."""
        if any(self.null_flags.values()):
            assert not self.agreed or self.S == NULL
            return
        assert int(books.t_of_f(self.F)) == self.T
        assert int(books.key(self.F, self.B)) == self.S
        assert int(books.key(self.F_hat, self.B_hat)) == self.S_hat


def _unique(mask: np.ndarray) -> int:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size == 1 else NULL


def run_protocol(two: TwoDmbc, books: CodebookSet, params: CodingParameters, rng_seed,
                 joints: ProtocolJoints | None = None) -> Transcript:
    """Encode, transmit, decode and derive keys once.

    Bob takes the first pool sequence, in a random scan order, that is
    jointly typical with his forward output; on failure he still transmits
    with T = 0 but holds no key (S = NULL). Alice decodes the satellite
    codeword, then the cover sequence inside the decoded block; a missing or
    non-unique match at either stage yields S_hat = NULL.
    """
    p, scheme = params, books.scheme
    eps = p.epsilon
    if joints is None:
        joints = protocol_joints(two, scheme, p.info["P_X"])
    ss = rng_seed if isinstance(rng_seed, np.random.SeedSequence) else np.random.SeedSequence(rng_seed)
    r_x, r_f, r_scan, r_b, r_w, r_bw = (np.random.default_rng(s) for s in ss.spawn(6))

    # forward round
    x_f = _draw_iid(r_x, np.asarray(p.info["P_X"]), (p.n_f,)).astype(np.int64)
    y_f, z_f = transmit(two.forward, x_f, r_f)

    # Bob: cover search
    hits = joint_typical_mask(books.v_pool, y_f, joints.v_y, eps)
    order = r_scan.permutation(books.v_pool.shape[0])
    ranked = hits[order]
    bob_null = not ranked.any()
    if bob_null:
        F, v = NULL, None
        T = 0
    else:
        F = int(order[np.argmax(ranked)])
        v = books.v_pool[F]
        T = int(books.t_of_f(F))
    B = int(r_b.integers(0, 1 << p.eta_b))
    S = NULL if bob_null else int(books.key(F, B))
    T2, T1 = (int(a) for a in books.split_t(T))
    B2, B1 = (int(a) for a in books.split_b(B))

    # backward round
    w1 = books.enc(T, B)
    x_b = _draw_conditional(r_w, scheme.kernel_X_given_W1.rows, w1.astype(np.int64)).astype(np.int64)
    y_b, z_b = transmit(two.backward, x_b, r_bw)

    # Alice: satellite codeword, then cover sequence within the block
    idx = _unique(joint_typical_mask(books.c1_flat, y_b, joints.w1_y, eps))
    null_w1 = idx == NULL
    T_hat = B_hat = F_hat = NULL
    v_hat = None
    null_v = False
    if not null_w1:
        T_hat, B_hat = (int(a) for a in books.tb_of_codeword(idx))
        lo = T_hat << books.block_bits
        block = books.v_pool[lo:lo + (1 << books.block_bits)]
        j = _unique(joint_typical_mask(block, x_f, joints.v_x, eps))
        null_v = j == NULL
        if not null_v:
            F_hat = lo + j
            v_hat = books.v_pool[F_hat]
    S_hat = NULL if F_hat == NULL else int(books.key(F_hat, B_hat))
    return Transcript(x_f, y_f, z_f, v, F, T, B, T1, T2, B1, B2, np.asarray(w1), x_b, y_b, z_b,
                      T_hat, B_hat, v_hat, F_hat, S, S_hat,
                      {"bob_cover": bob_null, "alice_w1": null_w1, "alice_v": null_v})
