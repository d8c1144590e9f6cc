"""Exact key-secrecy quantities for micro instances by full enumeration of Eve's view.

For a fixed (public) codebook set, the joint law of the key ``S`` and
Eve's observation ``Z = (Z_f, Z_b)`` factorizes as

    P(f, b, z_f, z_b) = A[f, z_f] * 2**-eta_b * C[t(f), b, z_b]

where ``A`` folds the forward channel and Bob's uniform choice among the
typical cover sequences (``f = NULL`` when there is none), and ``C`` is the
probability of ``z_b`` given the transmitted satellite codeword.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass

import numpy as np

from ..channel import TwoDmbc
from ..typicality import joint_typical_mask
from .codebooks import CodebookSet
from .params import CodingParameters
from .run import ProtocolJoints, protocol_joints

MAX_VIEW = 1 << 20


def all_sequences(k: int, n: int) -> np.ndarray:
    """Every length-``n`` sequence over ``range(k)``, lexicographic, shape (k**n, n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(k), repeat=n)), dtype=np.int64)


def _h(p) -> float:
    """-sum p log2 p; the array need not sum to one."""
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class ExactSecrecy:
    H_S: float
    H_S_given_Z: float
    I_S_Z: float
    H_FB_given_STBZ: float
    slack: float            # 19 N epsilon
    violation: float        # I(S;Z) - H(F,B|S,T2,B2,Z) - slack, positive means the bound fails
    view_size: int
    p_bob_null: float

    @property
    def passed(self) -> bool:
        return self.violation <= 1e-9

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def eve_view_size(two: TwoDmbc, params: CodingParameters) -> int:
    return two.forward.tensor.shape[2] ** params.n_f * two.backward.tensor.shape[2] ** params.n_b


def forward_table(two: TwoDmbc, books: CodebookSet, params: CodingParameters,
                  joints: ProtocolJoints) -> np.ndarray:
    """A[f, z_f] for f in the pool plus a final NULL row."""
    nx, ny, nz = two.forward.tensor.shape
    q = np.einsum("x,xyz->yz", np.asarray(params.info["P_X"]), two.forward.tensor)
    ys, zs = all_sequences(ny, params.n_f), all_sequences(nz, params.n_f)
    n_pool = books.v_pool.shape[0]
    A = np.zeros((n_pool + 1, zs.shape[0]))
    for y in ys:
        pz = np.prod(q[y[None, :], zs], axis=1) if params.n_f else np.ones(1)
        hits = joint_typical_mask(books.v_pool, y, joints.v_y, params.epsilon)
        k = int(hits.sum())
        if k == 0:
            A[n_pool] += pz
        else:
            A[:n_pool][hits] += pz[None, :] / k
    return A


def backward_table(two: TwoDmbc, books: CodebookSet, params: CodingParameters) -> np.ndarray:
    """C[t, b, z_b] = P(z_b | Enc(t, b))."""
    m = books.scheme.kernel_X_given_W1.rows @ two.backward.tensor.sum(axis=1)   # w1 -> z
    zs = all_sequences(m.shape[1], params.n_b)
    t = np.arange(1 << params.eta_t)[:, None]
    b = np.arange(1 << params.eta_b)[None, :]
    cw = books.c1_flat[books.codeword_index(t, b)].astype(np.int64)           # (T, B, n_b)
    if params.n_b == 0:
        return np.ones(cw.shape[:2] + (1,))
    return np.prod(m[cw[..., None, :], zs[None, None, :, :]], axis=-1)


def exact_secrecy(two: TwoDmbc, books: CodebookSet, params: CodingParameters,
                  joints: ProtocolJoints | None = None) -> ExactSecrecy:
    """H(S), H(S|Z) and H(F,B|S,T2,B2,Z) for one codebook set, by enumeration.

    A NULL cover choice is an outcome of its own: Bob sends Enc(0, B) and
    holds the NULL key, which is one more value of S.
    """
    view = eve_view_size(two, params)
    if view > MAX_VIEW:
        raise ValueError(f"Eve's view has {view} outcomes, limit is {MAX_VIEW}")
    if joints is None:
        joints = protocol_joints(two, books.scheme, params.info["P_X"])
    A = forward_table(two, books, params, joints)
    C = backward_table(two, books, params) / (1 << params.eta_b)
    n_pool = books.v_pool.shape[0]
    n_b = 1 << params.eta_b
    null_key = 1 << params.kappa

    f_all = np.arange(n_pool)
    t_of = np.append(books.t_of_f(f_all), 0)
    keys = np.full((n_pool + 1, n_b), null_key, dtype=np.int64)
    keys[:n_pool] = books.key(f_all[:, None], np.arange(n_b)[None, :])
    t2_of = t_of >> params.eta_t1
    b2_of = np.arange(n_b) >> params.eta_b1

    # H(F, B, Z) from row sums, since each (f, b) slice is an outer product
    a_mass, c_mass = A.sum(axis=1), C.sum(axis=2)
    a_ent = np.array([_h(r) for r in A])
    c_ent = np.array([[_h(r) for r in row] for row in C])
    h_fbz = float((a_ent[:, None] * c_mass[t_of] + a_mass[:, None] * c_ent[t_of]).sum())

    by_s: dict = {}
    by_stb: dict = {}
    for f in range(n_pool + 1):
        if a_mass[f] == 0:
            continue
        for b in range(n_b):
            block = np.outer(A[f], C[t_of[f], b])
            s = int(keys[f, b])
            by_s[s] = by_s.get(s, 0) + block
            k = (s, int(t2_of[f]), int(b2_of[b]))
            by_stb[k] = by_stb.get(k, 0) + block
    pz = sum(by_s.values())
    h_z = _h(pz)
    h_sz = sum(_h(v) for v in by_s.values())
    h_stbz = sum(_h(v) for v in by_stb.values())
    h_s = _h([v.sum() for v in by_s.values()])
    h_s_z = h_sz - h_z
    i_sz = h_s - h_s_z
    h_fb = h_fbz - h_stbz
    slack = 19 * params.N * params.epsilon
    return ExactSecrecy(h_s, h_s_z, i_sz, h_fb, slack, i_sz - h_fb - slack, view,
                        float(a_mass[n_pool]))
