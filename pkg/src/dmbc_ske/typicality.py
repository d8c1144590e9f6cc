"""Weak (entropy) typicality, its joint and bipartite forms, and a sampling check
of the joint AEP for bipartite sequences."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .infotheory import Distribution, JointDistribution, entropy_of
from .stats import wilson_interval

AEP_CHUNK = 2000


@dataclass(frozen=True)
class TypicalityParams:
    """Window ``epsilon`` and the two sub-block lengths ``n`` and ``d``."""

    epsilon: float
    n: int
    d: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if self.n < 0 or self.d < 0:
            raise ValueError("block lengths must be >= 0")

    @property
    def N(self) -> int:
        return self.n + self.d


def _probs(p) -> np.ndarray:
    if isinstance(p, (Distribution, JointDistribution)):
        return np.asarray(p.probs)
    return np.asarray(p, dtype=float)


def log2_table(p) -> np.ndarray:
    """log2 of a probability array with -inf at zeros."""
    p = _probs(p)
    with np.errstate(divide="ignore"):
        return np.log2(p)


def _seq(seq, k: int) -> np.ndarray:
    s = np.asarray(seq, dtype=np.int64)
    if s.size and (s.min() < 0 or s.max() >= k):
        raise ValueError(f"symbols must lie in [0, {k})")
    return s


def sequence_log2_prob(seq, p) -> float:
    """log2 of the i.i.d. probability of ``seq`` (``-inf`` if a symbol has zero mass)."""
    lt = log2_table(p)
    return float(lt[_seq(seq, lt.size)].sum())


def _within(logp, n, h, eps):
    """|-(1/n) log P - h| < eps, vectorized; empty blocks count as typical."""
    logp = np.asarray(logp, dtype=float)
    if n == 0:
        return np.ones(logp.shape, dtype=bool)
    with np.errstate(invalid="ignore"):
        ok = np.abs(-logp / n - h) < eps
    return ok & np.isfinite(logp)


def is_typical(seq, p, epsilon: float) -> bool:
    p = Distribution(_probs(p))
    s = _seq(seq, p.size)
    return bool(_within(sequence_log2_prob(s, p), s.size, entropy_of(p.probs), epsilon))


def _joint2(joint) -> np.ndarray:
    t = _probs(joint)
    if t.ndim != 2:
        raise ValueError("pairwise typicality needs a 2-axis joint distribution")
    JointDistribution(t)
    return t


def is_jointly_typical(seq_a, seq_b, joint, epsilon: float) -> bool:
    """Both sequences marginally typical and the pair typical w.r.t. ``joint``."""
    t = _joint2(joint)
    a, b = _seq(seq_a, t.shape[0]), _seq(seq_b, t.shape[1])
    if a.size != b.size:
        raise ValueError("sequences must have equal length")
    n = a.size
    pa, pb = t.sum(axis=1), t.sum(axis=0)
    la, lb, lab = log2_table(pa), log2_table(pb), log2_table(t)
    return bool(_within(la[a].sum(), n, entropy_of(pa), epsilon)
                and _within(lb[b].sum(), n, entropy_of(pb), epsilon)
                and _within(lab[a, b].sum(), n, entropy_of(t), epsilon))


def _bip_target(params: TypicalityParams, h_u: float, h_t: float) -> float:
    # degenerate splits return the plain entropy so d = 0 matches is_typical exactly
    if params.d == 0:
        return h_u
    if params.n == 0:
        return h_t
    return (params.n * h_u + params.d * h_t) / params.N


def is_bipartite_typical(x, p_u, p_t, params: TypicalityParams) -> bool:
    """Mixed-rate criterion for ``x = u || t`` with ``len(u) = n`` and ``len(t) = d``."""
    pu, pt = Distribution(_probs(p_u)), Distribution(_probs(p_t))
    x = np.asarray(x, dtype=np.int64)
    if x.size != params.N:
        raise ValueError(f"sequence length {x.size} != n + d = {params.N}")
    u, t = _seq(x[:params.n], pu.size), _seq(x[params.n:], pt.size)
    logp = log2_table(pu)[u].sum() + log2_table(pt)[t].sum()
    return bool(_within(logp, params.N, _bip_target(params, entropy_of(pu.probs),
                                                    entropy_of(pt.probs)), params.epsilon))


def is_bipartite_jointly_typical(x, y, joint_u, joint_t, params: TypicalityParams) -> bool:
    ju, jt = _joint2(joint_u), _joint2(joint_t)
    x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
    if x.size != params.N or y.size != params.N:
        raise ValueError("sequence lengths must equal n + d")
    n = params.n
    if not (is_bipartite_typical(x, ju.sum(axis=1), jt.sum(axis=1), params)
            and is_bipartite_typical(y, ju.sum(axis=0), jt.sum(axis=0), params)):
        return False
    u, t = _seq(x[:n], ju.shape[0]), _seq(x[n:], jt.shape[0])
    u2, t2 = _seq(y[:n], ju.shape[1]), _seq(y[n:], jt.shape[1])
    logp = log2_table(ju)[u, u2].sum() + log2_table(jt)[t, t2].sum()
    return bool(_within(logp, params.N, _bip_target(params, entropy_of(ju), entropy_of(jt)),
                        params.epsilon))


# batched forms used by the protocol -------------------------------------------


def pair_log2_probs(cands: np.ndarray, obs: np.ndarray, joint) -> np.ndarray:
    """For candidate rows ``cands`` (M, n) and one observation ``obs`` (n,),
    return the i.i.d. joint log2-probabilities, shape (M,)."""
    lt = log2_table(joint)
    if cands.shape[1] == 0:
        return np.zeros(cands.shape[0])
    return lt[cands, obs[None, :]].sum(axis=1)


def typical_mask(seqs: np.ndarray, p, epsilon: float) -> np.ndarray:
    """Row-wise :func:`is_typical` for an (M, n) array."""
    p = _probs(p)
    seqs = np.asarray(seqs)
    logp = log2_table(p)[seqs].sum(axis=1) if seqs.shape[1] else np.zeros(seqs.shape[0])
    return _within(logp, seqs.shape[1], entropy_of(p), epsilon)


def joint_typical_mask(cands: np.ndarray, obs: np.ndarray, joint, epsilon: float) -> np.ndarray:
    """Row-wise :func:`is_jointly_typical` of each candidate against ``obs``."""
    t = _joint2(joint)
    n = cands.shape[1]
    obs_ok = _within(log2_table(t.sum(axis=0))[obs].sum(), n, entropy_of(t.sum(axis=0)), epsilon)
    if not obs_ok:
        return np.zeros(cands.shape[0], dtype=bool)
    m = typical_mask(cands, t.sum(axis=1), epsilon)
    return m & _within(pair_log2_probs(cands, obs, t), n, entropy_of(t), epsilon)


# AEP verification --------------------------------------------------------------


@dataclass(frozen=True)
class AepReport:
    paired_rate: float
    paired_ci: tuple
    independent_rate: float
    independent_ci: tuple
    log2_lower: float
    log2_upper: float
    mutual_info: tuple
    trials: int
    params: TypicalityParams
    confidence: float = 0.99
    flags: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not any(self.flags.values())

    def as_dict(self) -> dict:
        return {
            "paired_rate": self.paired_rate, "paired_ci": list(self.paired_ci),
            "independent_rate": self.independent_rate,
            "independent_ci": list(self.independent_ci),
            "log2_envelope": [self.log2_lower, self.log2_upper],
            "mutual_info": {"U": self.mutual_info[0], "T": self.mutual_info[1]},
            "trials": self.trials, "confidence": self.confidence,
            "params": {"epsilon": self.params.epsilon, "n": self.params.n, "d": self.params.d},
            "flags": dict(self.flags), "passed": self.passed,
        }


def _draw_pairs(rng, joint, count, length):
    flat = rng.choice(joint.size, size=(count, length), p=joint.ravel())
    return np.divmod(flat, joint.shape[1])


def _draw(rng, p, count, length):
    return rng.choice(p.size, size=(count, length), p=p)


def _accept_rows(u, u2, t, t2, ju, jt, params):
    """Vectorized bipartite joint typicality for rows of sampled sequences."""
    n, d, N, eps = params.n, params.d, params.N, params.epsilon
    pu, pu2, pt, pt2 = ju.sum(1), ju.sum(0), jt.sum(1), jt.sum(0)

    def lp(table, *idx):
        return log2_table(table)[idx].sum(axis=1) if idx[0].shape[1] else np.zeros(idx[0].shape[0])

    ok = _within(lp(pu, u) + lp(pt, t), N, _bip_target(params, entropy_of(pu), entropy_of(pt)), eps)
    ok &= _within(lp(pu2, u2) + lp(pt2, t2), N,
                  _bip_target(params, entropy_of(pu2), entropy_of(pt2)), eps)
    ok &= _within(lp(ju, u, u2) + lp(jt, t, t2), N,
                  _bip_target(params, entropy_of(ju), entropy_of(jt)), eps)
    return ok


def _aep_chunk(args):
    ju, jt, params, count, seed = args
    rng = np.random.default_rng(seed)
    u, u2 = _draw_pairs(rng, ju, count, params.n)
    t, t2 = _draw_pairs(rng, jt, count, params.d)
    paired = int(_accept_rows(u, u2, t, t2, ju, jt, params).sum())
    iu, iu2 = _draw(rng, ju.sum(1), count, params.n), _draw(rng, ju.sum(0), count, params.n)
    it, it2 = _draw(rng, jt.sum(1), count, params.d), _draw(rng, jt.sum(0), count, params.d)
    indep = int(_accept_rows(iu, iu2, it, it2, ju, jt, params).sum())
    return paired, indep


def _mi(j):
    return entropy_of(j.sum(1)) + entropy_of(j.sum(0)) - entropy_of(j)


def verify_joint_aep(joint_u, joint_t, params: TypicalityParams, trials: int, seed: int,
                     jobs: int = 1, confidence: float = 0.99) -> AepReport:
    """Sample paired and independent bipartite sequence pairs and compare the
    acceptance rates with the analytical envelope.

    Trials are split into fixed chunks; chunk ``c`` uses seed ``seed + c``, so
    results do not depend on ``jobs``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ju, jt = _joint2(joint_u), _joint2(joint_t)
    chunks = [(ju, jt, params, min(AEP_CHUNK, trials - s), seed + c)
              for c, s in enumerate(range(0, trials, AEP_CHUNK))]
    if jobs > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            res = list(ex.map(_aep_chunk, chunks))
    else:
        res = [_aep_chunk(c) for c in chunks]
    paired = sum(r[0] for r in res)
    indep = sum(r[1] for r in res)
    iu, it = _mi(ju), _mi(jt)
    N, eps = params.N, params.epsilon
    log2_upper = -params.n * iu - params.d * it + 3 * N * eps
    log2_lower = np.log2(1 - eps) - params.n * iu - params.d * it - 3 * N * eps if eps < 1 else -np.inf
    p_ci = wilson_interval(paired, trials, confidence)
    i_ci = wilson_interval(indep, trials, confidence)
    with np.errstate(divide="ignore"):
        lo, hi = np.log2(i_ci[0]), np.log2(i_ci[1])
    flags = {
        # the independent-pair rate must be compatible with the envelope
        "independent_above_upper": bool(lo > log2_upper),
        "independent_below_lower": bool(hi < log2_lower),
        # paired acceptance should be at least 1 - epsilon for large blocks
        "paired_below_1_minus_eps": bool(p_ci[1] < 1 - eps),
    }
    return AepReport(paired / trials, p_ci, indep / trials, i_ci, float(log2_lower),
                     float(log2_upper), (iu, it), trials, params, confidence, flags)
