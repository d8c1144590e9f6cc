"""Monte-Carlo estimate of the randomness / reliability / secrecy triple."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..bounds import AuxScheme
from ..channel import TwoDmbc
from ..stats import chi_square_uniform, plugin_entropy, plugin_mutual_information, wilson_interval
from .codebooks import CodebookSet, build_codebooks
from .eve import eve_attack, eve_reconstruct
from .params import CodingParameters
from .run import NULL, protocol_joints, run_protocol

MIN_TRIALS = 200
TRIAL_CHUNK = 50


@dataclass(frozen=True)
class TrialRecord:
    S: int
    S_hat: int
    S_eve: int          # blind attack output, NULL if no commitment
    genie_ok: bool      # genie decoder recovered (F, B)
    nulls: tuple        # (bob_cover, alice_w1, alice_v)


@dataclass(frozen=True)
class SecurityEstimate:
    key_entropy_rate: float
    error_rate: float
    error_ci: tuple
    leakage_ratio: float
    genie_success_rate: float
    genie_ci: tuple
    trials: int
    kappa: int
    N: int
    key_entropy_bits: float
    null_counts: dict
    chi2: dict
    confidence: float = 0.95
    records: tuple = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "key_entropy_rate": self.key_entropy_rate,
            "key_entropy_bits": self.key_entropy_bits,
            "key_rate_ceiling": self.kappa / self.N,
            "error_rate": self.error_rate, "error_ci": list(self.error_ci),
            "leakage_ratio": self.leakage_ratio,
            "leakage_method": "plug-in I(S; blind typicality attack) / plug-in H(S)",
            "genie_success_rate": self.genie_success_rate, "genie_ci": list(self.genie_ci),
            "trials": self.trials, "confidence": self.confidence,
            "null_counts": dict(self.null_counts), "chi2_uniform": dict(self.chi2),
        }


def trial_seed(seed: int, i: int) -> np.random.SeedSequence:
    """Seed substream of trial ``i``; independent of how trials are scheduled."""
    return np.random.SeedSequence(entropy=seed, spawn_key=(i,))


def _one_trial(two, scheme, params, joints, books, ss, attack):
    s_book, s_run = ss.spawn(2)
    if books is None:
        books = build_codebooks(params, scheme, np.random.default_rng(s_book))
    tr = run_protocol(two, books, params, s_run, joints)
    tr.check(books)
    genie_ok = False
    s_eve = NULL
    if tr.S != NULL:
        got = eve_reconstruct(books, params, tr.S, tr.T2, tr.B2, tr.z_f, tr.z_b, joints)
        genie_ok = got == (tr.F, tr.B)
        if attack:
            s_eve = eve_attack(books, params, tr.z_f, tr.z_b, joints)
    flags = tr.null_flags
    return TrialRecord(tr.S, tr.S_hat, s_eve, bool(genie_ok),
                       (flags["bob_cover"], flags["alice_w1"], flags["alice_v"]))


def _chunk(args):
    two, scheme, params, joints, books, seed, lo, hi, attack = args
    return [_one_trial(two, scheme, params, joints, books, trial_seed(seed, i), attack)
            for i in range(lo, hi)]


def chi2_key_bits(keys, kappa: int, trials: int) -> dict:
    """Chi-square uniformity of the top ``m`` key bits, ``m`` chosen so every
    class expects at least five hits."""
    m = max(1, min(kappa, int(math.floor(math.log2(max(trials, 1) / 5)))))
    keys = np.asarray(keys, dtype=np.int64)
    if keys.size == 0:
        return {"bits": m, "statistic": float("nan"), "pvalue": float("nan")}
    stat, pv = chi_square_uniform(keys >> (kappa - m), 1 << m)
    return {"bits": m, "statistic": stat, "pvalue": pv}


def summarize(records, params: CodingParameters, confidence: float = 0.95) -> SecurityEstimate:
    n = len(records)
    keys = [r.S for r in records]
    errors = sum(1 for r in records if r.S == NULL or r.S_hat != r.S)
    valid = [r for r in records if r.S != NULL]
    h_s = plugin_entropy(keys)
    # NULL keys are part of S's empirical law; a constant Eve output gives exactly 0
    leak = plugin_mutual_information(keys, [r.S_eve for r in records]) / h_s if h_s > 0 else 0.0
    genie = sum(r.genie_ok for r in valid)
    gn = max(len(valid), 1)
    nulls = {name: sum(r.nulls[k] for r in records)
             for k, name in enumerate(("bob_cover", "alice_w1", "alice_v"))}
    return SecurityEstimate(
        key_entropy_rate=h_s / params.N, error_rate=errors / n,
        error_ci=wilson_interval(errors, n, confidence), leakage_ratio=float(min(1.0, leak)),
        genie_success_rate=genie / gn, genie_ci=wilson_interval(genie, gn, confidence),
        trials=n, kappa=params.kappa, N=params.N, key_entropy_bits=h_s, null_counts=nulls,
        chi2=chi2_key_bits([r.S for r in valid], params.kappa, len(valid)),
        confidence=confidence, records=tuple(records))


def estimate_security(two: TwoDmbc, scheme: AuxScheme, input_f, params: CodingParameters,
                      trials: int, rng_seed: int, *, fresh_codebooks: bool = True,
                      books: CodebookSet | None = None, jobs: int = 1, attack: bool = True,
                      confidence: float = 0.95, min_trials: int = MIN_TRIALS) -> SecurityEstimate:
    """Run ``trials`` independent protocol executions and summarize them.

    With ``fresh_codebooks`` each trial draws its own codebooks (ensemble
    average); otherwise one codebook set, ``books`` or one drawn from the
    seed, is shared. Results depend only on ``rng_seed``, never on ``jobs``.
    """
    if trials < min_trials:
        raise ValueError(f"need at least {min_trials} trials, got {trials}")
    if not isinstance(rng_seed, (int, np.integer)) or rng_seed < 0:
        raise ValueError("rng_seed must be a non-negative integer")
    input_f = np.asarray(input_f if input_f is not None else params.info["P_X"], dtype=float)
    joints = protocol_joints(two, scheme, input_f)
    if not fresh_codebooks and books is None:
        books = build_codebooks(params, scheme,
                                np.random.default_rng(np.random.SeedSequence([rng_seed, 1 << 30])))
    if fresh_codebooks:
        books = None
    tasks = [(two, scheme, params, joints, books, int(rng_seed), lo, min(lo + TRIAL_CHUNK, trials),
              attack) for lo in range(0, trials, TRIAL_CHUNK)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_chunk, tasks))
    else:
        parts = [_chunk(t) for t in tasks]
    return summarize([r for p in parts for r in p], params, confidence)
