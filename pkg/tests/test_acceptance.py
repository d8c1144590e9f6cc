"""Acceptance criteria, each at its stated tolerance. Every test records one
PASS/FAIL line, printed in the terminal summary."""

import io
import json
import time
from contextlib import redirect_stdout

import numpy as np
import pytest

from acceptance_log import record
from dmbc_ske.bounds import (
    AuxScheme,
    conditional_mi,
    degraded_capacity,
    lower_bound,
    secrecy_capacity_simple,
    upper_bound,
)
from dmbc_ske.channel import Dmbc, TwoDmbc
from dmbc_ske.cli import main, strip_timing
from dmbc_ske.infotheory import Kernel
from dmbc_ske.io import save_channel
from dmbc_ske.protocol import build_codebooks, derive_parameters, estimate_security
from dmbc_ske.protocol.exact import exact_secrecy
from dmbc_ske.stats import one_sided_increase_pvalue
from dmbc_ske.typicality import TypicalityParams, verify_joint_aep
from instances import UNIFORM2, blind_pair, bsc_pair, erasure_instance
from oracles import brute_force

pytestmark = pytest.mark.acceptance


def random_binary_dmbc(rng) -> Dmbc:
    """Rows drawn from a Dirichlet with small concentration, so near-deterministic
    and near-useless channels both show up."""
    conc = rng.choice([0.3, 1.0, 3.0])
    return Dmbc(rng.dirichlet(np.full(4, conc), size=2).reshape(2, 2, 2))


def random_kernel(rng, k, m):
    return rng.dirichlet(np.full(m, rng.choice([0.5, 2.0])), size=k)


# 1 --------------------------------------------------------------------------------------

def test_c1_bound_ordering():
    rng = np.random.default_rng(1001)
    t0 = time.perf_counter()
    gaps = []
    for i in range(100):
        two = TwoDmbc(random_binary_dmbc(rng), random_binary_dmbc(rng))
        lo = lower_bound(two, grid=0.01, restarts=20, seed=i)
        up = upper_bound(two, grid=0.01, restarts=20, seed=i)
        gaps.append(lo.value - up.value)
    wall = time.perf_counter() - t0
    ok = max(gaps) <= 1e-3 and wall < 300
    assert record(1, ok, f"max(lower - upper) = {max(gaps):.2e} over 100 pairs (<= 1e-3), "
                         f"{wall:.0f} s (< 300 s)")


# 2 --------------------------------------------------------------------------------------

def test_c2_degraded_coincidence():
    rng = np.random.default_rng(1002)
    worst_up, worst_lo = 0.0, -np.inf
    for i in range(20):
        fwd = Dmbc.obverse_cascade(random_kernel(rng, 2, 2), random_kernel(rng, 2, 2))
        if i % 4 == 3:
            bwd = Dmbc.reverse_cascade(random_kernel(rng, 2, 2), random_kernel(rng, 2, 2))
        else:
            bwd = Dmbc.obverse_cascade(random_kernel(rng, 2, 2), random_kernel(rng, 2, 2))
        two = TwoDmbc(fwd, bwd) if i % 2 else TwoDmbc(bwd, fwd)
        dc = degraded_capacity(two).value
        up = upper_bound(two).value
        lo = lower_bound(two, seed=i).value      # default ratio grid includes the extremes
        worst_up = max(worst_up, abs(dc - up))
        worst_lo = max(worst_lo, dc - lo)
    ok = worst_up <= 2e-3 and worst_lo <= 5e-3
    assert record(2, ok, f"max |degraded - upper| = {worst_up:.2e} (<= 2e-3), "
                         f"max (degraded - lower) = {worst_lo:.2e} (<= 5e-3), 20 pairs")


# 3 --------------------------------------------------------------------------------------

def test_c3_brute_force_oracle():
    rng = np.random.default_rng(1003)
    worst = 0.0
    for i in range(25):
        ch = random_binary_dmbc(rng)
        s = secrecy_capacity_simple(ch).value
        u = upper_bound(TwoDmbc(ch, Dmbc.from_kernels(Kernel.constant(2), Kernel.constant(2)))).value
        worst = max(worst, abs(s - brute_force(ch.tensor, "secrecy")),
                    abs(u - brute_force(ch.tensor, "conditional")))
    assert record(3, worst <= 1e-4, f"max deviation from 0.001-grid oracle = {worst:.2e} "
                                    f"(<= 1e-4), 25 channels")


# 4 --------------------------------------------------------------------------------------

def test_c4_concavity():
    rng = np.random.default_rng(1004)
    worst = -np.inf
    for i in range(1000):
        nx, ny, nz = rng.integers(2, 5, size=3)
        ch = Dmbc(rng.dirichlet(np.full(ny * nz, 0.7), size=nx).reshape(nx, ny, nz))
        p, q = rng.dirichlet(np.ones(nx), size=2)
        lam = rng.random()
        gap = lam * conditional_mi(ch, p) + (1 - lam) * conditional_mi(ch, q) - \
            conditional_mi(ch, lam * p + (1 - lam) * q)
        worst = max(worst, gap)
    assert record(4, worst <= 1e-9, f"max concavity violation = {worst:.2e} (<= 1e-9), 1000 mixtures")


# 5 --------------------------------------------------------------------------------------

def test_c5_bipartite_aep():
    # at [[.45, .05], [.05, .45]] the per-letter spread of -log p caps the paired rate near 0.966
    ju = jt = np.array([[0.495, 0.005], [0.005, 0.495]])
    t0 = time.perf_counter()
    rep = verify_joint_aep(ju, jt, TypicalityParams(0.1, 200, 200), 10_000, seed=1005)
    wall = time.perf_counter() - t0
    inside = not (rep.flags["independent_above_upper"] or rep.flags["independent_below_lower"])
    ok = rep.paired_rate >= 0.99 and inside and wall < 60
    assert record(5, ok, f"paired = {rep.paired_rate:.4f} (>= 0.99), independent = "
                         f"{rep.independent_rate:.2e} in 2^[{rep.log2_lower:.1f}, {rep.log2_upper:.1f}]"
                         f" = {inside}, {wall:.1f} s (< 60 s)")


# 6 --------------------------------------------------------------------------------------

def test_c6_degenerate_protocol():
    two = blind_pair()
    scheme = AuxScheme.simple(2, 2)
    p = derive_parameters(two, scheme, UNIFORM2, 8, 0.1, 0.1, 0.01)
    est = estimate_security(two, scheme, UNIFORM2, p, 100, 1006, min_trials=100)
    pv = est.chi2["pvalue"]
    ok = est.error_rate == 0.0 and pv > 0.01 and est.leakage_ratio <= 0.02
    assert record(6, ok, f"error = {est.error_rate} (== 0), chi2 p = {pv:.3f} on top "
                         f"{est.chi2['bits']} key bits (> 0.01), leakage = {est.leakage_ratio:.3f}"
                         f" (<= 0.02), kappa = {p.kappa}, 100 trials")


# 7 --------------------------------------------------------------------------------------

def test_c7_error_trend():
    two, scheme = erasure_instance(0.08, 0.3, 0.2, 0.3)
    t0 = time.perf_counter()
    errs, trials = [], 500
    for n_f in (32, 64, 128):
        p = derive_parameters(two, scheme, UNIFORM2, n_f, 0.025, 0.15, 0.2, strict=False, max_eta=40)
        est = estimate_security(two, scheme, UNIFORM2, p, trials, 1007 + n_f, attack=False)
        errs.append(round(est.error_rate * trials))
    wall = time.perf_counter() - t0
    pvals = [one_sided_increase_pvalue(a, trials, b, trials) for a, b in zip(errs, errs[1:])]
    ok = min(pvals) >= 0.05 and wall < 600
    rates = ", ".join(f"{k / trials:.3f}" for k in errs)
    assert record(7, ok, f"error rates at n_f = 32/64/128: {rates}; increase p-values "
                         f"{', '.join(f'{v:.3g}' for v in pvals)} (>= 0.05), {wall:.0f} s (< 600 s)")


# 8 --------------------------------------------------------------------------------------

def test_c8_eve_advantage():
    base, scheme = erasure_instance(0.1, 0.3, 0.2, 0.2)
    p = derive_parameters(base, scheme, UNIFORM2, 32, 0.03, 0.05, 0.05, strict=False)
    hits, valid = [], []
    for flip in (0.4, 0.3, 0.2, 0.1):
        two, _ = erasure_instance(0.1, 0.3, 0.2, flip)
        est = estimate_security(two, scheme, UNIFORM2, p, 500, 1008, attack=False)
        n = est.trials - est.null_counts["bob_cover"]
        hits.append(round(est.genie_success_rate * n))
        valid.append(n)
    # a decrease between consecutive points must not be significant
    pvals = [one_sided_increase_pvalue(k2, n2, k1, n1)
             for k1, n1, k2, n2 in zip(hits, valid, hits[1:], valid[1:])]
    ok = min(pvals) >= 0.05
    rates = ", ".join(f"{k / n:.3f}" for k, n in zip(hits, valid))
    assert record(8, ok, f"genie success at Eve flip 0.4/0.3/0.2/0.1: {rates}; decrease p-values "
                         f"{', '.join(f'{v:.3g}' for v in pvals)} (>= 0.05), 500 trials each")


# 9 --------------------------------------------------------------------------------------

def test_c9_exact_micro_secrecy():
    two = bsc_pair(0.05, 0.25, 0.05, 0.25)
    scheme = AuxScheme.simple(2, 2)
    p = derive_parameters(two, scheme, UNIFORM2, 6, 0.1, 0.1, 0.01)
    r = exact_secrecy(two, build_codebooks(p, scheme, 1009), p)
    ok = r.view_size <= 1 << 20 and r.passed
    assert record(9, ok, f"I(S;Z) = {r.I_S_Z:.4f} <= H(F,B|S,T2,B2,Z) + 19 N eps = "
                         f"{r.H_FB_given_STBZ:.4f} + {r.slack:.3f} (margin {-r.violation:.3f}), "
                         f"view 2^{int(np.log2(r.view_size))}")


# 10 -------------------------------------------------------------------------------------

def _cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    assert code == 0
    return json.loads(buf.getvalue())


def test_c10_reproducibility(tmp_path):
    fwd, bwd = tmp_path / "fwd.json", tmp_path / "bwd.json"
    two, _ = erasure_instance(0.1, 0.3, 0.2, 0.2)
    save_channel(two.forward, fwd)
    save_channel(two.backward, bwd)
    joint = tmp_path / "j.json"
    joint.write_text(json.dumps({"matrix": [[0.4, 0.1], [0.1, 0.4]]}))
    scheme = tmp_path / "s.json"
    scheme.write_text(json.dumps(erasure_instance(0.1, 0.3, 0.2, 0.2)[1].as_dict()))
    runs = [
        ["simulate", "--fwd", str(fwd), "--bwd", str(bwd), "--scheme", str(scheme), "--nf", "32",
         "--alpha", "0.03", "--beta", "0.05", "--epsilon", "0.05", "--relaxed", "--trials", "200",
         "--seed", "10"],
        ["bounds", "--fwd", str(fwd), "--bwd", str(bwd), "--restarts", "3", "--seed", "10"],
        ["verify-aep", "--jointU", str(joint), "--jointT", str(joint), "--n", "50", "--d", "50",
         "--epsilon", "0.1", "--trials", "3000", "--seed", "10"],
    ]
    same = []
    for argv in runs:
        first = _cli(argv)
        again = _cli(first["argv"])      # re-run from the echoed command line
        same.append(json.dumps(strip_timing(first), sort_keys=True)
                    == json.dumps(strip_timing(again), sort_keys=True))
    assert record(10, all(same), f"bit-identical re-runs (timing excluded): "
                                 f"simulate={same[0]}, bounds={same[1]}, verify-aep={same[2]}")
