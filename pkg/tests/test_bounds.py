import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dmbc_ske.bounds import (
    AuxScheme,
    DegradednessError,
    conditional_mi,
    default_ratio_grid,
    degraded_capacity,
    lower_bound,
    parse_ratio_grid,
    rate_terms,
    secrecy_capacity_aux,
    secrecy_capacity_simple,
    upper_bound,
)
from dmbc_ske.channel import Dmbc, Split, TwoDmbc
from dmbc_ske.infotheory import Distribution, Kernel
from oracles import brute_force, random_binary_dmbc_tensor

# frozen from mpmath closed forms: h(0.26)-h(0.1), h(0.1), 1-h(0.05), h(0.3)-h(0.05)
RS1 = 0.357750778903336674209103147055
LHS = 0.468995593589281221253589330383
RHS = 0.713603042884043871233524022272
RS2 = 0.594893942114736489458343246515
H02_MINUS_H01 = 0.252932501298081126616730099106


def bsc_dmbc(bob, eve):
    return Dmbc.from_kernels(Kernel.bsc(bob), Kernel.bsc(eve))


def blind():
    return Dmbc.from_kernels(Kernel.identity(2), Kernel.constant(2))


def useless():
    return Dmbc.from_kernels(Kernel.constant(2), Kernel.constant(2))


# -- secrecy capacity ----------------------------------------------------------------

def test_secrecy_simple_examples():
    assert secrecy_capacity_simple(blind()).value == pytest.approx(1.0)
    same = Dmbc.from_kernels(Kernel.bsc(0.1), Kernel.bsc(0.1))
    assert secrecy_capacity_simple(same).value == 0.0
    ch = bsc_dmbc(0.1, 0.2)
    v = secrecy_capacity_simple(ch).value
    assert v == pytest.approx(brute_force(ch.tensor, "secrecy"), abs=1e-6)
    cascade = Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel.bsc(0.2))
    # same Bob and Eve marginals as BSC(0.1) / BSC(0.26)
    assert secrecy_capacity_simple(cascade).value == pytest.approx(RS1, abs=1e-9)
    ch2 = Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel([[1, 0], [0, 1]]))
    assert secrecy_capacity_simple(ch2).value == 0.0


def test_secrecy_h_difference_closed_form():
    # symmetric channels peak at uniform input, where the objective is h(0.2) - h(0.1)
    ch = bsc_dmbc(0.1, 0.2)
    assert secrecy_capacity_simple(ch).value == pytest.approx(H02_MINUS_H01, abs=1e-9)


def test_secrecy_aux_examples():
    ch = bsc_dmbc(0.1, 0.2)
    assert secrecy_capacity_aux(ch, 1).value == 0.0
    simple = secrecy_capacity_simple(ch).value
    assert secrecy_capacity_aux(ch, 2, restarts=50).value >= simple - 1e-6
    rng = np.random.default_rng(5)
    for _ in range(3):
        ch = Dmbc(random_binary_dmbc_tensor(rng))
        assert secrecy_capacity_aux(ch, 3, restarts=10).value >= secrecy_capacity_simple(ch).value - 1e-6


# -- rate terms ------------------------------------------------------------------------

def test_rate_terms_constant_v():
    two = TwoDmbc(bsc_dmbc(0.1, 0.2), bsc_dmbc(0.05, 0.3))
    s = AuxScheme(Kernel.constant(2), Distribution([1.0]), Kernel([[0.5, 0.5]]), Kernel.identity(2))
    rt = rate_terms(two, s, [0.5, 0.5])
    assert rt.r_s1 == pytest.approx(0.0, abs=1e-12)
    assert rt.constraint_lhs == pytest.approx(0.0, abs=1e-12)


def test_rate_terms_v_equals_y_noiseless():
    two = TwoDmbc(blind(), bsc_dmbc(0.05, 0.3))
    rt = rate_terms(two, AuxScheme.simple(2, 2), [0.3, 0.7])
    assert rt.r_s1 == pytest.approx(rt.parts["I(V;X)"] - rt.parts["I(V;Z)"])
    assert rt.parts["I(V;Z)"] == 0.0
    assert rt.r_s1 == pytest.approx(0.881290899230693, abs=1e-12)   # h(0.3)
    assert rt.constraint_lhs == pytest.approx(0.0, abs=1e-12)


def test_rate_terms_bsc_instance():
    two = TwoDmbc(bsc_dmbc(0.1, 0.2), bsc_dmbc(0.05, 0.3))
    rt = rate_terms(two, AuxScheme.simple(2, 2), [0.5, 0.5])
    assert rt.r_s1 == pytest.approx(RS1, abs=1e-12)
    assert rt.constraint_lhs == pytest.approx(LHS, abs=1e-12)
    assert rt.constraint_rhs == pytest.approx(RHS, abs=1e-12)
    assert rt.r_s2 == pytest.approx(RS2, abs=1e-12)


def test_rate_terms_literal_flag_only_affects_direction_b():
    two = TwoDmbc(bsc_dmbc(0.1, 0.2), bsc_dmbc(0.05, 0.3))
    s = AuxScheme.simple(2, 2)
    a = rate_terms(two, s, [0.5, 0.5], direction="A", literal_eve_term=True)
    assert a.r_s1 == pytest.approx(RS1)
    b = rate_terms(two, s, [0.5, 0.5], direction="B", literal_eve_term=True)
    assert b.r_s1 == pytest.approx(b.parts["I(V;X)"])


# -- lower / upper bounds ------------------------------------------------------------------

def test_lower_bound_useless_channels():
    lo = lower_bound(TwoDmbc(useless(), useless()), restarts=3)
    assert lo.value == pytest.approx(0.0, abs=1e-9)


def test_lower_bound_backward_perfect():
    two = TwoDmbc(useless(), blind())
    lo = lower_bound(two, restarts=5)
    target = secrecy_capacity_simple(two.backward).value
    assert lo.value == pytest.approx(target, abs=0.02)
    assert lo.ratio[1] > lo.ratio[0]


def test_lower_bound_degraded_matches_upper():
    two = TwoDmbc(Dmbc.obverse_cascade(Kernel.bsc(0.05), Kernel.bsc(0.2)),
                  Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel.bsc(0.1)))
    lo, up = lower_bound(two, restarts=5), upper_bound(two)
    assert lo.value == pytest.approx(up.value, abs=5e-3)
    assert lo.value <= up.value + 1e-3


def test_upper_bound_examples():
    assert upper_bound(TwoDmbc(blind(), useless())).value == pytest.approx(1.0)
    eve_sees_y = Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel.identity(2))
    assert upper_bound(TwoDmbc(eve_sees_y, eve_sees_y)).value == pytest.approx(0.0, abs=1e-12)
    ch = bsc_dmbc(0.1, 0.2)
    up = upper_bound(TwoDmbc(ch, useless()), grid=0.001)
    assert up.value == pytest.approx(brute_force(ch.tensor, "conditional"), abs=1e-6)


def test_upper_bound_swap_symmetric():
    two = TwoDmbc(bsc_dmbc(0.1, 0.2), bsc_dmbc(0.2, 0.4))
    assert upper_bound(two).value == pytest.approx(upper_bound(two.swapped()).value)


def test_ratio_grid():
    g = default_ratio_grid()
    assert (1, 99) in g and (99, 1) in g and (1, 1) in g and (2, 4) not in g
    assert parse_ratio_grid("1:9, 1:1,9:1") == [(1, 9), (1, 1), (9, 1)]
    for bad in ("", "1-2", "0:0", "a:b"):
        with pytest.raises(ValueError):
            parse_ratio_grid(bad)


# -- degraded capacity ------------------------------------------------------------------

def test_degraded_examples():
    two = TwoDmbc(blind(), blind())
    assert degraded_capacity(two).value == pytest.approx(1.0)
    two = TwoDmbc(Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel.bsc(0.15)),
                  Dmbc.obverse_cascade(Kernel.bsc(0.2), Kernel.bsc(0.05)))
    assert degraded_capacity(two).value == pytest.approx(upper_bound(two).value, abs=1e-6)
    zero = Dmbc.obverse_cascade(Kernel.bsc(0.5), Kernel.identity(2))
    assert degraded_capacity(TwoDmbc(zero, zero)).value == pytest.approx(0.0, abs=1e-12)


def test_degraded_product_uses_obverse_part():
    o = Dmbc.obverse_cascade(Kernel.bsc(0.1), Kernel.bsc(0.15))
    r = Dmbc.reverse_cascade(Kernel.bsc(0.05), Kernel.bsc(0.2))
    ch = Dmbc.product(o, r)
    split = Split((2, 2), (2, 2), (2, 2))
    two = TwoDmbc(ch, o)
    res = degraded_capacity(two, (split, None))
    assert res.value == pytest.approx(upper_bound(two).value, abs=1e-6)


def test_degraded_rejects_non_degraded():
    ch = bsc_dmbc(0.1, 0.2)
    with pytest.raises(DegradednessError):
        degraded_capacity(TwoDmbc(ch, ch))
    with pytest.raises(DegradednessError, match="residual"):
        degraded_capacity(TwoDmbc(ch, ch), ("2,1:2,1:2,1", "2,1:2,1:2,1"))


# -- properties ------------------------------------------------------------------------

@given(st.integers(0, 2**31), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_conditional_mi_concave(seed, p, q, lam):
    rng = np.random.default_rng(seed)
    t = rng.random((3, 2, 2))
    ch = Dmbc(t / t.sum(axis=(1, 2), keepdims=True))
    P = np.array([p, 1 - p, 0.0]) * 0.8 + 0.2 / 3
    Q = np.array([0.0, q, 1 - q]) * 0.8 + 0.2 / 3
    mix = conditional_mi(ch, lam * P + (1 - lam) * Q)
    assert mix >= lam * conditional_mi(ch, P) + (1 - lam) * conditional_mi(ch, Q) - 1e-9


@given(st.integers(0, 2**31))
def test_lower_below_upper_random(seed):
    rng = np.random.default_rng(seed)
    two = TwoDmbc(Dmbc(random_binary_dmbc_tensor(rng)), Dmbc(random_binary_dmbc_tensor(rng)))
    lo = lower_bound(two, restarts=2, iters=60, ratio_grid=[(1, 9), (1, 1), (9, 1)])
    assert lo.value <= upper_bound(two).value + 1e-3


def test_lower_bound_monotone_in_caps():
    rng = np.random.default_rng(11)
    two = TwoDmbc(Dmbc(random_binary_dmbc_tensor(rng)), bsc_dmbc(0.05, 0.3))
    small = lower_bound(two, caps=(1, 1, 1), restarts=4).value
    big = lower_bound(two, restarts=4).value
    assert big >= small - 1e-9
