"""Channel pairs and parameter sets shared by the protocol and acceptance tests."""

import numpy as np

from dmbc_ske.bounds import AuxScheme
from dmbc_ske.channel import Dmbc, TwoDmbc
from dmbc_ske.infotheory import Distribution, Kernel
from dmbc_ske.protocol import CodingParameters

UNIFORM2 = np.array([0.5, 0.5])


def bec(e: float) -> Kernel:
    """Binary erasure channel; output 2 is the erasure symbol."""
    return Kernel([[1 - e, 0.0, e], [0.0, 1 - e, e]])


def blind_pair() -> TwoDmbc:
    """Noiseless to the legitimate party, constant output to Eve, both directions."""
    ch = Dmbc.from_kernels(Kernel.identity(2), Kernel.constant(2))
    return TwoDmbc(ch, ch)


def copy_pair() -> TwoDmbc:
    """Noiseless to both the legitimate party and Eve."""
    ch = Dmbc.from_kernels(Kernel.identity(2), Kernel.identity(2))
    return TwoDmbc(ch, ch)


def noisy_backward_pair() -> TwoDmbc:
    """Forward as in :func:`blind_pair`; backward output independent of the input."""
    fwd = Dmbc.from_kernels(Kernel.identity(2), Kernel.constant(2))
    bwd = Dmbc.from_kernels([[0.5, 0.5], [0.5, 0.5]], Kernel.constant(2))
    return TwoDmbc(fwd, bwd)


def bsc_pair(bob_f, eve_f, bob_b, eve_b) -> TwoDmbc:
    return TwoDmbc(Dmbc.from_kernels(Kernel.bsc(bob_f), Kernel.bsc(eve_f)),
                   Dmbc.from_kernels(Kernel.bsc(bob_b), Kernel.bsc(eve_b)))


def erasure_instance(delta: float, erase_b: float, eve_f: float, eve_b: float):
    """Binary forward channel noiseless to Bob and BSC(eve_f) to Eve; backward
    BEC(erase_b) to Alice and BSC(eve_b) to Eve. V keeps Bob's symbol with
    probability ``delta`` and erases it otherwise, which keeps the cover
    codebook small enough for desk-scale block lengths."""
    fwd = Dmbc.from_kernels(Kernel.identity(2), Kernel.bsc(eve_f))
    bwd = Dmbc.from_kernels(bec(erase_b), Kernel.bsc(eve_b))
    scheme = AuxScheme(bec(1 - delta), Distribution([1.0]), Kernel([[0.5, 0.5]]), Kernel.identity(2))
    return TwoDmbc(fwd, bwd), scheme


def manual_params(n_f=8, n_b=6, eta_f=4, eta_t1=1, eta_t2=1, eta_b1=1, eta_b2=1, gamma=2,
                  epsilon=0.1, p_v=(0.5, 0.5), n_b2=None) -> CodingParameters:
    """Hand-built exponent set for codebook and key-map tests."""
    eta_t, eta_b = eta_t1 + eta_t2, eta_b1 + eta_b2
    eta = eta_f + eta_b
    n_b2 = n_b // 2 if n_b2 is None else n_b2
    p = CodingParameters(
        n_f=n_f, n_b=n_b, n_b1=n_b - n_b2, n_b2=n_b2, alpha=0.1, beta=0.1, epsilon=epsilon,
        eta_f=eta_f, eta_t=eta_t, eta_t1=eta_t1, eta_t2=eta_t2, eta_b=eta_b, eta_b1=eta_b1,
        eta_b2=eta_b2, eta_1=eta_t1 + eta_b1, eta_2=eta_t2 + eta_b2, eta=eta, kappa=eta - gamma,
        gamma=gamma, info={"P_V": list(p_v), "P_X": [0.5, 0.5]})
    p.check()
    return p
