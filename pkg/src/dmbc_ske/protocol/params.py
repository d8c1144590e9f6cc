"""Integer code-size arithmetic for the two-round key agreement scheme."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln

from ..bounds import AuxScheme, rate_terms
from ..channel import TwoDmbc
from ..infotheory import Distribution, entropy_of

# guards floor/ceil against float noise such as 100 * 0.6 = 60.000000000000007
ROUND_GUARD = 1e-9
DEFAULT_MAX_ETA = 20
TYPE_ENUM_LIMIT = 200_000


class ParameterError(ValueError):
    """Raised when no consistent integer parameter set exists; ``constraint`` names the culprit."""

    def __init__(self, constraint: str, message: str):
        self.constraint = constraint
        super().__init__(f"{constraint}: {message}")


def _floor(x: float) -> int:
    return int(math.floor(x + ROUND_GUARD))


def _ceil(x: float) -> int:
    return int(math.ceil(x - ROUND_GUARD))


@dataclass(frozen=True)
class CodingParameters:
    n_f: int
    n_b: int
    n_b1: int
    n_b2: int
    alpha: float
    beta: float
    epsilon: float
    eta_f: int
    eta_t: int
    eta_t1: int
    eta_t2: int
    eta_b: int
    eta_b1: int
    eta_b2: int
    eta_1: int
    eta_2: int
    eta: int
    kappa: int
    gamma: int
    kappa_real: float = 0.0
    rate: float = 0.0
    slack_ok: bool = True
    info: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.n_f + self.n_b

    def check(self) -> None:
        """Raise AssertionError if a structural invariant is broken."""
        assert self.n_b == self.n_b1 + self.n_b2 and min(self.n_b1, self.n_b2) >= 0
        assert self.eta == self.eta_f + self.eta_b
        assert self.eta_t == self.eta_t1 + self.eta_t2 and self.eta_b == self.eta_b1 + self.eta_b2
        assert self.eta_1 == self.eta_t1 + self.eta_b1 and self.eta_2 == self.eta_t2 + self.eta_b2
        assert self.gamma == self.eta - self.kappa and self.gamma >= 0
        assert self.eta_f >= self.eta_t >= 0 and self.kappa >= 1
        assert min(self.eta_t1, self.eta_t2, self.eta_b1, self.eta_b2) >= 0

    def as_dict(self) -> dict:
        return asdict(self)


def typical_set_log2_size(p, n: int, epsilon: float):
    """log2 of the number of epsilon-typical n-sequences w.r.t. ``p``.

    Counts by composition (type class); returns ``None`` when the number of
    compositions exceeds :data:`TYPE_ENUM_LIMIT`.
    """
    p = np.asarray(Distribution(np.asarray(p)).probs)
    k = p.size
    if n == 0:
        return 0.0
    if math.comb(n + k - 1, k - 1) > TYPE_ENUM_LIMIT:
        return None
    h = entropy_of(p)
    with np.errstate(divide="ignore"):
        lp = np.log2(p)
    best = []

    def rec(prefix, left, slots):
        if slots == 1:
            comp = np.array(prefix + [left])
            if np.any((comp > 0) & (p == 0)):
                return
            logp = float((comp[comp > 0] * lp[comp > 0]).sum())
            if abs(-logp / n - h) < epsilon:
                lc = (gammaln(n + 1) - gammaln(comp + 1).sum()) / math.log(2)
                best.append(lc)
            return
        for c in range(left + 1):
            rec(prefix + [c], left - c, slots - 1)

    rec([], n, k)
    if not best:
        return -math.inf
    b = np.array(best)
    m = b.max()
    return float(m + np.log2(np.exp2(b - m).sum()))


def exponents(info: dict, n_f: int, n_b: int, alpha: float, beta: float) -> dict:
    """Integer block lengths and code-size exponents from per-use information values.

    ``info`` needs I(V;Y), I(V;Y|X), I(W1;Y), I(W2;Y), r_s1 and r_s2. The
    eta values are rounded down, n_b2 up, and gamma = max(0, ceil(eta - kappa_real))
    so that kappa = eta - gamma.
    """
    i_w1y = info["I(W1;Y)"]
    if i_w1y <= 0:
        raise ParameterError("I(W1;Yb) > 0", "the superposition code carries no information")
    n_b2 = _ceil(n_f * (info["I(V;Y|X)"] + 3 * alpha) / i_w1y)
    n_b1 = n_b - n_b2
    if n_b1 < 0:
        raise ParameterError("n_b1 >= 0", f"n_b = {n_b} < n_b2 = {n_b2}; increase n_b or reduce alpha")
    eta_f = _floor(n_f * (info["I(V;Y)"] + alpha))
    eta_t = _floor(n_b2 * (i_w1y - beta))
    eta_t2 = _floor(n_b2 * info["I(W2;Y)"])
    eta_b = _floor(n_b1 * (i_w1y - beta))
    eta_b2 = _floor(n_b1 * info["I(W2;Y)"])
    if eta_t < 0 or eta_b < 0:
        raise ParameterError("beta < I(W1;Yb)", "negative eta_t or eta_b")
    eta_t1, eta_b1 = eta_t - eta_t2, eta_b - eta_b2
    if eta_t1 < 0 or eta_b1 < 0:
        raise ParameterError("eta_t1, eta_b1 >= 0",
                             f"eta_t1 = {eta_t1}, eta_b1 = {eta_b1} after rounding")
    if eta_f < eta_t:
        raise ParameterError("eta_f >= eta_t", f"eta_f = {eta_f} < eta_t = {eta_t}")
    eta = eta_f + eta_b
    N = n_f + n_b
    rate = (n_f * info["r_s1"] + n_b * max(info["r_s2"], 0.0)) / N
    kappa_real = N * rate
    gamma = max(0, _ceil(eta - kappa_real))
    kappa = eta - gamma
    return dict(n_f=n_f, n_b=n_b, n_b1=n_b1, n_b2=n_b2, eta_f=eta_f, eta_t=eta_t,
                eta_t1=eta_t1, eta_t2=eta_t2, eta_b=eta_b, eta_b1=eta_b1, eta_b2=eta_b2,
                eta_1=eta_t1 + eta_b1, eta_2=eta_t2 + eta_b2, eta=eta, kappa=kappa,
                gamma=gamma, kappa_real=kappa_real, rate=rate)


def derive_parameters(two: TwoDmbc, scheme: AuxScheme, input_f, n_f: int, alpha: float,
                      beta: float, epsilon: float, *, n_b=None, strict: bool = True,
                      max_eta: int = DEFAULT_MAX_ETA) -> CodingParameters:
    """All protocol sizes for Alice-initiated runs.

    ``n_b`` defaults to ``round(n_f * alpha / beta)`` so that n_b*beta = n_f*alpha.
    With ``strict`` the slack condition 3*N*epsilon < n_b*beta = n_f*alpha is
    enforced; otherwise its status is recorded in ``slack_ok``.
    """
    if n_f < 1:
        raise ParameterError("n_f >= 1", "need at least one forward channel use")
    if min(alpha, beta, epsilon) <= 0:
        raise ParameterError("alpha, beta, epsilon > 0", "slack constants must be positive")
    input_f = input_f if isinstance(input_f, Distribution) else Distribution(np.asarray(input_f))
    rt = rate_terms(two, scheme, input_f)
    info = dict(rt.parts)
    info.update(r_s1=rt.r_s1, r_s2=rt.r_s2)
    if n_b is None:
        n_b = int(round(n_f * alpha / beta))
    N = n_f + n_b
    slack_ok = 3 * N * epsilon < min(n_b * beta, n_f * alpha)
    if strict and not slack_ok:
        raise ParameterError("3*N*epsilon < n_b*beta = n_f*alpha",
                             f"3*N*epsilon = {3 * N * epsilon:.4g}, n_b*beta = {n_b * beta:.4g}, "
                             f"n_f*alpha = {n_f * alpha:.4g}")
    e = exponents(info, n_f, n_b, alpha, beta)
    if e["kappa"] < 1:
        raise ParameterError("kappa >= 1", f"key length {e['kappa']} bits at this scale")
    if e["eta_f"] > max_eta or e["eta_t"] + e["eta_b"] > max_eta or e["eta"] > max_eta:
        raise ParameterError("eta <= max_eta",
                             f"eta_f = {e['eta_f']}, eta = {e['eta']} exceed the cap {max_eta}")
    p_v = input_f.probs @ two.forward.tensor.sum(axis=2) @ scheme.kernel_V.rows
    log_size = typical_set_log2_size(p_v, n_f, epsilon)
    if log_size is not None and e["eta_f"] > log_size + ROUND_GUARD:
        raise ParameterError("2^eta_f <= |typical set|",
                             f"eta_f = {e['eta_f']} but only 2^{log_size:.3f} typical V-sequences")
    info["P_X"] = input_f.probs.tolist()
    info["P_V"] = p_v.tolist()
    params = CodingParameters(alpha=alpha, beta=beta, epsilon=epsilon, slack_ok=slack_ok,
                              info=info, **e)
    params.check()
    return params
