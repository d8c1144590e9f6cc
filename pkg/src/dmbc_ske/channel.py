"""Discrete memoryless broadcast channels, their pairing, sampling and degradedness tests."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .infotheory import (
    INFO_TOL,
    NORM_TOL,
    Distribution,
    JointDistribution,
    Kernel,
    conditional_mutual_information,
)

SEARCH_MAX_ALPHABET = 4


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class Dmbc:
    """Broadcast channel X -> (Y, Z) stored as ``tensor[x, y, z] = P(y, z | x)``.

    ``Y`` is the legitimate receiver, ``Z`` the eavesdropper.
    """

    tensor: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.array(self.tensor, dtype=float)
        if t.ndim != 3 or 0 in t.shape:
            raise ValueError("channel tensor must have shape (|X|, |Y|, |Z|)")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValueError("channel probabilities must be finite and non-negative")
        sums = t.sum(axis=(1, 2))
        bad = np.flatnonzero(np.abs(sums - 1.0) > NORM_TOL)
        if bad.size:
            raise ValueError(f"P(y,z|x={bad[0]}) sums to {sums[bad[0]]:.15g}")
        t.setflags(write=False)
        object.__setattr__(self, "tensor", t)

    @property
    def sizes(self) -> tuple:
        return self.tensor.shape

    @property
    def x_size(self) -> int:
        return self.tensor.shape[0]

    @property
    def kernel_y(self) -> Kernel:
        return Kernel(self.tensor.sum(axis=2))

    @property
    def kernel_z(self) -> Kernel:
        return Kernel(self.tensor.sum(axis=1))

    def joint(self, input_law=None) -> JointDistribution:
        """Joint law of (X, Y, Z) under ``input_law`` (uniform by default)."""
        p = Distribution.uniform(self.x_size) if input_law is None else input_law
        if not isinstance(p, Distribution):
            p = Distribution(p)
        if p.size != self.x_size:
            raise ValueError("input law size does not match channel input alphabet")
        return JointDistribution(p.probs[:, None, None] * self.tensor, ("x", "y", "z"))

    # constructors -------------------------------------------------------

    @classmethod
    def from_kernels(cls, to_bob, to_eve, label: str = "") -> "Dmbc":
        """Outputs drawn independently given the input."""
        ky = np.asarray(Kernel(np.asarray(to_bob)).rows)
        kz = np.asarray(Kernel(np.asarray(to_eve)).rows)
        if ky.shape[0] != kz.shape[0]:
            raise ValueError("kernels disagree on the input alphabet")
        return cls(ky[:, :, None] * kz[:, None, :], label)

    @classmethod
    def obverse_cascade(cls, x_to_y, y_to_z, label: str = "") -> "Dmbc":
        """Eve observes a degraded copy of Bob's output: X -> Y -> Z."""
        ky = np.asarray(Kernel(np.asarray(x_to_y)).rows)
        kyz = np.asarray(Kernel(np.asarray(y_to_z)).rows)
        return cls(ky[:, :, None] * kyz[None, :, :], label)

    @classmethod
    def reverse_cascade(cls, x_to_z, z_to_y, label: str = "") -> "Dmbc":
        """Bob observes a degraded copy of Eve's output: X -> Z -> Y."""
        kz = np.asarray(Kernel(np.asarray(x_to_z)).rows)
        kzy = np.asarray(Kernel(np.asarray(z_to_y)).rows)
        return cls(np.einsum("xz,zy->xyz", kz, kzy), label)

    @classmethod
    def product(cls, obverse: "Dmbc", reverse: "Dmbc", label: str = "") -> "Dmbc":
        """Two independent subchannels run side by side.

        Symbols are indexed row-major, ``x = x_o * |X_R| + x_r`` and likewise
        for ``y`` and ``z``, matching :class:`Split`.
        """
        o, r = obverse.tensor, reverse.tensor
        t = np.einsum("abc,def->adbecf", o, r)
        xo, yo, zo = o.shape
        xr, yr, zr = r.shape
        return cls(t.reshape(xo * xr, yo * yr, zo * zr), label)

    def swap_outputs(self) -> "Dmbc":
        return Dmbc(np.transpose(self.tensor, (0, 2, 1)), self.label)


@dataclass(frozen=True, eq=False)
class TwoDmbc:
    """A forward channel (Alice to Bob) and an independent backward one (Bob to Alice)."""

    forward: Dmbc
    backward: Dmbc

    def __post_init__(self):
        if self.forward is self.backward:
            object.__setattr__(self, "backward", Dmbc(self.backward.tensor.copy(),
                                                      self.backward.label))

    def swapped(self) -> "TwoDmbc":
        return TwoDmbc(self.backward, self.forward)


def transmit(ch: Dmbc, x_seq, seed=None):
    """Send ``x_seq`` through ``ch`` symbol by symbol.

    Returns ``(y_seq, z_seq)``. Sampling is by inverse CDF over the flattened
    (y, z) cell with ``y`` major, so for a fixed seed Bob's outputs depend only
    on ``P(y|x)``; changing Eve's marginal leaves ``y_seq`` untouched.
    """
    x = np.asarray(x_seq, dtype=np.int64)
    nx, ny, nz = ch.tensor.shape
    if x.ndim != 1:
        raise ValueError("x_seq must be one-dimensional")
    if x.size and (x.min() < 0 or x.max() >= nx):
        raise ValueError(f"input symbols must lie in [0, {nx})")
    rng = _rng(seed)
    if x.size == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    cdf = np.cumsum(ch.tensor.reshape(nx, ny * nz), axis=1)
    cdf[:, -1] = 1.0
    u = rng.random(x.size)
    cell = (u[:, None] >= cdf[x]).sum(axis=1)
    cell = np.minimum(cell, ny * nz - 1)
    return cell // nz, cell % nz


# degradedness ---------------------------------------------------------------


@dataclass(frozen=True)
class Split:
    """Factorisation of the three alphabets into (O, R) parts, row-major."""

    x: tuple
    y: tuple
    z: tuple

    @classmethod
    def parse(cls, text: str) -> "Split":
        """Parse ``"xo,xr:yo,yr:zo,zr"``."""
        try:
            parts = [tuple(int(v) for v in p.split(",")) for p in text.split(":")]
        except ValueError as exc:
            raise ValueError(f"malformed split {text!r}") from exc
        if len(parts) != 3 or any(len(p) != 2 for p in parts):
            raise ValueError(f"split must look like 'xo,xr:yo,yr:zo,zr', got {text!r}")
        return cls(*parts)

    @classmethod
    def obverse_only(cls, ch: Dmbc) -> "Split":
        nx, ny, nz = ch.sizes
        return cls((nx, 1), (ny, 1), (nz, 1))

    @classmethod
    def reverse_only(cls, ch: Dmbc) -> "Split":
        nx, ny, nz = ch.sizes
        return cls((1, nx), (1, ny), (1, nz))

    def check(self, ch: Dmbc) -> None:
        for name, (o, r), n in zip("xyz", (self.x, self.y, self.z), ch.sizes):
            if o < 1 or r < 1 or o * r != n:
                raise ValueError(f"split {name}={o}x{r} inconsistent with alphabet size {n}")

    def __str__(self):
        return ":".join(f"{o},{r}" for o, r in (self.x, self.y, self.z))


@dataclass(frozen=True)
class DegradednessReport:
    obversely_degraded: bool
    reversely_degraded: bool
    independent_subchannels: bool
    split: Optional[Split]
    residuals: dict = field(default_factory=dict)
    tol: float = INFO_TOL

    @property
    def degraded(self) -> bool:
        return self.obversely_degraded and self.reversely_degraded and self.independent_subchannels

    def as_dict(self) -> dict:
        return {
            "degraded": self.degraded,
            "obversely_degraded": self.obversely_degraded,
            "reversely_degraded": self.reversely_degraded,
            "independent_subchannels": self.independent_subchannels,
            "split": str(self.split) if self.split else None,
            "residuals": dict(self.residuals),
            "tol": self.tol,
        }


def obverse_residual(ch: Dmbc, input_law=None) -> float:
    return conditional_mutual_information(ch.joint(input_law), "x", "z", "y")


def reverse_residual(ch: Dmbc, input_law=None) -> float:
    return conditional_mutual_information(ch.joint(input_law), "x", "y", "z")


def check_obversely_degraded(ch: Dmbc, input_law=None, tol: float = INFO_TOL) -> bool:
    """X <-> Y <-> Z under a full-support input law."""
    return obverse_residual(ch, input_law) <= tol


def check_reversely_degraded(ch: Dmbc, input_law=None, tol: float = INFO_TOL) -> bool:
    """X <-> Z <-> Y under a full-support input law."""
    return reverse_residual(ch, input_law) <= tol


def split_joint(ch: Dmbc, split: Split, input_law=None) -> JointDistribution:
    """Six-axis joint over (xo, xr, yo, yr, zo, zr)."""
    split.check(ch)
    t = ch.joint(input_law).probs.reshape(*split.x, *split.y, *split.z)
    return JointDistribution(t, ("xo", "xr", "yo", "yr", "zo", "zr"))


def subchannel(ch: Dmbc, split: Split, part: str) -> Dmbc:
    """The O (``part="o"``) or R subchannel, averaging over the other input uniformly."""
    split.check(ch)
    t = ch.tensor.reshape(*split.x, *split.y, *split.z)
    if part == "o":
        return Dmbc(t.mean(axis=1).sum(axis=(2, 4)))
    if part == "r":
        return Dmbc(t.mean(axis=0).sum(axis=(1, 3)))
    raise ValueError("part must be 'o' or 'r'")


def analyze_degraded(ch: Dmbc, split: Split, input_law=None,
                     tol: float = INFO_TOL) -> DegradednessReport:
    """Test the degraded-DMBC conditions for a caller-supplied (O, R) split.

    Residuals are conditional mutual informations that vanish exactly when
    the corresponding Markov chain holds:

    * ``independence_o`` / ``independence_r``: the two halves of
      (Y_O,Z_O) <-> X_O <-> X_R <-> (Y_R,Z_R);
    * ``obverse_o``: I(X_O; Z_O | Y_O);
    * ``reverse_r``: I(X_R; Y_R | Z_R).
    """
    j = split_joint(ch, split, input_law)
    res = {
        "independence_o": conditional_mutual_information(
            j, ("yo", "zo"), ("xr", "yr", "zr"), "xo"),
        "independence_r": conditional_mutual_information(
            j, ("yo", "zo", "xo"), ("yr", "zr"), "xr"),
        "obverse_o": conditional_mutual_information(j, "xo", "zo", "yo"),
        "reverse_r": conditional_mutual_information(j, "xr", "yr", "zr"),
    }
    return DegradednessReport(
        obversely_degraded=res["obverse_o"] <= tol,
        reversely_degraded=res["reverse_r"] <= tol,
        independent_subchannels=max(res["independence_o"], res["independence_r"]) <= tol,
        split=split,
        residuals=res,
        tol=tol,
    )


def _factor_pairs(n: int):
    return [(o, n // o) for o in range(n, 0, -1) if n % o == 0]


def find_degraded_split(ch: Dmbc, input_law=None, tol: float = INFO_TOL):
    """Exhaustive search over row-major factorisations; alphabets of size <= 4 only.

    Returns the first degraded report found (splits with the largest O part
    first) or ``None``. Symbol relabelings are not searched.
    """
    if max(ch.sizes) > SEARCH_MAX_ALPHABET:
        raise ValueError(f"split search limited to alphabets of size <= {SEARCH_MAX_ALPHABET};"
                         " split required")
    for sx, sy, sz in itertools.product(*(_factor_pairs(n) for n in ch.sizes)):
        rep = analyze_degraded(ch, Split(sx, sy, sz), input_law, tol)
        if rep.degraded:
            return rep
    return None
