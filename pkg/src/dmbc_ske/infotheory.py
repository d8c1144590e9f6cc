"""Finite-alphabet probability calculus.

Entropies and (conditional) mutual informations are in bits. Distributions
are dense numpy arrays wrapped in small immutable containers; every function
here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

NORM_TOL = 1e-12
INFO_TOL = 1e-9

AxisSpec = Union[int, str, Sequence[Union[int, str]]]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector over the alphabet ``{0, ..., k-1}``."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("a distribution is a non-empty 1-d vector")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(p.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {p.sum():.15g}, not 1")
        object.__setattr__(self, "probs", p)

    @property
    def size(self) -> int:
        return self.probs.size

    @classmethod
    def uniform(cls, k: int) -> "Distribution":
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point(cls, k: int, i: int) -> "Distribution":
        p = np.zeros(k)
        p[i] = 1.0
        return cls(p)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)

    def __repr__(self):
        return f"Distribution({np.array2string(self.probs, precision=6)})"


@dataclass(frozen=True, eq=False)
class Kernel:
    """Stochastic matrix; row ``x`` is the output law given input ``x``."""

    rows: np.ndarray

    def __post_init__(self):
        m = _frozen(self.rows)
        if m.ndim != 2 or 0 in m.shape:
            raise ValueError("a kernel is a non-empty 2-d matrix")
        if np.any(m < 0) or not np.all(np.isfinite(m)):
            raise ValueError("kernel entries must be finite and non-negative")
        bad = np.flatnonzero(np.abs(m.sum(axis=1) - 1.0) > NORM_TOL)
        if bad.size:
            raise ValueError(f"kernel row {bad[0]} sums to {m[bad[0]].sum():.15g}")
        object.__setattr__(self, "rows", m)

    @property
    def input_size(self) -> int:
        return self.rows.shape[0]

    @property
    def output_size(self) -> int:
        return self.rows.shape[1]

    def row(self, x: int) -> Distribution:
        return Distribution(self.rows[x])

    @classmethod
    def identity(cls, k: int) -> "Kernel":
        return cls(np.eye(k))

    @classmethod
    def constant(cls, k: int, m: int = 1, out: int = 0) -> "Kernel":
        rows = np.zeros((k, m))
        rows[:, out] = 1.0
        return cls(rows)

    @classmethod
    def bsc(cls, e: float) -> "Kernel":
        """Binary symmetric channel with crossover probability ``e``."""
        return cls(np.array([[1 - e, e], [e, 1 - e]]))

    def then(self, other: "Kernel") -> "Kernel":
        """Cascade: feed this kernel's output into ``other``."""
        if self.output_size != other.input_size:
            raise ValueError("cascade size mismatch")
        return Kernel(self.rows @ other.rows)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rows, dtype=dtype)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense probability tensor over a product alphabet, one labelled axis per variable."""

    probs: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        t = _frozen(self.probs)
        if t.ndim == 0:
            raise ValueError("joint distribution needs at least one axis")
        if np.any(t < 0) or not np.all(np.isfinite(t)):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(t.sum() - 1.0) > NORM_TOL:
            raise ValueError(f"total mass is {t.sum():.15g}, not 1")
        labels = tuple(self.labels) if self.labels else tuple(f"v{i}" for i in range(t.ndim))
        if len(labels) != t.ndim or len(set(labels)) != len(labels):
            raise ValueError("need one distinct label per axis")
        object.__setattr__(self, "probs", t)
        object.__setattr__(self, "labels", labels)

    @property
    def ndim(self) -> int:
        return self.probs.ndim

    @property
    def shape(self) -> tuple:
        return self.probs.shape

    def axes(self, spec: AxisSpec) -> tuple:
        """Resolve labels and/or integer positions to a tuple of axis indices."""
        if isinstance(spec, (int, np.integer, str)):
            spec = [spec]
        out = []
        for a in spec:
            if isinstance(a, str):
                if a not in self.labels:
                    raise KeyError(f"no axis labelled {a!r}; have {self.labels}")
                out.append(self.labels.index(a))
            else:
                a = int(a)
                if not -self.ndim <= a < self.ndim:
                    raise IndexError(f"axis {a} out of range")
                out.append(a % self.ndim)
        return tuple(out)

    def marginal(self, spec: AxisSpec) -> "JointDistribution":
        keep = self.axes(spec)
        drop = tuple(i for i in range(self.ndim) if i not in keep)
        t = self.probs.sum(axis=drop) if drop else self.probs
        # sum() keeps the remaining axes in ascending order
        order = sorted(keep)
        t = np.transpose(t, [order.index(k) for k in keep])
        return JointDistribution(t, tuple(self.labels[k] for k in keep))

    def distribution(self, spec: AxisSpec) -> Distribution:
        """Marginal over ``spec`` flattened to a single-alphabet Distribution."""
        return Distribution(self.marginal(spec).probs.ravel())

    def relabel(self, labels: Iterable[str]) -> "JointDistribution":
        return JointDistribution(self.probs, tuple(labels))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)


def entropy_of(probs) -> float:
    """Shannon entropy in bits of any non-negative array, treated as one flat law."""
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(max(0.0, -(p * np.log2(p)).sum()))


def entropy(p) -> float:
    """H(p) in bits with 0 log 0 = 0."""
    if not isinstance(p, Distribution):
        p = Distribution(p)
    return entropy_of(p.probs)


def binary_entropy(e: float) -> float:
    if not 0.0 <= e <= 1.0:
        raise ValueError(f"binary entropy needs e in [0, 1], got {e}")
    return entropy_of([e, 1.0 - e])


def _as_joint(joint) -> JointDistribution:
    return joint if isinstance(joint, JointDistribution) else JointDistribution(joint)


def _disjoint(*groups: tuple) -> None:
    seen = set()
    for g in groups:
        if not g:
            raise ValueError("axis groups must be non-empty")
        if seen & set(g) or len(set(g)) != len(g):
            raise ValueError("axis groups overlap")
        seen |= set(g)


def joint_entropy(joint, spec: AxisSpec) -> float:
    j = _as_joint(joint)
    axes = j.axes(spec)
    if not axes:
        return 0.0
    return entropy_of(j.marginal(axes).probs)


def mutual_information(joint, axes_a: AxisSpec, axes_b: AxisSpec) -> float:
    """I(A;B) = H(A) + H(B) - H(A,B), in bits."""
    j = _as_joint(joint)
    a, b = j.axes(axes_a), j.axes(axes_b)
    _disjoint(a, b)
    val = joint_entropy(j, a) + joint_entropy(j, b) - joint_entropy(j, a + b)
    return max(0.0, val)


def conditional_mutual_information(joint, axes_a: AxisSpec, axes_b: AxisSpec,
                                   axes_c: AxisSpec) -> float:
    """I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C), in bits."""
    j = _as_joint(joint)
    a, b, c = j.axes(axes_a), j.axes(axes_b), j.axes(axes_c)
    _disjoint(a, b, c)
    val = (joint_entropy(j, a + c) + joint_entropy(j, b + c)
           - joint_entropy(j, a + b + c) - joint_entropy(j, c))
    return max(0.0, val)


def compose(p, k, labels: Sequence[str] = ("x", "y")) -> JointDistribution:
    """Joint law of an input drawn from ``p`` and passed through kernel ``k``."""
    if not isinstance(p, Distribution):
        p = Distribution(p)
    if not isinstance(k, Kernel):
        k = Kernel(k)
    if k.input_size != p.size:
        raise ValueError(f"kernel expects {k.input_size} inputs, distribution has {p.size}")
    return JointDistribution(p.probs[:, None] * k.rows, tuple(labels))


def is_markov_chain(joint, axes_a: AxisSpec, axes_b: AxisSpec, axes_c: AxisSpec,
                    tol: float = INFO_TOL) -> bool:
    """True iff A <-> B <-> C, tested as I(A;C|B) <= tol."""
    return conditional_mutual_information(joint, axes_a, axes_c, axes_b) <= tol
