"""Small estimators and tests used by the Monte-Carlo harnesses."""

from __future__ import annotations

from collections import Counter

import numpy as np
from scipy import stats as sps


def wilson_interval(k: int, n: int, confidence: float = 0.99) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    z = sps.norm.ppf(0.5 + confidence / 2)
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return float(max(0.0, centre - half)), float(min(1.0, centre + half))


def one_sided_increase_pvalue(k1: int, n1: int, k2: int, n2: int) -> float:
    """p-value of the pooled two-proportion z-test for H1: p2 > p1."""
    p1, p2 = k1 / n1, k2 / n2
    pool = (k1 + k2) / (n1 + n2)
    se = np.sqrt(pool * (1 - pool) * (1 / n1 + 1 / n2))
    if se == 0:
        return 1.0 if p2 <= p1 else 0.0
    return float(sps.norm.sf((p2 - p1) / se))


def plugin_entropy(samples) -> float:
    """Entropy in bits of the empirical distribution of hashable samples."""
    counts = np.array(list(Counter(samples).values()), dtype=float)
    if counts.size == 0:
        return 0.0
    p = counts / counts.sum()
    return float(max(0.0, -(p * np.log2(p)).sum()))


def plugin_mutual_information(a, b) -> float:
    a, b = list(a), list(b)
    if len(a) != len(b):
        raise ValueError("sample lists differ in length")
    return max(0.0, plugin_entropy(a) + plugin_entropy(b) - plugin_entropy(list(zip(a, b))))


def chi_square_uniform(values, n_classes: int) -> tuple:
    """Chi-square statistic and p-value of ``values`` against uniform on ``range(n_classes)``."""
    counts = np.bincount(np.asarray(values, dtype=np.int64), minlength=n_classes)
    if counts.size != n_classes:
        raise ValueError("value outside the class range")
    res = sps.chisquare(counts)
    return float(res.statistic), float(res.pvalue)
