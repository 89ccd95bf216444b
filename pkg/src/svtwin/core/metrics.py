"""Inequality, diversity and similarity calculators."""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

from svtwin.core.errors import DomainError


def gini(sample: Iterable[float]) -> float:
    """Mean-normalised half of the mean absolute pairwise difference.

    ``G = sum_ij |x_i - x_j| / (2 n^2 mean)``, with self-pairs included, so
    the value lies in ``[0, 1 - 1/n]``. All-zero input returns 0.
    """
    xs = sorted(float(v) for v in sample)
    if not xs:
        raise DomainError("gini of an empty sample")
    if xs[0] < 0:
        raise DomainError("gini requires non-negative entries")
    total = math.fsum(xs)
    if total == 0.0:
        return 0.0
    n = len(xs)
    # Sorted-rank identity: sum_ij |x_i - x_j| = 2 * sum_i (2i - n - 1) x_(i).
    weighted = math.fsum((2 * i - n - 1) * x for i, x in enumerate(xs, start=1))
    return weighted / (n * total)


def shannon_entropy_bits(counts: Iterable[float]) -> float:
    """Shannon entropy (base 2) of the normalised counts; zero classes skipped."""
    values = [float(c) for c in counts]
    if not values:
        raise DomainError("entropy of an empty sample")
    if any(c < 0 for c in values):
        raise DomainError("entropy requires non-negative counts")
    total = math.fsum(values)
    if total <= 0:
        raise DomainError("entropy requires a positive total")
    h = 0.0
    for c in values:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return max(h, 0.0)


class CosineResult(NamedTuple):
    value: float
    degenerate: bool


def cosine_checked(a, b) -> CosineResult:
    """Cosine similarity with a flag set when either vector has zero norm."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = math.sqrt(float(a @ a))
    nb = math.sqrt(float(b @ b))
    if na == 0.0 or nb == 0.0:
        return CosineResult(0.0, True)
    value = float(a @ b) / (na * nb)
    return CosineResult(min(1.0, max(-1.0, value)), False)


def cosine(a, b) -> float:
    return cosine_checked(a, b).value
