"""Pearson and Spearman correlation with tie-averaged ranks."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateVariance, TooFewPoints

MIN_POINTS = 3
VARIANCE_TOL = 1e-12


def _paired(x, y) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64).ravel()
    b = np.asarray(y, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < MIN_POINTS:
        raise TooFewPoints(f"need at least {MIN_POINTS} pairs, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("correlation inputs must be finite")
    return a, b


def pearson(x, y) -> float:
    a, b = _paired(x, y)
    a = a - a.mean()
    b = b - b.mean()
    saa = float(np.dot(a, a))
    sbb = float(np.dot(b, b))
    n = a.size
    if saa / n <= VARIANCE_TOL or sbb / n <= VARIANCE_TOL:
        raise DegenerateVariance("constant input vector")
    r = float(np.dot(a, b)) / float(np.sqrt(saa * sbb))
    return min(1.0, max(-1.0, r))


def ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    a = np.asarray(values, dtype=np.float64).ravel()
    n = a.size
    order = np.argsort(a, kind="mergesort")
    sorted_a = a[order]
    # boundaries of runs of equal values in sorted order
    starts = np.flatnonzero(np.r_[True, sorted_a[1:] != sorted_a[:-1]])
    ends = np.r_[starts[1:], n]
    avg = (starts + ends + 1) / 2.0
    out = np.empty(n, dtype=np.float64)
    out[order] = np.repeat(avg, ends - starts)
    return out


def spearman(x, y) -> float:
    a, b = _paired(x, y)
    return pearson(ranks(a), ranks(b))
