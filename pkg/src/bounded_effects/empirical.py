"""Empirical CDF, generalized-inverse quantiles and one-sided trimmed means.

Everything here is a step function of the order statistics; nothing
interpolates. Quantile arguments outside ``(0, 1]`` are clamped: ``q <= 0``
gives the sample minimum and ``q > 1`` the sample maximum.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateTrim, EmptySelection

__all__ = [
    "Ecdf",
    "ecdf_eval",
    "quantile",
    "trimmed_mean_lower",
    "trimmed_mean_upper",
    "count_clamps",
]


def _rank(n: int, q):
    """Smallest k in 1..n with k/n >= q, computed without float drift.

    ``ceil(q * n)`` alone can be off by one when ``q * n`` rounds across an
    integer, so the candidate is corrected with the same ``k / n >= q``
    comparison that :func:`ecdf_eval` implies.
    """
    q = np.asarray(q, dtype=float)
    k = np.ceil(q * n)
    k = np.where((k - 1) / n >= q, k - 1, k)
    k = np.where(k / n < q, k + 1, k)
    return np.clip(k, 1, n).astype(np.intp)


class Ecdf:
    """Empirical distribution of a finite sample."""

    __slots__ = ("sorted_values", "n")

    def __init__(self, values):
        values = np.sort(np.asarray(values, dtype=float).ravel())
        if values.size == 0:
            raise EmptySelection("empirical distribution of an empty sample")
        if np.isnan(values).any():
            raise ValueError("sample contains NaN")
        values.setflags(write=False)
        self.sorted_values = values
        self.n = values.size

    def __repr__(self):
        return f"Ecdf(n={self.n})"

    def __call__(self, y):
        return ecdf_eval(self, y)

    def quantile(self, q):
        return quantile(self, q)


def ecdf_eval(e: Ecdf, y):
    """Share of sample values ``<= y``."""
    out = np.searchsorted(e.sorted_values, y, side="right") / e.n
    return float(out) if np.ndim(out) == 0 else out


def quantile(e: Ecdf, q):
    """``min{y in sample : F(y) >= q}`` with clamping outside ``(0, 1]``."""
    out = e.sorted_values[_rank(e.n, q) - 1]
    return float(out) if np.ndim(out) == 0 else out


def count_clamps(q) -> int:
    """Number of quantile arguments that fall outside ``(0, 1]``."""
    q = np.asarray(q, dtype=float)
    return int(np.count_nonzero((q <= 0.0) | (q > 1.0)))


def _check_share(p):
    if not 0.0 < p <= 1.0:
        raise DegenerateTrim(f"trimming share must lie in (0, 1], got {p!r}")


def trimmed_mean_lower(e: Ecdf, p: float) -> float:
    """Mean of the values at or below the ``p``-quantile (ties kept)."""
    _check_share(p)
    v = e.sorted_values
    threshold = v[_rank(e.n, p) - 1]
    m = np.searchsorted(v, threshold, side="right")
    if m == 0:
        raise DegenerateTrim("lower trimmed set is empty")
    return float(np.mean(v[:m]))


def trimmed_mean_upper(e: Ecdf, p: float) -> float:
    """Mean of the top ``p`` share of values, ties at the threshold kept.

    Mirror image of :func:`trimmed_mean_lower`: the threshold is the lower
    quantile of the reflected sample, so both sides keep ``ceil(p * n)``
    order statistics when there are no ties.
    """
    _check_share(p)
    v = e.sorted_values
    threshold = v[e.n - _rank(e.n, p)]
    m = np.searchsorted(v, threshold, side="left")
    if m == e.n:
        raise DegenerateTrim("upper trimmed set is empty")
    return float(np.mean(v[m:]))
