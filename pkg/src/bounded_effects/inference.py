"""Bootstrap standard errors and Imbens-Manski confidence intervals.

The bootstrap resamples each treatment group separately, to its own size,
and re-runs the whole estimator on every replicate, so sampling noise in
the Always-Observed shares is carried into the bound standard errors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri

from ._parallel import ordered_map
from .bounds import (
    DEFAULT_GRID,
    BoundsResult,
    cic_att_bounds,
    did_att_bounds,
    naive_did,
)
from .dataset import PanelDataset, parse_directions
from .errors import (
    EstimationError,
    InvalidAlpha,
    InvalidConfig,
    TooManyDegenerateReplicates,
)
from .strata import StrataProportions, estimate_proportions

__all__ = [
    "Estimator",
    "BootstrapDraws",
    "CiInterval",
    "bootstrap",
    "bootstrap_sigmas",
    "imbens_manski_z",
    "confidence_interval",
    "pointwise_intervals",
    "METHODS",
    "MAX_DROP_SHARE",
]

METHODS = ("did", "cic", "naive-did", "naive-cic")
MAX_DROP_SHARE = 0.10


@dataclass(frozen=True)
class Estimator:
    """Which bounds to compute and how.

    ``directions`` overrides the dataset's monotonicity directions; leave it
    empty to use the dataset's own. ``fixed_proportions`` skips estimation of
    the Always-Observed shares altogether.
    """

    method: str = "did"
    directions: tuple = ()
    grid_size: int = DEFAULT_GRID
    fixed_proportions: Optional[StrataProportions] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        object.__setattr__(self, "directions", parse_directions(self.directions or None))

    @property
    def is_cic(self) -> bool:
        return self.method in ("cic", "naive-cic")

    def proportions(self, ds: PanelDataset) -> StrataProportions:
        if self.method.startswith("naive"):
            return StrataProportions.known(1.0, 1.0)
        if self.fixed_proportions is not None:
            return self.fixed_proportions
        return estimate_proportions(ds, self.directions or None)

    def estimate(self, ds: PanelDataset) -> BoundsResult:
        p = self.proportions(ds)
        if self.method == "did":
            return did_att_bounds(ds, p)
        if self.method == "naive-did":
            value = naive_did(ds)
            return BoundsResult(
                lb=value, ub=value, method="DiD", estimand="ATT_AO",
                proportions=p, n_used=ds.n_observed,
            )
        return cic_att_bounds(ds, p, self.grid_size)


@dataclass(frozen=True)
class BootstrapDraws:
    """Replicate estimates; rows of ``qtt_lb``/``qtt_ub`` follow the quantile grid."""

    lb: np.ndarray
    ub: np.ndarray
    pi0: np.ndarray
    pi1: np.ndarray
    qtt_lb: Optional[np.ndarray]
    qtt_ub: Optional[np.ndarray]
    n_boot: int
    dropped: int
    seed: int

    def sigmas(self) -> tuple[float, float]:
        return float(np.std(self.lb, ddof=1)), float(np.std(self.ub, ddof=1))

    def qtt_sigmas(self):
        if self.qtt_lb is None:
            return None
        return np.std(self.qtt_lb, axis=0, ddof=1), np.std(self.qtt_ub, axis=0, ddof=1)


def _check_seed(seed) -> int:
    if int(seed) != seed or seed < 0:
        raise InvalidConfig(f"seed must be a non-negative integer, got {seed!r}")
    return int(seed)


def bootstrap(
    ds: PanelDataset,
    estimator: Estimator,
    n_boot: int,
    seed: int = 0,
    threads: Optional[int] = None,
) -> BootstrapDraws:
    """Group-stratified nonparametric bootstrap of the full estimator.

    Replicate ``b`` draws from its own generator, spawned from ``seed`` with
    spawn key ``b``; the output therefore does not depend on ``threads``.
    """
    if int(n_boot) != n_boot or n_boot < 2:
        raise InvalidConfig(f"need at least 2 bootstrap replicates, got {n_boot!r}")
    n_boot = int(n_boot)
    seed = _check_seed(seed)
    groups = [ds.group_index(0), ds.group_index(1)]
    children = np.random.SeedSequence(seed).spawn(n_boot)

    def one(child):
        rng = np.random.default_rng(child)
        index = np.concatenate([idx[rng.integers(0, len(idx), size=len(idx))] for idx in groups])
        try:
            return estimator.estimate(ds.take(index))
        except EstimationError:
            return None

    results = ordered_map(one, children, threads)
    kept = [r for r in results if r is not None]
    dropped = n_boot - len(kept)
    if dropped > MAX_DROP_SHARE * n_boot or len(kept) < 2:
        raise TooManyDegenerateReplicates(dropped, n_boot)

    qtt_lb = qtt_ub = None
    if kept[0].qtt_table is not None:
        qtt_lb = np.array([[row.lb for row in r.qtt_table] for r in kept])
        qtt_ub = np.array([[row.ub for row in r.qtt_table] for r in kept])
    return BootstrapDraws(
        lb=np.array([r.lb for r in kept]),
        ub=np.array([r.ub for r in kept]),
        pi0=np.array([r.proportions.pi0 for r in kept]),
        pi1=np.array([r.proportions.pi1 for r in kept]),
        qtt_lb=qtt_lb,
        qtt_ub=qtt_ub,
        n_boot=n_boot,
        dropped=dropped,
        seed=seed,
    )


def bootstrap_sigmas(ds, estimator, n_boot, seed=0, threads=None) -> tuple[float, float]:
    """Bootstrap standard deviations of the lower and upper bound estimates."""
    return bootstrap(ds, estimator, n_boot, seed, threads).sigmas()


def _check_alpha(alpha):
    if not (isinstance(alpha, (int, float)) and 0.5 < alpha < 1.0):
        raise InvalidAlpha(f"coverage level must lie in (0.5, 1), got {alpha!r}")


def imbens_manski_z(lb, ub, sigma_lb, sigma_ub, n, alpha=0.95) -> float:
    """Critical value for a confidence interval covering a partially identified point.

    Solves ``Phi(z + sqrt(n) * (ub - lb) / max(sigma)) - Phi(-z) = alpha``.
    The root lies between the one-sided and the two-sided normal critical
    values. With both sigmas zero the two-sided value is returned.
    """
    _check_alpha(alpha)
    if ub < lb:
        raise ValueError(f"upper bound {ub!r} is below lower bound {lb!r}")
    if n <= 0:
        raise ValueError("n must be positive")
    one_sided = float(ndtri(alpha))
    two_sided = float(ndtri((1.0 + alpha) / 2.0))
    scale = max(sigma_lb, sigma_ub)
    if scale <= 0:
        return two_sided
    shift = math.sqrt(n) * (ub - lb) / scale
    if not math.isfinite(shift):
        return one_sided

    def f(z):
        return float(ndtr(z + shift) - ndtr(-z)) - alpha

    lo, hi = one_sided - 1e-9, two_sided + 1e-9
    f_lo, f_hi = f(lo), f(hi)
    if f_lo >= 0:
        return lo
    if f_hi <= 0:
        return hi
    return float(brentq(f, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200))


@dataclass(frozen=True)
class CiInterval:
    """Confidence interval for a partially identified effect.

    ``sigma_lb``/``sigma_ub`` are on the root-n scale (``se * sqrt(n)``);
    ``se_lb``/``se_ub`` are the bootstrap standard errors themselves.
    """

    lo: float
    hi: float
    alpha: float
    z_alpha: float
    sigma_lb: float
    sigma_ub: float
    se_lb: float
    se_ub: float
    n: int
    n_boot: Optional[int] = None
    seed: Optional[int] = None

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def _interval(lb, ub, se_lb, se_ub, n, alpha):
    root_n = math.sqrt(n)
    sig_lb, sig_ub = se_lb * root_n, se_ub * root_n
    z = imbens_manski_z(lb, ub, sig_lb, sig_ub, n, alpha)
    return lb - z * se_lb, ub + z * se_ub, z, sig_lb, sig_ub


def confidence_interval(
    bounds: BoundsResult,
    sigmas,
    n: Optional[int] = None,
    alpha: float = 0.95,
    n_boot: Optional[int] = None,
    seed: Optional[int] = None,
) -> CiInterval:
    """Imbens-Manski interval around ``[bounds.lb, bounds.ub]``.

    ``sigmas`` are the standard errors of the two bound estimates (bootstrap
    standard deviations). ``n`` defaults to the number of rows that entered
    the bound estimation.
    """
    se_lb, se_ub = (float(s) for s in sigmas)
    if se_lb < 0 or se_ub < 0:
        raise ValueError("standard errors must be non-negative")
    n = int(bounds.n_used if n is None else n)
    lo, hi, z, sig_lb, sig_ub = _interval(bounds.lb, bounds.ub, se_lb, se_ub, n, alpha)
    return CiInterval(
        lo=lo, hi=hi, alpha=alpha, z_alpha=z,
        sigma_lb=sig_lb, sigma_ub=sig_ub, se_lb=se_lb, se_ub=se_ub,
        n=n, n_boot=n_boot, seed=seed,
    )


def pointwise_intervals(bounds: BoundsResult, draws: BootstrapDraws, alpha: float = 0.95) -> list[dict]:
    """Per-quantile intervals for the rows of ``bounds.qtt_table``."""
    if bounds.qtt_table is None or draws.qtt_lb is None:
        raise InvalidConfig("pointwise intervals need quantile-effect bounds")
    se_lb, se_ub = draws.qtt_sigmas()
    rows = []
    for k, row in enumerate(bounds.qtt_table):
        lo, hi, z, _, _ = _interval(row.lb, row.ub, float(se_lb[k]), float(se_ub[k]), bounds.n_used, alpha)
        rows.append({"q": row.q, "lb": row.lb, "ub": row.ub, "ci_lo": lo, "ci_hi": hi, "z_alpha": z})
    return rows
