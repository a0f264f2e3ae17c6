"""Bound estimators for the effect on treated Always-Observed units.

Two families:

* trimming bounds on the mean effect, built on first differences ``y2 - y1``
  and valid under parallel trends within the Always-Observed stratum;
* changes-in-changes quantile bounds, valid when the untreated outcome is a
  monotone function of a time-stable unobservable, averaged over a grid to
  bound the mean effect.

Complete-case contrasts and the difference-in-differences of selection
rates are provided as diagnostics.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import PanelDataset, observed_diffs
from .empirical import Ecdf, count_clamps, ecdf_eval, quantile, trimmed_mean_lower, trimmed_mean_upper
from .errors import EmptySelection, InvalidConfig
from .strata import StrataProportions

__all__ = [
    "BoundsResult",
    "QttRow",
    "did_att_bounds",
    "cic_qtt_bounds",
    "cic_qtt_curve",
    "cic_att_bounds",
    "naive_did",
    "naive_cic",
    "selection_did",
    "quantile_grid",
    "DEFAULT_GRID",
]

DEFAULT_GRID = 99


@dataclass(frozen=True)
class QttRow:
    q: float
    lb: float
    ub: float


@dataclass(frozen=True)
class BoundsResult:
    lb: float
    ub: float
    method: str  # "DiD" or "CiC"
    estimand: str  # "ATT_AO" or "QTT_AO"
    proportions: StrataProportions
    qtt_table: Optional[tuple[QttRow, ...]] = None
    clamp_events: int = 0
    n_used: int = 0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def width(self) -> float:
        return self.ub - self.lb

    def contains(self, value: float) -> bool:
        return self.lb <= value <= self.ub


def _check_p(p: StrataProportions):
    for name in ("pi0", "pi1"):
        v = getattr(p, name)
        if not 0.0 <= v <= 1.0:
            raise InvalidConfig(f"{name} must lie in [0, 1], got {v!r}")


def did_att_bounds(ds: PanelDataset, p: StrataProportions) -> BoundsResult:
    """Trimming bounds on the mean effect from observed first differences.

    The treated distribution is trimmed to its ``pi1`` share and the control
    distribution to its ``pi0`` share, each from the side that makes the
    contrast extreme.
    """
    _check_p(p)
    treated = Ecdf(observed_diffs(ds, 1))
    control = Ecdf(observed_diffs(ds, 0))
    lb = trimmed_mean_lower(treated, p.pi1) - trimmed_mean_upper(control, p.pi0)
    ub = trimmed_mean_upper(treated, p.pi1) - trimmed_mean_lower(control, p.pi0)
    return BoundsResult(
        lb=lb, ub=ub, method="DiD", estimand="ATT_AO", proportions=p,
        n_used=treated.n + control.n,
    )


@dataclass(frozen=True)
class _CicSamples:
    y2_treated: Ecdf
    y1_treated: Ecdf
    y2_control: Ecdf
    y1_control: Ecdf

    @classmethod
    def from_dataset(cls, ds: PanelDataset) -> "_CicSamples":
        out = {}
        for g, label in ((1, "treated"), (0, "control")):
            mask = (ds.g == g) & (ds.s2 == 1)
            if not mask.any():
                raise EmptySelection(f"no units with s2 = 1 in group {g}")
            out[f"y2_{label}"] = Ecdf(ds.y2[mask])
            out[f"y1_{label}"] = Ecdf(ds.y1[mask])
        return cls(**out)

    @property
    def n_used(self) -> int:
        return self.y2_treated.n + self.y2_control.n


def _curve(s: _CicSamples, p: StrataProportions, q: np.ndarray):
    """Vectorized lower/upper quantile-effect bounds and the clamp count."""
    pi0, pi1 = p.pi0, p.pi1
    # 1 - pi first, so that pi = 1 reproduces q exactly
    slack1 = 1.0 - pi1
    slack0 = 1.0 - pi0
    lo_arg = q * pi1
    hi_arg = q * pi1 + slack1

    inner_lb = ecdf_eval(s.y1_control, quantile(s.y1_treated, hi_arg)) + slack0
    inner_ub = ecdf_eval(s.y1_control, quantile(s.y1_treated, lo_arg)) - slack0
    lb = quantile(s.y2_treated, lo_arg) - quantile(s.y2_control, inner_lb)
    ub = quantile(s.y2_treated, hi_arg) - quantile(s.y2_control, inner_ub)
    clamps = count_clamps(lo_arg) + count_clamps(hi_arg) + count_clamps(inner_lb) + count_clamps(inner_ub)
    return np.asarray(lb, dtype=float), np.asarray(ub, dtype=float), clamps


def cic_qtt_curve(ds: PanelDataset, p: StrataProportions, qs):
    """Quantile-effect bounds at every ``q`` in ``qs``.

    Returns ``(lb, ub, clamp_events)`` with array bounds.
    """
    _check_p(p)
    qs = np.asarray(qs, dtype=float)
    if np.any((qs <= 0.0) | (qs >= 1.0)):
        raise InvalidConfig("quantile levels must lie strictly between 0 and 1")
    return _curve(_CicSamples.from_dataset(ds), p, qs)


def cic_qtt_bounds(ds: PanelDataset, p: StrataProportions, q: float) -> tuple[float, float]:
    """Lower and upper bound on the quantile effect at level ``q``."""
    lb, ub, _ = cic_qtt_curve(ds, p, np.array([q]))
    return float(lb[0]), float(ub[0])


def quantile_grid(grid_size: int = DEFAULT_GRID) -> np.ndarray:
    """Interior grid ``k / (grid_size + 1)``, ``k = 1..grid_size``."""
    if int(grid_size) != grid_size or grid_size < 3:
        raise InvalidConfig(f"grid size must be an integer >= 3, got {grid_size!r}")
    grid_size = int(grid_size)
    return np.arange(1, grid_size + 1) / (grid_size + 1)


def _grid_mean(values: np.ndarray) -> float:
    # rounding can push the mean of equal terms one ulp outside their range
    return float(np.clip(np.mean(values), values.min(), values.max()))


def cic_att_bounds(ds: PanelDataset, p: StrataProportions, grid_size: int = DEFAULT_GRID) -> BoundsResult:
    """Mean-effect bounds as grid averages of the quantile-effect bounds."""
    _check_p(p)
    qs = quantile_grid(grid_size)
    samples = _CicSamples.from_dataset(ds)
    lb, ub, clamps = _curve(samples, p, qs)
    table = tuple(QttRow(float(q), float(a), float(b)) for q, a, b in zip(qs, lb, ub))
    return BoundsResult(
        lb=_grid_mean(lb), ub=_grid_mean(ub),
        method="CiC", estimand="ATT_AO", proportions=p,
        qtt_table=table, clamp_events=clamps, n_used=samples.n_used,
    )


def naive_did(ds: PanelDataset) -> float:
    """Complete-case difference in mean first differences."""
    return float(np.mean(observed_diffs(ds, 1)) - np.mean(observed_diffs(ds, 0)))


def naive_cic(ds: PanelDataset, grid_size: int = DEFAULT_GRID) -> float:
    """Complete-case changes-in-changes mean effect (no trimming)."""
    res = cic_att_bounds(ds, StrataProportions.known(1.0, 1.0), grid_size)
    return res.lb


def selection_did(ds: PanelDataset, source_index: Optional[int] = None) -> float:
    """Difference-in-differences of selection rates over all rows.

    ``source_index`` is 1-based and picks one selection source; ``None`` uses
    the overall indicator.
    """
    if source_index is None:
        a1, a2 = ds.s1, ds.s2
    else:
        j = int(source_index)
        if not 1 <= j <= ds.n_sources:
            raise InvalidConfig(f"source index must be in 1..{ds.n_sources}, got {source_index!r}")
        a1, a2 = ds.src_t1[:, j - 1], ds.src_t2[:, j - 1]
    t = ds.tallies
    if min(t.n0, t.n1) == 0:
        raise EmptySelection("both groups must be non-empty")
    treated = ds.g == 1
    control = ~treated
    change1 = (int(a2[treated].sum()) - int(a1[treated].sum())) / t.n1
    change0 = (int(a2[control].sum()) - int(a1[control].sum())) / t.n0
    return change1 - change0
