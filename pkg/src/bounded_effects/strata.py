"""Always-Observed shares and principal-strata bookkeeping.

Counterfactual post-period selection rates are imputed with a
changes-in-changes ratio: a group's baseline selection rate scaled by the
other group's retention ratio. Combined with monotonicity, per source or
overall, that pins down the share of Always-Observed units among the
post-period observed units of each group.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence

from .dataset import Direction, PanelDataset, parse_directions
from .errors import DegenerateDenominator, DirectionMissing, DivisionByZeroBaseline, InvalidConfig

__all__ = [
    "Stratum",
    "Excluded",
    "Imputation",
    "StrataProportions",
    "impute_counterfactual_selection",
    "proportions_single",
    "proportions_multi",
    "estimate_proportions",
    "classify_stratum",
]


class Stratum(str, Enum):
    AO = "AO"  # observed under both arms
    NO = "NO"  # observed under neither
    OC = "OC"  # observed only under control
    OT = "OT"  # observed only under treatment

    @classmethod
    def from_selection(cls, s0: int, s1: int) -> "Stratum":
        """Stratum of a unit with potential selections ``S(0) = s0``, ``S(1) = s1``."""
        return {(1, 1): cls.AO, (0, 0): cls.NO, (1, 0): cls.OC, (0, 1): cls.OT}[(int(s0), int(s1))]


# exclusion reasons reported by classify_stratum
MUTUAL_EXCLUSIVITY = "mutual-exclusivity"
NO_INTERSECTION = "no-intersection"
MONOTONICITY = "monotonicity"


@dataclass(frozen=True)
class Excluded:
    """A combination of per-source potential selections that cannot occur.

    ``reasons`` lists the violated rules; monotonicity entries carry the
    1-based source number, e.g. ``"monotonicity:2"``. ``overall`` is the
    stratum the combination would map to through the product rule.
    """

    reasons: tuple[str, ...]
    overall: Stratum


class Imputation(NamedTuple):
    value: float
    raw: float
    clipped: bool


def _clip01(x: float) -> tuple[float, bool]:
    if x < 0.0:
        return 0.0, True
    if x > 1.0:
        return 1.0, True
    return x, False


def impute_counterfactual_selection(s1_own: float, s1_other: float, s2_other: float) -> Imputation:
    """Missing post-period selection rate of one group.

    ``s1_own * s2_other / s1_other``: own baseline rate times the other
    group's retention ratio, clipped to ``[0, 1]``.

    >>> impute_counterfactual_selection(1.0, 0.2, 0.1).value
    0.5
    """
    for name, v in (("s1_own", s1_own), ("s1_other", s1_other), ("s2_other", s2_other)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be a probability, got {v!r}")
    if s1_other == 0:
        raise DivisionByZeroBaseline("baseline selection rate of the other group")
    raw = s1_own * s2_other / s1_other
    value, clipped = _clip01(raw)
    return Imputation(value, raw, clipped)


@dataclass(frozen=True)
class StrataProportions:
    pi0: float
    pi1: float
    pi0_raw: float
    pi1_raw: float
    pi0_clipped: bool = False
    pi1_clipped: bool = False
    # single source: (E[S2(0)|G=1], E[S2(1)|G=0]); multi source: one pair per source
    imputed_s2_counterfactual: tuple = ()
    method: str = "single"

    @classmethod
    def known(cls, pi0: float, pi1: float) -> "StrataProportions":
        """Proportions supplied by the caller rather than estimated."""
        return cls(pi0=pi0, pi1=pi1, pi0_raw=pi0, pi1_raw=pi1, method="fixed")

    def as_dict(self) -> dict:
        return {
            "pi0": self.pi0,
            "pi1": self.pi1,
            "pi0_raw": self.pi0_raw,
            "pi1_raw": self.pi1_raw,
            "pi0_clipped": self.pi0_clipped,
            "pi1_clipped": self.pi1_clipped,
        }


def _nonzero(value: float, label: str) -> float:
    if value == 0:
        raise DegenerateDenominator(label)
    return value


def proportions_single(ds: PanelDataset, direction) -> StrataProportions:
    """AO shares with one selection source and overall monotonicity.

    Positive monotonicity empties the OC stratum, so ``pi0 = 1`` and the
    treated share is the imputed untreated selection rate over the observed
    one; negative monotonicity is the mirror image.
    """
    (direction,) = parse_directions(direction) or (None,)
    if direction is None:
        raise DirectionMissing("a monotonicity direction is required")
    t = ds.tallies
    e11, e21 = t.mean_s(1, 1), t.mean_s(2, 1)
    e10, e20 = t.mean_s(1, 0), t.mean_s(2, 0)
    _nonzero(e10, "E[S1|G=0]")
    _nonzero(e11, "E[S1|G=1]")
    s20_treated = impute_counterfactual_selection(e11, e10, e20)
    s21_control = impute_counterfactual_selection(e10, e11, e21)
    if direction is Direction.POSITIVE:
        _nonzero(e21, "E[S2|G=1]")
        pi1_raw = (e11 / e21) * (e20 / e10)
        pi1, c1 = _clip01(pi1_raw)
        pi0_raw, pi0, c0 = 1.0, 1.0, False
    else:
        _nonzero(e20, "E[S2|G=0]")
        pi0_raw = (e10 / e20) * (e21 / e11)
        pi0, c0 = _clip01(pi0_raw)
        pi1_raw, pi1, c1 = 1.0, 1.0, False
    return StrataProportions(
        pi0=pi0, pi1=pi1, pi0_raw=pi0_raw, pi1_raw=pi1_raw,
        pi0_clipped=c0, pi1_clipped=c1,
        imputed_s2_counterfactual=(s20_treated.value, s21_control.value),
        method="single",
    )


def proportions_multi(ds: PanelDataset, directions=None) -> StrataProportions:
    """AO shares with J mutually exclusive sources, each monotone in its own direction.

    Positive sources contribute their imputed untreated attrition to the
    treated numerator and their observed attrition to the control one;
    negative sources the other way round. ``directions`` defaults to the
    dataset's configured ones.
    """
    dirs = parse_directions(directions) if directions is not None else ds.source_directions
    J = ds.n_sources
    if len(dirs) != J:
        raise DirectionMissing(f"need {J} source direction(s), got {len(dirs)}")
    t = ds.tallies
    e20, e21 = t.mean_s(2, 0), t.mean_s(2, 1)
    _nonzero(e20, "E[S2|G=0]")
    _nonzero(e21, "E[S2|G=1]")

    loss0 = 0.0  # summed attrition terms for the control group
    loss1 = 0.0
    imputed = []
    for j, d in enumerate(dirs):
        m10, m11 = t.mean_source(j, 1, 0), t.mean_source(j, 1, 1)
        m20, m21 = t.mean_source(j, 2, 0), t.mean_source(j, 2, 1)
        label = f"source {j + 1}"
        if d is Direction.POSITIVE:
            if m10 == 0:
                raise DivisionByZeroBaseline(f"E[s1|G=0] for {label}")
            cf = impute_counterfactual_selection(m11, m10, m20).value  # E[s2(0)|G=1]
            loss1 += 1.0 - cf
            loss0 += 1.0 - m20
            imputed.append((cf, m21))
        else:
            if m11 == 0:
                raise DivisionByZeroBaseline(f"E[s1|G=1] for {label}")
            cf = impute_counterfactual_selection(m10, m11, m21).value  # E[s2(1)|G=0]
            loss0 += 1.0 - cf
            loss1 += 1.0 - m21
            imputed.append((m20, cf))
    pi0_raw = (1.0 - loss0) / e20
    pi1_raw = (1.0 - loss1) / e21
    pi0, c0 = _clip01(pi0_raw)
    pi1, c1 = _clip01(pi1_raw)
    return StrataProportions(
        pi0=pi0, pi1=pi1, pi0_raw=pi0_raw, pi1_raw=pi1_raw,
        pi0_clipped=c0, pi1_clipped=c1,
        imputed_s2_counterfactual=tuple(imputed),
        method="multi",
    )


def estimate_proportions(ds: PanelDataset, directions=None) -> StrataProportions:
    """Dispatch: single-source formula for J = 1 without explicit sources, else multi."""
    dirs = parse_directions(directions) if directions is not None else ds.source_directions
    if not dirs:
        raise DirectionMissing("no monotonicity direction configured")
    if ds.n_sources == 1 and not ds.explicit_sources:
        if len(dirs) != 1:
            raise DirectionMissing(f"need 1 direction, got {len(dirs)}")
        return proportions_single(ds, dirs[0])
    return proportions_multi(ds, dirs)


def classify_stratum(
    per_source_pairs: Sequence[tuple[int, int]],
    directions: Optional[Sequence] = None,
):
    """Overall principal stratum from per-source ``(s^j(0), s^j(1))`` pairs.

    Returns a :class:`Stratum`, or :class:`Excluded` when the combination is
    ruled out by mutual exclusivity of sources, by the no-intersection rule
    (OT under one source and OC under another), or, when ``directions`` is
    given, by source-specific monotonicity.
    """
    pairs = [(int(a), int(b)) for a, b in per_source_pairs]
    if not pairs:
        raise InvalidConfig("need at least one source")
    J = len(pairs)
    dirs = parse_directions(directions) if directions is not None else ()
    if dirs and len(dirs) != J:
        raise DirectionMissing(f"need {J} direction(s), got {len(dirs)}")

    s0 = 1
    s1 = 1
    for a, b in pairs:
        s0 *= a
        s1 *= b
    overall = Stratum.from_selection(s0, s1)

    reasons = []
    if sum(a for a, _ in pairs) < J - 1 or sum(b for _, b in pairs) < J - 1:
        reasons.append(MUTUAL_EXCLUSIVITY)
    labels = [Stratum.from_selection(a, b) for a, b in pairs]
    if Stratum.OT in labels and Stratum.OC in labels:
        reasons.append(NO_INTERSECTION)
    for j, (label, d) in enumerate(zip(labels, dirs), start=1):
        if (d is Direction.POSITIVE and label is Stratum.OC) or (
            d is Direction.NEGATIVE and label is Stratum.OT
        ):
            reasons.append(f"{MONOTONICITY}:{j}")
    if reasons:
        return Excluded(tuple(reasons), overall)

    if all(lab is Stratum.AO for lab in labels):
        return Stratum.AO
    if Stratum.NO in labels:
        return Stratum.NO
    if Stratum.OT in labels:
        return Stratum.OT
    return Stratum.OC
