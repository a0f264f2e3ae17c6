"""Synthetic two-period panels with known principal strata.

A unit's latent selection score and its outcome level are jointly Gaussian
with correlation ``selection_link``. The score decides pre-period attrition
and, among units present at baseline, the principal stratum; the level
drives the outcome through an additive or exponential outcome function.
Because strata and both potential outcomes are materialized, the true
effect on treated Always-Observed units is known by construction.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.special import ndtr, ndtri

from ._parallel import ordered_map
from .bounds import naive_did, quantile_grid, selection_did
from .dataset import Direction, PanelDataset, parse_directions
from .errors import EstimationError, InvalidConfig
from .inference import Estimator, bootstrap, confidence_interval

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

__all__ = [
    "STRATA",
    "GroupSpec",
    "OutcomeModel",
    "Effect",
    "DgpConfig",
    "Sample",
    "SimTruth",
    "generate",
    "true_values",
    "exact_proportions",
    "closed_form_att",
    "is_identified",
    "coverage_study",
    "load_config",
]

STRATA = ("AO", "NO", "OC", "OT")
# latent order of strata along the selection score, lowest first
_LATENT_ORDER = ("NO", "OC", "OT", "AO")
_CODE = {name: k for k, name in enumerate(_LATENT_ORDER)}
NO, OC, OT, AO = (_CODE[s] for s in _LATENT_ORDER)
ORACLE_STREAM = 0x5EED  # spawn key separating oracle draws from sample draws


def _strata_dict(value) -> dict:
    if value is None:
        return {"AO": 1.0, "NO": 0.0, "OC": 0.0, "OT": 0.0}
    if isinstance(value, Mapping):
        unknown = set(value) - set(STRATA)
        if unknown:
            raise InvalidConfig(f"unknown strata {sorted(unknown)}")
        out = {s: float(value.get(s, 0.0)) for s in STRATA}
    else:
        vals = [float(v) for v in value]
        if len(vals) != 4:
            raise InvalidConfig("strata probabilities need four entries (AO, NO, OC, OT)")
        out = dict(zip(STRATA, vals))
    if any(v < 0 for v in out.values()):
        raise InvalidConfig("strata probabilities must be non-negative")
    if abs(sum(out.values()) - 1.0) > 1e-9:
        raise InvalidConfig(f"strata probabilities must sum to 1, got {sum(out.values())!r}")
    return out


@dataclass(frozen=True)
class GroupSpec:
    """Per-group primitives.

    ``strata`` holds stratum probabilities among units observed at baseline;
    ``baseline_observed`` is the probability of being observed at baseline.
    The outcome level is normal with mean ``level_mean`` and sd ``level_sd``.
    """

    strata: dict = field(default_factory=lambda: _strata_dict(None))
    baseline_observed: float = 1.0
    level_mean: float = 0.0
    level_sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "strata", _strata_dict(self.strata))
        if not 0.0 < self.baseline_observed <= 1.0:
            raise InvalidConfig("baseline_observed must lie in (0, 1]")
        if self.level_sd < 0:
            raise InvalidConfig("level_sd must be non-negative")


@dataclass(frozen=True)
class OutcomeModel:
    """Untreated outcome as a function of the latent level and the period.

    ``additive``: ``level + period_shift[t-1]``. ``nonlinear``:
    ``period_shift[t-1] + exp(curvature[t-1] * level)``, strictly increasing
    when the curvature is positive.
    """

    kind: str = "additive"
    period_shift: tuple = (0.0, 0.0)
    curvature: tuple = (1.0, 1.0)
    noise_sd: float = 1.0

    def __post_init__(self):
        if self.kind not in ("additive", "nonlinear"):
            raise InvalidConfig(f"unknown outcome model {self.kind!r}")
        object.__setattr__(self, "period_shift", tuple(float(v) for v in self.period_shift))
        object.__setattr__(self, "curvature", tuple(float(v) for v in self.curvature))
        if len(self.period_shift) != 2 or len(self.curvature) != 2:
            raise InvalidConfig("period_shift and curvature need one value per period")
        if self.noise_sd < 0:
            raise InvalidConfig("noise_sd must be non-negative")
        grid = np.linspace(-6.0, 6.0, 241)
        for t in (1, 2):
            if not np.all(np.diff(self.evaluate(grid, t)) > 0):
                raise InvalidConfig(f"outcome function is not strictly increasing at t={t}")

    def evaluate(self, level, t: int):
        lam = self.period_shift[t - 1]
        if self.kind == "additive":
            return level + lam
        return lam + np.exp(self.curvature[t - 1] * level)


@dataclass(frozen=True)
class Effect:
    """Treatment effect ``intercept + slope * level`` added to the post-period outcome."""

    kind: str = "constant"
    intercept: float = 0.0
    slope: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear"):
            raise InvalidConfig(f"unknown effect kind {self.kind!r}")
        if self.kind == "constant" and self.slope != 0:
            raise InvalidConfig("a constant effect cannot have a slope")

    def __call__(self, level):
        return self.intercept + self.slope * np.asarray(level)


def _shares(values, J, label):
    if J == 1:
        return (1.0,)
    if not values:
        return tuple([1.0 / J] * J)
    vals = tuple(float(v) for v in values)
    if len(vals) != J or any(v < 0 for v in vals) or abs(sum(vals) - 1.0) > 1e-9:
        raise InvalidConfig(f"{label} must be {J} non-negative shares summing to 1")
    return vals


@dataclass(frozen=True)
class DgpConfig:
    """Complete description of a data-generating process.

    ``directions`` fixes the monotonicity direction of each selection source;
    with a single entry the data carry only the overall indicator.
    ``stratum_shift`` adds a post-period outcome shift to units of the named
    strata, which breaks ignorability of selection for complete-case
    estimators without touching the Always-Observed units.
    """

    n: int = 2000
    p_treat: float = 0.5
    control: GroupSpec = field(default_factory=GroupSpec)
    treated: GroupSpec = field(default_factory=GroupSpec)
    outcome: OutcomeModel = field(default_factory=OutcomeModel)
    effect: Effect = field(default_factory=Effect)
    selection_link: float = 0.0
    stratum_shift: dict = field(default_factory=dict)
    directions: tuple = (Direction.POSITIVE,)
    no_shares: tuple = ()
    baseline_shares: tuple = ()
    seed: int = 0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 4:
            raise InvalidConfig("n must be an integer >= 4")
        if not 0.0 < self.p_treat < 1.0:
            raise InvalidConfig("p_treat must lie in (0, 1)")
        if not -1.0 < self.selection_link < 1.0:
            raise InvalidConfig("selection_link must lie in (-1, 1)")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidConfig("seed must be a non-negative integer")
        dirs = parse_directions(self.directions)
        if not dirs:
            raise InvalidConfig("at least one selection source is required")
        object.__setattr__(self, "directions", dirs)
        shift = dict(self.stratum_shift or {})
        if set(shift) - {"NO", "OC", "OT"}:
            raise InvalidConfig("stratum_shift accepts NO, OC and OT only")
        object.__setattr__(self, "stratum_shift", {k: float(v) for k, v in shift.items()})
        J = len(dirs)
        object.__setattr__(self, "no_shares", _shares(self.no_shares, J, "no_shares"))
        object.__setattr__(self, "baseline_shares", _shares(self.baseline_shares, J, "baseline_shares"))
        has_pos = Direction.POSITIVE in dirs
        has_neg = Direction.NEGATIVE in dirs
        for label, spec in (("control", self.control), ("treated", self.treated)):
            if spec.strata["OT"] > 0 and not has_pos:
                raise InvalidConfig(f"{label}: OT mass needs a positive-direction source")
            if spec.strata["OC"] > 0 and not has_neg:
                raise InvalidConfig(f"{label}: OC mass needs a negative-direction source")

    @property
    def n_sources(self) -> int:
        return len(self.directions)

    def group(self, g: int) -> GroupSpec:
        return self.treated if g == 1 else self.control

    def replace(self, **changes) -> "DgpConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, d: Mapping) -> "DgpConfig":
        d = dict(d)
        d.pop("study", None)
        groups = d.pop("groups", {}) or {}
        unknown_groups = set(groups) - {"control", "treated"}
        if unknown_groups:
            raise InvalidConfig(f"unknown groups {sorted(unknown_groups)}")
        kwargs = {}
        try:
            for name in ("control", "treated"):
                if name in groups:
                    kwargs[name] = GroupSpec(**groups[name])
            if "outcome" in d:
                o = dict(d.pop("outcome"))
                if "model" in o:
                    o["kind"] = o.pop("model")
                kwargs["outcome"] = OutcomeModel(**o)
            if "effect" in d:
                kwargs["effect"] = Effect(**d.pop("effect"))
            if "sources" in d:
                src = dict(d.pop("sources"))
                for key in ("directions", "no_shares", "baseline_shares"):
                    if key in src:
                        kwargs[key] = tuple(src.pop(key))
                if src:
                    raise InvalidConfig(f"unknown source keys {sorted(src)}")
            kwargs.update(d)
            return cls(**kwargs)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None

    def to_dict(self) -> dict:
        def grp(s: GroupSpec):
            return {"strata": dict(s.strata), "baseline_observed": s.baseline_observed,
                    "level_mean": s.level_mean, "level_sd": s.level_sd}

        return {
            "n": self.n,
            "p_treat": self.p_treat,
            "seed": self.seed,
            "selection_link": self.selection_link,
            "stratum_shift": dict(self.stratum_shift),
            "groups": {"control": grp(self.control), "treated": grp(self.treated)},
            "outcome": {"model": self.outcome.kind, "period_shift": list(self.outcome.period_shift),
                        "curvature": list(self.outcome.curvature), "noise_sd": self.outcome.noise_sd},
            "effect": {"kind": self.effect.kind, "intercept": self.effect.intercept, "slope": self.effect.slope},
            "sources": {"directions": [d.value for d in self.directions],
                        "no_shares": list(self.no_shares),
                        "baseline_shares": list(self.baseline_shares)},
        }


def load_config(path) -> tuple[DgpConfig, dict]:
    """Read a TOML simulation file; returns the DGP and its ``[study]`` table."""
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from None
    study = dict(raw.get("study", {}))
    return DgpConfig.from_dict(raw), study


# ------------------------------------------------------------------ sampler


@dataclass(frozen=True)
class Sample:
    """A generated panel plus the latent quantities it was built from."""

    dataset: PanelDataset
    strata: np.ndarray  # stratum names, per unit
    y2_untreated: np.ndarray
    y2_treated: np.ndarray
    s2_untreated: np.ndarray
    s2_treated: np.ndarray

    @property
    def sample_att(self) -> float:
        """Average effect over treated Always-Observed units of this draw."""
        mask = (self.dataset.g == 1) & (self.strata == "AO")
        if not mask.any():
            return float("nan")
        return float(np.mean(self.y2_treated[mask] - self.y2_untreated[mask]))


def _draw(cfg: DgpConfig, n: int, rng: np.random.Generator) -> dict:
    g = (rng.random(n) < cfg.p_treat).astype(np.int8)
    z = rng.standard_normal((n, 2))
    link = cfg.selection_link
    z_sel = z[:, 0]
    z_out = link * z[:, 0] + math.sqrt(1.0 - link * link) * z[:, 1]
    v = ndtr(z_sel)

    base = np.where(g == 1, cfg.treated.baseline_observed, cfg.control.baseline_observed)
    s1 = v >= 1.0 - base
    w = np.clip((v - (1.0 - base)) / base, 0.0, 1.0)
    code = np.full(n, NO, dtype=np.int8)
    for grp in (0, 1):
        spec = cfg.group(grp)
        cuts = np.cumsum([spec.strata[s] for s in _LATENT_ORDER])[:-1]
        sel = (g == grp) & s1
        code[sel] = np.searchsorted(cuts, w[sel], side="right")

    centre = np.where(g == 1, cfg.treated.level_mean, cfg.control.level_mean)
    sd = np.where(g == 1, cfg.treated.level_sd, cfg.control.level_sd)
    level = centre + sd * z_out
    noise = cfg.outcome.noise_sd * rng.standard_normal((n, 2))
    level1 = level + noise[:, 0]
    level2 = level + noise[:, 1]

    y1 = cfg.outcome.evaluate(level1, 1)
    y2_0 = cfg.outcome.evaluate(level2, 2)
    for name, delta in cfg.stratum_shift.items():
        y2_0 = y2_0 + np.where(code == _CODE[name], delta, 0.0)
    y2_1 = y2_0 + cfg.effect(level2)

    s2_0 = s1 & ((code == AO) | (code == OC))
    s2_1 = s1 & ((code == AO) | (code == OT))
    return dict(g=g, s1=s1, code=code, y1=y1, y2_0=y2_0, y2_1=y2_1, s2_0=s2_0, s2_1=s2_1)


def _assign_sources(cfg: DgpConfig, d: dict, rng: np.random.Generator):
    """Per-source indicators; each unit fails at most one source."""
    n = len(d["g"])
    J = cfg.n_sources
    pos = [j for j, dr in enumerate(cfg.directions) if dr is Direction.POSITIVE]
    neg = [j for j, dr in enumerate(cfg.directions) if dr is Direction.NEGATIVE]
    r = rng.random(n)
    failing = np.full(n, -1, dtype=np.int64)

    def pick(mask, candidates, shares=None):
        if shares is None:
            shares = [1.0 / len(candidates)] * len(candidates)
        cuts = np.cumsum(shares)[:-1]
        failing[mask] = np.asarray(candidates)[np.searchsorted(cuts, r[mask], side="right")]

    code, s1, g = d["code"], d["s1"], d["g"]
    pick(~s1, list(range(J)), cfg.baseline_shares)
    pick(s1 & (code == NO), list(range(J)), cfg.no_shares)
    if pos:
        pick(s1 & (code == OT), pos)
    if neg:
        pick(s1 & (code == OC), neg)

    src_t1 = np.ones((n, J), dtype=np.int8)
    src_t2 = np.ones((n, J), dtype=np.int8)
    rows = np.arange(n)
    gone_t1 = ~s1
    src_t1[rows[gone_t1], failing[gone_t1]] = 0
    s2 = np.where(g == 1, d["s2_1"], d["s2_0"])
    gone_t2 = ~s2
    src_t2[rows[gone_t2], failing[gone_t2]] = 0
    return src_t1, src_t2


def _to_sample(cfg: DgpConfig, d: dict, rng) -> Sample:
    g = d["g"]
    s1 = d["s1"]
    s2 = np.where(g == 1, d["s2_1"], d["s2_0"])
    y2_obs = np.where(g == 1, d["y2_1"], d["y2_0"])
    kwargs = {}
    if cfg.n_sources > 1:
        kwargs["src_t1"], kwargs["src_t2"] = _assign_sources(cfg, d, rng)
    ds = PanelDataset.from_arrays(
        g=g,
        y1=np.where(s1, d["y1"], np.nan),
        y2=np.where(s2, y2_obs, np.nan),
        s1=s1.astype(np.int8),
        s2=s2.astype(np.int8),
        source_directions=cfg.directions,
        check=False,
        **kwargs,
    )
    names = np.array(_LATENT_ORDER)[d["code"]]
    return Sample(
        dataset=ds, strata=names,
        y2_untreated=d["y2_0"], y2_treated=d["y2_1"],
        s2_untreated=d["s2_0"], s2_treated=d["s2_1"],
    )


def _sample(cfg: DgpConfig, rng: np.random.Generator) -> Sample:
    d = _draw(cfg, cfg.n, rng)
    return _to_sample(cfg, d, rng)


def generate(cfg: DgpConfig) -> Sample:
    """Draw one panel of ``cfg.n`` units using ``cfg.seed``."""
    return _sample(cfg, np.random.default_rng(np.random.SeedSequence(cfg.seed)))


# ------------------------------------------------------------------ oracle


@dataclass(frozen=True)
class SimTruth:
    true_att_ao: float
    true_qtt_ao: tuple  # (q, value) pairs
    true_pi0: float
    true_pi1: float
    att_mc_se: float
    oracle_n: int


def exact_proportions(cfg: DgpConfig) -> tuple[float, float]:
    """Population Always-Observed shares ``(pi0, pi1)`` implied by the strata."""
    c, t = cfg.control.strata, cfg.treated.strata
    obs0 = c["AO"] + c["OC"]
    obs1 = t["AO"] + t["OT"]
    if obs0 == 0 or obs1 == 0:
        raise InvalidConfig("a group has no post-period observed units")
    return c["AO"] / obs0, t["AO"] / obs1


def is_identified(cfg: DgpConfig) -> bool:
    """True when the imputation of counterfactual selection is exact for ``cfg``.

    Needs equal stratum probabilities across groups; with several sources the
    baseline attrition must match as well.
    """
    same = all(abs(cfg.control.strata[s] - cfg.treated.strata[s]) < 1e-12 for s in STRATA)
    if cfg.n_sources > 1:
        same = same and abs(cfg.control.baseline_observed - cfg.treated.baseline_observed) < 1e-12
    return same


def closed_form_att(cfg: DgpConfig) -> float:
    """Effect on treated Always-Observed units from the normal closed form.

    Always-Observed treated units are those whose selection score exceeds
    ``c = Phi^-1(1 - baseline * P(AO))``; the mean outcome level above a
    normal threshold follows from the inverse Mills ratio.
    """
    spec = cfg.treated
    mass = spec.baseline_observed * spec.strata["AO"]
    if mass <= 0:
        raise InvalidConfig("treated group has no Always-Observed units")
    if mass >= 1.0:
        mills = 0.0
    else:
        c = float(ndtri(1.0 - mass))
        mills = math.exp(-0.5 * c * c) / math.sqrt(2 * math.pi) / mass
    mean_level = spec.level_mean + spec.level_sd * cfg.selection_link * mills
    return float(cfg.effect.intercept + cfg.effect.slope * mean_level)


def true_values(cfg: DgpConfig, oracle_n: int = 1_000_000, grid_size: int = 99) -> SimTruth:
    """Brute-force truth from ``oracle_n`` draws with all potential outcomes kept."""
    if oracle_n < 100_000:
        raise InvalidConfig("oracle_n must be at least 100000")
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(ORACLE_STREAM,)))
    d = _draw(cfg, int(oracle_n), rng)
    g1 = d["g"] == 1
    target = g1 & (d["code"] == AO)
    if not target.any():
        raise InvalidConfig("no treated Always-Observed units in the oracle draw")
    effect = d["y2_1"][target] - d["y2_0"][target]
    qs = quantile_grid(grid_size)
    q1 = np.quantile(d["y2_1"][target], qs, method="inverted_cdf")
    q0 = np.quantile(d["y2_0"][target], qs, method="inverted_cdf")
    g0 = ~g1
    pi1 = np.count_nonzero(target) / np.count_nonzero(g1 & d["s2_1"])
    pi0 = np.count_nonzero(g0 & (d["code"] == AO)) / np.count_nonzero(g0 & d["s2_0"])
    return SimTruth(
        true_att_ao=float(effect.mean()),
        true_qtt_ao=tuple((float(q), float(a - b)) for q, a, b in zip(qs, q1, q0)),
        true_pi0=float(pi0),
        true_pi1=float(pi1),
        att_mc_se=float(effect.std(ddof=1) / math.sqrt(effect.size)) if effect.size > 1 else 0.0,
        oracle_n=int(oracle_n),
    )


# ------------------------------------------------------------------ studies


def _summary(values) -> dict:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return {"mean": None, "sd": None}
    return {"mean": float(a.mean()), "sd": float(a.std(ddof=1)) if a.size > 1 else 0.0}


def coverage_study(
    cfg: DgpConfig,
    reps: int,
    estimator: Estimator,
    alpha: float = 0.95,
    n_boot: int = 199,
    seed: Optional[int] = None,
    truth: Optional[SimTruth] = None,
    oracle_n: int = 1_000_000,
    threads: Optional[int] = None,
    keep_draws: bool = False,
    tol: float = 1e-9,
) -> dict:
    """Repeat generate, estimate and interval construction ``reps`` times.

    Containment of the truth allows a slack of ``tol * max(1, |truth|)`` to
    absorb floating-point rounding in zero-width bounds. ``n_boot = 0``
    skips the bootstrap and reports no interval coverage.
    """
    if int(reps) != reps or reps < 1:
        raise InvalidConfig(f"reps must be a positive integer, got {reps!r}")
    if n_boot and n_boot < 2:
        raise InvalidConfig("n_boot must be 0 or at least 2")
    seed = cfg.seed if seed is None else seed
    if int(seed) != seed or seed < 0:
        raise InvalidConfig("seed must be a non-negative integer")
    if truth is None:
        truth = true_values(cfg, oracle_n, estimator.grid_size)
    exact_pi0, exact_pi1 = exact_proportions(cfg)
    target = truth.true_att_ao
    slack = tol * max(1.0, abs(target))
    children = np.random.SeedSequence(int(seed)).spawn(int(reps))

    def one(child):
        data_seq, boot_seq = child.spawn(2)
        sample = _sample(cfg, np.random.default_rng(data_seq))
        ds = sample.dataset
        try:
            est = estimator.estimate(ds)
            row = {
                "lb": est.lb, "ub": est.ub,
                "pi0": est.proportions.pi0, "pi1": est.proportions.pi1,
                "clipped": bool(est.proportions.pi0_clipped or est.proportions.pi1_clipped),
                "clamps": est.clamp_events,
                "naive_did": naive_did(ds),
                "selection_did": selection_did(ds),
                "dropped": 0,
            }
            if n_boot:
                draws = bootstrap(ds, estimator, n_boot, int(boot_seq.generate_state(1)[0]), threads=1)
                ci = confidence_interval(est, draws.sigmas(), alpha=alpha)
                row.update(ci_lo=ci.lo, ci_hi=ci.hi, dropped=draws.dropped)
            return row
        except EstimationError as exc:
            return {"error": type(exc).__name__}

    rows = ordered_map(one, children, threads)
    ok = [r for r in rows if "error" not in r]
    failed = len(rows) - len(ok)

    def col(key):
        return np.array([r[key] for r in ok], dtype=float)

    report = {
        "reps": int(reps),
        "failed_reps": failed,
        "n": cfg.n,
        "method": estimator.method,
        "alpha": alpha,
        "n_boot": int(n_boot),
        "seed": int(seed),
        "identified": is_identified(cfg),
        "truth": {
            "att_ao": target,
            "att_mc_se": truth.att_mc_se,
            "pi0": exact_pi0,
            "pi1": exact_pi1,
            "pi0_oracle": truth.true_pi0,
            "pi1_oracle": truth.true_pi1,
            "oracle_n": truth.oracle_n,
        },
        "config": cfg.to_dict(),
    }
    if not ok:
        report.update(coverage=None, bounds_cover=None, ci_cover=None)
        return report
    lb, ub = col("lb"), col("ub")
    bounds_cover = float(np.mean((lb - slack <= target) & (target <= ub + slack)))
    report["bounds_cover"] = bounds_cover
    if n_boot:
        lo, hi = col("ci_lo"), col("ci_hi")
        report["ci_cover"] = float(np.mean((lo - slack <= target) & (target <= hi + slack)))
        report["dropped_replicates"] = int(col("dropped").sum())
    else:
        report["ci_cover"] = None
    report["coverage"] = report["ci_cover"] if n_boot else bounds_cover
    pi0, pi1 = col("pi0"), col("pi1")
    report.update(
        lb=_summary(lb),
        ub=_summary(ub),
        pi0={**_summary(pi0), "rmse": float(np.sqrt(np.mean((pi0 - exact_pi0) ** 2)))},
        pi1={**_summary(pi1), "rmse": float(np.sqrt(np.mean((pi1 - exact_pi1) ** 2)))},
        naive_did=_summary(col("naive_did")),
        selection_did=_summary(col("selection_did")),
        clip_rate=float(np.mean(col("clipped"))),
        clamp_rate=float(np.mean(col("clamps"))),
    )
    if keep_draws:
        report["draws"] = {k: col(k) for k in ("lb", "ub", "pi0", "pi1", "naive_did", "selection_did")}
        if n_boot:
            report["draws"].update(ci_lo=col("ci_lo"), ci_hi=col("ci_hi"))
    return report
