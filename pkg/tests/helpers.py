"""Shared fixtures: independent reference implementations and DGP presets.

The reference functions below are deliberately naive (plain loops over
sorted Python lists) so they share no code with the package.
"""
from __future__ import annotations

import math

import numpy as np

from bounded_effects.dataset import PanelDataset
from bounded_effects.simulate import DgpConfig, Effect, GroupSpec, OutcomeModel

# ------------------------------------------------------------ reference math


def ref_ecdf(values, y):
    return sum(1 for v in values if v <= y) / len(values)


def ref_quantile(values, q):
    vs = sorted(values)
    if q <= 0:
        return vs[0]
    if q > 1:
        return vs[-1]
    for y in vs:
        if ref_ecdf(vs, y) >= q:
            return y
    return vs[-1]


def ref_trim_lower(values, p):
    thr = ref_quantile(values, p)
    kept = [v for v in values if v <= thr]
    return math.fsum(kept) / len(kept)


def ref_trim_upper(values, p):
    thr = -ref_quantile([-v for v in values], p)
    kept = [v for v in values if v >= thr]
    return math.fsum(kept) / len(kept)


def ref_cic_qtt(y1_t, y2_t, y1_c, y2_c, pi0, pi1, q):
    """Composed step-function bounds for one quantile level."""
    s1, s0 = 1.0 - pi1, 1.0 - pi0
    lb = ref_quantile(y2_t, q * pi1) - ref_quantile(
        y2_c, ref_ecdf(y1_c, ref_quantile(y1_t, q * pi1 + s1)) + s0
    )
    ub = ref_quantile(y2_t, q * pi1 + s1) - ref_quantile(
        y2_c, ref_ecdf(y1_c, ref_quantile(y1_t, q * pi1)) - s0
    )
    return lb, ub


def ref_multi_proportions(rows, directions):
    """Always-Observed shares from tallies, evaluated term by term.

    ``rows`` are ``(g, [s^1_t1..], [s^1_t2..])`` tuples; directions are
    strings. Returns raw (unclipped) ``(pi0, pi1)``.
    """
    J = len(directions)

    def mean(g, t, j=None):
        sel = [r for r in rows if r[0] == g]
        if j is None:
            vals = [math.prod(r[t]) for r in sel]
        else:
            vals = [r[t][j] for r in sel]
        return sum(vals) / len(sel)

    num0 = 1.0
    num1 = 1.0
    for j in range(J):
        if directions[j] == "positive":
            num0 -= 1 - mean(0, 2, j)
            num1 -= 1 - mean(1, 1, j) * mean(0, 2, j) / mean(0, 1, j)
        else:
            num0 -= 1 - mean(0, 1, j) * mean(1, 2, j) / mean(1, 1, j)
            num1 -= 1 - mean(1, 2, j)
    return num0 / mean(0, 2), num1 / mean(1, 2)


# ------------------------------------------------------------ random panels


def random_panel(rng: np.random.Generator, n=None, attrition=True, ties=False, J=1) -> PanelDataset:
    """A valid random panel with both groups observed at t=2."""
    n = int(n or rng.integers(8, 60))
    g = np.zeros(n, dtype=np.int8)
    g[: n // 2] = 1
    rng.shuffle(g)
    if ties:
        y1 = rng.integers(0, 5, n).astype(float)
        y2 = rng.integers(0, 5, n).astype(float)
    else:
        y1 = rng.normal(0, 1, n) + g
        y2 = y1 + rng.normal(0.3, 1, n) + 0.5 * g
    s1 = np.ones(n, dtype=np.int8)
    s2 = np.ones(n, dtype=np.int8)
    if attrition:
        s1 = (rng.random(n) > 0.1).astype(np.int8)
        s2 = s1 * (rng.random(n) > 0.25).astype(np.int8)
        # keep at least two observed units per group and period
        for grp in (0, 1):
            idx = np.flatnonzero(g == grp)[:2]
            s1[idx] = 1
            s2[idx] = 1
    kwargs = {}
    if J > 1:
        fail = rng.integers(0, J, n)
        src_t1 = np.ones((n, J), dtype=np.int8)
        src_t2 = np.ones((n, J), dtype=np.int8)
        src_t1[s1 == 0, fail[s1 == 0]] = 0
        src_t2[s2 == 0, fail[s2 == 0]] = 0
        kwargs = dict(src_t1=src_t1, src_t2=src_t2)
    return PanelDataset.from_arrays(
        g=g,
        y1=np.where(s1 == 1, y1, np.nan),
        y2=np.where(s2 == 1, y2, np.nan),
        s1=s1,
        s2=s2,
        **kwargs,
    )


# ------------------------------------------------------------ DGP presets


def group(AO, NO, OC, OT, b=1.0, mean=0.0, sd=1.0):
    return GroupSpec(strata=dict(AO=AO, NO=NO, OC=OC, OT=OT), baseline_observed=b, level_mean=mean, level_sd=sd)


ADDITIVE = OutcomeModel("additive", (0.0, 0.3), noise_sd=1.0)
NONLINEAR = OutcomeModel("nonlinear", (0.0, 0.3), (0.6, 0.8), noise_sd=0.5)
SINGLE_POS = dict(AO=0.85, NO=0.05, OC=0.0, OT=0.10)
SINGLE_NEG = dict(AO=0.85, NO=0.05, OC=0.10, OT=0.0)
MULTI = dict(AO=0.80, NO=0.06, OC=0.06, OT=0.08)


def _g(strata, **kw):
    return group(strata["AO"], strata["NO"], strata["OC"], strata["OT"], **kw)


def battery(n=2000) -> dict:
    """Six DGPs: additive/nonlinear by ignorable/non-ignorable, plus two multi-source.

    Ignorable ones keep selection independent of outcomes but still have
    Always-Observed shares below one, so the bounds have positive width.
    """
    return {
        "additive-ignorable-single": (
            DgpConfig(
                n=n, control=_g(SINGLE_POS, b=0.95), treated=_g(SINGLE_POS, b=0.9, mean=0.5),
                outcome=ADDITIVE, effect=Effect("constant", 0.5), directions=("positive",), seed=11,
            ),
            "did",
        ),
        "additive-nonignorable-single": (
            DgpConfig(
                n=n, control=_g(SINGLE_POS, b=0.95), treated=_g(SINGLE_POS, b=0.9, mean=0.5),
                outcome=ADDITIVE, effect=Effect("linear", 0.5, 0.3), selection_link=0.6,
                stratum_shift={"OT": 1.0}, directions=("positive",), seed=12,
            ),
            "did",
        ),
        "additive-nonignorable-multi": (
            DgpConfig(
                n=n, control=_g(MULTI, b=0.95), treated=_g(MULTI, b=0.95, mean=0.5),
                outcome=ADDITIVE, effect=Effect("linear", 0.5, 0.3), selection_link=0.6,
                stratum_shift={"OT": 1.0, "OC": -1.0}, directions=("negative", "positive"), seed=13,
            ),
            "did",
        ),
        "nonlinear-ignorable-single": (
            DgpConfig(
                n=n, control=_g(SINGLE_NEG, b=0.95), treated=_g(SINGLE_NEG, b=0.9, mean=0.3, sd=0.8),
                outcome=NONLINEAR, effect=Effect("constant", 0.5), directions=("negative",), seed=14,
            ),
            "cic",
        ),
        "nonlinear-nonignorable-single": (
            DgpConfig(
                n=n, control=_g(SINGLE_POS, b=0.95), treated=_g(SINGLE_POS, b=0.9, mean=0.3, sd=0.8),
                outcome=NONLINEAR, effect=Effect("linear", 0.5, 0.3), selection_link=0.6,
                stratum_shift={"OT": 1.0}, directions=("positive",), seed=15,
            ),
            "cic",
        ),
        "nonlinear-nonignorable-multi": (
            DgpConfig(
                n=n, control=_g(MULTI, b=0.95), treated=_g(MULTI, b=0.95, mean=0.3, sd=0.8),
                outcome=NONLINEAR, effect=Effect("linear", 0.5, 0.3), selection_link=0.6,
                stratum_shift={"OT": 1.0, "OC": -1.0}, directions=("negative", "positive"), seed=16,
            ),
            "cic",
        ),
    }


def ao_only(n=2000, noise_sd=1.0, seed=0, **kw) -> DgpConfig:
    """No selection at all; additive outcomes and a constant effect of 0.5."""
    return DgpConfig(
        n=n,
        control=group(1, 0, 0, 0),
        treated=group(1, 0, 0, 0, mean=0.5),
        outcome=OutcomeModel("additive", (0.0, 0.3), noise_sd=noise_sd),
        effect=Effect("constant", 0.5),
        seed=seed,
        **kw,
    )


def balanced_rates_dgp(n=2000, seed=21) -> DgpConfig:
    """Equal OC and OT mass with opposite post-period shifts in those strata.

    Selection rates move identically in both groups, yet the complete-case
    contrast is off by ``(1 - pi1) * 1 - (1 - pi0) * (-1)``.
    """
    strata = dict(AO=0.8, NO=0.0, OC=0.1, OT=0.1)
    return DgpConfig(
        n=n,
        control=_g(strata, b=0.95),
        treated=_g(strata, b=0.95, mean=0.5),
        outcome=ADDITIVE,
        effect=Effect("constant", 0.5),
        stratum_shift={"OT": 1.0, "OC": -1.0},
        directions=("positive", "negative"),
        seed=seed,
    )
