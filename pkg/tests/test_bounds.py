import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bounded_effects.bounds import (
    cic_att_bounds,
    cic_qtt_bounds,
    cic_qtt_curve,
    did_att_bounds,
    naive_cic,
    naive_did,
    quantile_grid,
    selection_did,
)
from bounded_effects.dataset import PanelDataset
from bounded_effects.errors import EmptySelection, InvalidConfig
from bounded_effects.strata import StrataProportions, estimate_proportions
from helpers import random_panel, ref_cic_qtt

known = StrataProportions.known
ONE = known(1.0, 1.0)


def panel(treated, control):
    """Fully observed panel from lists of (y1, y2) pairs."""
    rows = [(1, a, b) for a, b in treated] + [(0, a, b) for a, b in control]
    n = len(rows)
    return PanelDataset.from_arrays(
        g=[r[0] for r in rows], y1=[r[1] for r in rows], y2=[r[2] for r in rows],
        s1=[1] * n, s2=[1] * n,
    )


WORKED = panel([(0, 1), (0, 2), (0, 3), (0, 4)], [(0, 0), (0, 1)])
HAND8 = panel([(1, 2), (2, 4), (3, 5), (4, 7)], [(0, 1), (1, 1.5), (2, 3), (3, 5)])


def test_did_worked_example():
    res = did_att_bounds(WORKED, known(1.0, 0.75))
    assert (res.lb, res.ub) == (1.5, 2.5)
    assert res.method == "DiD" and res.qtt_table is None
    assert res.n_used == 6
    assert naive_did(WORKED) == 2.0


def test_cic_hand_dataset():
    # composed step functions evaluated by hand: lb = 4 - 5, ub = 5 - 3
    assert cic_qtt_bounds(HAND8, known(1.0, 0.75), 0.5) == (-1.0, 2.0)
    ref = ref_cic_qtt([1, 2, 3, 4], [2, 4, 5, 7], [0, 1, 2, 3], [1, 1.5, 3, 5], 1.0, 0.75, 0.5)
    assert ref == (-1, 2)


def test_cic_identical_distributions_zero():
    same = panel([(v, v) for v in range(5)], [(v, v) for v in range(5)])
    res = cic_att_bounds(same, ONE, 99)
    assert res.lb == res.ub == 0.0
    assert all(r.lb == r.ub == 0.0 for r in res.qtt_table)


def ref_changes_in_changes(ds, q):
    """Counterfactual-quantile contrast with no trimming, written out directly."""
    obs = ds.s2 == 1
    y1_t = ds.y1[obs & (ds.g == 1)].tolist()
    y2_t = ds.y2[obs & (ds.g == 1)].tolist()
    y1_c = ds.y1[obs & (ds.g == 0)].tolist()
    y2_c = ds.y2[obs & (ds.g == 0)].tolist()
    from helpers import ref_ecdf, ref_quantile

    counterfactual = ref_quantile(y2_c, ref_ecdf(y1_c, ref_quantile(y1_t, q)))
    return ref_quantile(y2_t, q) - counterfactual


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 0.99))
def test_cic_point_identified_matches_direct(seed, q):
    ds = random_panel(np.random.default_rng(seed))
    lb, ub = cic_qtt_bounds(ds, ONE, q)
    assert lb == ub == ref_changes_in_changes(ds, q)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 2**32 - 1),
    st.floats(0.05, 1.0),
    st.floats(0.05, 1.0),
    st.floats(0.01, 0.99),
    st.booleans(),
)
def test_cic_matches_reference(seed, pi0, pi1, q, ties):
    ds = random_panel(np.random.default_rng(seed), ties=ties)
    obs = ds.s2 == 1
    parts = [ds.y1[obs & (ds.g == 1)], ds.y2[obs & (ds.g == 1)], ds.y1[obs & (ds.g == 0)], ds.y2[obs & (ds.g == 0)]]
    ref = ref_cic_qtt(*[p.tolist() for p in parts], pi0, pi1, q)
    assert cic_qtt_bounds(ds, known(pi0, pi1), q) == ref


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.booleans())
def test_bounds_ordered(seed, pi0, pi1, ties):
    ds = random_panel(np.random.default_rng(seed), ties=ties)
    p = known(pi0, pi1)
    did = did_att_bounds(ds, p)
    assert did.lb <= did.ub
    cic = cic_att_bounds(ds, p, 19)
    assert cic.lb <= cic.ub
    lbs = [r.lb for r in cic.qtt_table]
    ubs = [r.ub for r in cic.qtt_table]
    assert all(a <= b for a, b in zip(lbs, ubs))
    assert min(lbs) <= cic.lb and cic.ub <= max(ubs)
    point = naive_cic(ds, 19)
    assert cic.lb <= point + 1e-12 and point <= cic.ub + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_point_identification_collapse(seed):
    ds = random_panel(np.random.default_rng(seed))
    did = did_att_bounds(ds, ONE)
    assert abs(did.lb - naive_did(ds)) <= 1e-12 and abs(did.ub - naive_did(ds)) <= 1e-12
    cic = cic_att_bounds(ds, ONE, 49)
    assert cic.lb == cic.ub == naive_cic(ds, 49)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_did_width_shrinks_with_share(seed, pi0, a, b):
    ds = random_panel(np.random.default_rng(seed))
    lo, hi = sorted((a, b))
    wide = did_att_bounds(ds, known(pi0, lo))
    narrow = did_att_bounds(ds, known(pi0, hi))
    assert narrow.width <= wide.width + 1e-12
    assert wide.lb <= narrow.lb + 1e-12 and narrow.ub <= wide.ub + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([-2.0, -0.5, 0.25, 4.0]), st.floats(0.05, 1.0))
def test_did_translation_equivariance(seed, c, pi1):
    rng = np.random.default_rng(seed)
    ds = random_panel(rng, ties=True)  # small integers keep the shift exact
    shifted = PanelDataset.from_arrays(
        g=ds.g, y1=ds.y1, y2=ds.y2 + np.where(ds.g == 1, c, 0.0), s1=ds.s1, s2=ds.s2,
    )
    p = known(0.8, pi1)
    a, b = did_att_bounds(ds, p), did_att_bounds(shifted, p)
    assert b.lb - a.lb == pytest.approx(c, abs=1e-12)
    assert b.ub - a.ub == pytest.approx(c, abs=1e-12)


def test_cic_grid_and_table():
    ds = random_panel(np.random.default_rng(1), n=40)
    res = cic_att_bounds(ds, known(0.9, 0.8), 99)
    qs = [r.q for r in res.qtt_table]
    assert len(qs) == 99 and all(a < b for a, b in zip(qs, qs[1:]))
    assert qs[0] == 1 / 100 and qs[-1] == 99 / 100
    assert res.lb == pytest.approx(np.mean([r.lb for r in res.qtt_table]))
    lb, ub, clamps = cic_qtt_curve(ds, known(0.9, 0.8), qs)
    assert lb.tolist() == [r.lb for r in res.qtt_table]
    assert clamps == res.clamp_events


def test_clamp_events_counted():
    ds = random_panel(np.random.default_rng(2), n=30)
    assert cic_att_bounds(ds, ONE, 9).clamp_events == 0
    assert cic_att_bounds(ds, known(0.3, 1.0), 9).clamp_events > 0


def test_grid_validation():
    with pytest.raises(InvalidConfig):
        quantile_grid(2)
    with pytest.raises(InvalidConfig):
        cic_qtt_bounds(WORKED, ONE, 1.0)
    with pytest.raises(InvalidConfig):
        did_att_bounds(WORKED, known(1.2, 1.0))


def test_empty_selection():
    ds = PanelDataset.from_arrays(
        g=[1, 1, 0], y1=[1.0, 1.0, 1.0], y2=[np.nan, np.nan, 2.0], s1=[1, 1, 1], s2=[0, 0, 1]
    )
    with pytest.raises(EmptySelection):
        did_att_bounds(ds, ONE)
    with pytest.raises(EmptySelection):
        cic_att_bounds(ds, ONE)
    with pytest.raises(EmptySelection):
        naive_did(ds)


def test_selection_did():
    flat = panel([(0, 1)] * 3, [(0, 1)] * 3)
    assert selection_did(flat) == 0.0
    ds = random_panel(np.random.default_rng(4), n=50, J=2)
    t = ds.tallies
    expected = (t.mean_s(2, 1) - t.mean_s(1, 1)) - (t.mean_s(2, 0) - t.mean_s(1, 0))
    assert selection_did(ds) == pytest.approx(expected, abs=1e-15)
    with pytest.raises(InvalidConfig):
        selection_did(ds, 3)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_selection_did_additive_over_sources(seed, J):
    # each unit fails at most one source, so the overall rate change splits exactly
    ds = random_panel(np.random.default_rng(seed), J=J)
    parts = sum(selection_did(ds, j) for j in range(1, J + 1))
    assert selection_did(ds) == pytest.approx(parts, abs=1e-12)


def test_estimated_proportions_feed_bounds():
    ds = random_panel(np.random.default_rng(9), n=60)
    p = estimate_proportions(ds, "positive")
    res = did_att_bounds(ds, p)
    assert res.proportions is p and res.lb <= res.ub
