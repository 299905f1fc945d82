"""Rate accounting: closed-form sector rates and measured-grid aggregation."""

import numpy as np
import pytest

from d2dsim.channel import GainSet
from d2dsim.metrics import (SectorState, aggregate_gain, evaluate_drop,
                            relative_gain, sector_rates)
from d2dsim.rrm import Allocation, allocate_none

SHARE_HZ = 1000.0


def make_state(sector_id=0, kind="macro", share=SHARE_HZ,
               cell_measured=(True, True, False),
               pair_measured=(True, False)):
    """2 pairs x 3 cellular users with hand-pickable gains."""
    h_cell = np.array([1e-6, 2e-6, 5e-7])
    p_cell = np.array([0.1, 0.2, 0.05])
    sigma2_cell = 1e-9
    gains = GainSet(
        sector_id=sector_id,
        cell_users=np.array([0, 1, 2]),
        pairs=np.array([10, 11]),
        h_cell=h_cell,
        h_d2d=np.array([1e-5, 2e-5]),
        h_d2d_bs=np.array([1e-8, 2e-8]),
        h_cross=np.array([[1e-7, 2e-7, 3e-7], [4e-7, 5e-7, 6e-7]]),
    )
    return SectorState(
        sector_id=sector_id,
        kind=kind,
        gains=gains,
        p_cell_w=p_cell,
        p_d2d_w=np.array([0.01, 0.02]),
        cell_clipped=np.array([True, False, True]),
        d2d_clipped=np.array([False, True]),
        sigma2_cell_w=sigma2_cell,
        sigma2_d2d_w=1e-10,
        share_bw_hz=share,
        baseline_sinr=h_cell * p_cell / sigma2_cell,  # [100, 400, 25]
        pair_distance_m=np.zeros(2),
        cross_distance_m=np.zeros((2, 3)),
        cell_measured=np.array(cell_measured),
        pair_measured=np.array(pair_measured),
    )


def test_sector_rates_closed_form():
    state = make_state()
    alloc = Allocation(scheme="proposed", resource_of_pair=(2, -1))
    cell_bps, d2d_bps, cell_sinr = sector_rates(state, alloc)

    # pair 0 rides resource 2: both SINRs from the scalar reuse formulas
    sinr_d = 1e-5 * 0.01 / (3e-7 * 0.05 + 1e-10)
    sinr_c = 5e-7 * 0.05 / (1e-8 * 0.01 + 1e-9)
    assert cell_sinr == pytest.approx([100.0, 400.0, sinr_c], rel=1e-12)
    assert d2d_bps == pytest.approx(
        [SHARE_HZ * np.log2(1.0 + sinr_d), 0.0], rel=1e-12)
    assert cell_bps == pytest.approx(
        SHARE_HZ * np.log2(1.0 + np.array([100.0, 400.0, sinr_c])), rel=1e-12)


def test_sector_rates_none_keeps_baseline():
    state = make_state()
    cell_bps, d2d_bps, cell_sinr = sector_rates(state, allocate_none(2))
    assert cell_sinr == pytest.approx(state.baseline_sinr)
    assert d2d_bps == pytest.approx([0.0, 0.0])
    assert cell_bps == pytest.approx(
        SHARE_HZ * np.log2(1.0 + state.baseline_sinr))


def test_sector_rates_scale_with_share():
    alloc = Allocation(scheme="proposed", resource_of_pair=(2, 0))
    c1, d1, _ = sector_rates(make_state(share=1000.0), alloc)
    c2, d2, _ = sector_rates(make_state(share=2000.0), alloc)
    assert c2 == pytest.approx(2.0 * c1)
    assert d2 == pytest.approx(2.0 * d1)


def test_sector_rates_validation():
    state = make_state()
    with pytest.raises(ValueError, match="length"):
        sector_rates(state, Allocation(scheme="x", resource_of_pair=(0,)))
    with pytest.raises(ValueError, match="twice"):
        sector_rates(state, Allocation(scheme="x", resource_of_pair=(1, 1)))


def test_sector_rates_empty_resources():
    state = make_state()
    state.gains = GainSet(
        sector_id=0, cell_users=np.zeros(0, dtype=int),
        pairs=np.array([10, 11]), h_cell=np.zeros(0),
        h_d2d=np.array([1e-5, 2e-5]), h_d2d_bs=np.array([1e-8, 2e-8]),
        h_cross=np.zeros((2, 0)))
    state.p_cell_w = np.zeros(0)
    state.baseline_sinr = np.zeros(0)
    cell_bps, d2d_bps, _ = sector_rates(state, allocate_none(2))
    assert cell_bps.shape == (0,)
    assert d2d_bps == pytest.approx([0.0, 0.0])


def test_evaluate_drop_measured_only():
    state = make_state()  # users 0,1 and pair 0 measured
    alloc = Allocation(scheme="proposed", resource_of_pair=(2, 0))
    report = evaluate_drop([state], {0: alloc}, "proposed")
    cell_bps, d2d_bps, _ = sector_rates(state, alloc)

    assert report.scheme == "proposed"
    assert report.cell_bps == pytest.approx(cell_bps[:2].sum())
    assert report.d2d_bps == pytest.approx(d2d_bps[0])
    assert report.overall_bps == pytest.approx(report.cell_bps + report.d2d_bps)
    base = SHARE_HZ * np.log2(1.0 + state.baseline_sinr[:2]).sum()
    assert report.baseline_cell_bps == pytest.approx(base)
    assert report.enabled_pairs == 1  # pair 1 is scheduled but off-grid
    # clipped measured transmitters: cell user 0 of {0,1} + neither pair
    assert report.clip_rate == pytest.approx(1.0 / 3.0)
    assert report.baseline_cell_sinr == pytest.approx([100.0, 400.0])


def test_evaluate_drop_by_kind_split():
    macro = make_state(sector_id=0, kind="macro")
    micro = make_state(sector_id=1, kind="micro")
    allocs = {0: Allocation(scheme="proposed", resource_of_pair=(2, -1)),
              1: allocate_none(2)}
    report = evaluate_drop([macro, micro], allocs, "proposed")
    assert set(report.by_kind) == {"macro", "micro"}
    assert report.by_kind["micro"]["d2d_bps"] == 0.0
    assert report.cell_bps == pytest.approx(
        report.by_kind["macro"]["cell_bps"] + report.by_kind["micro"]["cell_bps"])
    assert report.overall_bps == pytest.approx(
        sum(k["overall_bps"] for k in report.by_kind.values()))
    # the none sector still reports its baseline
    assert report.by_kind["micro"]["cell_bps"] == pytest.approx(
        report.by_kind["micro"]["baseline_cell_bps"])


def test_evaluate_drop_none_matches_baseline():
    state = make_state()
    report = evaluate_drop([state], {0: allocate_none(2)}, "none")
    assert report.cell_bps == pytest.approx(report.baseline_cell_bps)
    assert report.d2d_bps == 0.0
    assert report.enabled_pairs == 0


def test_evaluate_drop_empty():
    report = evaluate_drop([], {}, "none")
    assert report.overall_bps == 0.0
    assert report.clip_rate == 0.0
    assert report.baseline_cell_sinr.shape == (0,)


def test_relative_gain():
    assert relative_gain(130.0, 100.0) == pytest.approx(0.30)
    assert relative_gain(70.0, 100.0) == pytest.approx(-0.30)
    assert relative_gain(5.0, 0.0) is None


def test_aggregate_gain():
    assert aggregate_gain([110.0, 130.0], [100.0, 100.0]) == pytest.approx(0.20)
    assert aggregate_gain([], []) is None
    assert aggregate_gain([1.0], [0.0]) is None
    # ratio of sums, not mean of ratios: big drops dominate
    got = aggregate_gain([200.0, 11.0], [100.0, 10.0])
    assert got == pytest.approx((211.0 - 110.0) / 110.0)
