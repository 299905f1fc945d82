"""Capacity accounting: turn allocations into Shannon rates and gains.

A sector's uplink bandwidth is split evenly across its cellular users; a
scheduled D2D pair rides on its partner resource's share.  Only terminals in
the measured central grid contribute to reported sums, but interference is
evaluated for every scheduled link regardless of where it lives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import GainSet
from .feasibility import FeasibilityMatrix, SinrTargets, sinr_cell_matrix, sinr_d2d_matrix
from .rrm import Allocation

__all__ = ["SectorState", "CapacityReport", "sector_rates", "evaluate_drop",
           "relative_gain", "aggregate_gain"]


@dataclass
class SectorState:
    """Everything a sector's scheduler and the evaluator need for one drop."""

    sector_id: int
    kind: str  # "macro" | "micro"
    gains: GainSet
    p_cell_w: np.ndarray  # (M,)
    p_d2d_w: np.ndarray  # (N,)
    cell_clipped: np.ndarray  # (M,) bool
    d2d_clipped: np.ndarray  # (N,) bool
    sigma2_cell_w: float
    sigma2_d2d_w: float
    share_bw_hz: float  # per-resource bandwidth share
    baseline_sinr: np.ndarray  # (M,) no-reuse cellular SINR, linear
    pair_distance_m: np.ndarray  # (N,)
    cross_distance_m: np.ndarray  # (N, M)
    cell_measured: np.ndarray  # (M,) bool, True = central-grid terminal
    pair_measured: np.ndarray  # (N,) bool
    targets: SinrTargets | None = None
    feas_context: FeasibilityMatrix | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.gains.shape


def sector_rates(
    state: SectorState, allocation: Allocation
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-link rates under an allocation.

    Returns (cell_bps (M,), d2d_bps (N,), cell_sinr (M,)); unscheduled pairs
    get zero rate, unreused resources keep their baseline SINR.
    """
    n, m = state.shape
    res = np.asarray(allocation.resource_of_pair, dtype=int)
    if res.shape != (n,):
        raise ValueError("allocation length must match the sector pair count")
    cell_sinr = state.baseline_sinr.copy()
    d2d_bps = np.zeros(n)
    if n and m:
        scheduled = np.flatnonzero(res >= 0)
        if scheduled.size:
            cols = res[scheduled]
            if len(np.unique(cols)) != len(cols):
                raise ValueError("allocation reuses a resource twice")
            sc = sinr_cell_matrix(state.gains, state.p_cell_w, state.p_d2d_w,
                                  state.sigma2_cell_w)
            sd = sinr_d2d_matrix(state.gains, state.p_cell_w, state.p_d2d_w,
                                 state.sigma2_d2d_w)
            cell_sinr[cols] = sc[scheduled, cols]
            d2d_bps[scheduled] = state.share_bw_hz * np.log2(1.0 + sd[scheduled, cols])
    cell_bps = state.share_bw_hz * np.log2(1.0 + cell_sinr) if m else np.zeros(0)
    return cell_bps, d2d_bps, cell_sinr


@dataclass
class CapacityReport:
    """Measured-grid capacity sums for one drop under one scheme."""

    scheme: str
    cell_bps: float
    d2d_bps: float
    overall_bps: float
    baseline_cell_bps: float
    enabled_pairs: int  # measured pairs actually scheduled
    clip_rate: float  # clipped transmitters / all measured transmitters
    by_kind: dict[str, dict[str, float]] = field(default_factory=dict)
    baseline_cell_sinr: np.ndarray | None = None  # measured users, linear


def evaluate_drop(
    states: list[SectorState], allocations: dict[int, Allocation], scheme: str
) -> CapacityReport:
    """Aggregate measured-grid rates across sectors for one scheme."""
    cell = d2d = base = 0.0
    enabled = 0
    clipped = total_tx = 0
    by_kind: dict[str, dict[str, float]] = {}
    base_sinr: list[np.ndarray] = []
    for st in states:
        alloc = allocations[st.sector_id]
        cell_bps, d2d_bps, _ = sector_rates(st, alloc)
        cm, pm = st.cell_measured, st.pair_measured
        c = float(cell_bps[cm].sum()) if cm.size else 0.0
        d = float(d2d_bps[pm].sum()) if pm.size else 0.0
        b = float((st.share_bw_hz * np.log2(1.0 + st.baseline_sinr))[cm].sum()) if cm.size else 0.0
        res = np.asarray(alloc.resource_of_pair)
        enabled += int(((res >= 0) & pm).sum()) if pm.size else 0
        clipped += int(st.cell_clipped[cm].sum()) + int(st.d2d_clipped[pm].sum())
        total_tx += int(cm.sum()) + int(pm.sum())
        base_sinr.append(st.baseline_sinr[cm])
        agg = by_kind.setdefault(st.kind, {"cell_bps": 0.0, "d2d_bps": 0.0,
                                           "overall_bps": 0.0, "baseline_cell_bps": 0.0})
        agg["cell_bps"] += c
        agg["d2d_bps"] += d
        agg["overall_bps"] += c + d
        agg["baseline_cell_bps"] += b
        cell += c
        d2d += d
        base += b
    return CapacityReport(
        scheme=scheme,
        cell_bps=cell,
        d2d_bps=d2d,
        overall_bps=cell + d2d,
        baseline_cell_bps=base,
        enabled_pairs=enabled,
        clip_rate=(clipped / total_tx) if total_tx else 0.0,
        by_kind=by_kind,
        baseline_cell_sinr=np.concatenate(base_sinr) if base_sinr else np.zeros(0),
    )


def relative_gain(value: float, baseline: float) -> float | None:
    """(value - baseline) / baseline, or None when the baseline is zero."""
    if baseline == 0.0:
        return None
    return (value - baseline) / baseline


def aggregate_gain(values: list[float], baselines: list[float]) -> float | None:
    """Campaign-level gain: ratio of summed capacities (robust to small drops)."""
    total_base = float(np.sum(baselines))
    if total_base == 0.0:
        return None
    return (float(np.sum(values)) - total_base) / total_base
