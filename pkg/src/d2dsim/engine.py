"""Monte-Carlo engine: one drop end to end, then campaigns with CSV output.

Every drop derives all randomness from (base seed, drop index) through named
substreams, so any scheme subset sees byte-identical deployments and a rerun
of a campaign reproduces its output files exactly.  Only sectors containing
at least one measured (central-grid) terminal are scheduled and evaluated;
replica-grid sectors exist to keep border association honest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .channel import DropChannel, build_gain_set, noise_power_watts
from .config import ScenarioConfig
from .feasibility import (SinrTargets, baseline_cell_sinr, feasibility_context,
                          sinr_cell_matrix)
from .metrics import CapacityReport, SectorState, aggregate_gain, evaluate_drop
from .power import draw_snr_targets, open_loop_power_w
from .rrm import (Allocation, allocate_capacity_max, allocate_none,
                  allocate_proposed, allocate_random)
from .scenario import (ROLE_CELLULAR, associate_users, drop_users,
                       generate_environment, pair_users)
from .signaling import ProtocolTrace, run_multi_cell, run_single_cell

SCHEMES = ("proposed", "capacity-max", "random", "none")

WORKERS_ENV = "D2DSIM_WORKERS"

_STREAMS = {"env": 1, "users": 2, "pairing": 3, "targets-cell": 4,
            "targets-d2d": 5, "random-alloc": 6, "shadow": 7}


def drop_seed(base_seed: int, drop_index: int) -> int:
    """Stable per-drop seed derived from the campaign seed."""
    ss = np.random.SeedSequence([int(base_seed), int(drop_index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _stream(seed: int, label: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), _STREAMS[label]]))


def _shadow_seed(seed: int) -> int:
    ss = np.random.SeedSequence([int(seed), _STREAMS["shadow"]])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class DropState:
    """One fully generated deployment, ready for scheduling."""

    seed: int
    n_users: int
    n_pairs: int
    n_measured_users: int
    serving: np.ndarray
    states: list[SectorState]
    pair_topology: list[tuple[int, bool]]  # (pair_id, same_site) for measured pairs


def build_drop(cfg: ScenarioConfig, seed: int) -> DropState:
    """Generate environment, users, pairs, gains, powers and feasibility."""
    env = generate_environment(cfg, _stream(seed, "env"))
    users = drop_users(cfg, env, _stream(seed, "users"))
    pairs = pair_users(cfg, users, _stream(seed, "pairing"))
    n = len(users)
    users_xy = np.array([(u.x, u.y) for u in users]) if n else np.zeros((0, 2))
    channel = DropChannel(env, cfg.channel, _shadow_seed(seed), users_xy, np.arange(n))
    serving = associate_users(users, env, channel)

    cell_targets = draw_snr_targets(cfg.cell_snr_target_db, n, _stream(seed, "targets-cell"))
    d2d_targets = draw_snr_targets(cfg.d2d_snr_target_db, len(pairs), _stream(seed, "targets-d2d"))

    grid0 = np.array([u.grid_index == 0 for u in users], dtype=bool)
    roles = np.array([u.role for u in users])

    # group members by serving sector
    cell_of_sector: dict[int, list[int]] = {}
    pairs_of_sector: dict[int, list[int]] = {}
    for i in range(n):
        if roles[i] == ROLE_CELLULAR:
            cell_of_sector.setdefault(int(serving[i]), []).append(i)
    for p in pairs:
        pairs_of_sector.setdefault(int(serving[p.tx_user]), []).append(p.pair_id)

    states: list[SectorState] = []
    pair_topology: list[tuple[int, bool]] = []
    site_of_sector = {s.sector_id: s.site_id for s in env.sectors}
    for sector in env.sectors:
        cell_idx = np.array(cell_of_sector.get(sector.sector_id, ()), dtype=int)
        pair_ids = np.array(pairs_of_sector.get(sector.sector_id, ()), dtype=int)
        cell_measured = grid0[cell_idx] if cell_idx.size else np.zeros(0, dtype=bool)
        tx_idx = np.array([pairs[p].tx_user for p in pair_ids], dtype=int)
        rx_idx = np.array([pairs[p].rx_user for p in pair_ids], dtype=int)
        pair_measured = grid0[tx_idx] if tx_idx.size else np.zeros(0, dtype=bool)
        if not (cell_measured.any() or pair_measured.any()):
            continue  # replica-only sector: association fodder, never evaluated

        m = len(cell_idx)
        share = sector.bandwidth_hz / max(m, 1)
        sigma2_cell = noise_power_watts(share, cfg.noise.bs_noise_figure_db,
                                        cfg.noise.thermal_density_dbm_hz)
        sigma2_d2d = noise_power_watts(share, cfg.noise.ue_noise_figure_db,
                                       cfg.noise.thermal_density_dbm_hz)
        gains = build_gain_set(channel, sector, cell_idx, pair_ids, tx_idx, rx_idx)
        p_cell, cell_clip = open_loop_power_w(
            cell_targets[cell_idx] if m else np.zeros(0), gains.h_cell,
            sigma2_cell, cfg.ue_max_power_dbm)
        p_d2d, d2d_clip = open_loop_power_w(
            d2d_targets[pair_ids] if pair_ids.size else np.zeros(0), gains.h_d2d,
            sigma2_d2d, cfg.ue_max_power_dbm)
        baseline = baseline_cell_sinr(gains, p_cell, sigma2_cell)
        pair_dist = channel.distances(tx_idx, rx_idx) if pair_ids.size else np.zeros(0)
        cross_dist = channel.distance_matrix(rx_idx, cell_idx)
        targets = SinrTargets(
            d2d_target_db=d2d_targets[pair_ids] if pair_ids.size else 0.0,
            gamma_cell_db=cfg.gamma_cell_db,
            baseline_cell_sinr=baseline,
            ratio_threshold=cfg.distance_ratio_threshold,
        )
        feas = feasibility_context(gains, p_cell, p_d2d, sigma2_cell,
                                   pair_dist, cross_dist, targets)
        states.append(SectorState(
            sector_id=sector.sector_id,
            kind=sector.kind,
            gains=gains,
            p_cell_w=p_cell,
            p_d2d_w=p_d2d,
            cell_clipped=cell_clip,
            d2d_clipped=d2d_clip,
            sigma2_cell_w=sigma2_cell,
            sigma2_d2d_w=sigma2_d2d,
            share_bw_hz=share,
            baseline_sinr=baseline,
            pair_distance_m=pair_dist,
            cross_distance_m=cross_dist,
            cell_measured=cell_measured,
            pair_measured=pair_measured,
            targets=targets,
            feas_context=feas,
        ))
        for k, p in enumerate(pair_ids):
            if pair_measured[k]:
                same_site = site_of_sector[int(serving[pairs[p].rx_user])] == sector.site_id
                pair_topology.append((int(p), bool(same_site)))

    return DropState(
        seed=seed,
        n_users=n,
        n_pairs=len(pairs),
        n_measured_users=int(grid0.sum()),
        serving=serving,
        states=states,
        pair_topology=sorted(pair_topology),
    )


def schedule(state: SectorState, scheme: str,
             rng_random: np.random.Generator | None = None) -> Allocation:
    """Run one scheme's allocator on one sector."""
    n, m = state.shape
    if scheme == "proposed":
        return allocate_proposed(state.feas_context)
    if scheme == "capacity-max":
        sc = sinr_cell_matrix(state.gains, state.p_cell_w, state.p_d2d_w,
                              state.sigma2_cell_w)
        return allocate_capacity_max(np.log2(1.0 + sc), np.log2(1.0 + state.baseline_sinr))
    if scheme == "random":
        if rng_random is None:
            raise ValueError("random scheme needs its RNG stream")
        return allocate_random(n, m, rng_random)
    if scheme == "none":
        return allocate_none(n)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass
class DropResult:
    seed: int
    n_users: int
    n_pairs: int
    reports: dict[str, CapacityReport]
    trace: ProtocolTrace | None = None
    # (sector_id, scheme, pair_row, resource_col) per granted reuse
    alloc_rows: list[tuple[int, str, int, int]] = field(default_factory=list)


def run_drop(
    cfg: ScenarioConfig,
    seed: int,
    schemes: tuple[str, ...] = SCHEMES,
    with_trace: bool = False,
) -> DropResult:
    """One deployment, scheduled and evaluated under every requested scheme."""
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
    drop = build_drop(cfg, seed)
    reports: dict[str, CapacityReport] = {}
    proposed_alloc: dict[int, Allocation] = {}
    alloc_rows: list[tuple[int, str, int, int]] = []
    for scheme in SCHEMES:  # canonical order keeps the random stream stable
        if scheme not in schemes:
            continue
        rng_random = _stream(seed, "random-alloc") if scheme == "random" else None
        allocations = {st.sector_id: schedule(st, scheme, rng_random) for st in drop.states}
        if scheme == "proposed":
            proposed_alloc = allocations
        for st in drop.states:
            for m, col in allocations[st.sector_id].pairs():
                alloc_rows.append((st.sector_id, scheme, m, col))
        reports[scheme] = evaluate_drop(drop.states, allocations, scheme)

    trace = None
    if with_trace and drop.pair_topology:
        pair_id, same_site = drop.pair_topology[0]
        granted = False
        for st in drop.states:
            alloc = proposed_alloc.get(st.sector_id)
            if alloc is None:
                continue
            where = np.flatnonzero(st.gains.pairs == pair_id)
            if where.size:
                granted = alloc.resource_of_pair[int(where[0])] >= 0
                break
        if same_site:
            trace = run_single_cell(granted)
        else:
            trace = run_multi_cell(granted, granted)
    return DropResult(drop.seed, drop.n_users, drop.n_pairs, reports, trace, alloc_rows)


# ---------------------------------------------------------------------------
# campaigns


@dataclass
class CampaignResult:
    cfg: ScenarioConfig
    schemes: tuple[str, ...]
    seeds: list[int]
    reports: dict[str, list[CapacityReport]]
    alloc_rows: list[list[tuple[int, str, int, int]]] = field(default_factory=list)

    def overall_gain(self, scheme: str) -> float | None:
        rs = self.reports[scheme]
        return aggregate_gain([r.overall_bps for r in rs],
                              [r.baseline_cell_bps for r in rs])

    def cellular_gain(self, scheme: str) -> float | None:
        rs = self.reports[scheme]
        return aggregate_gain([r.cell_bps for r in rs],
                              [r.baseline_cell_bps for r in rs])

    def kind_overall_gain(self, scheme: str, kind: str) -> float | None:
        rs = self.reports[scheme]
        vals = [r.by_kind.get(kind, {}).get("overall_bps", 0.0) for r in rs]
        base = [r.by_kind.get(kind, {}).get("baseline_cell_bps", 0.0) for r in rs]
        return aggregate_gain(vals, base)

    def mean_enabled_pairs(self, scheme: str) -> float:
        return float(np.mean([r.enabled_pairs for r in self.reports[scheme]]))

    def mean_clip_rate(self, scheme: str) -> float:
        return float(np.mean([r.clip_rate for r in self.reports[scheme]]))


def _drop_task(args) -> DropResult:
    cfg, seed, schemes = args
    return run_drop(cfg, seed, schemes)


def run_campaign(
    cfg: ScenarioConfig,
    schemes: tuple[str, ...] = SCHEMES,
    out_dir: str | None = None,
    progress=None,
    workers: int | None = None,
) -> CampaignResult:
    """Run cfg.num_drops paired drops and optionally write CSV/summary files.

    Worker count comes from the argument, else the D2DSIM_WORKERS environment
    variable, else 1.  Results and files are identical for any worker count.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or "1")
    seeds = [drop_seed(cfg.seed, i) for i in range(cfg.num_drops)]
    tasks = [(cfg, s, tuple(schemes)) for s in seeds]
    results: list[DropResult] = []
    if workers > 1:
        import multiprocessing as mp

        with mp.Pool(workers) as pool:
            results = pool.map(_drop_task, tasks)
            if progress:
                progress(f"{len(results)}/{len(tasks)} drops (pool of {workers})")
    else:
        tick = max(1, len(tasks) // 10)
        for i, t in enumerate(tasks):
            results.append(_drop_task(t))
            if progress and ((i + 1) % tick == 0 or i + 1 == len(tasks)):
                progress(f"{i + 1}/{len(tasks)} drops")
    reports = {s: [r.reports[s] for r in results] for s in schemes}
    campaign = CampaignResult(cfg, tuple(schemes), seeds, reports,
                              [r.alloc_rows for r in results])
    if out_dir is not None:
        write_outputs(campaign, out_dir)
    return campaign


def _fmt(x: float) -> str:
    return f"{x:.10e}"


def write_outputs(campaign: CampaignResult, out_dir: str) -> dict[str, str]:
    """drops.csv + kinds.csv + summary.txt; stable bytes for a given campaign."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}

    drops_path = os.path.join(out_dir, "drops.csv")
    with open(drops_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("drop,scheme,cell_bps,d2d_bps,overall_bps,enabled_pairs,clip_rate\n")
        for scheme in campaign.schemes:
            for i, r in enumerate(campaign.reports[scheme]):
                fh.write(f"{i},{scheme},{_fmt(r.cell_bps)},{_fmt(r.d2d_bps)},"
                         f"{_fmt(r.overall_bps)},{r.enabled_pairs},{_fmt(r.clip_rate)}\n")
    paths["drops"] = drops_path

    kinds_path = os.path.join(out_dir, "kinds.csv")
    with open(kinds_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("drop,scheme,site_kind,cell_bps,d2d_bps,overall_bps,baseline_cell_bps\n")
        for scheme in campaign.schemes:
            for i, r in enumerate(campaign.reports[scheme]):
                for kind in sorted(r.by_kind):
                    k = r.by_kind[kind]
                    fh.write(f"{i},{scheme},{kind},{_fmt(k['cell_bps'])},{_fmt(k['d2d_bps'])},"
                             f"{_fmt(k['overall_bps'])},{_fmt(k['baseline_cell_bps'])}\n")
    paths["kinds"] = kinds_path

    alloc_path = os.path.join(out_dir, "allocations.csv")
    with open(alloc_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("drop,sector,scheme,m,n\n")
        for i, rows in enumerate(campaign.alloc_rows):
            for sector, scheme, m, col in rows:
                fh.write(f"{i},{sector},{scheme},{m},{col}\n")
    paths["allocations"] = alloc_path

    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"drops: {len(campaign.seeds)}\n")
        fh.write(f"seed: {campaign.cfg.seed}\n")
        fh.write(f"schemes: {','.join(campaign.schemes)}\n")
        for scheme in campaign.schemes:
            o = campaign.overall_gain(scheme)
            c = campaign.cellular_gain(scheme)
            fh.write(f"[{scheme}] overall-gain: {_pct(o)}  cellular-gain: {_pct(c)}  "
                     f"enabled-pairs-mean: {campaign.mean_enabled_pairs(scheme):.2f}  "
                     f"clip-rate-mean: {campaign.mean_clip_rate(scheme):.4f}\n")
            kinds = sorted({k for r in campaign.reports[scheme] for k in r.by_kind})
            for kind in kinds:
                g = campaign.kind_overall_gain(scheme, kind)
                fh.write(f"[{scheme}] {kind} overall-gain: {_pct(g)}\n")
    paths["summary"] = summary_path
    return paths


def _pct(x: float | None) -> str:
    return "n/a" if x is None else f"{100.0 * x:+.2f}%"
