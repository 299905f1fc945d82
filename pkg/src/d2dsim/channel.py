"""Radio channel: log-distance pathloss, hashed shadowing, sector antennas, gains.

A link is line-of-sight when the straight 2D segment between the ends crosses
no building footprint and is shorter than los_max_distance_m; otherwise the
NLOS slope and penalty apply.  Lognormal shadowing is *hashed* from
(drop shadow seed, node keys, link class) instead of drawn sequentially, so
every link's fade is frozen for the drop and independent of evaluation order;
swapping the ends returns the same value.

Linear channel gain = 10^(-(pathloss + shadow - antenna)/10); every consumer
works on these linear gains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .config import AntennaPattern, ChannelParams, PathlossParams
from .geometry import segments_blocked
from .scenario import Environment, Sector

_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)
_USER_KEY_BASE = np.uint64(1) << np.uint64(32)
_SITE_KEY_BASE = np.uint64(1) << np.uint64(33)

LINK_CLASS = {"macro": 1, "micro": 2, "ue": 3}


def user_keys(user_ids) -> np.ndarray:
    return np.asarray(user_ids, dtype=np.uint64) + _USER_KEY_BASE


def site_key(site_id: int) -> np.ndarray:
    return np.uint64(site_id) + _SITE_KEY_BASE


def _splitmix(x: np.ndarray) -> np.ndarray:
    z = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK
    return z ^ (z >> np.uint64(31))


class ShadowField:
    """Deterministic per-link lognormal shadowing, symmetric in the endpoints."""

    def __init__(self, seed: int):
        self.seed = np.uint64(seed & 0xFFFFFFFFFFFFFFFF)

    def sample_db(self, link_class: int, keys_a, keys_b, sigma_db: float) -> np.ndarray:
        a = np.asarray(keys_a, dtype=np.uint64)
        b = np.asarray(keys_b, dtype=np.uint64)
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        h = _splitmix(self.seed ^ lo)
        h = _splitmix(h ^ hi)
        h = _splitmix(h ^ np.uint64(link_class))
        # top 53 bits -> uniform strictly inside (0, 1) -> standard normal
        u = (h >> np.uint64(11)).astype(np.float64) * 2.0**-53 + 2.0**-54
        return sigma_db * ndtri(u)


def pathloss_db(
    distance_m, los, params: PathlossParams, min_distance_m: float = 1.0
) -> np.ndarray:
    """Log-distance pathloss; NLOS adds a steeper slope plus a fixed penalty."""
    d = np.maximum(np.asarray(distance_m, dtype=float), min_distance_m)
    logd = np.log10(d)
    pl_los = params.intercept_db + params.slope_los_db * logd
    pl_nlos = params.intercept_db + params.slope_nlos_db * logd + params.nlos_penalty_db
    return np.where(np.asarray(los, dtype=bool), pl_los, pl_nlos)


def antenna_gain_db(pattern: AntennaPattern, off_boresight_deg) -> np.ndarray:
    """Parabolic-in-dB pattern with a front-to-back floor."""
    a = (np.asarray(off_boresight_deg, dtype=float) + 180.0) % 360.0 - 180.0
    att = 12.0 * (a / pattern.beamwidth_deg) ** 2
    return pattern.max_gain_dbi - np.minimum(att, pattern.front_to_back_db)


def noise_power_watts(
    bandwidth_hz: float, noise_figure_db: float, thermal_density_dbm_hz: float = -174.0
) -> float:
    """sigma^2 = 10^((N0 + NF + 10 log10 B)/10) mW -> W."""
    dbm = thermal_density_dbm_hz + noise_figure_db + 10.0 * np.log10(bandwidth_hz)
    return float(10.0 ** (dbm / 10.0) * 1e-3)


@dataclass
class GainSet:
    """Linear uplink gains a sector's scheduler works with.

    Rows index the sector's D2D pairs (m), columns its cellular users (n):
    h_cross[m, n] is cellular transmitter n into pair m's receiving end.
    """

    sector_id: int
    cell_users: np.ndarray  # (M,) global user indices
    pairs: np.ndarray  # (N,) global pair indices
    h_cell: np.ndarray  # (M,) cellular UE -> serving sector
    h_d2d: np.ndarray  # (N,) pair tx end -> pair rx end
    h_d2d_bs: np.ndarray  # (N,) pair tx end -> sector
    h_cross: np.ndarray  # (N, M)

    @property
    def shape(self) -> tuple[int, int]:
        return self.h_cross.shape


class DropChannel:
    """Frozen per-drop channel: geometry, LOS, shadowing; caches per-site views."""

    def __init__(
        self,
        env: Environment,
        params: ChannelParams,
        shadow_seed: int,
        users_xy: np.ndarray,
        user_ids: np.ndarray,
    ):
        self.env = env
        self.params = params
        self.shadow = ShadowField(shadow_seed)
        self.users_xy = np.atleast_2d(np.asarray(users_xy, dtype=float))
        self.user_keys = user_keys(user_ids)
        self._site_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    # -- geometry helpers ---------------------------------------------------

    def _los_mask(self, p0: np.ndarray, p1: np.ndarray, dist: np.ndarray) -> np.ndarray:
        los = dist <= self.params.los_max_distance_m
        if np.any(los):
            los_idx = np.flatnonzero(los)
            blocked = segments_blocked(p0[los_idx], p1[los_idx], self.env.building_rects)
            los[los_idx[blocked]] = False
        return los

    def _site_view(self, sector: Sector) -> tuple[np.ndarray, np.ndarray]:
        """Distance and LOS of every dropped user towards a site (cached)."""
        cached = self._site_cache.get(sector.site_id)
        if cached is None:
            site = np.array([sector.x, sector.y])
            delta = self.users_xy - site
            dist = np.hypot(delta[:, 0], delta[:, 1])
            los = self._los_mask(self.users_xy, np.broadcast_to(site, self.users_xy.shape), dist)
            cached = (dist, los)
            self._site_cache[sector.site_id] = cached
        return cached

    def _link_params(self, kind: str) -> PathlossParams:
        if kind == "macro":
            return self.params.macro_link
        if kind == "micro":
            return self.params.micro_link
        return self.params.ue_link

    # -- gains ----------------------------------------------------------------

    def user_sector_gain_db(self, user_idx, sector: Sector) -> np.ndarray:
        """Channel gain (dB, antenna included) between users and a sector."""
        idx = np.asarray(user_idx, dtype=int)
        dist, los = self._site_view(sector)
        dist, los = dist[idx], los[idx]
        pl_params = self._link_params(sector.kind)
        pl = pathloss_db(dist, los, pl_params, self.params.min_distance_m)
        delta = self.users_xy[idx] - np.array([sector.x, sector.y])
        azimuth = np.degrees(np.arctan2(delta[:, 1], delta[:, 0]))
        ant = antenna_gain_db(sector.antenna, azimuth - sector.boresight_deg)
        shadow = self.shadow.sample_db(
            LINK_CLASS[sector.kind], self.user_keys[idx], site_key(sector.site_id),
            pl_params.shadow_sigma_db)
        return -pl + ant + shadow

    def dl_rx_power_dbm(self, user_idx, sector: Sector) -> np.ndarray:
        """Downlink reference power at the users; drives association."""
        return sector.dl_power_dbm + self.user_sector_gain_db(user_idx, sector)

    def user_user_gain_db(self, idx_a, idx_b) -> np.ndarray:
        """Element-wise UE-to-UE gains (no antenna directivity)."""
        a = np.asarray(idx_a, dtype=int)
        b = np.asarray(idx_b, dtype=int)
        pa, pb = self.users_xy[a], self.users_xy[b]
        dist = np.hypot(pa[:, 0] - pb[:, 0], pa[:, 1] - pb[:, 1])
        los = self._los_mask(pa, pb, dist)
        pl = pathloss_db(dist, los, self.params.ue_link, self.params.min_distance_m)
        shadow = self.shadow.sample_db(
            LINK_CLASS["ue"], self.user_keys[a], self.user_keys[b],
            self.params.ue_link.shadow_sigma_db)
        return -pl + shadow

    def cross_gain_db(self, rx_idx, tx_idx) -> np.ndarray:
        """(R, T) UE-to-UE gain matrix: transmitters tx_idx into receivers rx_idx."""
        r = np.asarray(rx_idx, dtype=int)
        t = np.asarray(tx_idx, dtype=int)
        if len(r) == 0 or len(t) == 0:
            return np.zeros((len(r), len(t)))
        rr = np.repeat(r, len(t))
        tt = np.tile(t, len(r))
        return self.user_user_gain_db(rr, tt).reshape(len(r), len(t))

    def distances(self, idx_a, idx_b) -> np.ndarray:
        a = self.users_xy[np.asarray(idx_a, dtype=int)]
        b = self.users_xy[np.asarray(idx_b, dtype=int)]
        return np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1])

    def distance_matrix(self, idx_rows, idx_cols) -> np.ndarray:
        """(R, C) distances between two user index sets."""
        a = self.users_xy[np.asarray(idx_rows, dtype=int)]
        b = self.users_xy[np.asarray(idx_cols, dtype=int)]
        return np.hypot(a[:, 0, None] - b[None, :, 0], a[:, 1, None] - b[None, :, 1])


def build_gain_set(
    channel: DropChannel,
    sector: Sector,
    cell_user_idx: np.ndarray,
    pair_ids: np.ndarray,
    pair_tx_idx: np.ndarray,
    pair_rx_idx: np.ndarray,
) -> GainSet:
    """Assemble the linear gains a sector needs to schedule reuse.

    cell_user_idx are the sector's cellular uplink users; pair_tx/rx_idx are
    the user indices of its D2D pairs' ends (rows of h_cross follow pair
    order, columns follow cellular order).
    """
    cell_idx = np.asarray(cell_user_idx, dtype=int)
    tx = np.asarray(pair_tx_idx, dtype=int)
    rx = np.asarray(pair_rx_idx, dtype=int)
    m, n = len(cell_idx), len(tx)
    lin = lambda db: 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    h_cell = lin(channel.user_sector_gain_db(cell_idx, sector)) if m else np.zeros(0)
    h_d2d = lin(channel.user_user_gain_db(tx, rx)) if n else np.zeros(0)
    h_d2d_bs = lin(channel.user_sector_gain_db(tx, sector)) if n else np.zeros(0)
    h_cross = lin(channel.cross_gain_db(rx, cell_idx)) if (n and m) else np.zeros((n, m))
    return GainSet(
        sector_id=sector.sector_id,
        cell_users=cell_idx,
        pairs=np.asarray(pair_ids, dtype=int),
        h_cell=h_cell,
        h_d2d=h_d2d,
        h_d2d_bs=h_d2d_bs,
        h_cross=h_cross,
    )


def gain_set_csv(gains: GainSet) -> str:
    """Debug dump: one line per link as ``link_id,class,gain_db``."""
    db = lambda h: 10.0 * np.log10(h)
    lines = ["link_id,class,gain_db"]
    for j, u in enumerate(gains.cell_users):
        lines.append(f"cell:{int(u)},cell-uplink,{db(gains.h_cell[j]):.6f}")
    for i, p in enumerate(gains.pairs):
        lines.append(f"pair:{int(p)},d2d-link,{db(gains.h_d2d[i]):.6f}")
        lines.append(f"pair:{int(p)},d2d-to-bs,{db(gains.h_d2d_bs[i]):.6f}")
        for j, u in enumerate(gains.cell_users):
            lines.append(f"pair:{int(p)}<-cell:{int(u)},cross,{db(gains.h_cross[i, j]):.6f}")
    return "\n".join(lines) + "\n"
