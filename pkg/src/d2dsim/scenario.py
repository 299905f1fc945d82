"""Urban deployment: Manhattan-style grid, radio sites, user drops, D2D pairing.

One grid is 387 x 552 m with three building columns and four building rows
separated by 21 m streets (10.5 m half-streets at the rim).  The centre block
of the second row is a park, and the four corner blocks are split in two by a
6 m alley, giving 15 buildings plus the park.  The main street runs
horizontally between the second and third rows; all radio sites stand on it.
The measured grid sits at the centre of a 3 x 3 tiling of identical replicas
so that cell-border users see realistic neighbour sectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .config import AntennaPattern, ScenarioConfig
from .geometry import points_in_rects, sample_outdoor_points

ROLE_CELLULAR = "cellular"
ROLE_D2D_TX = "d2d-tx"
ROLE_D2D_RX = "d2d-rx"

# Canonical block layout on the 387 x 552 m reference grid (scaled for other
# dimensions).  Tuples are (min, max) coordinates of building columns/rows.
_REF_W = 387.0
_REF_H = 552.0
_COL_X = ((10.5, 120.5), (141.5, 251.5), (272.5, 376.5))
_ROW_Y = ((10.5, 127.5), (148.5, 265.5), (286.5, 403.5), (424.5, 541.5))
_PARK_BLOCK = (1, 1)  # (column, row): centre block of the second row
_SPLIT_BLOCKS = {(0, 0), (2, 0), (0, 3), (2, 3)}  # corner blocks, split by alley
_ALLEY_M = 6.0
MAIN_STREET_Y = (265.5, 286.5)  # between rows 1 and 2


@dataclass(frozen=True)
class Building:
    xmin: float
    ymin: float
    xmax: float
    ymax: float
    height_m: float

    @property
    def rect(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.ymin, self.xmax, self.ymax)


@dataclass(frozen=True)
class Sector:
    sector_id: int
    site_id: int
    grid_index: int
    kind: str  # "macro" | "micro"
    x: float
    y: float
    height_m: float
    boresight_deg: float
    carrier_hz: float
    bandwidth_hz: float
    dl_power_dbm: float
    selection_offset_db: float
    antenna: AntennaPattern


@dataclass
class UserTerminal:
    user_id: int
    x: float
    y: float
    z: float
    grid_index: int  # 0 = measured central grid
    role: str = ROLE_CELLULAR
    serving_sector: int | None = None


@dataclass(frozen=True)
class D2DPair:
    pair_id: int
    tx_user: int  # user_id of the transmitting end (protocol initiator)
    rx_user: int
    distance_m: float


@dataclass
class Environment:
    width_m: float
    height_m: float
    offsets: np.ndarray  # (G, 2) grid origin offsets, row 0 = central grid
    buildings: list[Building]
    building_rects: np.ndarray  # (B, 4) cache for blocking tests
    park_rect: tuple[float, float, float, float]  # central grid
    sectors: list[Sector]

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        xs = self.offsets[:, 0]
        ys = self.offsets[:, 1]
        return (xs.min(), ys.min(), xs.max() + self.width_m, ys.max() + self.height_m)

    def grid_index_of(self, xy: np.ndarray) -> np.ndarray:
        """Map positions to the replica grid that contains them."""
        p = np.atleast_2d(xy)
        ix = np.floor(p[:, 0] / self.width_m) * self.width_m
        iy = np.floor(p[:, 1] / self.height_m) * self.height_m
        lookup = {(ox, oy): g for g, (ox, oy) in enumerate(map(tuple, self.offsets))}
        return np.array([lookup.get((x, y), -1) for x, y in zip(ix, iy)], dtype=int)


def _block_rects(width: float, height: float) -> tuple[list[tuple], tuple]:
    """Building footprints and the park rect for one grid at origin (0, 0)."""
    sx = width / _REF_W
    sy = height / _REF_H
    rects: list[tuple] = []
    park = None
    for c, (x0, x1) in enumerate(_COL_X):
        for r, (y0, y1) in enumerate(_ROW_Y):
            rect = (x0 * sx, y0 * sy, x1 * sx, y1 * sy)
            if (c, r) == _PARK_BLOCK:
                park = rect
                continue
            if (c, r) in _SPLIT_BLOCKS:
                ymid = 0.5 * (rect[1] + rect[3])
                half = 0.5 * _ALLEY_M * sy
                rects.append((rect[0], rect[1], rect[2], ymid - half))
                rects.append((rect[0], ymid + half, rect[2], rect[3]))
            else:
                rects.append(rect)
    assert park is not None and len(rects) == 15
    return rects, park


def _grid_offsets(width: float, height: float, rings: int) -> np.ndarray:
    if rings == 0:
        return np.array([[0.0, 0.0]])
    offs = [(0.0, 0.0)]
    for iy in (-1, 0, 1):
        for ix in (-1, 0, 1):
            if (ix, iy) != (0, 0):
                offs.append((ix * width, iy * height))
    return np.array(offs)


def generate_environment(cfg: ScenarioConfig, rng: np.random.Generator) -> Environment:
    """Buildings and radio sites for all replica grids.

    The only randomness is the 15 building heights (uniform integer floor
    counts); replicas share identical footprints and heights.
    """
    w, h = cfg.grid_width_m, cfg.grid_height_m
    base_rects, park = _block_rects(w, h)
    floors = rng.integers(cfg.min_floors, cfg.max_floors + 1, size=len(base_rects))
    heights = floors * cfg.floor_height_m
    offsets = _grid_offsets(w, h, cfg.replica_rings)

    buildings: list[Building] = []
    for ox, oy in offsets:
        for rect, bh in zip(base_rects, heights):
            buildings.append(Building(rect[0] + ox, rect[1] + oy, rect[2] + ox, rect[3] + oy, bh))
    rects = np.array([b.rect for b in buildings])

    street_mid = 0.5 * (MAIN_STREET_Y[0] + MAIN_STREET_Y[1]) * (h / _REF_H)
    sectors: list[Sector] = []
    site_id = 0
    sector_id = 0
    for g, (ox, oy) in enumerate(offsets):
        site_positions: list[tuple[str, float, float]] = [("macro", w / 2 + ox, street_mid + oy)]
        if cfg.micro_enabled:
            n = cfg.micro_sites_per_grid
            for i in range(n):
                # evenly spread along the main street, nudged off the macro site
                mx = w * (2 * i + 1) / (2 * n) + ox
                site_positions.append(("micro", mx, street_mid - 3.75 + oy))
        for kind, sx, sy in site_positions:
            params = cfg.macro if kind == "macro" else cfg.micro
            for k in range(params.sectors_per_site):
                sectors.append(Sector(
                    sector_id=sector_id,
                    site_id=site_id,
                    grid_index=g,
                    kind=kind,
                    x=sx,
                    y=sy,
                    height_m=params.height_m,
                    boresight_deg=(params.sector_rotation_deg
                                   + 360.0 * k / params.sectors_per_site) % 360.0,
                    carrier_hz=params.carrier_hz,
                    bandwidth_hz=params.uplink_bandwidth_hz,
                    dl_power_dbm=params.dl_power_dbm,
                    selection_offset_db=params.selection_offset_db,
                    antenna=params.antenna,
                ))
                sector_id += 1
            site_id += 1

    return Environment(
        width_m=w,
        height_m=h,
        offsets=offsets,
        buildings=buildings,
        building_rects=rects,
        park_rect=park,
        sectors=sectors,
    )


def drop_users(cfg: ScenarioConfig, env: Environment, rng: np.random.Generator) -> list[UserTerminal]:
    """Drop outdoor users uniformly over all replica grids.

    The user count is Poisson with mean density x total area unless
    `fixed_user_count` overrides it.
    """
    xmin, ymin, xmax, ymax = env.bounds
    area_km2 = (xmax - xmin) * (ymax - ymin) * 1e-6
    if cfg.fixed_user_count is not None:
        count = cfg.fixed_user_count
    else:
        count = int(rng.poisson(cfg.user_density_per_km2 * area_km2))
    pts = sample_outdoor_points(count, env.bounds, env.building_rects, rng)
    grids = env.grid_index_of(pts) if count else np.empty(0, dtype=int)
    return [
        UserTerminal(i, float(pts[i, 0]), float(pts[i, 1]), cfg.ue_height_m, int(grids[i]))
        for i in range(count)
    ]


def pair_users(
    cfg: ScenarioConfig, users: list[UserTerminal], rng: np.random.Generator
) -> list[D2DPair]:
    """Form D2D candidate pairs by greedy nearest-neighbour matching.

    A d2d_fraction share of users is eligible; eligible users are scanned in
    id order and paired with their nearest unpaired eligible neighbour within
    max_pair_distance_m.  Users left unpaired keep their cellular role.  The
    lower-id end of each pair transmits (and initiates the protocol).
    """
    n = len(users)
    k = int(round(cfg.d2d_fraction * n))
    if k < 2:
        return []
    eligible = np.sort(rng.permutation(n)[:k])
    pos = np.array([(users[i].x, users[i].y) for i in eligible])
    tree = cKDTree(pos)
    neighbours = tree.query_ball_tree(tree, r=cfg.max_pair_distance_m)
    paired = np.zeros(k, dtype=bool)
    pairs: list[D2DPair] = []
    for a in range(k):
        if paired[a]:
            continue
        cands = [b for b in neighbours[a] if b != a and not paired[b]]
        if not cands:
            continue
        d = np.hypot(pos[cands, 0] - pos[a, 0], pos[cands, 1] - pos[a, 1])
        b = cands[int(np.argmin(d))]  # ties resolve to the lowest index
        paired[a] = paired[b] = True
        tx, rx = int(eligible[a]), int(eligible[b])
        users[tx].role = ROLE_D2D_TX
        users[rx].role = ROLE_D2D_RX
        pairs.append(D2DPair(len(pairs), tx, rx, float(np.hypot(
            users[tx].x - users[rx].x, users[tx].y - users[rx].y))))
    return pairs


def associate_users(users: list[UserTerminal], env: Environment, channel) -> np.ndarray:
    """Attach every user to the sector with the strongest biased DL power.

    `channel` provides dl_rx_power_dbm(user_indices, sector); ties resolve to
    the lowest sector id.  Returns the serving sector id per user and writes
    it back onto the terminals.
    """
    n = len(users)
    serving = np.full(n, -1, dtype=int)
    if n == 0:
        return serving
    idx = np.arange(n)
    best = np.full(n, -np.inf)
    for sector in env.sectors:  # ascending sector_id, so strict > keeps lowest id on ties
        p = channel.dl_rx_power_dbm(idx, sector) + sector.selection_offset_db
        better = p > best
        serving[better] = sector.sector_id
        best[better] = p[better]
    for u, s in zip(users, serving):
        u.serving_sector = int(s)
    return serving


def outdoor_fraction(env: Environment, samples: int = 20000, seed: int = 0) -> float:
    """Monte-Carlo outdoor area fraction (diagnostics only)."""
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = env.bounds
    pts = rng.uniform((xmin, ymin), (xmax, ymax), size=(samples, 2))
    return float(1.0 - points_in_rects(pts, env.building_rects).mean())
