"""Resource management: map D2D pairs onto cellular uplink resources.

Four schemes share one output shape (one resource per pair, one pair per
resource inside a sector):

* proposed      — maximum bipartite matching on the feasibility matrix,
                  deterministic tie-break (lexicographically smallest
                  assignment vector among maximum matchings);
* capacity-max  — linear assignment maximizing summed cellular capacity under
                  full reuse, feasibility ignored (comparator);
* random        — uniform injective assignment, feasibility ignored;
* none          — keep every pair silent (baseline).

The matching is an augmenting-path search over column bitmasks; the
brute-force enumerator exists only as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .feasibility import FeasibilityMatrix

__all__ = [
    "Allocation",
    "max_matching_size",
    "brute_force_max_matching",
    "max_total_assignment",
    "allocate_proposed",
    "allocate_capacity_max",
    "allocate_random",
    "allocate_none",
]


@dataclass(frozen=True)
class Allocation:
    """Per-sector schedule: resource_of_pair[m] = column index or -1 (silent)."""

    scheme: str
    resource_of_pair: tuple[int, ...]
    overflow: int = 0  # pairs that could not get a resource for lack of columns

    @property
    def enabled_pairs(self) -> int:
        return sum(1 for r in self.resource_of_pair if r >= 0)

    def pairs(self) -> list[tuple[int, int]]:
        return [(m, r) for m, r in enumerate(self.resource_of_pair) if r >= 0]


def _row_masks(adj: np.ndarray) -> list[int]:
    """Boolean (N, M) adjacency -> per-row column bitmask integers."""
    a = np.asarray(adj, dtype=bool)
    masks = []
    for row in a:
        mask = 0
        for n in np.flatnonzero(row):
            mask |= 1 << int(n)
        masks.append(mask)
    return masks


def _kuhn_size(masks: list[int], n_cols: int, start_row: int = 0, banned: int = 0) -> int:
    """Maximum matching size over rows[start_row:] avoiding banned columns."""
    match_row = {}  # col -> row

    def augment(r: int, visited: int) -> tuple[bool, int]:
        while True:
            free = masks[r] & ~banned & ~visited
            if not free:
                return False, visited
            bit = free & -free
            visited |= bit
            col = bit.bit_length() - 1
            owner = match_row.get(col)
            if owner is None:
                match_row[col] = r
                return True, visited
            ok, visited = augment(owner, visited)
            if ok:
                match_row[col] = r
                return True, visited

    size = 0
    for r in range(start_row, len(masks)):
        ok, _ = augment(r, 0)
        if ok:
            size += 1
    return size


def max_matching_size(adj: np.ndarray) -> int:
    """Cardinality of a maximum matching of pairs (rows) to resources (cols)."""
    a = np.asarray(adj, dtype=bool)
    if a.ndim != 2:
        raise ValueError("adjacency must be 2-D")
    return _kuhn_size(_row_masks(a), a.shape[1])


def brute_force_max_matching(adj: np.ndarray) -> int:
    """Exponential enumeration oracle; refuses anything bigger than 8x8."""
    a = np.asarray(adj, dtype=bool)
    n, m = a.shape
    if n > 8 or m > 8:
        raise ValueError("brute-force oracle is limited to 8x8 instances")

    def best(r: int, used: int) -> int:
        if r == n:
            return 0
        score = best(r + 1, used)  # leave row r out
        for c in range(m):
            if a[r, c] and not used & (1 << c):
                score = max(score, 1 + best(r + 1, used | (1 << c)))
        return score

    return best(0, 0)


def allocate_proposed(feasibility: FeasibilityMatrix) -> Allocation:
    """Maximum matching with a deterministic, lexicographically smallest result.

    Rows are processed in pair order; each takes the smallest feasible column
    that still lets the remaining rows complete a maximum matching, else
    stays unassigned.  The assignment vector (with unassigned sorted last) is
    therefore the lexicographic minimum over all maximum matchings.
    """
    adj = feasibility.entries.astype(bool)
    n, m = adj.shape
    masks = _row_masks(adj)
    remaining = _kuhn_size(masks, m)
    banned = 0
    out = [-1] * n
    for r in range(n):
        if remaining == 0:
            break
        free = masks[r] & ~banned
        while free:
            bit = free & -free
            free ^= bit
            col = bit.bit_length() - 1
            if _kuhn_size(masks, m, r + 1, banned | bit) >= remaining - 1:
                out[r] = col
                banned |= bit
                remaining -= 1
                break
    return Allocation(scheme="proposed", resource_of_pair=tuple(out))


def max_total_assignment(score: np.ndarray) -> tuple[list[tuple[int, int]], float]:
    """Injective row->column assignment maximizing the summed score."""
    s = np.asarray(score, dtype=float)
    if s.ndim != 2:
        raise ValueError("score must be a 2-D matrix")
    if s.size == 0:
        return [], 0.0
    rows, cols = linear_sum_assignment(s, maximize=True)
    return list(zip(rows.tolist(), cols.tolist())), float(s[rows, cols].sum())


def allocate_capacity_max(
    cell_capacity: np.ndarray, baseline_capacity: np.ndarray
) -> Allocation:
    """Reuse min(N, M) resources so summed cellular capacity is maximal.

    cell_capacity[m, n] is the cellular rate of resource n under reuse by
    pair m; unreused resources keep baseline_capacity[n].  Always schedules
    min(N, M) pairs — this comparator never declines a reuse opportunity.
    """
    cap = np.asarray(cell_capacity, dtype=float)
    base = np.asarray(baseline_capacity, dtype=float)
    n, m = cap.shape
    if base.shape != (m,):
        raise ValueError("baseline_capacity length must match resource count")
    out = [-1] * n
    if n and m:
        benefit = cap - base[None, :]
        rows, cols = linear_sum_assignment(benefit, maximize=True)
        for r, c in zip(rows, cols):
            out[int(r)] = int(c)
    return Allocation(
        scheme="capacity-max",
        resource_of_pair=tuple(out),
        overflow=max(0, n - m),
    )


def allocate_random(
    n_pairs: int, n_resources: int, rng: np.random.Generator
) -> Allocation:
    """Uniform injective assignment of min(N, M) pairs to resources."""
    k = min(n_pairs, n_resources)
    out = [-1] * n_pairs
    if k:
        chosen_pairs = rng.permutation(n_pairs)[:k]
        chosen_cols = rng.permutation(n_resources)[:k]
        for p, c in zip(chosen_pairs, chosen_cols):
            out[int(p)] = int(c)
    return Allocation(
        scheme="random",
        resource_of_pair=tuple(out),
        overflow=max(0, n_pairs - n_resources),
    )


def allocate_none(n_pairs: int) -> Allocation:
    """Baseline: no pair transmits."""
    return Allocation(scheme="none", resource_of_pair=(-1,) * n_pairs)
