"""Allocators: matching vs brute force, assignment vs permutations, tie-breaks."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dsim.feasibility import FeasibilityMatrix
from d2dsim.rrm import (allocate_capacity_max, allocate_none, allocate_proposed,
                        allocate_random, brute_force_max_matching,
                        max_matching_size, max_total_assignment)


def feas(entries) -> FeasibilityMatrix:
    return FeasibilityMatrix(entries=np.asarray(entries, dtype=np.uint8),
                             mode="exact")


def all_max_matchings(adj):
    """Every maximum matching as an assignment vector (-1 = unassigned)."""
    a = np.asarray(adj, dtype=bool)
    n, m = a.shape
    out = []

    def rec(r, used, vec):
        if r == n:
            out.append(tuple(vec))
            return
        rec(r + 1, used, vec + [-1])
        for c in range(m):
            if a[r, c] and not used & (1 << c):
                rec(r + 1, used | (1 << c), vec + [c])

    rec(0, 0, [])
    best = max(sum(v >= 0 for v in vec) for vec in out)
    return [vec for vec in out if sum(v >= 0 for v in vec) == best], best


def lex_key(vec, m):
    return tuple(v if v >= 0 else m for v in vec)


def test_known_matchings():
    assert max_matching_size(np.array([[1, 0], [0, 1]], dtype=bool)) == 2
    assert max_matching_size(np.array([[1, 1], [1, 0]], dtype=bool)) == 2
    assert max_matching_size(np.array([[1], [1]], dtype=bool)) == 1
    assert max_matching_size(np.zeros((3, 4), dtype=bool)) == 0
    assert max_matching_size(np.zeros((0, 4), dtype=bool)) == 0
    assert max_matching_size(np.zeros((3, 0), dtype=bool)) == 0


def test_matching_matches_brute_force(rng):
    for _ in range(300):
        n, m = int(rng.integers(0, 7)), int(rng.integers(0, 7))
        adj = rng.random((n, m)) < rng.uniform(0.1, 0.9)
        assert max_matching_size(adj) == brute_force_max_matching(adj)


def test_brute_force_size_cap():
    with pytest.raises(ValueError, match="8x8"):
        brute_force_max_matching(np.ones((9, 2), dtype=bool))


def test_proposed_is_lexicographically_smallest(rng):
    for _ in range(150):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        adj = rng.random((n, m)) < rng.uniform(0.2, 0.9)
        alloc = allocate_proposed(feas(adj))
        vecs, best = all_max_matchings(adj)
        assert alloc.enabled_pairs == best == max_matching_size(adj)
        want = min(lex_key(v, m) for v in vecs)
        assert lex_key(alloc.resource_of_pair, m) == want


def test_proposed_uses_only_feasible_edges(rng):
    adj = rng.random((6, 6)) < 0.4
    alloc = allocate_proposed(feas(adj))
    cols = [c for c in alloc.resource_of_pair if c >= 0]
    assert len(set(cols)) == len(cols)  # injective
    for r, c in alloc.pairs():
        assert adj[r, c]


def test_proposed_deterministic():
    adj = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1]], dtype=bool)
    a = allocate_proposed(feas(adj))
    b = allocate_proposed(feas(adj))
    assert a == b
    # row 0 takes col 0; row 1's smallest free feasible column is 2
    assert a.resource_of_pair == (0, 2, 1)


def test_proposed_tie_break_prefers_small_columns():
    adj = np.array([[1, 1], [1, 1]], dtype=bool)
    assert allocate_proposed(feas(adj)).resource_of_pair == (0, 1)
    # row 0 must skip col 0 when taking it would shrink the matching
    adj2 = np.array([[1, 1], [1, 0]], dtype=bool)
    assert allocate_proposed(feas(adj2)).resource_of_pair == (1, 0)


def test_proposed_empty_dimensions():
    assert allocate_proposed(feas(np.zeros((0, 3)))).resource_of_pair == ()
    assert allocate_proposed(feas(np.zeros((2, 0)))).resource_of_pair == (-1, -1)


def capacity_oracle(cap, base):
    """Exhaustive best total cellular capacity over injective assignments."""
    n, m = cap.shape
    k = min(n, m)
    best = -np.inf
    for rows in itertools.combinations(range(n), k):
        for cols in itertools.permutations(range(m), k):
            total = base.sum() + sum(
                cap[r, c] - base[c] for r, c in zip(rows, cols))
            best = max(best, total)
    return best


def realized_total(cap, base, alloc):
    total = 0.0
    used = {}
    for r, c in alloc.pairs():
        used[c] = r
    for c in range(cap.shape[1]):
        total += cap[used[c], c] if c in used else base[c]
    return total


@pytest.mark.parametrize("n,m", [(3, 3), (2, 4), (4, 2), (5, 5), (1, 1)])
def test_capacity_max_matches_exhaustive(n, m, rng):
    for _ in range(60):
        cap = rng.uniform(0.0, 8.0, (n, m))
        base = rng.uniform(0.0, 8.0, m)
        alloc = allocate_capacity_max(cap, base)
        assert alloc.enabled_pairs == min(n, m)  # never declines
        assert alloc.overflow == max(0, n - m)
        got = realized_total(cap, base, alloc)
        assert got == pytest.approx(capacity_oracle(cap, base), abs=1e-9)


def test_capacity_max_validation(rng):
    with pytest.raises(ValueError, match="baseline"):
        allocate_capacity_max(rng.uniform(0, 1, (2, 3)), np.zeros(2))
    a = allocate_capacity_max(np.zeros((0, 3)), np.zeros(3))
    assert a.resource_of_pair == ()


def test_max_total_assignment(rng):
    score = rng.uniform(0.0, 5.0, (4, 4))
    pairs, total = max_total_assignment(score)
    best = max(sum(score[i, p[i]] for i in range(4))
               for p in itertools.permutations(range(4)))
    assert total == pytest.approx(best, abs=1e-12)
    assert len({c for _, c in pairs}) == len(pairs)
    assert max_total_assignment(np.zeros((0, 0)))[1] == 0.0
    with pytest.raises(ValueError, match="2-D"):
        max_total_assignment(np.zeros(3))


def test_allocate_random_properties():
    rng = np.random.default_rng(0)
    for n, m in ((5, 3), (3, 5), (4, 4), (0, 3), (3, 0)):
        alloc = allocate_random(n, m, rng)
        cols = [c for c in alloc.resource_of_pair if c >= 0]
        assert len(cols) == min(n, m)
        assert len(set(cols)) == len(cols)
        assert all(0 <= c < m for c in cols)
        assert alloc.overflow == max(0, n - m)
    a = allocate_random(6, 6, np.random.default_rng(9))
    b = allocate_random(6, 6, np.random.default_rng(9))
    assert a == b


def test_allocate_none():
    alloc = allocate_none(4)
    assert alloc.resource_of_pair == (-1, -1, -1, -1)
    assert alloc.enabled_pairs == 0
    assert alloc.pairs() == []


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_matching_invariants(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    adj = rng.random((n, m)) < rng.uniform(0.1, 0.9)
    size = max_matching_size(adj)
    assert 0 <= size <= min(n, m)
    assert size == brute_force_max_matching(adj)
    # adding one edge never shrinks the matching
    r, c = int(rng.integers(0, n)), int(rng.integers(0, m))
    grown = adj.copy()
    grown[r, c] = True
    assert max_matching_size(grown) >= size
    # the proposed allocator realizes the maximum with feasible, unique columns
    alloc = allocate_proposed(feas(adj))
    assert alloc.enabled_pairs == size
    cols = [x for x in alloc.resource_of_pair if x >= 0]
    assert len(set(cols)) == len(cols)
    assert all(adj[r2, c2] for r2, c2 in alloc.pairs())
