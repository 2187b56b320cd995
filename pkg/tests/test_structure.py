import itertools
import math

import pytest

from stseq.catalog import builtin, fano, random_system
from stseq.core import independence_bounds
from stseq.errors import ImproperColouring
from stseq.structure import (
    BudgetExceeded,
    Colouring,
    chromatic_number,
    closure,
    cross_block_counts,
    feasible_profiles,
    find_independent_set,
    find_sts7_subsystems,
    greedy_maximal_independent,
    is_independent,
    is_proper,
    maximal_independent_lower_bound,
    profile_feasible,
    proper_colouring,
)

PROFILES_25 = {(11, 8, 6), (11, 7, 7), (10, 10, 5), (10, 9, 6), (10, 8, 7), (9, 9, 7), (9, 8, 8)}
PROFILES_27 = {(12, 9, 6), (12, 8, 7), (11, 10, 6), (11, 9, 7), (11, 8, 8), (10, 10, 7),
               (10, 9, 8), (9, 9, 9)}


def brute_independence_number(s):
    best = 0
    for k in range(1, s.v + 1):
        if any(is_independent(s, pts) for pts in itertools.combinations(range(s.v), k)):
            best = k
        else:
            break
    return best


def brute_colourable(s, k):
    for labels in itertools.product(range(k), repeat=s.v):
        if all(len({labels[p] for p in b}) > 1 for b in s.blocks):
            return True
    return False


def brute_subsystems(s):
    out = []
    for pts in itertools.combinations(range(s.v), 7):
        inside = [b for b in s.blocks if set(b) <= set(pts)]
        if len(inside) == 7:
            out.append(frozenset(pts))
    return sorted(out, key=sorted)


def test_greedy_fano_and_bound(fano_sys):
    assert maximal_independent_lower_bound(7) == 4
    for seed in range(20):
        ind = greedy_maximal_independent(fano_sys, seed)
        assert len(ind) == 4 and is_independent(fano_sys, ind)


def test_greedy_is_maximal():
    s = builtin("C1").system
    for seed in range(10):
        ind = greedy_maximal_independent(s, seed)
        assert len(ind) >= 6
        for p in set(range(s.v)) - ind:
            assert not is_independent(s, ind | {p})


@pytest.mark.parametrize("name", ["STS7", "STS9", "STS13-1", "STS13-2"])
def test_find_independent_matches_brute_force(name):
    s = builtin(name).system
    alpha = brute_independence_number(s)
    found = find_independent_set(s, alpha)
    assert found is not None and len(found) == alpha and is_independent(s, found)
    assert find_independent_set(s, alpha + 1) is None
    assert alpha <= independence_bounds(s.v)[1]


def test_fano_independent_sets(fano_sys):
    assert find_independent_set(fano_sys, 5) is None
    four = find_independent_set(fano_sys, 4)
    assert is_independent(fano_sys, four)


@pytest.mark.parametrize("name", ["C%d" % k for k in range(1, 8)])
def test_eight_sets_in_sts21(name):
    s = builtin(name).system
    found = find_independent_set(s, 8)
    assert found is not None and is_independent(s, found)


@pytest.mark.parametrize("name,k,expected", [("STS7", 2, False), ("STS7", 3, True),
                                             ("STS9", 2, False), ("STS9", 3, True)])
def test_colouring_matches_brute_force(name, k, expected):
    s = builtin(name).system
    assert brute_colourable(s, k) == expected
    col = proper_colouring(s, k)
    assert (col is not None) == expected
    if col is not None:
        assert is_proper(s, col)


def test_profile_colouring_a1():
    s = builtin("A1").system
    col = proper_colouring(s, 3, (7, 6, 6))
    assert col.profile == (7, 6, 6) and is_proper(s, col)
    counts = cross_block_counts(s, col)
    assert counts.total() == 57


def test_colouring_budget():
    with pytest.raises(BudgetExceeded):
        proper_colouring(builtin("C1").system, 2, budget=10)
    with pytest.raises(ValueError):
        proper_colouring(fano(), 3, (3, 3, 3))


def test_chromatic_numbers():
    assert chromatic_number(fano()) == 3
    assert chromatic_number(builtin("STS9").system) == 3
    assert chromatic_number(builtin("A1").system) == 3


def test_profile_lists():
    assert set(feasible_profiles(25)) == PROFILES_25
    assert set(feasible_profiles(27)) == PROFILES_27
    assert profile_feasible(27, (12, 9, 6))[0]
    assert profile_feasible(25, (11, 7, 7))[0]
    ok, reason = profile_feasible(25, (13, 6, 6))
    assert not ok and "exceeds" in reason


def test_profile_feasibility_is_necessary():
    # every colouring the search finds must pass the feasibility test
    for seed in range(5):
        s = random_system(19, seed)
        col = proper_colouring(s, 3)
        assert profile_feasible(19, col.profile)[0]


@pytest.mark.parametrize("name", ["STS7", "STS9", "STS13-1", "STS13-2", "STS15-1"])
def test_subsystems_match_brute_force(name):
    s = builtin(name).system
    assert find_sts7_subsystems(s) == brute_subsystems(s)


def test_projective_subsystem_count():
    assert len(find_sts7_subsystems(builtin("STS15-1").system)) == 15
    assert find_sts7_subsystems(builtin("STS13-1").system) == []


def test_closure():
    s = builtin("STS15-1").system
    blk = s.blocks[0]
    assert closure(s, blk) == frozenset(blk)
    assert len(closure(s, range(15))) == 15


def test_cross_counts_equitable_sts21():
    for name in ("C1", "C4", "C6"):
        s = builtin(name).system
        col = proper_colouring(s, 3, (7, 7, 7))
        c = cross_block_counts(s, col)
        assert c.transversal == 7
        for x in range(3):
            others = [y for y in range(3) if y != x]
            assert sum(c.n(x, y) for y in others) == 21
        assert c.total() == 70


def test_cross_counts_reject_improper(fano_sys):
    bad = Colouring((frozenset(range(7)),))
    with pytest.raises(ImproperColouring):
        cross_block_counts(fano_sys, bad)


def test_from_labels():
    col = Colouring.from_labels([0, 1, 1, 0, 2])
    assert col.sizes == (2, 2, 1)
    assert col.colour_of()[4] == 2
