"""Acceptance criteria 1-8. Each test prints one PASS/FAIL line; a summary repeats them at the end.

Run standalone with ``python tests/test_acceptance.py`` or through pytest.
"""

import itertools
import math
import time

import numpy as np
import pytest

from stseq.catalog import (
    STS15_NOT_CYCLIC5,
    STS15_STRINGS,
    builtin,
    decode_sequencing,
    random_system,
    sts15_listing,
)
from stseq.constructions import ConstructionTrace, five_good, theorem5_4good, theorem6_ell_good
from stseq.core import (
    blackburn_etzion_threshold,
    goodness_report,
    independence_bounds,
    is_ell_good,
    lmax_upper_bound,
)
from stseq.errors import MissingDataFile
from stseq.search import STATUS_BUDGET, STATUS_EXHAUSTED, search_ell_good
from stseq.structure import (
    chromatic_number,
    feasible_profiles,
    find_independent_set,
    find_sts7_subsystems,
    greedy_maximal_independent,
    maximal_independent_lower_bound,
    proper_colouring,
)

RESULTS: dict[int, str] = {}

PROFILES_25 = {(11, 8, 6), (11, 7, 7), (10, 10, 5), (10, 9, 6), (10, 8, 7), (9, 9, 7), (9, 8, 8)}
PROFILES_27 = {(12, 9, 6), (12, 8, 7), (11, 10, 6), (11, 9, 7), (11, 8, 8), (10, 10, 7),
               (10, 9, 8), (9, 9, 9)}


def record(n, failures, summary):
    line = f"{'PASS' if not failures else 'FAIL'} criterion {n}: {summary}"
    if failures:
        line += " | failing: " + "; ".join(failures)
    RESULTS[n] = line
    print(line)
    assert not failures, line


def printed(entry_id):
    entry = builtin(entry_id)
    seq = entry.known_sequencings[0].sequencing
    return entry.system, seq, goodness_report(entry.system, seq)


def test_criterion_1_published_tables():
    start = time.perf_counter()
    fails = []
    for name in ("STS13-1", "STS13-2"):
        s = builtin(name).system
        if not is_ell_good(s, range(13), 4, cyclic=True)[0]:
            fails.append(f"{name} identity not cyclic 4-good")
    checks = [(i, 6, 6) for i in ("A1", "A2")] + [(i, 6, 5) for i in ("A3", "A4")]
    checks += [(f"C{k}", 6, 6) for k in range(1, 8)] + [("C2", 7, 6)]
    for name, lin, cyc in checks:
        s, seq, rep = printed(name)
        if not is_ell_good(s, seq, lin)[0]:
            fails.append(f"{name} string is not {lin}-good (best {rep.max_linear_ell})")
        if not is_ell_good(s, seq, cyc, cyclic=True)[0]:
            fails.append(f"{name} string is not cyclically {cyc}-good (best {rep.max_cyclic_ell})")
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        fails.append(f"took {elapsed:.2f}s")
    record(1, sorted(set(fails)), f"printed strings, {len(checks) + 2} claims in {elapsed:.2f}s")


def test_criterion_2_sts15_table():
    start = time.perf_counter()
    try:
        systems = sts15_listing()
    except MissingDataFile as exc:
        record(2, [f"listing unavailable: {exc}"], "80-system STS(15) table")
    fails = []
    for k, (s, text) in enumerate(zip(systems, STS15_STRINGS), 1):
        seq = decode_sequencing(text, 15)
        if not is_ell_good(s, seq, 5)[0]:
            fails.append(f"#{k} not 5-good")
        cyc5 = is_ell_good(s, seq, 5, cyclic=True)[0]
        if k in STS15_NOT_CYCLIC5:
            if cyc5 or not is_ell_good(s, seq, 4, cyclic=True)[0]:
                fails.append(f"#{k} should be cyclically 4- but not 5-good")
        elif not cyc5:
            fails.append(f"#{k} not cyclically 5-good")
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        fails.append(f"took {elapsed:.2f}s")
    record(2, fails, f"80 STS(15) strings in {elapsed:.2f}s")


def _brute_has_4_good(s):
    perms = np.array(list(itertools.permutations(range(s.v))), dtype=np.int8)
    pos = np.argsort(perms, axis=1)
    good = np.ones(len(perms), dtype=bool)
    for blk in s.blocks:
        p = pos[:, list(blk)]
        good &= p.max(axis=1) - p.min(axis=1) + 1 > 4
    return bool(good.any()), len(perms)


def test_criterion_3_nonexistence():
    fails, notes = [], []
    start = time.perf_counter()
    for name in ("STS7", "STS9"):
        s = builtin(name).system
        has, scanned = _brute_has_4_good(s)
        out = search_ell_good(s, 4)
        if has or out.status != STATUS_EXHAUSTED:
            fails.append(f"{name} 4-good found or search not exhausted")
        notes.append(f"{name}: {scanned} orders scanned, search {out.status}")
    small = time.perf_counter() - start
    if small >= 10:
        fails.append(f"small scans took {small:.1f}s")
    out = search_ell_good(builtin("STS15-1").system, 5, cyclic=True, budget=10**9, time_limit=3600)
    if out.found:
        fails.append("STS15-1 has a cyclic 5-good sequencing")
    elif out.status == STATUS_BUDGET:
        notes.append("STS15-1 cyclic 5: no Found within budget (downgraded)")
    else:
        notes.append(f"STS15-1 cyclic 5 EXHAUSTED after {out.nodes_expanded} nodes")
    record(3, fails, "; ".join(notes))


def test_criterion_4_construction_soundness():
    start = time.perf_counter()
    fails = []
    made = 0
    systems = [(f"C{k}", builtin(f"C{k}").system) for k in range(1, 8)]
    systems += [(f"random21-{seed}", random_system(21, seed)) for seed in range(100)]
    for name, s in systems:
        indep = find_independent_set(s, 8)
        if indep is None:
            fails.append(f"{name}: no 8-point independent set")
            continue
        seq = theorem5_4good(s, indep)
        if goodness_report(s, seq).max_linear_ell < 4:
            fails.append(f"{name}: t5 result not 4-good")
        made += 1
    for name in ("A1", "A2", "A3", "A4"):
        s = builtin(name).system
        col = proper_colouring(s, 3, (7, 6, 6))
        if col is None or not is_ell_good(s, theorem6_ell_good(s, col, 4), 4)[0]:
            fails.append(f"{name}: t6 (7,6,6) failed")
        made += 1
    routes = {}
    for name in ["STS15-1", "A1", "A2", "A3", "A4"] + [f"C{k}" for k in range(1, 8)]:
        s = builtin(name).system
        trace = ConstructionTrace("t8")
        seq = five_good(s, seed=0, trace=trace)
        if not is_ell_good(s, seq, 5)[0]:
            fails.append(f"{name}: 5-good construction failed")
        routes[trace.method] = routes.get(trace.method, 0) + 1
        made += 1
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        fails.append(f"took {elapsed:.1f}s")
    route_text = ", ".join(f"{k} x{v}" for k, v in sorted(routes.items()))
    record(4, fails, f"{made} constructions verified in {elapsed:.1f}s (5-good routes: {route_text})")


def test_criterion_5_colbourn():
    from stseq.catalog import BUILTIN_IDS
    from stseq.constructions import colbourn_3good

    start = time.perf_counter()
    fails = []
    for name in BUILTIN_IDS:
        s = builtin(name).system
        if not is_ell_good(s, colbourn_3good(s, cyclic=True), 3, cyclic=True)[0]:
            fails.append(name)
    elapsed = time.perf_counter() - start
    if elapsed >= 1:
        fails.append(f"took {elapsed:.2f}s")
    record(5, fails, f"cyclic 3-good on {len(BUILTIN_IDS)} catalog systems in {elapsed:.2f}s")


def test_criterion_6_bounds():
    fails = []
    if blackburn_etzion_threshold(4) != 55:
        fails.append("threshold(4) != 55")
    for ell in range(3, 13):
        c = math.comb(ell - 1, 2)
        quartic = (3 * ell**4 - 14 * ell**3 + 27 * ell**2 - 24 * ell + 12) / 4
        if not blackburn_etzion_threshold(ell) == quartic == (2 * ell + 3 * c) * c + ell:
            fails.append(f"forms disagree at ell={ell}")
    for v, cap in ((13, 4), (15, 5), (19, 6), (21, 7)):
        if lmax_upper_bound(v) != cap:
            fails.append(f"lmax({v}) != {cap}")
    for v, want in ((31, (7, 16)), (33, (8, 17))):
        got = independence_bounds(v)
        if got != want:
            fails.append(f"independence_bounds({v}) = {got}, expected {want}")
    if set(feasible_profiles(25)) != PROFILES_25:
        fails.append("v=25 profile list differs")
    if set(feasible_profiles(27)) != PROFILES_27:
        fails.append("v=27 profile list differs")
    record(6, fails, "threshold, forms, caps, independence bounds, profile lists")


def test_criterion_7_structure():
    start = time.perf_counter()
    fails = []
    orders = (13, 15, 19, 21)
    for i in range(200):
        v = orders[i % 4]
        s = random_system(v, 1000 + i)
        ind = greedy_maximal_independent(s, i)
        if len(ind) < maximal_independent_lower_bound(v):
            fails.append(f"greedy set of {len(ind)} on random STS({v}) seed {1000 + i}")
    if chromatic_number(builtin("A1").system) != 3:
        fails.append("chromatic_number(A1) != 3")
    note = ""
    try:
        systems = sts15_listing()
    except MissingDataFile as exc:
        fails.append(f"STS(15) subsystem scan needs the listing: {exc}")
    else:
        with_sub = {k for k, s in enumerate(systems, 1) if find_sts7_subsystems(s)}
        note = f", {len(with_sub)} STS(15)s contain a Fano subsystem"
        if with_sub != set(STS15_NOT_CYCLIC5):
            fails.append(f"systems with subsystems {sorted(with_sub)} != {sorted(STS15_NOT_CYCLIC5)}")
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        fails.append(f"took {elapsed:.0f}s")
    record(7, fails, f"200 greedy sets, chromatic number{note} in {elapsed:.1f}s")


def test_criterion_8_sampling():
    start = time.perf_counter()
    fails = []
    tally = {}
    for seed in range(100):
        s = random_system(21, seed)
        six = search_ell_good(s, 6, cyclic=True, budget=10**7)
        if not six.found:
            fails.append(f"seed {seed}: cyclic 6 {six.status}")
        seven = search_ell_good(s, 7, cyclic=True, budget=10**7)
        tally[seven.status] = tally.get(seven.status, 0) + 1
    elapsed = time.perf_counter() - start
    counts = ", ".join(f"{k} {tally.get(k, 0)}" for k in ("FOUND", "EXHAUSTED", "BUDGET"))
    record(8, fails, f"100 random STS(21): cyclic 6 found {100 - len(fails)}/100; "
                     f"cyclic 7 {counts}; {elapsed:.0f}s")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
