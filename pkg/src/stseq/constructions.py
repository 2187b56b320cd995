"""Constructive sequencings: Colbourn's 3-good orders, the independent-set greedy
4-good order, colour-class layouts for ell-good orders, and the 5-good case
analysis for 3-chromatic systems.

Every public constructor verifies its result before returning it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .core import Sequencing, TripleSystem, is_ell_good
from .errors import (
    ClassTooSmall,
    NotThreeChromatic,
    ParseError,
    PreconditionFailed,
    StuckChoice,
    UnhandledProfile,
    VerificationFailed,
)
from .structure import (
    Colouring,
    cross_block_counts,
    find_independent_set,
    is_independent,
    is_proper,
    proper_colouring,
)


@dataclass(frozen=True)
class Pick:
    position: int
    point: int
    excluded: tuple[int, ...] = ()


@dataclass
class ConstructionTrace:
    method: str
    picks: list[Pick] = field(default_factory=list)
    sequencing: Sequencing | None = None

    def replay(self) -> Sequencing:
        order = [-1] * len(self.picks)
        for pick in self.picks:
            if pick.point in pick.excluded:
                raise VerificationFailed(f"pick {pick} chose an excluded point")
            order[pick.position] = pick.point
        return Sequencing(tuple(order))

    def format(self) -> str:
        lines = [f"method {self.method}"]
        for pk in sorted(self.picks, key=lambda p: p.position):
            excl = ",".join(map(str, pk.excluded)) or "-"
            lines.append(f"{pk.position} {pk.point} {excl}")
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "ConstructionTrace":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("method "):
            raise ParseError("trace must start with 'method <tag>'", 1)
        trace = cls(lines[0].split(None, 1)[1].strip())
        for n, line in enumerate(lines[1:], 2):
            toks = line.split()
            if len(toks) != 3:
                raise ParseError(f"expected 'position point excluded', got {line!r}", n)
            excl = () if toks[2] == "-" else tuple(int(t) for t in toks[2].split(","))
            trace.picks.append(Pick(int(toks[0]), int(toks[1]), excl))
        trace.sequencing = trace.replay()
        return trace


def _finish(sys, order, ell, cyclic, trace, picks_by_point):
    seq = Sequencing(tuple(order))
    ok, bad = is_ell_good(sys, seq, ell, cyclic)
    if not ok:
        kind = "cyclically " if cyclic else ""
        raise VerificationFailed(f"{trace.method}: result is not {kind}{ell}-good, block {bad}")
    trace.picks = [
        Pick(i, p, tuple(sorted(picks_by_point.get(p, ())))) for i, p in enumerate(seq)
    ]
    trace.sequencing = seq
    return seq


def _choose(candidates, excluded, rng, need=1, label="pick"):
    avail = [p for p in candidates if p not in excluded]
    if len(avail) < need:
        raise StuckChoice(f"{label}: {len(avail)} admissible points, the counting argument gives {need}")
    return rng.choice(avail) if rng is not None else min(avail)


def _rng(seed):
    return random.Random(seed) if seed is not None else None


# ---------------------------------------------------------------- 3-good orders


def colbourn_3good(sys: TripleSystem, cyclic: bool = False, trace: ConstructionTrace | None = None) -> Sequencing:
    """Relabel so the blocks on point 1 are {1,2,v}, {1,3,4}, ..., {1,v-2,v-1}.

    Then 1, 2, ..., v is 3-good, and 1, 3, 2, 4, ..., v is cyclically 3-good
    unless {2,4,5} is a block, in which case labels 5 and 6 are swapped.
    Blocks through point 1 are taken in ascending order, smaller point first.
    """
    v = sys.v
    if v < 7:
        raise PreconditionFailed(f"needs v >= 7, got {v}")
    trace = trace if trace is not None else ConstructionTrace("colbourn")
    third = sys.third
    one = 0
    pairs = sorted(tuple(sorted((q, int(third[one, q])))) for q in range(1, v) if q < third[one, q])
    label = {1: one}  # 1-based label -> point
    label[2], label[v] = pairs[0]
    for k, (x, y) in enumerate(pairs[1:]):
        label[3 + 2 * k], label[4 + 2 * k] = x, y
    if not cyclic:
        order = [label[i] for i in range(1, v + 1)]
        return _finish(sys, order, 3, False, trace, {})
    labels = [1, 3, 2] + list(range(4, v + 1))
    if int(third[label[2], label[4]]) == label[5]:
        label[5], label[6] = label[6], label[5]
    order = [label[i] for i in labels]
    return _finish(sys, order, 3, True, trace, {})


# ---------------------------------------------------------------- independent set of size 8


def theorem5_4good(sys: TripleSystem, indep: Sequence[int], seed: int | None = None,
                   trace: ConstructionTrace | None = None) -> Sequencing:
    """4-good sequencing from an independent set of 8 points (v >= 19).

    The points outside the set are laid down greedily after a seed block
    a, b, c, d, e with a.b = e; one of the last three outside points goes in
    front, two go at the very end, and the 8 independent points fill the gap.
    """
    v = sys.v
    indep = sorted(set(indep))
    if v < 19:
        raise PreconditionFailed(f"needs v >= 19, got {v}")
    if len(indep) != 8 or not is_independent(sys, indep):
        raise PreconditionFailed("needs an independent set of exactly 8 points")
    rng = _rng(seed)
    trace = trace if trace is not None else ConstructionTrace("t5")
    t = lambda x, y: int(sys.third[x, y])  # noqa: E731
    excl: dict[int, tuple[int, ...]] = {}

    rest = [p for p in range(v) if p not in set(indep)]
    in_rest = set(rest)
    a = _choose(rest, (), rng, label="a")
    bs = [x for x in rest if x != a and t(a, x) in in_rest]
    b = _choose(bs, (), rng, label="b")
    e = t(a, b)
    c = _choose([x for x in rest if x not in (a, b, e)], (), rng, label="c")
    ex = {t(a, c), t(b, c), t(c, e)}
    d = _choose([x for x in rest if x not in (a, b, c, e)], ex, rng, label="d")
    excl[d] = tuple(ex)
    body = [a, b, c, d, e]
    left = [x for x in rest if x not in body]
    while len(left) > 3:
        p, q, r = body[-3:]
        ex = {t(p, q), t(p, r), t(q, r)}
        f = _choose(left, ex, rng, need=len(left) - 3, label="extend")
        excl[f] = tuple(ex)
        body.append(f)
        left.remove(f)
    # a.b = e rules out nothing, so at most a.c and b.c block a point from the front
    ex = {t(a, c), t(b, c)}
    z = _choose(left, ex, rng, label="front")
    excl[z] = tuple(ex)
    x, y = [w for w in left if w != z]

    pool = list(indep)
    p, q, r = body[-3:]
    ex = {t(p, q), t(p, r), t(q, r)}
    s = _choose(pool, ex, rng, need=5, label="s")
    excl[s] = tuple(ex)
    pool.remove(s)
    ex = {t(q, r), t(q, s), t(r, s)}
    tt = _choose(pool, ex, rng, need=4, label="t")
    excl[tt] = tuple(ex)
    pool.remove(tt)
    ex = {t(r, s), t(r, tt)}
    u = _choose(pool, ex, rng, need=4, label="u")
    excl[u] = tuple(ex)
    pool.remove(u)
    ex = {t(x, y)}
    w = _choose(pool, ex, rng, need=4, label="w")
    excl[w] = tuple(ex)
    pool.remove(w)
    ex = {t(x, y), t(w, y), t(w, x)}
    h = _choose(pool, ex, rng, need=1, label="h")
    excl[h] = tuple(ex)
    pool.remove(h)
    ex = {t(h, x), t(w, x)}
    g = _choose(pool, ex, rng, need=1, label="g")
    excl[g] = tuple(ex)
    pool.remove(g)
    if rng is not None:
        rng.shuffle(pool)
    order = [z] + body + [s, tt, u] + pool + [g, h, w, x, y]
    return _finish(sys, order, 4, False, trace, excl)


# ---------------------------------------------------------------- colour-class layouts


def class_threshold(ell: int) -> int:
    """Class size that guarantees a block-free junction: (ell^2 - 3ell + 6) / 2."""
    return (ell * ell - 3 * ell + 6) // 2


def _window_exclusions(third, window):
    return {int(third[x, y]) for x, y in combinations(window, 2)}


def _append_class(sys, order, points, ell, rng, excl, counting=False):
    """Append a colour class, choosing its first ell-1 points against the previous ell-1."""
    remaining = sorted(points)
    limit = math.comb(ell - 1, 2)
    for j in range(min(ell - 1, len(remaining))):
        window = order[-(ell - 1):] if order else []
        ex = _window_exclusions(sys.third, window) & set(remaining)
        if counting:
            cap = limit if j < 2 else limit - 1
            if len(ex) > cap:
                raise StuckChoice(f"pick {j + 1}: {len(ex)} exclusions exceed {cap}")
        p = _choose(remaining, ex, rng, label=f"class pick {j + 1}")
        excl[p] = tuple(ex)
        order.append(p)
        remaining.remove(p)
    if rng is not None:
        rng.shuffle(remaining)
    order.extend(remaining)


def _prepend_class(sys, order, points, ell, rng, excl):
    rev = order[::-1]
    _append_class(sys, rev, points, ell, rng, excl)
    order[:] = rev[::-1]


def _close_cycle(sys, order, tail_class, ell, rng, excl, attempts=8):
    """Rearrange the last class so windows wrapping to the start hold no block."""
    n = len(tail_class)
    body = order[:-n]
    head_fixed = order[-n:][: ell - 1]  # already checked against the previous class
    free = [p for p in order[-n:] if p not in head_fixed]
    for attempt in range(attempts):
        # first attempt follows the caller's rule; retries reshuffle the candidates
        local = rng if attempt == 0 else random.Random(attempt if rng is None else rng.random())
        tail: list[int] = []  # filled right to left
        pool = list(free)
        try:
            for _ in range(min(ell - 1, len(free))):
                nxt = (tail + body)[: ell - 1]
                ex = _window_exclusions(sys.third, nxt) & set(pool)
                p = _choose(pool, ex, local, label="cyclic tail")
                excl[p] = tuple(ex)
                tail.insert(0, p)
                pool.remove(p)
        except StuckChoice:
            continue
        if local is not None:
            local.shuffle(pool)
        order[:] = body + head_fixed + pool + tail
        return
    raise StuckChoice("could not close the cycle in the last colour class")


def theorem6_ell_good(sys: TripleSystem, colouring: Colouring, ell: int, cyclic: bool = False,
                      seed: int | None = None, trace: ConstructionTrace | None = None) -> Sequencing:
    """Lay the colour classes end to end, smallest class first.

    Each later class needs at least (ell^2 - 3ell + 6)/2 points; in cyclic mode
    the class placed last needs ell - 1 more so it can also close the cycle.
    """
    if ell < 3:
        raise ValueError("ell must be at least 3")
    if not is_proper(sys, colouring):
        raise PreconditionFailed("colouring is not proper")
    c = class_threshold(ell)
    classes = [sorted(cl) for cl in colouring.classes if cl]
    first = min(range(len(classes)), key=lambda i: len(classes[i]))
    exempt = classes.pop(first)
    for cl in classes:
        if len(cl) < c:
            raise ClassTooSmall(f"class of {len(cl)} points, ell={ell} needs {c}")
    if cyclic:
        if not classes:
            raise ClassTooSmall("cyclic layout needs at least two classes")
        last = max(range(len(classes)), key=lambda i: len(classes[i]))
        classes.append(classes.pop(last))
        if len(classes[-1]) < c + ell - 1:
            raise ClassTooSmall(
                f"largest class has {len(classes[-1])} points, cyclic ell={ell} needs {c + ell - 1}"
            )
    rng = _rng(seed)
    trace = trace if trace is not None else ConstructionTrace("t6")
    excl: dict[int, tuple[int, ...]] = {}
    order = list(exempt)
    if rng is not None:
        rng.shuffle(order)
    for cl in classes:
        _append_class(sys, order, cl, ell, rng, excl, counting=len(order) >= ell - 1)
    if cyclic:
        _close_cycle(sys, order, classes[-1], ell, rng, excl)
    return _finish(sys, order, ell, cyclic, trace, excl)


# ---------------------------------------------------------------- 5-good, 3-chromatic


def _third_in(sys, x, y, cls):
    return int(sys.third[x, y]) in cls


def _layout_around(sys, middle, front, back, rng, excl, trace):
    """front class, then the ordered middle class, then back class."""
    order = list(middle)
    _prepend_class(sys, order, front, 5, rng, excl)
    _append_class(sys, order, back, 5, rng, excl)
    return _finish(sys, order, 5, False, trace, excl)


def _equitable_21(sys, classes, rng, trace):
    A, B, C = (set(cl) for cl in classes)
    excl: dict[int, tuple[int, ...]] = {}
    col = Colouring((frozenset(A), frozenset(B), frozenset(C)))
    counts = cross_block_counts(sys, col)
    n = counts.n(0, 1)
    if n in (0, 21):
        if n == 21:
            B, C = C, B
        trace.method = "t8-21-extremal"
        return _layout_around(sys, sorted(A), B, C, rng, excl, trace)
    pairs = list(combinations(sorted(A), 2))
    to_c = [pr for pr in pairs if _third_in(sys, *pr, C)]
    to_b = [pr for pr in pairs if _third_in(sys, *pr, B)]
    for p1 in to_c:
        for p2 in to_b:
            if not set(p1) & set(p2):
                mid = [x for x in sorted(A) if x not in p1 + p2]
                trace.method = "t8-21-anchored"
                return _layout_around(sys, list(p1) + mid + list(p2), B, C, rng, excl, trace)
    raise StuckChoice("no disjoint pairs of A meeting C and B")


def five_good_3chromatic(sys: TripleSystem, colouring: Colouring, seed: int | None = None,
                         trace: ConstructionTrace | None = None) -> Sequencing:
    """5-good sequencing of a 3-chromatic STS(v), v >= 15, following the case analysis.

    Raises UnhandledProfile outside the cases the argument covers (v = 15 and
    v = 19 are settled there by computer search, not by construction).
    """
    v = sys.v
    if v < 15:
        raise PreconditionFailed(f"needs v >= 15, got {v}")
    if len(colouring.classes) != 3 or not is_proper(sys, colouring):
        raise NotThreeChromatic("needs a proper colouring with exactly three classes")
    trace = trace if trace is not None else ConstructionTrace("t8")
    rng = _rng(seed)
    sizes = sorted((len(c) for c in colouring.classes), reverse=True)
    if sum(1 for s in sizes if s < class_threshold(5)) <= 1:
        trace.method = "t8-t6"
        return theorem6_ell_good(sys, colouring, 5, seed=seed, trace=trace)
    ordered = [sorted(c) for c in colouring.sorted_by_size().classes]

    if v == 25 and tuple(sizes) == (11, 7, 7):
        A, B, C = ordered
        anchor = None
        for first, second in ((B, C), (C, B)):
            aset = set(A)
            anchor = next(((x, y) for x, y in combinations(first, 2) if _third_in(sys, x, y, aset)), None)
            if anchor is not None:
                B, C = first, second
                break
        if anchor is None:
            # 21 + 21 mixed-type blocks would need 84 B-C pairs, only 49 exist
            raise StuckChoice("no pair inside a 7-class meets the 11-class")
        excl: dict[int, tuple[int, ...]] = {}
        order = [p for p in B if p not in anchor] + list(anchor)
        _append_class(sys, order, C, 5, rng, excl)
        _append_class(sys, order, A, 5, rng, excl)
        trace.method = "t8-25-anchor"
        return _finish(sys, order, 5, False, trace, excl)

    if v == 21:
        if tuple(sizes) == (7, 7, 7):
            return _equitable_21(sys, ordered, rng, trace)
        if tuple(sizes) == (8, 7, 6):
            C, B, A = ordered
            aset, bset = set(A), set(B)
            if all(_third_in(sys, x, y, bset) for x, y in combinations(A, 2)):
                moved = min(C)
                promoted = [sorted(aset | {moved}), B, [p for p in C if p != moved]]
                if not is_independent(sys, promoted[0]):
                    raise StuckChoice("promoted class is not independent")
                return _equitable_21(sys, promoted, rng, trace)
            a1, a2 = next((x, y) for x, y in combinations(A, 2) if _third_in(sys, x, y, set(C)))
            middle = [a1, a2] + [p for p in A if p not in (a1, a2)]
            trace.method = "t8-21-876"
            return _layout_around(sys, middle, B, C, rng, {}, trace)
        for profile in ((7, 7, 7), (8, 7, 6)):
            other = proper_colouring(sys, 3, profile)
            if other is not None:
                return five_good_3chromatic(sys, other, seed=seed, trace=trace)
    raise UnhandledProfile(f"profile {tuple(sizes)} at v={v} is outside the constructive cases")


def five_good(sys: TripleSystem, colouring: Colouring | None = None, seed: int | None = None,
              budget: int = 10**7, trace: ConstructionTrace | None = None) -> Sequencing:
    """Constructive 5-good sequencing, falling back to search where the case analysis stops."""
    from .search import search_ell_good

    trace = trace if trace is not None else ConstructionTrace("t8")
    if colouring is None:
        colouring = proper_colouring(sys, 3)
        if colouring is None:
            raise NotThreeChromatic("system is not 3-colourable")
    try:
        return five_good_3chromatic(sys, colouring, seed=seed, trace=trace)
    except UnhandledProfile:
        out = search_ell_good(sys, 5, budget=budget, seed=seed)
        if not out.found:
            raise
        trace.method = "t8-search"
        return _finish(sys, list(out.sequencing), 5, False, trace, {})


def four_good(sys: TripleSystem, seed: int | None = None, trace: ConstructionTrace | None = None) -> Sequencing:
    """Independent-set route for v >= 19 when an 8-point independent set exists."""
    if sys.v < 19:
        raise PreconditionFailed(f"the independent-set route needs v >= 19, got v={sys.v}")
    indep = find_independent_set(sys, 8)
    if indep is None:
        raise PreconditionFailed("no independent set of 8 points")
    return theorem5_4good(sys, indep, seed=seed, trace=trace)
