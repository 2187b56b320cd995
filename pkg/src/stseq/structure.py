"""Independent sets, colourings, subsystems and block counts between colour classes."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .core import TripleSystem
from .errors import ImproperColouring, StsError


class BudgetExceeded(StsError):
    """A structural search ran out of its node budget before deciding."""


def is_independent(sys: TripleSystem, points: Iterable[int]) -> bool:
    pts = set(points)
    return not any(set(b) <= pts for b in sys.blocks)


def maximal_independent_lower_bound(v: int) -> int:
    """Smallest possible size of a maximal independent set: k(k+1)/2 >= v."""
    return math.ceil((math.sqrt(8 * v + 1) - 1) / 2)


def greedy_maximal_independent(sys: TripleSystem, order_seed: int | None = None) -> frozenset[int]:
    """Scan the points (shuffled if a seed is given) and keep each one that stays independent."""
    order = list(range(sys.v))
    if order_seed is not None:
        random.Random(order_seed).shuffle(order)
    chosen: list[int] = []
    blocked: set[int] = set()
    for p in order:
        if p in blocked:
            continue
        for q in chosen:
            blocked.add(int(sys.third[p, q]))
        chosen.append(p)
    result = frozenset(chosen)
    assert is_independent(sys, result)
    return result


def find_independent_set(sys: TripleSystem, k: int) -> frozenset[int] | None:
    """Exact search for an independent set of size ``k``; None proves there is none."""
    if k < 1:
        raise ValueError("k must be positive")
    v = sys.v
    third = sys.third
    blocked = [0] * v
    chosen: list[int] = []

    def extend(start: int) -> bool:
        if len(chosen) == k:
            return True
        free = [p for p in range(start, v) if not blocked[p]]
        if len(chosen) + len(free) < k:
            return False
        for idx, p in enumerate(free):
            if len(chosen) + len(free) - idx < k:
                return False
            if blocked[p]:
                continue
            newly = [int(third[p, q]) for q in chosen]
            for r in newly:
                blocked[r] += 1
            chosen.append(p)
            if extend(p + 1):
                return True
            chosen.pop()
            for r in newly:
                blocked[r] -= 1
        return False

    if not extend(0):
        return None
    result = frozenset(chosen)
    assert is_independent(sys, result)
    return result


@dataclass(frozen=True)
class Colouring:
    classes: tuple[frozenset[int], ...]

    @property
    def profile(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.classes), reverse=True))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def colour_of(self) -> dict[int, int]:
        return {p: i for i, cls in enumerate(self.classes) for p in cls}

    def sorted_by_size(self) -> "Colouring":
        """Classes in descending size, ties by smallest point."""
        return Colouring(tuple(sorted(self.classes, key=lambda c: (-len(c), min(c)))))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Colouring":
        k = max(labels) + 1
        return cls(tuple(frozenset(p for p, c in enumerate(labels) if c == i) for i in range(k)))


def is_proper(sys: TripleSystem, colouring: Colouring) -> bool:
    pts = sorted(p for c in colouring.classes for p in c)
    if pts != list(range(sys.v)):
        return False
    return all(is_independent(sys, c) for c in colouring.classes)


def proper_colouring(sys: TripleSystem, k: int, profile: Sequence[int] | None = None,
                     budget: int | None = None) -> Colouring | None:
    """Backtracking search for a colouring with ``k`` independent classes.

    With ``profile`` the i-th class has exactly ``profile[i]`` points. The next
    point coloured is the uncoloured one lying in the most blocks whose other
    two points are already coloured (lowest index on ties). Returns None when
    no such colouring exists; raises BudgetExceeded if ``budget`` nodes pass
    without a decision.
    """
    if k < 1:
        raise ValueError("k must be positive")
    v = sys.v
    if profile is not None:
        profile = tuple(profile)
        if len(profile) != k or sum(profile) != v or min(profile) < 0:
            raise ValueError(f"profile {profile} must have {k} parts summing to {v}")
    cap = profile if profile is not None else (v,) * k
    third = sys.third
    colour = [-1] * v
    counts = [0] * k
    nodes = 0

    def pick_point() -> int:
        best, best_score = -1, -1
        for p in range(v):
            if colour[p] >= 0:
                continue
            score = 0
            for x in range(v):
                if x != p and colour[x] >= 0 and colour[int(third[p, x])] >= 0:
                    score += 1
            if score > best_score:
                best, best_score = p, score
        return best

    def allowed(p: int) -> list[int]:
        banned = set()
        for x in range(v):
            if x != p and colour[x] >= 0 and colour[int(third[p, x])] == colour[x]:
                banned.add(colour[x])
        out = []
        for c in range(k):
            if c in banned or counts[c] >= cap[c]:
                continue
            if counts[c] == 0:
                # empty classes of equal capacity are interchangeable: open only the first
                if any(counts[d] == 0 and cap[d] == cap[c] for d in range(c)):
                    continue
            out.append(c)
        return out

    def extend(filled: int) -> bool:
        nonlocal nodes
        if filled == v:
            return True
        p = pick_point()
        for c in allowed(p):
            nodes += 1
            if budget is not None and nodes > budget:
                raise BudgetExceeded(f"colouring search passed {budget} nodes")
            colour[p] = c
            counts[c] += 1
            if extend(filled + 1):
                return True
            colour[p] = -1
            counts[c] -= 1
        return False

    if not extend(0):
        return None
    result = Colouring(tuple(frozenset(p for p in range(v) if colour[p] == c) for c in range(k)))
    assert is_proper(sys, result)
    return result


def chromatic_number(sys: TripleSystem) -> int:
    k = 1
    while proper_colouring(sys, k) is None:
        k += 1
    return k


def profile_feasible(v: int, profile: Sequence[int]) -> tuple[bool, str]:
    """Necessary conditions on the class sizes (c1 >= c2 >= c3) of a 3-colouring of an STS(v)."""
    c1, c2, c3 = profile
    if not c1 >= c2 >= c3 >= 1:
        return False, "profile must be descending and positive"
    if c1 + c2 + c3 != v:
        return False, f"sizes sum to {c1 + c2 + c3}, not {v}"
    if v >= 9 and 2 * c1 > v - 1:
        return False, f"largest class {c1} exceeds (v-1)/2"
    spread = (c1 - c2) ** 2 + (c2 - c3) ** 2 + (c3 - c1) ** 2
    if 2 * v < spread:
        return False, f"class sizes too unbalanced: v={v} < {spread}/2"
    return True, "ok"


def feasible_profiles(v: int) -> list[tuple[int, int, int]]:
    out = []
    for c1 in range(v, 0, -1):
        for c2 in range(min(c1, v - c1), 0, -1):
            c3 = v - c1 - c2
            if 1 <= c3 <= c2 and profile_feasible(v, (c1, c2, c3))[0]:
                out.append((c1, c2, c3))
    return out


def closure(sys: TripleSystem, points: Iterable[int], limit: int | None = None) -> frozenset[int]:
    """Smallest point set containing ``points`` and closed under the third-point map."""
    s = set(points)
    frontier = list(s)
    while frontier:
        p = frontier.pop()
        for q in list(s):
            if q != p:
                r = int(sys.third[p, q])
                if r not in s:
                    s.add(r)
                    frontier.append(r)
                    if limit is not None and len(s) > limit:
                        return frozenset(s)
    return frozenset(s)


def find_sts7_subsystems(sys: TripleSystem) -> list[frozenset[int]]:
    """Every 7-point subset carrying a Fano subsystem.

    Each such subsystem is the closure of any of its blocks plus one more of
    its points, so closing every (block, outside point) pair finds them all.
    """
    found = set()
    for blk in sys.blocks:
        for p in range(sys.v):
            if p in blk:
                continue
            s = closure(sys, (*blk, p), limit=7)
            if len(s) == 7:
                found.add(s)
    return sorted(found, key=sorted)


@dataclass(frozen=True)
class CrossBlockCounts:
    # pair_counts[(x, y)]: blocks with two points in class x and one in class y
    pair_counts: dict[tuple[int, int], int]
    transversal: int

    def n(self, x: int, y: int) -> int:
        return self.pair_counts[(x, y)]

    def total(self) -> int:
        return sum(self.pair_counts.values()) + self.transversal


def cross_block_counts(sys: TripleSystem, colouring: Colouring) -> CrossBlockCounts:
    col = colouring.colour_of()
    k = len(colouring.classes)
    counts = {(x, y): 0 for x in range(k) for y in range(k) if x != y}
    transversal = 0
    for blk in sys.blocks:
        cs = [col[p] for p in blk]
        distinct = set(cs)
        if len(distinct) == 1:
            raise ImproperColouring(f"block {blk} lies inside colour class {cs[0]}")
        if len(distinct) == 3:
            transversal += 1
            continue
        doubled = max(distinct, key=cs.count)
        single = min(distinct, key=cs.count)
        counts[(doubled, single)] += 1
    return CrossBlockCounts(counts, transversal)
