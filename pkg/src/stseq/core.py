"""Triple systems, sequencings and goodness verification by block spans."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import BadOrder, NotAnSTS, NotAPermutation, OutOfRange, SamePoint

Block = tuple[int, int, int]


def _check_order(v: int) -> None:
    if v < 3 or v % 6 not in (1, 3):
        raise BadOrder(f"no Steiner triple system of order {v} (need v = 1 or 3 mod 6)")


class TripleSystem:
    """A validated Steiner triple system on points 0..v-1.

    ``third[a, b]`` is the third point of the block through ``a`` and ``b``
    (-1 on the diagonal). Instances are immutable once built.
    """

    __slots__ = ("v", "blocks", "third", "_hash")

    def __init__(self, v: int, blocks: Iterable[Sequence[int]]):
        _check_order(v)
        canon = []
        for blk in blocks:
            if len(blk) != 3:
                raise NotAnSTS(f"block {tuple(blk)} does not have three points")
            for p in blk:
                if not 0 <= p < v:
                    raise OutOfRange(f"point {p} outside 0..{v - 1}")
            b = tuple(sorted(int(p) for p in blk))
            if b[0] == b[1] or b[1] == b[2]:
                raise NotAnSTS(f"block {b} repeats a point")
            canon.append(b)
        third = np.full((v, v), -1, dtype=np.int32)
        for a, b, c in canon:
            for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
                if third[x, y] != -1:
                    raise NotAnSTS(f"pair {{{x},{y}}} covered more than once")
                third[x, y] = third[y, x] = z
        expected = v * (v - 1) // 6
        if len(canon) != expected:
            # every pair is covered at most once here, so a short list leaves a gap
            missing = next(
                (a, b) for a, b in combinations(range(v), 2) if third[a, b] == -1
            )
            raise NotAnSTS(
                f"{len(canon)} blocks for v={v}, expected {expected}; "
                f"pair {{{missing[0]},{missing[1]}}} is uncovered"
            )
        third.setflags(write=False)
        self.v = v
        self.blocks: tuple[Block, ...] = tuple(sorted(canon))
        self.third = third
        self._hash = None

    @property
    def degenerate(self) -> bool:
        return self.v == 3

    def third_point(self, a: int, b: int) -> int:
        return third_point(self, a, b)

    def block_set(self) -> frozenset[Block]:
        return frozenset(self.blocks)

    def content_hash(self) -> str:
        """Short stable digest of the block list, used as an id for unnamed systems."""
        if self._hash is None:
            text = ";".join(f"{a},{b},{c}" for a, b, c in self.blocks)
            digest = hashlib.sha1(f"{self.v}|{text}".encode()).hexdigest()[:12]
            self._hash = f"h{digest}"
        return self._hash

    def relabel(self, mapping: Sequence[int]) -> "TripleSystem":
        """Image of the system under the point map ``p -> mapping[p]``."""
        return TripleSystem(self.v, [tuple(mapping[p] for p in b) for b in self.blocks])

    def __eq__(self, other):
        return (
            isinstance(other, TripleSystem)
            and self.v == other.v
            and self.blocks == other.blocks
        )

    def __hash__(self):
        return hash((self.v, self.blocks))

    def __repr__(self):
        return f"TripleSystem(v={self.v}, blocks={len(self.blocks)})"


def build_system(v: int, blocks: Iterable[Sequence[int]]) -> TripleSystem:
    return TripleSystem(v, blocks)


def third_point(sys: TripleSystem, a: int, b: int) -> int:
    if a == b:
        raise SamePoint(f"third point undefined for a = b = {a}")
    if not (0 <= a < sys.v and 0 <= b < sys.v):
        raise OutOfRange(f"points {a},{b} outside 0..{sys.v - 1}")
    return int(sys.third[a, b])


@dataclass(frozen=True)
class Sequencing:
    """A permutation of 0..v-1, read left to right."""

    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(p) for p in self.order)
        v = len(order)
        if sorted(order) != list(range(v)):
            seen = set()
            for p in order:
                if not 0 <= p < v or p in seen:
                    raise NotAPermutation(f"point {p} is repeated or out of range for v={v}")
                seen.add(p)
        object.__setattr__(self, "order", order)

    @property
    def v(self) -> int:
        return len(self.order)

    def positions(self) -> list[int]:
        pos = [0] * len(self.order)
        for i, p in enumerate(self.order):
            pos[p] = i
        return pos

    def reversed(self) -> "Sequencing":
        return Sequencing(self.order[::-1])

    def rotated(self, k: int) -> "Sequencing":
        k %= max(1, len(self.order))
        return Sequencing(self.order[k:] + self.order[:k])

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)

    def __getitem__(self, i):
        return self.order[i]


def as_sequencing(seq) -> Sequencing:
    return seq if isinstance(seq, Sequencing) else Sequencing(tuple(seq))


def _span_from_positions(p: Sequence[int], v: int, cyclic: bool) -> int:
    p1, p2, p3 = sorted(p)
    if not cyclic:
        return p3 - p1 + 1
    widest_gap = max(p2 - p1, p3 - p2, v - p3 + p1)
    return v - widest_gap + 1


def block_span(seq, block: Sequence[int], cyclic: bool = False) -> int:
    """Length of the shortest (cyclic) window of ``seq`` holding all of ``block``."""
    seq = as_sequencing(seq)
    pos = seq.positions()
    return _span_from_positions([pos[p] for p in block], seq.v, cyclic)


def _check_seq(sys: TripleSystem, seq: Sequencing) -> None:
    if seq.v != sys.v:
        raise NotAPermutation(f"sequencing has {seq.v} points, system has {sys.v}")


def _min_span(sys: TripleSystem, seq: Sequencing, cyclic: bool) -> tuple[int, Block | None]:
    pos = seq.positions()
    best, witness = math.inf, None
    for blk in sys.blocks:
        s = _span_from_positions([pos[p] for p in blk], sys.v, cyclic)
        if s < best:
            best, witness = s, blk
    return best, witness


def is_ell_good(sys: TripleSystem, seq, ell: int, cyclic: bool = False) -> tuple[bool, Block | None]:
    """``(True, None)`` if no ``ell`` consecutive points hold a block, else ``(False, block)``.

    The returned block has minimal span among the violators.
    """
    if ell < 2:
        raise ValueError("ell must be at least 2")
    seq = as_sequencing(seq)
    _check_seq(sys, seq)
    span, witness = _min_span(sys, seq, cyclic)
    if span > ell:
        return True, None
    return False, witness


@dataclass(frozen=True)
class GoodnessReport:
    max_linear_ell: int
    max_cyclic_ell: int
    witness_linear: Block | None
    witness_cyclic: Block | None


def goodness_report(sys: TripleSystem, seq) -> GoodnessReport:
    seq = as_sequencing(seq)
    _check_seq(sys, seq)
    lin, wl = _min_span(sys, seq, False)
    cyc, wc = _min_span(sys, seq, True)
    return GoodnessReport(max(2, lin - 1), max(2, cyc - 1), wl, wc)


def lmax_upper_bound(v: int) -> int:
    """Largest ell an STS(v) can possibly be ell-good for.

    v = 6s+1 gives 2s (s >= 2) and v = 6s+3 gives 2s+1. The bound is not
    stated for v = 7; we return 3 there since the Fano plane has no 4-good
    sequencing.
    """
    _check_order(v)
    if v < 7:
        raise BadOrder(f"bound defined for v >= 7, got {v}")
    s, r = divmod(v, 6)
    if r == 1:
        return 3 if s == 1 else 2 * s
    return 2 * s + 1


def blackburn_etzion_threshold(ell: int) -> int:
    """Order above which every STS(v) has an ell-good sequencing."""
    if ell < 3:
        raise ValueError("ell must be at least 3")
    quartic, rem = divmod(3 * ell**4 - 14 * ell**3 + 27 * ell**2 - 24 * ell + 12, 4)
    c = math.comb(ell - 1, 2)
    binomial = (2 * ell + 3 * c) * c + ell
    assert rem == 0 and quartic == binomial, (ell, quartic, binomial)
    return quartic


def independence_bounds(v: int) -> tuple[int, int]:
    """(floor(sqrt(2v)), largest possible independent set) for an STS(v)."""
    _check_order(v)
    lower = math.isqrt(2 * v)
    upper = (v + 1) // 2 if v % 12 in (3, 7) else (v - 1) // 2
    return lower, upper


def window_goodness(sys: TripleSystem, seq, ell: int, cyclic: bool = False) -> bool:
    """Slow reference check: scan every window of ``ell`` points for a block.

    Kept alongside the span-based check as an independent oracle.
    """
    seq = as_sequencing(seq)
    v = seq.v
    blocks = sys.block_set()
    starts = range(v) if cyclic else range(v - ell + 1)
    for i in starts:
        window = [seq[(i + k) % v] for k in range(min(ell, v))]
        for tri in combinations(window, 3):
            if tuple(sorted(tri)) in blocks:
                return False
    return True
