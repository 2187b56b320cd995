"""Backtracking search for (cyclic) ell-good sequencings, best-ell sweeps and batch runs."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from ._kernel import EXHAUSTED, FOUND, PAUSED, fits, new_state, run
from .catalog import decode_sequencing, format_sequencing
from .core import Sequencing, TripleSystem, is_ell_good, lmax_upper_bound
from .errors import LedgerCorrupt, VerificationFailed

log = logging.getLogger(__name__)

STATUS_FOUND = "FOUND"
STATUS_EXHAUSTED = "EXHAUSTED"
STATUS_BUDGET = "BUDGET"

_QUOTA = 2_000_000


@dataclass(frozen=True)
class SearchOutcome:
    status: str
    sequencing: Sequencing | None
    nodes_expanded: int
    elapsed: float
    solutions: int = 0  # only filled in counting mode

    @property
    def found(self) -> bool:
        return self.status == STATUS_FOUND


def _prefix_ok(sys, ell, cyclic, prefix) -> bool:
    seq, pos, _, _ = new_state(sys.v, ())
    for i, p in enumerate(prefix):
        if pos[p] >= 0 or not fits(sys.third, sys.v, ell, cyclic, seq, pos, p, i):
            return False
        seq[i] = p
        pos[p] = i
    return True


def _run_shard(third, v, ell, cyclic, prefix, order, budget, count_all, orient, deadline):
    """Run one subtree to completion, budget, or wall-clock deadline."""
    seq, pos, nxt, state = new_state(v, prefix)
    nfixed = len(prefix)
    if nfixed == v:
        return STATUS_FOUND, seq.tolist(), 0, 0
    nxt[nfixed] = 0
    while True:
        quota = min(_QUOTA, budget - int(state[1]))
        if quota <= 0:
            return STATUS_BUDGET, None, int(state[1]), int(state[2])
        code = run(third, v, ell, cyclic, orient, count_all, nfixed, order,
                   seq, pos, nxt, state, quota)
        if code == FOUND:
            return STATUS_FOUND, seq.tolist(), int(state[1]), int(state[2])
        if code == EXHAUSTED:
            return STATUS_EXHAUSTED, None, int(state[1]), int(state[2])
        if deadline is not None and time.monotonic() > deadline:
            return STATUS_BUDGET, None, int(state[1]), int(state[2])


def _shard_worker(args):
    return _run_shard(*args)


def search_ell_good(
    sys: TripleSystem,
    ell: int,
    cyclic: bool = False,
    budget: int = 10**7,
    seed: int | None = None,
    workers: int = 1,
    count: bool = False,
    reduce_symmetry: bool = True,
    time_limit: float | None = None,
) -> SearchOutcome:
    """Depth-first search for an ell-good (or cyclically ell-good) sequencing.

    Symmetry reduction: linear runs keep only sequencings whose first point
    is smaller than the last; cyclic runs put point 0 first and require
    seq[1] < seq[-1]. ``count=True`` enumerates every reduced solution
    instead of stopping at the first. ``seed`` shuffles the candidate order;
    exhaustion results do not depend on it.
    """
    if ell < 3:
        raise ValueError("ell must be at least 3")
    v = sys.v
    order = np.arange(v, dtype=np.int32)
    if seed is not None:
        np.random.default_rng(seed).shuffle(order)
    prefix = (0,) if cyclic and reduce_symmetry else ()
    deadline = time.monotonic() + time_limit if time_limit else None
    start = time.monotonic()
    third = np.ascontiguousarray(sys.third)

    if workers <= 1:
        results = [_run_shard(third, v, ell, cyclic, prefix, order, budget,
                              count, reduce_symmetry, deadline)]
    else:
        shards = [prefix + (int(p),) for p in order
                  if _prefix_ok(sys, ell, cyclic, prefix + (int(p),))]
        # the node budget is shared evenly, so a sharded run never exceeds it
        share = max(1, budget // max(1, len(shards)))
        jobs = [(third, v, ell, cyclic, sh, order, share, count, reduce_symmetry, deadline)
                for sh in shards]
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for res in pool.map(_shard_worker, jobs):
                results.append(res)
                if res[0] == STATUS_FOUND and not count:
                    break

    nodes = sum(r[2] for r in results)
    solutions = sum(r[3] for r in results)
    elapsed = time.monotonic() - start
    found = next((r for r in results if r[0] == STATUS_FOUND), None)
    if found is not None and not count:
        seq = Sequencing(tuple(found[1]))
        ok, _ = is_ell_good(sys, seq, ell, cyclic)
        if not ok:
            raise VerificationFailed(f"search returned a sequencing that is not {ell}-good")
        return SearchOutcome(STATUS_FOUND, seq, nodes, elapsed, solutions)
    if any(r[0] == STATUS_BUDGET for r in results):
        return SearchOutcome(STATUS_BUDGET, None, nodes, elapsed, solutions)
    if count and solutions:
        return SearchOutcome(STATUS_FOUND, None, nodes, elapsed, solutions)
    return SearchOutcome(STATUS_EXHAUSTED, None, nodes, elapsed, solutions)


@dataclass
class BestReport:
    v: int
    bound: int
    linear: dict[int, str] = field(default_factory=dict)
    cyclic: dict[int, str] = field(default_factory=dict)
    best_linear: int = 2
    best_cyclic: int = 2
    witnesses: dict[tuple[int, bool], Sequencing] = field(default_factory=dict)

    def check_monotone(self) -> None:
        for track in (self.linear, self.cyclic):
            ells = sorted(track)
            for lo, hi in zip(ells, ells[1:]):
                if track[hi] == STATUS_FOUND and track[lo] != STATUS_FOUND:
                    raise AssertionError(f"found at {hi} but not at {lo}")
                if track[lo] == STATUS_EXHAUSTED and track[hi] != STATUS_EXHAUSTED:
                    raise AssertionError(f"exhausted at {lo} but not at {hi}")
        for ell, status in self.cyclic.items():
            if status == STATUS_FOUND and self.linear.get(ell) != STATUS_FOUND:
                raise AssertionError(f"cyclic {ell}-good without linear {ell}-good")


def best_goodness(sys: TripleSystem, budget: int = 10**7, seed: int | None = None,
                  workers: int = 1) -> BestReport:
    """Sweep ell upward on both tracks until the first non-Found result or the bound."""
    bound = lmax_upper_bound(sys.v)
    report = BestReport(sys.v, bound)
    for cyclic, track in ((False, report.linear), (True, report.cyclic)):
        stop = None
        for ell in range(3, bound + 1):
            if stop is not None:
                # exhaustion propagates upward; a budget miss leaves later ells unknown
                track[ell] = stop
                continue
            if cyclic and report.linear.get(ell) == STATUS_EXHAUSTED:
                track[ell] = stop = STATUS_EXHAUSTED
                continue
            out = search_ell_good(sys, ell, cyclic, budget=budget, seed=seed, workers=workers)
            track[ell] = out.status
            if out.found:
                report.witnesses[(ell, cyclic)] = out.sequencing
                if cyclic:
                    report.best_cyclic = ell
                else:
                    report.best_linear = ell
            else:
                stop = out.status
    report.check_monotone()
    return report


# ---------------------------------------------------------------- ledger

LEDGER_FIELDS = ("system", "v", "ell", "mode", "status", "witness", "nodes", "seed", "version")


@dataclass(frozen=True)
class LedgerRow:
    system: str
    v: int
    ell: int
    mode: str  # "L" or "C"
    status: str
    witness: str
    nodes: int
    seed: str
    version: str = __version__

    @property
    def key(self) -> tuple[str, int, int, str]:
        return (self.system, self.v, self.ell, self.mode)

    def format(self) -> str:
        return "\t".join(str(getattr(self, f)) for f in LEDGER_FIELDS)


def parse_ledger_line(line: str, lineno: int | None = None) -> LedgerRow:
    parts = line.rstrip("\n").split("\t")
    where = f"ledger line {lineno}" if lineno else "ledger row"
    if len(parts) != len(LEDGER_FIELDS):
        raise LedgerCorrupt(f"{where}: expected {len(LEDGER_FIELDS)} fields, got {len(parts)}")
    system, v, ell, mode, status, witness, nodes, seed, version = parts
    if mode not in ("L", "C") or status not in (STATUS_FOUND, STATUS_EXHAUSTED, STATUS_BUDGET):
        raise LedgerCorrupt(f"{where}: bad mode/status {mode!r}/{status!r}")
    try:
        row = LedgerRow(system, int(v), int(ell), mode, status, witness, int(nodes), seed, version)
    except ValueError:
        raise LedgerCorrupt(f"{where}: non-integer v/ell/nodes") from None
    if status == STATUS_FOUND:
        try:
            decode_sequencing(witness, row.v)
        except Exception as exc:
            raise LedgerCorrupt(f"{where}: bad witness {witness!r}: {exc}") from None
    return row


def read_ledger(path) -> list[LedgerRow]:
    path = Path(path)
    if not path.exists():
        return []
    rows = []
    for n, line in enumerate(path.read_text().splitlines(), 1):
        if line.strip() and not line.startswith("#"):
            rows.append(parse_ledger_line(line, n))
    return rows


def outcome_row(system_id, sys, ell, cyclic, outcome: SearchOutcome, seed) -> LedgerRow:
    witness = format_sequencing(outcome.sequencing) if outcome.sequencing else "-"
    return LedgerRow(system_id, sys.v, ell, "C" if cyclic else "L", outcome.status,
                     witness, outcome.nodes_expanded, "-" if seed is None else str(seed))


@dataclass(frozen=True)
class TaskSpec:
    ells: tuple[int, ...]
    modes: tuple[bool, ...]  # cyclic flags
    budget: int = 10**7
    seed: int | None = None

    @classmethod
    def parse(cls, text: str, budget: int = 10**7, seed: int | None = None) -> "TaskSpec":
        """``"cyclic:6"``, ``"linear:5-7"``, ``"both:6"``."""
        mode, _, ells = text.partition(":")
        modes = {"linear": (False,), "cyclic": (True,), "both": (False, True)}.get(mode)
        if modes is None or not ells:
            raise ValueError(f"task must look like cyclic:6 or linear:5-7, got {text!r}")
        lo, _, hi = ells.partition("-")
        return cls(tuple(range(int(lo), int(hi or lo) + 1)), modes, budget, seed)


def batch_run(systems: Iterable[tuple[str, TripleSystem]], task: TaskSpec,
              ledger_path=None, workers: int = 1, on_row=None) -> list[LedgerRow]:
    """Run ``task`` on every system, appending one ledger row per result.

    Rows already present in the ledger (same system, v, ell, mode) are reused,
    so an interrupted batch picks up where it stopped.
    """
    done = {}
    if ledger_path is not None:
        for row in read_ledger(ledger_path):
            done[row.key] = row
    rows = []
    handle = open(ledger_path, "a") if ledger_path is not None else None
    try:
        for system_id, sys in systems:
            for ell in task.ells:
                for cyclic in task.modes:
                    key = (system_id, sys.v, ell, "C" if cyclic else "L")
                    if key in done:
                        rows.append(done[key])
                        continue
                    out = search_ell_good(sys, ell, cyclic, budget=task.budget,
                                          seed=task.seed, workers=workers)
                    row = outcome_row(system_id, sys, ell, cyclic, out, task.seed)
                    if handle is not None:
                        handle.write(row.format() + "\n")
                        handle.flush()
                    done[key] = row
                    rows.append(row)
                    if on_row is not None:
                        on_row(row)
    finally:
        if handle is not None:
            handle.close()
    return rows


def summarize(rows: Sequence[LedgerRow]) -> dict[tuple[int, str], dict[str, int]]:
    out: dict[tuple[int, str], dict[str, int]] = {}
    for row in rows:
        tally = out.setdefault((row.ell, row.mode), {STATUS_FOUND: 0, STATUS_EXHAUSTED: 0,
                                                     STATUS_BUDGET: 0})
        tally[row.status] += 1
    return out
