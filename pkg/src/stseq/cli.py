"""Command-line interface: verify, construct, search, best, batch, gen, reproduce.

Exit codes: 0 success / claims pass, 1 semantic failure, 2 input or config error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .catalog import (
    DATA_ENV,
    STS15_NOT_CYCLIC5,
    STS15_STRINGS,
    StarterSet,
    builtin,
    data_dir,
    decode_sequencing,
    develop_cyclic,
    format_sequencing,
    format_system,
    parse_starters,
    random_system,
    resolve_system,
    sts15_listing,
)
from .constructions import (
    ConstructionTrace,
    colbourn_3good,
    five_good,
    four_good,
    theorem6_ell_good,
)
from .core import blackburn_etzion_threshold, goodness_report, is_ell_good, lmax_upper_bound
from .errors import MissingDataFile, PreconditionFailed, StsError, StuckChoice, UnhandledProfile
from .search import (
    TaskSpec,
    batch_run,
    best_goodness,
    outcome_row,
    search_ell_good,
    summarize,
)
from .structure import BudgetExceeded, Colouring, proper_colouring

log = logging.getLogger("stseq")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class Config:
    data_dir: Path
    ledger: Path | None
    budget: int
    seed: int | None
    workers: int
    machine: bool


def _config(args) -> Config:
    # flags beat the environment, which beats the packaged default
    return Config(
        data_dir=data_dir(args.data_dir or os.environ.get(DATA_ENV)),
        ledger=Path(args.ledger) if getattr(args, "ledger", None) else None,
        budget=args.budget,
        seed=args.seed,
        workers=args.workers,
        machine=args.format == "machine",
    )


def _load(spec, cfg):
    return resolve_system(spec, cfg.data_dir)


def _read_colouring(path) -> Colouring:
    """One colour class per line, points separated by spaces."""
    classes = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            classes.append(frozenset(int(t) for t in line.split()))
    return Colouring(tuple(classes))


# ---------------------------------------------------------------- commands


def cmd_verify(args, cfg) -> int:
    label, system = _load(args.sts, cfg)
    seq = decode_sequencing(args.seq, system.v)
    if args.ell is not None:
        ok, bad = is_ell_good(system, seq, args.ell, args.cyclic)
        mode = "cyclically " if args.cyclic else ""
        if ok:
            print(f"{label}: PASS {mode}{args.ell}-good")
            return EXIT_OK
        print(f"{label}: FAIL not {mode}{args.ell}-good, block {bad}")
        return EXIT_FAIL
    rep = goodness_report(system, seq)
    print(f"{label}: linear {rep.max_linear_ell} (tightest block {rep.witness_linear}), "
          f"cyclic {rep.max_cyclic_ell} (tightest block {rep.witness_cyclic})")
    return EXIT_OK


def cmd_construct(args, cfg) -> int:
    label, system = _load(args.sts, cfg)
    trace = ConstructionTrace(args.method)
    colouring = _read_colouring(args.colouring) if args.colouring else None
    try:
        if args.method == "colbourn":
            seq = colbourn_3good(system, args.cyclic, trace=trace)
        elif args.method == "t5":
            seq = four_good(system, seed=args.seed, trace=trace)
        elif args.method == "t6":
            ell = args.ell or 4
            if colouring is None:
                colouring = _colouring_for_t6(system, ell, args.cyclic)
            seq = theorem6_ell_good(system, colouring, ell, args.cyclic, seed=args.seed, trace=trace)
        else:
            seq = five_good(system, colouring, seed=args.seed, budget=cfg.budget, trace=trace)
    except (PreconditionFailed, UnhandledProfile, StuckChoice) as exc:
        print(f"{label}: {args.method} not applicable: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.trace:
        Path(args.trace).write_text(trace.format())
    print(format_sequencing(seq))
    return EXIT_OK


def _colouring_for_t6(system, ell, cyclic):
    """Try 3-colour profiles in turn until one meets the class-size requirement."""
    from .constructions import class_threshold
    from .structure import feasible_profiles

    c = class_threshold(ell)
    extra = ell - 1 if cyclic else 0
    # balanced profiles first: lopsided ones are slow to refute
    profiles = sorted(feasible_profiles(system.v), key=lambda p: p[0] - p[2])
    for profile in profiles:
        small = sum(1 for s in profile if s < c)
        if small > 1 or (extra and profile[0] < c + extra):
            continue
        try:
            col = proper_colouring(system, 3, profile, budget=200_000)
        except BudgetExceeded:
            continue
        if col is not None:
            return col
    raise PreconditionFailed(f"no 3-colouring with classes large enough for ell={ell}")


def _print_row(row, cfg, label):
    if cfg.machine:
        print(row.format())
    else:
        mode = "cyclic" if row.mode == "C" else "linear"
        print(f"{label}: {mode} {row.ell}-good {row.status} after {row.nodes} nodes"
              + (f", witness {row.witness}" if row.witness != "-" else ""))


def cmd_search(args, cfg) -> int:
    label, system = _load(args.sts, cfg)
    out = search_ell_good(system, args.ell, args.cyclic, budget=cfg.budget, seed=cfg.seed,
                          workers=cfg.workers, time_limit=args.time_limit)
    _print_row(outcome_row(label, system, args.ell, args.cyclic, out, cfg.seed), cfg, label)
    return EXIT_OK if out.found else EXIT_FAIL


def cmd_best(args, cfg) -> int:
    label, system = _load(args.sts, cfg)
    rep = best_goodness(system, budget=cfg.budget, seed=cfg.seed, workers=cfg.workers)
    for ell in range(3, rep.bound + 1):
        print(f"{label}: ell={ell} linear {rep.linear[ell]} cyclic {rep.cyclic[ell]}")
    print(f"{label}: best linear {rep.best_linear}, best cyclic {rep.best_cyclic} "
          f"(upper bound {rep.bound})")
    for (ell, cyclic), seq in sorted(rep.witnesses.items()):
        if ell in (rep.best_linear, rep.best_cyclic):
            print(f"  {'cyclic' if cyclic else 'linear'} {ell}: {format_sequencing(seq)}")
    return EXIT_OK


def cmd_batch(args, cfg) -> int:
    if args.random:
        systems = ((f"random{args.v}-{cfg.seed + i}", random_system(args.v, cfg.seed + i))
                   for i in range(args.random))
    else:
        systems = (_load(spec, cfg) for spec in args.sts)
    task = TaskSpec.parse(args.task, budget=cfg.budget, seed=None)
    rows = batch_run(systems, task, cfg.ledger, workers=cfg.workers,
                     on_row=lambda r: _print_row(r, cfg, r.system))
    if not cfg.machine:
        for (ell, mode), tally in sorted(summarize(rows).items()):
            print(f"ell={ell} {mode}: " + ", ".join(f"{k} {n}" for k, n in tally.items()))
    return EXIT_OK


def cmd_gen(args, cfg) -> int:
    if args.random:
        system = random_system(args.v, cfg.seed or 0)
    else:
        system = develop_cyclic(StarterSet(args.v, parse_starters(args.starters), args.short_orbit))
    text = format_system(system)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _check(results, name, ok, detail=""):
    results.append(ok)
    print(f"{'PASS' if ok else 'FAIL'} {name}" + (f"  {detail}" if detail else ""))


def cmd_reproduce(args, cfg) -> int:
    results: list[bool] = []
    table = args.table
    if table in ("sts13", "a-series", "c-series"):
        ids = {"sts13": ["STS13-1", "STS13-2"],
               "a-series": ["A1", "A2", "A3", "A4"],
               "c-series": [f"C{k}" for k in range(1, 8)]}[table]
        for entry_id in ids:
            entry = builtin(entry_id)
            lin_claim, cyc_claim = entry.claimed
            best_lin = max(goodness_report(entry.system, k.sequencing).max_linear_ell
                           for k in entry.known_sequencings)
            best_cyc = max(goodness_report(entry.system, k.sequencing).max_cyclic_ell
                           for k in entry.known_sequencings)
            printed = entry.known_sequencings[0]
            rep = goodness_report(entry.system, printed.sequencing)
            note = f"printed string gives ({rep.max_linear_ell}, {rep.max_cyclic_ell})"
            _check(results, f"{entry_id} linear >= {lin_claim}, cyclic >= {cyc_claim}",
                   best_lin >= lin_claim and best_cyc >= cyc_claim, note)
    elif table == "sts15":
        try:
            systems = sts15_listing(cfg.data_dir)
        except MissingDataFile as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        for k, system in enumerate(systems, 1):
            rep = goodness_report(system, decode_sequencing(STS15_STRINGS[k - 1], 15))
            cyc = 4 if k in STS15_NOT_CYCLIC5 else 5
            _check(results, f"STS15-{k} linear 5, cyclic {cyc}",
                   rep.max_linear_ell >= 5 and rep.max_cyclic_ell == cyc,
                   f"got ({rep.max_linear_ell}, {rep.max_cyclic_ell})")
    elif table == "bounds":
        _check(results, "threshold(4) = 55", blackburn_etzion_threshold(4) == 55)
        for v, cap in ((13, 4), (15, 5), (19, 6), (21, 7)):
            _check(results, f"lmax_upper_bound({v}) = {cap}", lmax_upper_bound(v) == cap)
    passed = sum(results)
    print(f"{passed}/{len(results)} claims pass")
    return EXIT_OK if passed == len(results) else EXIT_FAIL


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--data-dir", help=f"directory holding sts15.txt (else ${DATA_ENV})")
    common.add_argument("--budget", type=int, default=10**7, help="search node budget")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--format", choices=("human", "machine"), default="human")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stseq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stseq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check a sequencing")
    p.add_argument("--sts", required=True, help="system file or builtin:ID")
    p.add_argument("--seq", required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--cyclic", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common], help="build a sequencing constructively")
    p.add_argument("--sts", required=True)
    p.add_argument("--method", choices=("colbourn", "t5", "t6", "t8"), required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("--cyclic", action="store_true")
    p.add_argument("--colouring", help="file with one colour class per line")
    p.add_argument("--trace", help="write the construction log here")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("search", parents=[common], help="backtracking search for one ell")
    p.add_argument("--sts", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--cyclic", action="store_true")
    p.add_argument("--time-limit", type=float, help="wall-clock cap in seconds")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("best", parents=[common], help="largest linear and cyclic ell")
    p.add_argument("--sts", required=True)
    p.set_defaults(func=cmd_best)

    p = sub.add_parser("batch", parents=[common], help="run a task over many systems")
    p.add_argument("--sts", nargs="*", default=[])
    p.add_argument("--random", type=int, default=0, help="number of random systems")
    p.add_argument("--v", type=int, default=21)
    p.add_argument("--task", required=True, help="e.g. cyclic:6, linear:5-7, both:6")
    p.add_argument("--ledger", help="append-only results file")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("gen", parents=[common], help="emit a system file")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--starters", help='e.g. "0,1,4;0,2,9;0,5,11"')
    p.add_argument("--short-orbit", action="store_true")
    p.add_argument("--random", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reproduce", parents=[common], help="re-verify a published table")
    p.add_argument("--table", required=True,
                   choices=("sts15", "sts13", "a-series", "c-series", "bounds"))
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "gen" and not args.random and not args.starters:
        parser.error("gen needs --starters or --random")
    if args.command == "batch" and not args.random and not args.sts:
        parser.error("batch needs --sts or --random")
    if args.command == "batch" and args.random and args.seed is None:
        args.seed = 0
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except (StsError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
