"""Command-line interface.

Exit codes: 0 success / true, 1 decision false, 2 input error, 3 MILP cut
budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .bench import load_config, run_bench, to_csv
from .firing import fireable
from .generators import PRNG, gen_lattice, gen_random
from .milp import DEFAULT_CAP, enumerate_solutions, milp_max
from .net import NetError
from .netfile import (
    FormatError,
    load_net,
    parse_marking,
    parse_parikh,
    parse_rational,
    result_record,
    serialize_net,
)
from .reach import ReachMode, at_least_reachable, reachable
from .witness import check_certificate
from .yields import max_yield_binsearch

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("cpnyield")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _net(path: str):
    try:
        return load_net(_read(path))
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def _rational(text: str):
    try:
        return parse_rational(text, "argument")
    except FormatError as exc:
        raise argparse.ArgumentTypeError(exc.message) from None


def _mode(args, default: ReachMode) -> ReachMode:
    if getattr(args, "limit", False):
        return ReachMode.LIMIT
    if getattr(args, "finite", False):
        return ReachMode.FINITE
    return default


def cmd_fireable(args) -> int:
    nf = _net(args.net)
    subset = [t for t in args.subset.split(",") if t] if args.subset else []
    res = fireable(nf.net, nf.m0, subset)
    _emit(
        {
            "query": "fireable",
            "subset": sorted(subset),
            "member": res.is_member,
            "max_subset": sorted(res.max_subset),
            "order": list(res.order),
        }
    )
    return EXIT_OK if res.is_member else EXIT_FALSE


def cmd_reach(args) -> int:
    nf = _net(args.net)
    target = parse_marking(_read(args.target), nf.net)
    mode = _mode(args, ReachMode.FINITE)
    t0 = time.perf_counter()
    decide = at_least_reachable if args.at_least else reachable
    res = decide(nf.net, nf.m0, target, mode)
    ms = (time.perf_counter() - t0) * 1000
    _emit(
        result_record(
            "at-least-reach" if args.at_least else "reach",
            mode.value,
            None,
            res.support,
            res.parikh,
            res.lp_calls,
            ms,
            reachable=res.reachable,
            iterations=res.iterations,
        )
    )
    return EXIT_OK if res.reachable else EXIT_FALSE


def _yield_record(res, mode: ReachMode, ms: float) -> dict:
    extra = {"goal": res.goal, "method": res.method, "status": res.status}
    if res.method == "milp":
        extra["attained"] = res.attained
        extra["excluded"] = [sorted(s) for s in res.excluded]
    count = res.queries if res.method == "binsearch" else res.cuts
    return result_record("max-yield", mode.value, res.value, res.support, res.parikh, count, ms, **extra)


def cmd_max_yield(args) -> int:
    nf = _net(args.net)
    if args.goal not in nf.net.place_index:
        raise InputError(f"unknown goal place {args.goal!r}")
    mode = _mode(args, ReachMode.LIMIT)
    t0 = time.perf_counter()
    if args.method == "binsearch":
        results = [max_yield_binsearch(nf.net, nf.m0, args.goal, args.epsilon, mode)]
    elif args.n_best > 1:
        results = enumerate_solutions(
            nf.net, nf.m0, args.goal, args.n_best, cap=args.cap, strict_finite=mode is ReachMode.FINITE
        )
    else:
        results = [milp_max(nf.net, nf.m0, args.goal, cap=args.cap, strict_finite=mode is ReachMode.FINITE)]
    ms = (time.perf_counter() - t0) * 1000
    records = [_yield_record(r, mode, ms) for r in results]
    _emit(records[0] if len(records) == 1 else records)
    if any(r.status == "exhausted" for r in results):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_check_witness(args) -> int:
    nf = _net(args.net)
    target = parse_marking(_read(args.target), nf.net)
    v = parse_parikh(_read(args.parikh), nf.net)
    mode = _mode(args, ReachMode.FINITE)
    ok = check_certificate(nf.net, nf.m0, target, v, mode, at_least=args.at_least)
    _emit({"query": "check-witness", "mode": mode.value, "valid": ok, "support": sorted(v.support())})
    return EXIT_OK if ok else EXIT_FALSE


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    if args.kind == "lattice":
        if args.rows < 1 or args.cols < 1:
            raise InputError("rows and cols must be positive")
        if not 0 < args.fraction <= 1:
            raise InputError("fraction must lie in (0, 1]")
        net, m0, goal = gen_lattice(args.rows, args.cols, args.seed, args.fraction)
        meta = {"generator": "lattice", "prng": PRNG, "seed": args.seed, "goal": goal}
    else:
        if args.places < 1 or args.transitions < 0 or args.max_weight < 1 or not 0 < args.density <= 1:
            raise InputError("sizes must be positive and density in (0, 1]")
        net = gen_random(args.places, args.transitions, args.max_weight, args.density, args.seed, args.min_inputs)
        m0 = net.marking()
        meta = {"generator": "random", "prng": PRNG, "seed": args.seed}
    _write(serialize_net(net, m0, meta), args.output)
    return EXIT_OK


def cmd_bench(args) -> int:
    path = Path(args.config)
    try:
        cfg = load_config(_read(args.config), path.parent)
    except FormatError as exc:
        raise InputError(f"{args.config}: {exc}") from None
    if args.repetitions:
        cfg.repetitions = args.repetitions
    rows = run_bench(cfg)
    _write(to_csv(rows), args.output)
    if args.figure:
        from .plotting import plot_bench

        plot_bench(rows, args.figure, title=path.stem)
        log.info("figure written to %s", args.figure)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cpnyield", description="Continuous Petri net reachability and yield tools.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fireable", help="firing-set membership of a transition subset")
    p.add_argument("net")
    p.add_argument("--subset", default="", help="comma-separated transition ids")
    p.set_defaults(func=cmd_fireable)

    def modes(p, finite_flag: bool):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--limit", action="store_true", help="limit reachability")
        if finite_flag:
            g.add_argument("--finite", action="store_true", help="finite reachability")

    p = sub.add_parser("reach", help="decide (at-least) reachability of a marking")
    p.add_argument("net")
    p.add_argument("--target", required=True, help="marking file")
    p.add_argument("--at-least", action="store_true", help="accept any marking dominating the target")
    modes(p, False)
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("max-yield", help="maximum mass on a goal place")
    p.add_argument("net")
    p.add_argument("--goal", required=True)
    p.add_argument("--method", choices=("binsearch", "milp"), default="binsearch")
    p.add_argument("--epsilon", type=_rational, default="1/1000")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="MILP exclusion-cut budget")
    p.add_argument("--n-best", type=int, default=1, help="MILP: this many distinct supports")
    modes(p, True)
    p.set_defaults(func=cmd_max_yield)

    p = sub.add_parser("check-witness", help="verify a Parikh vector certificate")
    p.add_argument("net")
    p.add_argument("--target", required=True)
    p.add_argument("--parikh", required=True)
    p.add_argument("--at-least", action="store_true")
    modes(p, False)
    p.set_defaults(func=cmd_check_witness)

    p = sub.add_parser("gen", help="generate an instance file")
    gs = p.add_subparsers(dest="kind", required=True)
    q = gs.add_parser("lattice")
    q.add_argument("--rows", type=int, required=True)
    q.add_argument("--cols", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--fraction", type=_rational, default="1/10")
    q.add_argument("-o", "--output")
    q = gs.add_parser("random")
    q.add_argument("--places", type=int, required=True)
    q.add_argument("--transitions", type=int, required=True)
    q.add_argument("--max-weight", type=int, default=3)
    q.add_argument("--density", type=_rational, default="1/5")
    q.add_argument("--min-inputs", type=int, default=0)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time the yield algorithms; CSV to stdout")
    p.add_argument("--config", required=True)
    p.add_argument("--repetitions", type=int, help="override the config's repetitions")
    p.add_argument("--figure", help="also write a timing plot (png, pdf, svg)")
    p.add_argument("-o", "--output", help="CSV file instead of stdout")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except (InputError, FormatError, NetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
