"""Command-line front end: ``sunsieve <subcommand> ...``.

Exit codes: 0 on success, 2 when a scan or audit finds failures, 1 on
operational errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import tempfile
from pathlib import Path

from .scan import CheckpointError, default_workers, scan_range
from .sequences import SiftedSequence, density_profile, remainder
from .sievefuncs import D_closed, F_upper, f_lower, make_weight_config, richert_integral
from .weighted import weighted_count
from .witness import TASKS, audit_report, load_report

EXIT_OK, EXIT_ERROR, EXIT_FAILURES = 0, 1, 2


def _dump(payload) -> None:
    print(json.dumps(payload, indent=2))


def _g12(x: float) -> str:
    return f"{x:.12g}"


def cmd_verify(args) -> int:
    if args.out is None:
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "report"
            summary = scan_range(args.task, args.start, args.stop + 1, args.workers, path, None, args.format)
            sys.stdout.write(path.read_text())
        print(json.dumps(summary, indent=2), file=sys.stderr)
    else:
        summary = scan_range(args.task, args.start, args.stop + 1, args.workers, args.out, args.checkpoint, args.format)
        _dump(summary)
    return EXIT_FAILURES if summary["failure_count"] else EXIT_OK


def cmd_density(args) -> int:
    seq = SiftedSequence(args.n, args.variant)
    out = density_profile(seq, args.z).to_json()
    if args.remainder:
        out["remainders"] = [remainder(seq, d).to_json() for d in args.remainder]
    _dump(out)
    return EXIT_OK


def cmd_sieve_functions(args) -> int:
    if args.step <= 0 or args.u_min <= 0 or args.u_max < args.u_min:
        raise ValueError("need 0 < u-min <= u-max and step > 0")
    count = int(math.floor((args.u_max - args.u_min) / args.step + 1e-9)) + 1
    sys.stdout.write("u,F,f,D,integral\n")
    for i in range(count):
        u = args.u_min + i * args.step
        D = _g12(D_closed(u)) if 1 < u <= 4 else ""
        integral = _g12(richert_integral(u)) if 1 < u <= 4 else ""
        sys.stdout.write(f"{_g12(u)},{_g12(F_upper(u))},{_g12(f_lower(u))},{D},{integral}\n")
    return EXIT_OK


def cmd_weighted_sieve(args) -> int:
    seq = SiftedSequence(args.n, args.variant)
    cfg = make_weight_config(args.r, args.delta, args.variant)
    _dump(weighted_count(seq, cfg, workers=args.workers).to_json())
    return EXIT_OK


def cmd_weights(args) -> int:
    _dump(make_weight_config(args.r, args.delta, args.degree).to_json())
    return EXIT_OK


def cmd_audit(args) -> int:
    problems = audit_report(load_report(args.path))
    for p in problems:
        print(p)
    print(f"{len(problems)} problem(s)", file=sys.stderr)
    return EXIT_FAILURES if problems else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunsieve", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="witness scan over a range of n")
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--from", dest="start", type=int, required=True)
    p.add_argument("--to", dest="stop", type=int, required=True, help="last n, inclusive")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--checkpoint")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("density", help="local densities and G(z) as JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", type=int, choices=(1, 2), required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--remainder", type=int, action="append", metavar="D", help="squarefree d; repeatable")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("sieve-functions", help="linear-sieve function tables")
    sf = p.add_subparsers(dest="action", required=True)
    e = sf.add_parser("eval", help="CSV rows u,F,f,D,integral")
    e.add_argument("--u-min", type=float, required=True)
    e.add_argument("--u-max", type=float, required=True)
    e.add_argument("--step", type=float, required=True)
    e.set_defaults(func=cmd_sieve_functions)

    p = sub.add_parser("weighted-sieve", help="evaluate W(A, u, lambda)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", type=int, choices=(1, 2), required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_weighted_sieve)

    p = sub.add_parser("weights", help="weight configuration as JSON")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--degree", type=int, choices=(1, 2), required=True)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("audit", help="re-derive every record of a report")
    p.add_argument("path")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "workers", 0) is None:
        args.workers = default_workers()
    try:
        return args.func(args)
    except (OSError, ValueError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
