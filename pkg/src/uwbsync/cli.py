"""Command line entry point: ``uwbsync generate | sweep | verify``.

Exit status is 0 on success, 1 on a usage or configuration error and 2 on
an I/O error.
"""
from __future__ import annotations

import argparse
import csv
import sys

from . import chanmodel, oracle
from .errors import ConfigError, DegenerateParams, ParseError, UnsupportedVersion
from .experiment import SweepConfig, emit_report, parse_bandwidths, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_CONFIG, f"\n{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="uwbsync", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, default=7, help="master RNG seed")
        sp.add_argument("--realizations", type=int, default=100)
        sp.add_argument("--ds", type=float, default=279e-9, help="delay spread in seconds")
        sp.add_argument("--oversample", type=int, default=16,
                        help="dense grid rate as a multiple of the largest bandwidth")
        sp.add_argument("--bandwidths", default="4e6..1024e6x2",
                        help="'a..bxk' geometric ladder or comma-separated list, in Hz")

    g = sub.add_parser("generate", help="write random CIRs to a file")
    common(g)
    g.add_argument("--out", required=True, help="CIR file to write")

    s = sub.add_parser("sweep", help="run the penalty sweep and write CSV reports")
    common(s)
    s.add_argument("--phases", type=int, default=4, help="sampling phases per period (M)")
    s.add_argument("--cir-in", help="read channels from a CIR file instead of generating")
    s.add_argument("--out", default="penalties.csv", help="per-realization CSV")
    s.add_argument("--fixed-eps", action="store_true",
                   help="draw one offset fraction per realization for all bandwidths")
    s.add_argument("--workers", type=int, default=1)

    v = sub.add_parser("verify", help="cross-check fast paths against brute-force oracles")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=100)
    v.add_argument("--out", help="optional CSV of check results")
    return p


def _cmd_generate(args) -> int:
    bandwidths = parse_bandwidths(args.bandwidths)
    top = max(bandwidths) if bandwidths else chanmodel.DEFAULT_MAX_BANDWIDTH
    params = chanmodel.ClusterModelParams(target_delay_spread=args.ds, rng_seed=args.seed)
    records = chanmodel.generate(params, args.realizations,
                                 grid_step=1.0 / (args.oversample * top))
    chanmodel.export(records, args.out)
    print(f"wrote {len(records)} impulse responses to {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = SweepConfig(bandwidths=parse_bandwidths(args.bandwidths),
                      realizations=args.realizations, master_seed=args.seed, M=args.phases,
                      oversample=args.oversample, Ds=args.ds, source=args.cir_in,
                      output_path=args.out, fixed_eps=args.fixed_eps, workers=args.workers)
    report = run_sweep(cfg)
    emit_report(report, cfg.output_path)
    return EXIT_OK


def _cmd_verify(args) -> int:
    print(f"{'check':32s} {'metric':20s} {'value':>12s} {'limit':>10s}  result")

    def show(r):
        print(f"{r.check:32s} {r.metric:20s} {r.value:12.3e} {r.limit:10.1e}  "
              f"{'PASS' if r.passed else 'FAIL'}")

    results = oracle.run_checks(args.seed, args.instances, log=show)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["check", "metric", "value", "limit", "pass"])
            for r in results:
                w.writerow([r.check, r.metric, repr(r.value), repr(r.limit), str(r.passed).lower()])
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_CONFIG
    handler = {"generate": _cmd_generate, "sweep": _cmd_sweep, "verify": _cmd_verify}[args.command]
    try:
        return handler(args)
    except (ParseError, UnsupportedVersion, OSError) as exc:
        print(f"uwbsync: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, DegenerateParams, ValueError) as exc:
        print(f"uwbsync: {exc}", file=sys.stderr)
        return EXIT_CONFIG
