"""Command-line entry point.

Subcommands mirror the experiment kinds (rate-sweep, ber, ser, mi-dump)
plus gen-ldpc for constructing and saving a parity-check matrix.  Every
experiment needs a TOML config; seed and output path can be overridden on
the command line.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments
from .ldpc import _count_four_cycles, gallager_construct, save_code


def _add_experiment_parser(sub, kind: str) -> None:
    p = sub.add_parser(kind, help=f"run a {kind} experiment from a config file")
    p.add_argument("--config", required=True, help="TOML experiment config")
    p.add_argument("--seed", type=int, default=None, help="override the master seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out", default=None, help="override the CSV output path")
    p.add_argument(
        "--no-timestamp",
        action="store_true",
        help="suppress the timestamp comment for byte-identical reruns",
    )
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.set_defaults(kind=kind)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="markersim",
        description="marker-code simulation over insertion/deletion/substitution channels",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in experiments.KINDS:
        _add_experiment_parser(sub, kind)

    g = sub.add_parser("gen-ldpc", help="construct a regular Gallager code and save H")
    g.add_argument("--n", type=int, default=300, help="codeword length")
    g.add_argument("--k", type=int, default=150, help="nominal dimension")
    g.add_argument("--wc", type=int, default=3, help="column weight")
    g.add_argument("--wr", type=int, default=6, help="row weight")
    g.add_argument("--seed", type=int, default=0, help="construction seed")
    g.add_argument("--attempts", type=int, default=200, help="resampling attempts")
    g.add_argument("--out", required=True, help="H file path")
    g.set_defaults(kind="gen-ldpc")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind == "gen-ldpc":
            code = gallager_construct(
                args.n, args.k, args.wc, args.wr, rng=args.seed, max_attempts=args.attempts
            )
            save_code(code, args.out)
            print(
                f"gen-ldpc: ({code.n},{code.n - code.m}) w_c={code.w_c} w_r={code.w_r} "
                f"rank={code.rank} k_eff={code.k_eff} "
                f"4cycles={_count_four_cycles(code.h)} -> {args.out}"
            )
            return 0
        cfg = experiments.load_config(
            args.config,
            kind=args.kind,
            seed=args.seed,
            out=args.out,
            threads=args.threads,
            timestamp=not args.no_timestamp,
            plot=not args.no_plot,
        )
        experiments.run(cfg)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
