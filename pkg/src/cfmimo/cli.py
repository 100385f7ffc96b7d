"""Command-line entry point.

    cfmimo run --config cfg.json --drops N --fading-trials M --seed S --out DIR
    cfmimo summarize --in DIR

Exit code 0 on success; on failure, one machine-readable line
"ERROR <kind>: <message>" goes to stderr and the exit code is nonzero.
"""

from __future__ import annotations

import argparse
import sys

from .config import SystemConfig
from .errors import CfmimoError
from .harness import emit_cdf, run_experiment, summarize


def _build_parser():
    p = argparse.ArgumentParser(prog="cfmimo")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a simulation campaign")
    run.add_argument("--config", required=True, help="JSON scenario file")
    run.add_argument("--drops", type=int, default=100)
    run.add_argument("--fading-trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=None,
                     help="override the config's rng_seed")
    run.add_argument("--out", required=True, help="output directory")

    summ = sub.add_parser("summarize", help="print the percentile table")
    summ.add_argument("--in", dest="in_dir", required=True)
    return p


def _cmd_run(args):
    cfg = SystemConfig.from_json(args.config)
    if args.seed is not None:
        cfg.rng_seed = args.seed
    result = run_experiment(cfg, args.drops, args.fading_trials)
    files = emit_cdf(result, args.out)
    for f in files:
        print(f)


def _cmd_summarize(args):
    rows = summarize(args.in_dir)
    cols = ("population", "direction", "bound", "n_samples",
            "rate_p05_bps", "rate_p50_bps")
    print("  ".join(f"{c:>14s}" for c in cols))
    for r in rows:
        print("  ".join(f"{r.get(c, ''):>14s}" for c in cols))


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            _cmd_run(args)
        else:
            _cmd_summarize(args)
    except CfmimoError as e:
        print(f"ERROR {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"ERROR IOError: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
