#!/usr/bin/env python3
"""Run the Monte Carlo ROC experiment and print the per-rule summary.

Examples:
    python scripts/run_roc.py --profile desk --out results/desk
    python scripts/run_roc.py --config configs/paper.toml --out results/paper --threads 8
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from holofusion.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--profile", default=None)
    parser.add_argument("--config", default=None)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--rules", default=None)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    argv = ["roc", "--out", args.out, "--threads", str(args.threads)]
    argv += ["--config", args.config] if args.config else ["--profile", args.profile or "desk"]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    if args.rules:
        argv += ["--rules", args.rules]
    code = cli_main(argv)
    if code == 0:
        summary = json.loads((Path(args.out) / "summary.json").read_text())
        print(f"P_D at P_F = {summary['target_pfa']}:")
        for name, r in summary["rules"].items():
            print(f"  {name:14s} {r['pd_at_target_pfa']:.4f} +- {r['pd_stderr']:.4f}")
    return code


if __name__ == "__main__":
    sys.exit(main())
