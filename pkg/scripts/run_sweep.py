#!/usr/bin/env python3
"""Sweep one system axis (K, M, N or Nt) and print the P_D table.

Example:
    python scripts/run_sweep.py --profile desk --axis Nt --values 4,9,16,25 --out results/nt
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
    parser.add_argument("--axis", required=True, choices=("K", "M", "N", "Nt"))
    parser.add_argument("--values", required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--rules", default=None)
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    argv = ["sweep", "--axis", args.axis, "--values", args.values,
            "--out", args.out, "--threads", str(args.threads)]
    argv += ["--config", args.config] if args.config else ["--profile", args.profile or "desk"]
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    if args.rules:
        argv += ["--rules", args.rules]
    code = cli_main(argv)
    if code == 0:
        table = json.loads((Path(args.out) / "sweep_summary.json").read_text())
        for point in table["points"]:
            row = "  ".join(
                f"{name}={r['pd_at_target_pfa']:.4f}" for name, r in point["rules"].items()
            )
            print(f"{table['axis']}={point['value']:4d}: {row}")
    return code


if __name__ == "__main__":
    sys.exit(main())
