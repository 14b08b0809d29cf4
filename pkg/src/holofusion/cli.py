"""Command-line front end.

Subcommands: design (per-channel surface/fusion designs as JSON), roc
(pooled ROC curves + summary), sweep (detection probability vs one system
axis), validate (run the repository's oracle test suite).

Exit codes: 0 success, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .augmented import DeflectionKind
from .channel import effective_channel, write_complex_csv
from .design import DegenerateDesignError, efuc_deflection
from .fusion import WlRule
from .evaluate import (
    DESIGNED_RULES,
    ExperimentConfig,
    run_experiment,
    stream,
    write_roc_csv,
    write_summary_json,
    write_timings_json,
    _CHANNEL,
    _DESIGN,
    _RULE_IDS,
    _design_for,
)
from .scenario import (
    PROFILES,
    ConfigError,
    ScenarioConfig,
    build_context,
    canonical_rule,
    load_config,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _add_common(parser, need_out=True):
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="scenario TOML file")
    src.add_argument("--profile", choices=sorted(PROFILES), help="built-in scenario profile")
    if need_out:
        parser.add_argument("--out", type=Path, required=True, help="output file or directory")
    parser.add_argument("--seed", type=int, default=None, help="override the evaluation seed")
    parser.add_argument("--rules", type=str, default=None,
                        help="comma-separated rule list overriding the config")
    parser.add_argument("--threads", type=int, default=1, help="channel-loop worker threads")


def _load_scenario(args) -> ScenarioConfig:
    if args.config is not None:
        return load_config(args.config)
    return PROFILES[args.profile]()


def _experiment_config(args) -> ExperimentConfig:
    cfg = _load_scenario(args)
    rules = None
    if args.rules:
        rules = tuple(canonical_rule(r.strip()) for r in args.rules.split(",") if r.strip())
    return ExperimentConfig.from_scenario(cfg, rules=rules, seed=args.seed)


def cmd_design(args) -> int:
    ecfg = _experiment_config(args)
    ctx = build_context(ecfg.scenario)
    designed = [r for r in ecfg.rules if r in DESIGNED_RULES]
    if not designed:
        print("no designed rules requested (nothing to do)", file=sys.stderr)
        return EXIT_CONFIG
    if args.dump_channels is not None:
        args.dump_channels.mkdir(parents=True, exist_ok=True)
        write_complex_csv(ctx.G, args.dump_channels / "G.csv")
    channels = []
    for c in range(ecfg.n_channels):
        channel = ctx.draw_channel(stream(ecfg.seed, c, _CHANNEL))
        if args.dump_channels is not None:
            write_complex_csv(channel.H, args.dump_channels / f"H_{c:03d}.csv")
        per_rule = {}
        for name in designed:
            try:
                des = _design_for(ctx, name, channel,
                                  stream(ecfg.seed, c, _DESIGN, _RULE_IDS[name]))
            except DegenerateDesignError as exc:
                print(f"design failure on channel {c}, rule {name}: {exc}", file=sys.stderr)
                return EXIT_RUNTIME
            entry = {
                "phases": [float(p) for p in des.phases],
                "objective_trace": [float(v) for v in des.objective_trace],
                "trace": des.trace_rows(),  # (iteration, objective, seconds)
                "iterations": des.iterations,
                "converged": des.converged,
                "final_objective": float(des.objective_trace[-1]),
            }
            if isinstance(des.fusion, WlRule):
                # sensing-aware deflections of the final operating point,
                # comparable across single-vector designs (IS included)
                H_e = effective_channel(channel.G, des.phases, channel.H)
                for kind in DeflectionKind:
                    entry[f"deflection_{kind.name.lower()}"] = efuc_deflection(
                        H_e, ctx.field.tx_gains, des.fusion.a, ctx.rho_bar,
                        ctx.rho0, kind, ctx.sigma_w2,
                    )
            per_rule[name] = entry
        channels.append({"channel": c, "rules": per_rule})
    out = {"schema_version": 1, "seed": ecfg.seed, "n_channels": ecfg.n_channels,
           "channels": channels}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def cmd_roc(args) -> int:
    ecfg = _experiment_config(args)
    try:
        report = run_experiment(ecfg, threads=args.threads)
    except DegenerateDesignError as exc:
        print(f"design failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    args.out.mkdir(parents=True, exist_ok=True)
    write_roc_csv(report, args.out / "roc.csv")
    write_summary_json(report, args.out / "summary.json")
    write_timings_json(report, args.out / "timings.json")
    return EXIT_OK


SWEEP_AXES = ("K", "M", "N", "Nt")


def _apply_axis(cfg: ScenarioConfig, axis: str, value: int) -> ScenarioConfig:
    if axis == "K":
        return cfg.replace(wsn={"n_sensors": int(value)})
    if axis == "M":
        side = int(round(np.sqrt(value)))
        if side * side != value:
            raise ConfigError("sweep.values", f"M={value} is not a perfect square")
        return cfg.replace(rhs={"side": side})
    if axis == "N":
        layouts = {1: (1, 1), 2: (2, 1), 4: (2, 2)}
        layout = layouts.get(int(value), (int(value), 1))
        return cfg.replace(feeds={"layout": layout})
    if axis == "Nt":
        side = int(round(np.sqrt(value)))
        if side * side != value:
            raise ConfigError("sweep.values", f"Nt={value} is not a perfect square")
        return cfg.replace(area={"grid_side": side})
    raise ConfigError("sweep.axis", f"unknown axis {axis!r}")


def cmd_sweep(args) -> int:
    base = _experiment_config(args)
    try:
        values = [int(v.strip()) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print("sweep values must be integers", file=sys.stderr)
        return EXIT_CONFIG
    if not values:
        print("empty sweep value list", file=sys.stderr)
        return EXIT_CONFIG
    args.out.mkdir(parents=True, exist_ok=True)
    rows = []
    table = {"schema_version": 1, "axis": args.axis, "seed": base.seed, "points": []}
    for value in values:
        cfg_v = _apply_axis(base.scenario, args.axis, value)
        ecfg = ExperimentConfig.from_scenario(cfg_v, rules=base.rules, seed=base.seed)
        try:
            report = run_experiment(ecfg, threads=args.threads)
        except DegenerateDesignError as exc:
            print(f"design failure at {args.axis}={value}: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        point = {"value": value, "rules": {}}
        for name, r in report.rules.items():
            rows.append((args.axis, value, name, r.pd_at_pfa, r.pd_stderr))
            point["rules"][name] = {
                "pd_at_target_pfa": r.pd_at_pfa,
                "pd_stderr": r.pd_stderr,
                "design_time_s": r.design_time_s,
                "fusion_time_s": r.fusion_time_s,
            }
        table["points"].append(point)
    with open(args.out / "sweep.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# schema_version=1\n")
        fh.write("axis,value,rule,pd_at_target_pfa,pd_stderr\n")
        for axis, value, name, pd, se in rows:
            fh.write(f"{axis},{value},{name},{pd!r},{se!r}\n")
    with open(args.out / "sweep_summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(table, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return EXIT_OK


def _find_tests_dir() -> Path | None:
    candidates = [Path.cwd()] + list(Path.cwd().parents)
    pkg_root = Path(__file__).resolve().parent.parent.parent
    candidates.append(pkg_root)
    for base in candidates:
        tests = base / "tests"
        if (tests / "test_acceptance.py").is_file():
            return tests
    return None


def cmd_validate(args) -> int:
    import pytest

    tests = _find_tests_dir()
    if tests is None:
        print("cannot locate the test suite (tests/test_acceptance.py)", file=sys.stderr)
        return EXIT_RUNTIME
    code = pytest.main(["-q", str(tests)])
    return EXIT_OK if code == 0 else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holofusion",
        description="Joint surface-phase and fusion-rule design with Monte Carlo ROC evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_design = sub.add_parser("design", help="fit per-channel designs and dump phases/traces")
    _add_common(p_design)
    p_design.add_argument("--dump-channels", type=Path, default=None,
                          help="also write H_###.csv / G.csv (re,im pairs) into this directory")
    p_design.set_defaults(func=cmd_design)

    p_roc = sub.add_parser("roc", help="run the Monte Carlo ROC experiment")
    _add_common(p_roc)
    p_roc.set_defaults(func=cmd_roc)

    p_sweep = sub.add_parser("sweep", help="re-run the experiment along one system axis")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p_sweep.add_argument("--values", type=str, required=True,
                         help="comma-separated integer axis values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="run the full invariant/oracle suite")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
