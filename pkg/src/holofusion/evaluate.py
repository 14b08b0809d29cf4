"""Monte Carlo experiment engine: channel realizations x per-trial target,
decision and noise draws -> pooled empirical ROC curves and detection
probability at a fixed false-alarm rate, per fusion rule.

Determinism: every random stream is keyed by (seed, channel, purpose[, rule])
through SeedSequence, so reruns with an identical config are bit-identical
and the channel loop can be farmed out to threads without changing results.
Targets, decisions and receiver noise are shared across rules within a
channel (common random numbers), which tightens rule-to-rule comparisons.
"""

from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

import numpy as np

from .augmented import DeflectionKind
from .channel import ChannelRealization, effective_channel
from .design import DesignObjective, RhsDesign, run_ao
from .fusion import FilterBank, GlrEvaluator, GlrTables, WlRule
from .scenario import (
    CANONICAL_RULES,
    ScenarioConfig,
    ScenarioContext,
    build_context,
    canonical_rule,
)
from .sensing import detection_probs

DESIGNED_RULES = {
    "eFuC-0": ("efuc", DeflectionKind.NORMAL),
    "eFuC-1": ("efuc", DeflectionKind.MODIFIED),
    "bFuC-0": ("bfuc", DeflectionKind.NORMAL),
    "bFuC-1": ("bfuc", DeflectionKind.MODIFIED),
    "IS": ("is", DeflectionKind.NORMAL),
}

_RULE_IDS = {name: i for i, name in enumerate(CANONICAL_RULES)}

# stream ids for SeedSequence keys
_CHANNEL, _TARGETS, _DEC_H1, _DEC_H0, _NOISE_H1, _NOISE_H0, _DESIGN, _PHASES = range(8)


def stream(seed: int, *key) -> np.random.Generator:
    """Counter-style generator keyed by (seed, *key)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: ScenarioConfig
    rules: tuple
    n_channels: int
    n_trials: int
    target_pfa: float
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(canonical_rule(r) for r in self.rules))
        if self.n_channels < 1 or self.n_trials < 1:
            raise ValueError("n_channels and n_trials must be >= 1")
        if not 0.0 < self.target_pfa < 1.0:
            raise ValueError("target_pfa must lie in (0, 1)")

    @classmethod
    def from_scenario(cls, cfg: ScenarioConfig, rules=None, seed=None) -> "ExperimentConfig":
        ev = cfg.eval
        return cls(
            scenario=cfg,
            rules=tuple(rules) if rules is not None else ev.rules,
            n_channels=ev.n_channels,
            n_trials=ev.n_trials,
            target_pfa=ev.target_pfa,
            seed=int(seed) if seed is not None else ev.seed,
        )


@dataclass
class RuleReport:
    name: str
    h0: np.ndarray
    h1: np.ndarray
    roc_pf: np.ndarray
    roc_pd: np.ndarray
    pd_at_pfa: float
    pd_stderr: float
    per_channel_pd: np.ndarray
    mean_deflection: float | None
    design_time_s: float
    fusion_time_s: float


@dataclass
class RocReport:
    rules: dict
    target_pfa: float
    n_channels: int
    n_trials: int
    seed: int

    def rule(self, name: str) -> RuleReport:
        return self.rules[canonical_rule(name)]


def empirical_roc(h0_samples, h1_samples):
    """Stepwise ROC from a threshold sweep over the pooled sample values,
    anchored at (0, 0) and (1, 1). Exceedance is strict (statistic > gamma)."""
    h0 = np.sort(np.asarray(h0_samples, dtype=float))
    h1 = np.sort(np.asarray(h1_samples, dtype=float))
    if h0.size == 0 or h1.size == 0:
        raise ValueError("need samples under both hypotheses")
    thresholds = np.unique(np.concatenate([h0, h1]))[::-1]
    pf = 1.0 - np.searchsorted(h0, thresholds, side="right") / h0.size
    pd = 1.0 - np.searchsorted(h1, thresholds, side="right") / h1.size
    pf = np.concatenate([[0.0], pf, [1.0]])
    pd = np.concatenate([[0.0], pd, [1.0]])
    return pf, pd


def roc_pd_at(pf_curve, pd_curve, pf_targets):
    """P_D of a stepwise ROC at given P_F values (right-continuous step)."""
    idx = np.searchsorted(pf_curve, np.asarray(pf_targets, dtype=float), side="right") - 1
    return pd_curve[np.clip(idx, 0, len(pd_curve) - 1)]


def pd_at_pfa(h0_samples, h1_samples, target_pfa):
    """Detection probability at the empirical (1 - target_pfa) H0 quantile,
    with a binomial standard error."""
    h0 = np.asarray(h0_samples, dtype=float)
    h1 = np.asarray(h1_samples, dtype=float)
    if target_pfa * h0.size < 5:
        warnings.warn(
            f"only {target_pfa * h0.size:.1f} expected H0 exceedances; "
            "the reported P_D has a wide error bar"
        )
    thr = np.quantile(h0, 1.0 - target_pfa, method="higher")
    pd = float(np.mean(h1 > thr))
    stderr = float(np.sqrt(pd * (1.0 - pd) / h1.size))
    return pd, stderr


def _wl_statistics(fusion, ys) -> np.ndarray:
    """Batched widely-linear (bank) statistics over columns of ys."""
    if isinstance(fusion, WlRule):
        return fusion.scale * 2.0 * np.real(fusion.a.top.conj() @ ys) + fusion.bias
    if isinstance(fusion, FilterBank):
        vals = (fusion.scales()[:, None] * 2.0 * np.real(fusion.weights().conj() @ ys)
                + fusion.biases()[:, None])
        return vals.max(axis=0)
    raise TypeError(f"unsupported fusion payload {type(fusion)!r}")


@dataclass(frozen=True)
class GlrRule:
    """GLR fusion on a fixed phase configuration."""

    phases: np.ndarray
    label: str = "GLR"


def simulate_statistics(ctx: ScenarioContext, channel: ChannelRealization, rule,
                        hypothesis: str, n_trials: int, rng,
                        glr_tables: GlrTables | None = None) -> np.ndarray:
    """Reference single-rule simulation path: draw per-trial targets (H1),
    decisions and noise, then evaluate the rule's statistic on each trial.

    rule is an RhsDesign, a GlrRule, or the string "GLR-obs-bound".
    """
    k = ctx.field.n_sensors
    if hypothesis == "H1":
        targets = ctx.area.sample_targets(n_trials, rng)
        probs = detection_probs(ctx.field, ctx.params, targets)
    elif hypothesis == "H0":
        probs = np.broadcast_to(ctx.rho0, (n_trials, k))
    else:
        raise ValueError("hypothesis must be 'H0' or 'H1'")
    x = np.where(rng.uniform(size=(n_trials, k)) < probs, 1.0, -1.0)
    if isinstance(rule, str) and canonical_rule(rule) == "GLR-obs-bound":
        return ctx.obs_bound.statistics(x)
    if isinstance(rule, RhsDesign):
        phases, payload = rule.phases, rule.fusion
    elif isinstance(rule, GlrRule):
        phases, payload = rule.phases, None
    else:
        raise TypeError(f"unsupported rule {rule!r}")
    H_e = effective_channel(channel.G, phases, channel.H)
    mean = H_e @ (ctx.field.tx_gains[:, None] * x.T)
    noise = rng.standard_normal(mean.shape) + 1j * rng.standard_normal(mean.shape)
    ys = mean + np.sqrt(ctx.sigma_w2 / 2.0) * noise
    if payload is None:
        ev = GlrEvaluator(H_e, ctx.field.tx_gains, ctx.sigma_w2, ctx.grid,
                          ctx.field, ctx.params, tables=glr_tables)
        return ev.statistics(ys)
    return _wl_statistics(payload, ys)


def _design_for(ctx: ScenarioContext, name: str, channel: ChannelRealization,
                init_rng) -> RhsDesign:
    family, kind = DESIGNED_RULES[name]
    if family == "efuc":
        obj = DesignObjective(family="efuc", kind=kind, rho_bar=ctx.rho_bar)
    elif family == "bfuc":
        obj = DesignObjective(family="bfuc", kind=kind, grid=ctx.grid)
    else:
        obj = DesignObjective(family="is")
    return run_ao(obj, ctx.field, ctx.params, channel, ctx.sigma_w2,
                  tol=ctx.config.design.tol, max_iter=ctx.config.design.max_iter,
                  rng=init_rng)


def _run_channel(ctx: ScenarioContext, cfg: ExperimentConfig, c: int,
                 glr_tables: GlrTables | None):
    """All rules on one channel realization; returns per-rule statistics."""
    seed = cfg.seed
    n_trials = cfg.n_trials
    k = ctx.field.n_sensors
    n = ctx.feeds.n_feeds
    channel = ctx.draw_channel(stream(seed, c, _CHANNEL))

    targets = ctx.area.sample_targets(n_trials, stream(seed, c, _TARGETS))
    probs1 = detection_probs(ctx.field, ctx.params, targets)
    x1 = np.where(stream(seed, c, _DEC_H1).uniform(size=(n_trials, k)) < probs1, 1.0, -1.0)
    x0 = np.where(stream(seed, c, _DEC_H0).uniform(size=(n_trials, k)) < ctx.rho0, 1.0, -1.0)
    rng_w1 = stream(seed, c, _NOISE_H1)
    rng_w0 = stream(seed, c, _NOISE_H0)
    w1 = (rng_w1.standard_normal((n, n_trials)) + 1j * rng_w1.standard_normal((n, n_trials)))
    w0 = (rng_w0.standard_normal((n, n_trials)) + 1j * rng_w0.standard_normal((n, n_trials)))
    w1 *= np.sqrt(ctx.sigma_w2 / 2.0)
    w0 *= np.sqrt(ctx.sigma_w2 / 2.0)
    mean1_base = ctx.field.tx_gains[:, None] * x1.T   # D_alpha x, before the channel
    mean0_base = ctx.field.tx_gains[:, None] * x0.T

    designs = {}

    def design_of(name):
        # streams keyed by the rule's canonical id, so a design is identical
        # no matter which other rules run alongside it
        if name not in designs:
            rule_id = _RULE_IDS[name]
            t0 = time.perf_counter()
            des = _design_for(ctx, name, channel, stream(seed, c, _DESIGN, rule_id))
            designs[name] = (des, time.perf_counter() - t0)
        return designs[name]

    out = {}
    for name in cfg.rules:
        design_time = 0.0
        deflection = None
        if name in DESIGNED_RULES:
            des, design_time = design_of(name)
            deflection = float(des.objective_trace[-1])
            phases = des.phases
            payload = des.fusion
        elif name in ("GLR", "random-RHS-GLR"):
            rule_id = _RULE_IDS[name]
            phases = stream(seed, c, _PHASES, rule_id).uniform(0.0, 2.0 * np.pi, ctx.rhs.n_elements)
            payload = None
        elif name == "GLR+IS-RHS":
            des, design_time = design_of("IS")
            phases = des.phases
            payload = None
        elif name == "GLR-obs-bound":
            t0 = time.perf_counter()
            h1 = ctx.obs_bound.statistics(x1)
            h0 = ctx.obs_bound.statistics(x0)
            out[name] = (h0, h1, None, 0.0, time.perf_counter() - t0)
            continue
        else:  # pragma: no cover - canonicalization guards this
            raise ValueError(f"unhandled rule {name}")

        H_e = effective_channel(channel.G, phases, channel.H)
        y1 = H_e @ mean1_base + w1
        y0 = H_e @ mean0_base + w0
        t0 = time.perf_counter()
        if payload is None:
            ev = GlrEvaluator(H_e, ctx.field.tx_gains, ctx.sigma_w2, ctx.grid,
                              ctx.field, ctx.params, tables=glr_tables)
            h1 = ev.statistics(y1)
            h0 = ev.statistics(y0)
        else:
            h1 = _wl_statistics(payload, y1)
            h0 = _wl_statistics(payload, y0)
        out[name] = (h0, h1, deflection, design_time, time.perf_counter() - t0)
    return out


def run_experiment(cfg: ExperimentConfig, threads: int = 1,
                   ctx: ScenarioContext | None = None) -> RocReport:
    """Outer loop over channel realizations, pooled ROC per rule.

    The empirical threshold is computed on the pooled H0 statistics (one
    global threshold per rule); per-channel detection rates at that shared
    threshold are also reported.
    """
    if ctx is None:
        ctx = build_context(cfg.scenario)
    needs_glr = any(r in ("GLR", "random-RHS-GLR", "GLR+IS-RHS") for r in cfg.rules)
    glr_tables = GlrTables(ctx.grid, ctx.field, ctx.params) if needs_glr else None

    def work(c):
        return _run_channel(ctx, cfg, c, glr_tables)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_channel = list(pool.map(work, range(cfg.n_channels)))
    else:
        per_channel = [work(c) for c in range(cfg.n_channels)]

    rules = {}
    for name in cfg.rules:
        h0 = np.concatenate([per_channel[c][name][0] for c in range(cfg.n_channels)])
        h1 = np.concatenate([per_channel[c][name][1] for c in range(cfg.n_channels)])
        deflections = [per_channel[c][name][2] for c in range(cfg.n_channels)]
        design_time = float(np.sum([per_channel[c][name][3] for c in range(cfg.n_channels)]))
        fusion_time = float(np.sum([per_channel[c][name][4] for c in range(cfg.n_channels)]))
        pf, pd = empirical_roc(h0, h1)
        pd_hat, stderr = pd_at_pfa(h0, h1, cfg.target_pfa)
        thr = np.quantile(h0, 1.0 - cfg.target_pfa, method="higher")
        per_ch = np.array([
            np.mean(per_channel[c][name][1] > thr) for c in range(cfg.n_channels)
        ])
        mean_defl = None if deflections[0] is None else float(np.mean(deflections))
        rules[name] = RuleReport(
            name=name, h0=h0, h1=h1, roc_pf=pf, roc_pd=pd,
            pd_at_pfa=pd_hat, pd_stderr=stderr, per_channel_pd=per_ch,
            mean_deflection=mean_defl, design_time_s=design_time,
            fusion_time_s=fusion_time,
        )
    return RocReport(
        rules=rules, target_pfa=cfg.target_pfa, n_channels=cfg.n_channels,
        n_trials=cfg.n_trials, seed=cfg.seed,
    )


SCHEMA_VERSION = 1


def write_roc_csv(report: RocReport, path) -> None:
    """One (rule, P_F, P_D) row per ROC vertex; content is deterministic
    given the experiment config and seed."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# schema_version={SCHEMA_VERSION}\n")
        fh.write("rule,p_f,p_d\n")
        for name in report.rules:
            r = report.rules[name]
            for pf, pd in zip(r.roc_pf, r.roc_pd):
                fh.write(f"{name},{pf!r},{pd!r}\n")


def summary_dict(report: RocReport) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "seed": report.seed,
        "n_channels": report.n_channels,
        "n_trials": report.n_trials,
        "target_pfa": report.target_pfa,
        "rules": {},
    }
    for name, r in report.rules.items():
        out["rules"][name] = {
            "pd_at_target_pfa": r.pd_at_pfa,
            "pd_stderr": r.pd_stderr,
            "mean_deflection": r.mean_deflection,
            "per_channel_pd": [float(v) for v in r.per_channel_pd],
            "n_h0": int(r.h0.size),
            "n_h1": int(r.h1.size),
        }
    return out


def write_summary_json(report: RocReport, path) -> None:
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_timings_json(report: RocReport, path) -> None:
    """Wall-clock accounting; kept out of summary.json so the deterministic
    outputs stay byte-identical across reruns."""
    import json

    n_y = 2 * report.n_channels * report.n_trials
    out = {"schema_version": SCHEMA_VERSION, "rules": {}}
    for name, r in report.rules.items():
        out["rules"][name] = {
            "design_time_s": r.design_time_s,
            "fusion_time_s": r.fusion_time_s,
            "fusion_time_per_y_s": r.fusion_time_s / n_y,
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
