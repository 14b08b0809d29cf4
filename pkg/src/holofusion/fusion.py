"""Decision statistics at the fusion center.

Four families: the widely-linear rule a^H [y; y*] + b, the max-of-bank
variant with likelihood-derived biases, the exact generalized likelihood
ratio over the multiple-access channel (enumerating all 2^K decision
vectors), and the channel-free observation bound evaluated on the raw
decision vector.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .augmented import AugmentedVector, augment_vector, spd_solve
from .sensing import SensingParams, SensorField, detection_probs, false_alarm_probs

PROB_EPS = 1e-12


class ComplexityError(ValueError):
    """Raised when an exact enumeration would be prohibitively large."""


@dataclass(frozen=True)
class WlRule:
    """Unit-norm widely-linear fusion direction, a positive calibration scale
    and a scalar bias: the statistic is scale * a^H [y; y*] + bias.

    For a single rule the scale and bias are absorbed by the detection
    threshold; in a bank they fix the relative weighting of the branches
    against their likelihood-derived biases.
    """

    a: AugmentedVector
    bias: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if abs(self.a.norm - 1.0) > 1e-10:
            raise ValueError("fusion vector must have unit augmented norm")
        if not self.scale > 0:
            raise ValueError("scale must be > 0")


@dataclass(frozen=True)
class TargetGrid:
    """Candidate target positions probed by bank/GLR statistics."""

    points: np.ndarray  # (N_t, 3)

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        object.__setattr__(self, "points", pts)
        if pts.shape[0] < 1 or pts.shape[1] != 3:
            raise ValueError("points must be a non-empty (N_t, 3) array")

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class FilterBank:
    """One widely-linear branch per candidate target position."""

    rules: tuple
    grid: TargetGrid

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        if len(self.rules) == 0:
            raise ValueError("filter bank must not be empty")
        if len(self.rules) != len(self.grid):
            raise ValueError("one rule per grid point required")

    def weights(self) -> np.ndarray:
        """(N_t, N) matrix of branch top halves."""
        return np.stack([r.a.top for r in self.rules])

    def biases(self) -> np.ndarray:
        return np.array([r.bias for r in self.rules])

    def scales(self) -> np.ndarray:
        return np.array([r.scale for r in self.rules])


def wl_statistic(rule: WlRule, y) -> float:
    """scale * a^H [y; y*] + b = scale * 2 Re(a_top^H y) + b; always real."""
    return float(rule.scale * 2.0 * np.real(np.vdot(rule.a.top, np.asarray(y))) + rule.bias)


def filter_bank_statistic(bank: FilterBank, y) -> float:
    """Largest branch statistic max_j scale_j * a_j^H [y; y*] + b_j."""
    vals = bank.scales() * 2.0 * np.real(bank.weights().conj() @ np.asarray(y)) + bank.biases()
    return float(vals.max())


def glr_biases(means1_aug, mean0_aug, aug_cov) -> np.ndarray:
    """Likelihood-matched branch biases under a shared augmented covariance:
    b_j = -1/2 mu1_j^H S^-1 mu1_j + 1/2 mu0^H S^-1 mu0."""
    aug_cov = np.asarray(aug_cov)
    mean0_aug = np.asarray(mean0_aug)
    q0 = float(np.real(np.vdot(mean0_aug, spd_solve(aug_cov, mean0_aug))))
    out = np.empty(len(means1_aug))
    for j, mu in enumerate(means1_aug):
        mu = np.asarray(mu)
        out[j] = -0.5 * float(np.real(np.vdot(mu, spd_solve(aug_cov, mu)))) + 0.5 * q0
    return out


def gray_code_signs(k: int) -> np.ndarray:
    """All 2^k sign vectors in binary-reflected Gray-code order, so that
    consecutive rows differ in exactly one component. Bit value 0 maps to -1."""
    idx = np.arange(2**k, dtype=np.uint64)
    gray = idx ^ (idx >> np.uint64(1))
    bits = (gray[:, None] >> np.arange(k, dtype=np.uint64)[None, :]) & np.uint64(1)
    return bits.astype(np.int8) * 2 - 1


def _log_pmf_weights(probs):
    """log f(x) = const + 1/2 sum_k x_k w_k with w = log(p/(1-p))."""
    p = np.clip(np.asarray(probs, dtype=float), PROB_EPS, 1.0 - PROB_EPS)
    w = np.log(p) - np.log1p(-p)
    const = 0.5 * float(np.sum(np.log(p) + np.log1p(-p)))
    return w, const


def _logsumexp(v):
    m = np.max(v, axis=-1, keepdims=True)
    return (m + np.log(np.sum(np.exp(v - m), axis=-1, keepdims=True)))[..., 0]


class GlrTables:
    """Channel-independent pieces of the GLR enumeration: the Gray-code sign
    matrix and the decision-pmf log-weights of every grid point. Build once
    per scenario and share across channel realizations."""

    def __init__(self, grid: TargetGrid, field: SensorField,
                 params: SensingParams, k_max: int = 20):
        k = field.n_sensors
        if k > k_max:
            raise ComplexityError(
                f"GLR enumeration needs 2^{k} = {2**k} decision vectors "
                f"(cap 2^{k_max}); raise k_max explicitly to proceed"
            )
        self.signs = gray_code_signs(k)                     # (2^K, K)
        w0, c0 = _log_pmf_weights(false_alarm_probs(field))
        self.logf0 = 0.5 * self.signs @ w0 + c0             # (2^K,)
        logf1 = np.empty((len(grid), self.signs.shape[0]))
        for j, p_t in enumerate(grid.points):
            w1, c1 = _log_pmf_weights(detection_probs(field, params, p_t))
            logf1[j] = 0.5 * self.signs @ w1 + c1
        self.logf1 = logf1                                  # (N_t, 2^K)


class GlrEvaluator:
    """Exact GLR statistic with per-channel tables precomputed once.

    Enumerates decision vectors in Gray-code order; the per-vector channel
    log-likelihoods are computed in the log domain with max-subtraction so
    tiny noise floors cannot overflow.
    """

    def __init__(self, H_e, tx_gains, sigma_w2, grid: TargetGrid,
                 field: SensorField, params: SensingParams, k_max: int = 20,
                 tables: "GlrTables | None" = None):
        H_e = np.atleast_2d(np.asarray(H_e))
        if tables is None:
            tables = GlrTables(grid, field, params, k_max=k_max)
        self.sigma_w2 = float(sigma_w2)
        self.signs = tables.signs
        self.logf0 = tables.logf0
        self.logf1 = tables.logf1
        a_cols = H_e * np.asarray(tx_gains, dtype=float)[None, :]
        self.means = self.signs @ a_cols.T                  # (2^K, N)

    def channel_loglik(self, y) -> np.ndarray:
        """-||y - mean(x)||^2 / sigma_w2 for every enumerated x."""
        diff = self.means - np.asarray(y)[None, :]
        return -np.einsum("ij,ij->i", diff, diff.conj()).real / self.sigma_w2

    def statistic(self, y) -> float:
        e = self.channel_loglik(y)
        denom = _logsumexp(e + self.logf0)
        numer = _logsumexp(e[None, :] + self.logf1)
        return float(np.max(numer) - denom)

    def statistics(self, ys) -> np.ndarray:
        """Batch evaluation over the columns of a (N, T) array."""
        ys = np.atleast_2d(np.asarray(ys))
        return np.array([self.statistic(ys[:, t]) for t in range(ys.shape[1])])


def glr_statistic(y, H_e, tx_gains, sigma_w2, grid: TargetGrid,
                  field: SensorField, params: SensingParams, k_max: int = 20) -> float:
    """One-shot exact GLR statistic; build a GlrEvaluator for repeated use."""
    ev = GlrEvaluator(H_e, tx_gains, sigma_w2, grid, field, params, k_max=k_max)
    return ev.statistic(y)


class ObservationBound:
    """Channel-free GLR on the raw decision vector (error-free reporting)."""

    def __init__(self, grid: TargetGrid, field: SensorField, params: SensingParams):
        pf = np.clip(false_alarm_probs(field), PROB_EPS, 1.0 - PROB_EPS)
        pd = detection_probs(field, params, grid.points)
        if np.any(pd <= 0) or np.any(pd >= 1):
            warnings.warn("degenerate detection probabilities clamped for the observation bound")
            pd = np.clip(pd, PROB_EPS, 1.0 - PROB_EPS)
        w_pos = np.log(pd) - np.log(pf)[None, :]           # weight of x_k = +1
        w_neg = np.log1p(-pd) - np.log1p(-pf)[None, :]     # weight of x_k = -1
        self.const = 0.5 * (w_pos + w_neg).sum(axis=1)     # (N_t,)
        self.slope = 0.5 * (w_pos - w_neg)                 # (N_t, K)

    def statistic(self, x) -> float:
        return float(np.max(self.const + self.slope @ np.asarray(x, dtype=float)))

    def statistics(self, xs) -> np.ndarray:
        """Batch over rows of a (T, K) decision matrix."""
        vals = self.const[None, :] + np.asarray(xs, dtype=float) @ self.slope.T
        return vals.max(axis=1)


def glr_observation_bound(x, grid: TargetGrid, field: SensorField,
                          params: SensingParams) -> float:
    """Best log-likelihood ratio of the decision vector over the target grid."""
    return ObservationBound(grid, field, params).statistic(x)
