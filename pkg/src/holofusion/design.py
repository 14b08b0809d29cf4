"""Joint design of the surface phase profile and the widely-linear fusion
rule(s) by alternating optimization.

Step A fits the fusion vector(s) in closed form (Cauchy-Schwarz maximizer of
the deflection for the current phases). Step B reparametrizes the deflection
as a ratio of quadratic forms in the augmented phase vector and performs one
majorize-maximize update with a closed-form solution, so the objective never
decreases. The ideal-sensor baseline runs the same loop with its
denominator-free surrogate.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .augmented import (
    AugmentedVector,
    DeflectionKind,
    augment_matrix,
    augment_vector,
    hermitize,
    spd_solve,
)
from .channel import ChannelRealization, effective_channel
from .fusion import FilterBank, TargetGrid, WlRule, glr_biases
from .sensing import (
    RhoVectors,
    SensingParams,
    SensorField,
    detection_probs,
    false_alarm_probs,
)


class DegenerateDesignError(RuntimeError):
    """Raised when the mean separation vanishes and no direction is preferred."""


@dataclass(frozen=True)
class DesignObjective:
    """What to optimize: the design family, which hypothesis' variance
    normalizes the deflection, and the family-specific target statistics."""

    family: str                      # "efuc" | "bfuc" | "is"
    kind: DeflectionKind = DeflectionKind.NORMAL
    grid: Optional[TargetGrid] = None        # bfuc only
    rho_bar: Optional[np.ndarray] = None     # efuc only: expected rho1

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam not in ("efuc", "bfuc", "is"):
            raise ValueError("family must be one of 'efuc', 'bfuc', 'is'")
        if fam == "bfuc" and self.grid is None:
            raise ValueError("bfuc objective requires a target grid")
        if fam == "efuc" and self.rho_bar is None:
            raise ValueError("efuc objective requires the expected rho1 vector")
        if fam != "bfuc" and self.grid is not None:
            raise ValueError("grid is only meaningful for the bfuc family")
        if fam != "efuc" and self.rho_bar is not None:
            raise ValueError("rho_bar is only meaningful for the efuc family")


@dataclass(frozen=True)
class DesignMatrices:
    """Phase-domain quadratic forms of one deflection ratio.

    For any unit-modulus phase vector, theta^H Xi theta / theta^H Psi theta
    (augmented theta) equals the deflection divided by its constant factor 4.
    """

    N_mat: np.ndarray      # (2N, 2M) block-diagonal numerator factor
    Xi: np.ndarray         # (2M, 2M) rank-one PSD numerator
    Delta0: np.ndarray     # (K, 2M) denominator factor
    Psi: np.ndarray        # (2M, 2M) Hermitian PSD denominator
    lambda_max: float


@dataclass(frozen=True)
class RhsDesign:
    """Result of one alternating-optimization run."""

    phases: np.ndarray
    fusion: Union[WlRule, FilterBank]
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    family: str
    kind: DeflectionKind
    design_time_s: float = 0.0
    trace_times_s: np.ndarray = None  # cumulative wall time after each iteration

    def trace_rows(self):
        """(iteration, objective, cumulative seconds) rows for reporting."""
        times = self.trace_times_s
        if times is None:
            times = np.full(len(self.objective_trace), np.nan)
        return [
            (i + 1, float(v), float(t))
            for i, (v, t) in enumerate(zip(self.objective_trace, times))
        ]


def largest_eigenvalue(psd: np.ndarray, herm_tol: float = 1e-10) -> float:
    """Largest eigenvalue of a Hermitian matrix via dense decomposition."""
    psd = np.asarray(psd)
    scale = max(np.abs(psd).max(), 1.0)
    if np.abs(psd - psd.conj().T).max() > herm_tol * scale:
        raise ValueError("matrix is not Hermitian")
    return float(np.linalg.eigvalsh(psd)[-1])


def _decision_cov_diag(rho: np.ndarray) -> np.ndarray:
    return 4.0 * rho * (1.0 - rho)


def _cov_diag_for_kind(kind: DeflectionKind, rho1_like, rho0) -> np.ndarray:
    if kind is DeflectionKind.MODIFIED:
        return _decision_cov_diag(np.asarray(rho1_like, dtype=float))
    return _decision_cov_diag(np.asarray(rho0, dtype=float))


def _aug_cov_from_diag(H_e, tx_gains, c_diag, sigma_w2) -> np.ndarray:
    b = augment_matrix(H_e) * (np.asarray(tx_gains) * np.sqrt(c_diag))[None, :]
    return hermitize(b @ b.conj().T + sigma_w2 * np.eye(b.shape[0]))


def _step_a_solve(aug_cov, H_e_aug, tx_gains, rho10) -> AugmentedVector:
    rhs = H_e_aug @ (np.asarray(tx_gains) * np.asarray(rho10))
    if np.linalg.norm(rhs) == 0.0:
        raise DegenerateDesignError("zero mean separation: no preferred fusion direction")
    sol = spd_solve(aug_cov, rhs)
    a = AugmentedVector.from_full(sol, tol=1e-6)
    if a.norm == 0.0:
        raise DegenerateDesignError("zero mean separation: no preferred fusion direction")
    return a.normalized()


def step_a_efuc(H_e, tx_gains, rho_bar, rho0, kind: DeflectionKind, sigma_w2) -> AugmentedVector:
    """Deflection-optimal fusion vector for the expected-probability design:
    Sigma^-1 [H^e; H^e*] D_alpha rho_bar10, normalized."""
    rho_bar = np.asarray(rho_bar, dtype=float)
    rho0 = np.asarray(rho0, dtype=float)
    c_diag = _cov_diag_for_kind(kind, rho_bar, rho0)
    aug_cov = _aug_cov_from_diag(H_e, tx_gains, c_diag, sigma_w2)
    return _step_a_solve(aug_cov, augment_matrix(H_e), tx_gains, rho_bar - rho0)


def step_a_bfuc(H_e, tx_gains, rho_list: Sequence[RhoVectors], kind: DeflectionKind,
                sigma_w2) -> list:
    """Per-branch deflection-optimal vectors. Under the H0-normalized kind the
    covariance is shared across branches, so it is factored exactly once."""
    H_e_aug = augment_matrix(H_e)
    alpha = np.asarray(tx_gains, dtype=float)
    if kind is DeflectionKind.NORMAL:
        c_diag = _decision_cov_diag(np.asarray(rho_list[0].rho0, dtype=float))
        aug_cov = _aug_cov_from_diag(H_e, tx_gains, c_diag, sigma_w2)
        rhs = np.column_stack([H_e_aug @ (alpha * rv.rho10) for rv in rho_list])
        if np.any(np.linalg.norm(rhs, axis=0) == 0.0):
            raise DegenerateDesignError("zero mean separation: no preferred fusion direction")
        sols = spd_solve(aug_cov, rhs)
        out = []
        for j in range(sols.shape[1]):
            a = AugmentedVector.from_full(sols[:, j], tol=1e-6)
            if a.norm == 0.0:
                raise DegenerateDesignError("zero mean separation: no preferred fusion direction")
            out.append(a.normalized())
        return out
    out = []
    for rv in rho_list:
        aug_cov = _aug_cov_from_diag(H_e, tx_gains, _decision_cov_diag(rv.rho1), sigma_w2)
        out.append(_step_a_solve(aug_cov, H_e_aug, tx_gains, rv.rho10))
    return out


def step_a_is(H_e, tx_gains) -> AugmentedVector:
    """Ideal-sensor matched filter [H^e; H^e*] D_alpha 1_K, normalized."""
    rhs = augment_matrix(H_e) @ np.asarray(tx_gains, dtype=float)
    norm = np.linalg.norm(rhs)
    if norm == 0.0:
        raise DegenerateDesignError("zero effective channel: ideal-sensor direction undefined")
    return AugmentedVector.from_full(rhs / norm)


def build_design_matrices(G, H, tx_gains, rho10, a_fixed: AugmentedVector,
                          c_diag, sigma_w2) -> DesignMatrices:
    """Quadratic forms of one deflection ratio in the augmented phase vector.

    Numerator: Xi = (N^H a)(N^H a)^H with N block-diagonal from
    G diag(H D_alpha rho10). Denominator: Psi = Delta0^H D C D Delta0
    + (sigma_w2 / 2M) ||a||^2 I with Delta0 = [H^T diag*(G^H a), H^H diag(G^H a)].
    """
    G = np.asarray(G)
    H = np.asarray(H)
    alpha = np.asarray(tx_gains, dtype=float)
    c_diag = np.diag(np.asarray(c_diag)) if np.ndim(c_diag) == 2 else np.asarray(c_diag, dtype=float)
    n, m = G.shape
    if H.shape[0] != m or abs(a_fixed.norm - 1.0) > 1e-8:
        raise ValueError("conformability or unit-norm violated")

    hdr = H @ (alpha * np.asarray(rho10, dtype=float))        # (M,)
    top = G * hdr[None, :]                                    # G diag(H D rho10)
    n_mat = np.block([
        [top, np.zeros((n, m))],
        [np.zeros((n, m)), top.conj()],
    ])
    v = n_mat.conj().T @ a_fixed.full
    xi = np.outer(v, v.conj())

    ga = G.conj().T @ a_fixed.top                             # (M,)
    delta0 = np.hstack([H.T * ga.conj()[None, :], H.conj().T * ga[None, :]])  # (K, 2M)
    s = delta0 * (alpha * np.sqrt(np.maximum(c_diag, 0.0)))[:, None]
    psi = hermitize(s.conj().T @ s) + (sigma_w2 / (2.0 * m)) * np.eye(2 * m)
    # lambda_max(S^H S + cI) = lambda_max(S S^H) + c; the K x K Gram form is
    # far cheaper than the 2M x 2M one whenever K < 2M
    gram = hermitize(s @ s.conj().T)
    lam = largest_eigenvalue(gram) + sigma_w2 / (2.0 * m)
    return DesignMatrices(N_mat=n_mat, Xi=xi, Delta0=delta0, Psi=psi, lambda_max=lam)


def mm_phase_update(theta_prev, matrices: Sequence[DesignMatrices]) -> np.ndarray:
    """One majorize-maximize step on the (sum-of-)ratio objective.

    The update vector is sum_j [Xi_j t / (t^H Psi_j t)
    - (t^H Xi_j t)/(t^H Psi_j t)^2 (Psi_j - lambda_max,j I) t] evaluated at the
    augmented previous phases t; new phases take its top-half angles.
    Components with an exactly zero update keep their previous phase.
    """
    theta_prev = np.asarray(theta_prev, dtype=float)
    if len(matrices) == 0:
        raise ValueError("need at least one set of design matrices")
    m = theta_prev.shape[0]
    t = augment_vector(np.exp(1j * theta_prev))
    u = np.zeros(2 * m, dtype=complex)
    for dm in matrices:
        den = float(np.real(np.vdot(t, dm.Psi @ t)))
        num = float(np.real(np.vdot(t, dm.Xi @ t)))
        u += dm.Xi @ t / den
        u -= (num / den**2) * (dm.Psi @ t - dm.lambda_max * t)
    top = 0.5 * (u[:m] + u[m:].conj())   # project roundoff onto the structure
    phases = np.where(np.abs(top) == 0.0, theta_prev, np.angle(top))
    return np.mod(phases, 2.0 * np.pi)


def mm_phase_update_is(theta_prev, xi_is: np.ndarray) -> np.ndarray:
    """Denominator-free surrogate step for the ideal-sensor design:
    phases of Xi_IS times the augmented previous phase vector."""
    theta_prev = np.asarray(theta_prev, dtype=float)
    m = theta_prev.shape[0]
    t = augment_vector(np.exp(1j * theta_prev))
    u = np.asarray(xi_is) @ t
    top = 0.5 * (u[:m] + u[m:].conj())
    phases = np.where(np.abs(top) == 0.0, theta_prev, np.angle(top))
    return np.mod(phases, 2.0 * np.pi)


def _grid_rho_vectors(field: SensorField, params: SensingParams, grid: TargetGrid) -> list:
    rho0 = false_alarm_probs(field)
    pd = detection_probs(field, params, grid.points)
    return [RhoVectors.from_pair(pd[j], rho0) for j in range(len(grid))]


def efuc_deflection(H_e, tx_gains, a: AugmentedVector, rho_bar, rho0, kind, sigma_w2) -> float:
    """True-statistics deflection of a single widely-linear vector at a fixed
    effective channel, using the expected detection probabilities. Comparable
    across design families (the ideal-sensor baseline included)."""
    dmu = 2.0 * augment_matrix(H_e) @ (np.asarray(tx_gains) * (np.asarray(rho_bar) - np.asarray(rho0)))
    c_diag = _cov_diag_for_kind(kind, rho_bar, rho0)
    cov = _aug_cov_from_diag(H_e, tx_gains, c_diag, sigma_w2)
    af = a.full
    num = float(np.real(np.vdot(af, dmu))) ** 2
    den = float(np.real(np.vdot(af, cov @ af)))
    return num / den


def _bfuc_objective(H_e, tx_gains, vecs, rho_list, kind, sigma_w2) -> float:
    h_aug = augment_matrix(H_e)
    total = 0.0
    cov0 = None
    for a, rv in zip(vecs, rho_list):
        dmu = 2.0 * h_aug @ (np.asarray(tx_gains) * rv.rho10)
        if kind is DeflectionKind.NORMAL:
            if cov0 is None:
                cov0 = _aug_cov_from_diag(H_e, tx_gains, _decision_cov_diag(rv.rho0), sigma_w2)
            cov = cov0
        else:
            cov = _aug_cov_from_diag(H_e, tx_gains, _decision_cov_diag(rv.rho1), sigma_w2)
        af = a.full
        total += float(np.real(np.vdot(af, dmu))) ** 2 / float(np.real(np.vdot(af, cov @ af)))
    return total / len(vecs)


def _is_objective(H_e, tx_gains, a: AugmentedVector, sigma_w2) -> float:
    dmu = 2.0 * augment_matrix(H_e) @ np.asarray(tx_gains, dtype=float)
    return float(np.real(np.vdot(a.full, dmu))) ** 2 / (sigma_w2 * a.norm**2)


def run_ao(objective: DesignObjective, field: SensorField, params: SensingParams,
           channel: ChannelRealization, sigma_w2, init_phases=None,
           tol: float = 1e-6, max_iter: int = 200, rng=None) -> RhsDesign:
    """Alternate closed-form fusion updates with single MM phase steps until
    the objective stalls (relative change below tol) or max_iter is hit.

    The trace records the objective after each full (A, B) iteration and is
    non-decreasing by construction. For the bank family the branch biases are
    set once post-convergence from the final effective channel.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    t_start = time.perf_counter()
    G, H = channel.G, channel.H
    m = G.shape[1]
    alpha = field.tx_gains
    if init_phases is None:
        if rng is None:
            rng = np.random.default_rng()
        phases = rng.uniform(0.0, 2.0 * np.pi, m)
    else:
        phases = np.mod(np.asarray(init_phases, dtype=float), 2.0 * np.pi)

    rho0 = false_alarm_probs(field)
    fam = objective.family
    if fam == "bfuc":
        rho_list = _grid_rho_vectors(field, params, objective.grid)

    trace = []
    trace_times = []
    converged = False
    it = 0
    vecs = None
    a = None
    for it in range(1, max_iter + 1):
        H_e = effective_channel(G, phases, H)
        if fam == "efuc":
            a = step_a_efuc(H_e, alpha, objective.rho_bar, rho0, objective.kind, sigma_w2)
            c_diag = _cov_diag_for_kind(objective.kind, objective.rho_bar, rho0)
            dm = build_design_matrices(G, H, alpha, np.asarray(objective.rho_bar) - rho0,
                                       a, c_diag, sigma_w2)
            phases = mm_phase_update(phases, [dm])
            H_e = effective_channel(G, phases, H)
            value = efuc_deflection(H_e, alpha, a, objective.rho_bar, rho0,
                                    objective.kind, sigma_w2)
        elif fam == "bfuc":
            vecs = step_a_bfuc(H_e, alpha, rho_list, objective.kind, sigma_w2)
            mats = []
            for a_j, rv in zip(vecs, rho_list):
                c_diag = _cov_diag_for_kind(objective.kind, rv.rho1, rv.rho0)
                mats.append(build_design_matrices(G, H, alpha, rv.rho10, a_j,
                                                  c_diag, sigma_w2))
            phases = mm_phase_update(phases, mats)
            H_e = effective_channel(G, phases, H)
            value = _bfuc_objective(H_e, alpha, vecs, rho_list, objective.kind, sigma_w2)
        else:  # ideal-sensor baseline
            a = step_a_is(H_e, alpha)
            ones = np.ones(H.shape[1])
            dm_is = build_design_matrices(G, H, alpha, ones, a, np.zeros(H.shape[1]), sigma_w2)
            phases = mm_phase_update_is(phases, dm_is.Xi)
            H_e = effective_channel(G, phases, H)
            value = _is_objective(H_e, alpha, a, sigma_w2)
        trace.append(value)
        trace_times.append(time.perf_counter() - t_start)
        if it > 1 and abs(trace[-1] - trace[-2]) < tol * max(abs(trace[-2]), 1e-300):
            converged = True
            break

    if fam == "bfuc":
        H_e = effective_channel(G, phases, H)
        h_aug = augment_matrix(H_e)
        means1 = [h_aug @ (alpha * (2.0 * rv.rho1 - 1.0)) for rv in rho_list]
        mean0 = h_aug @ (alpha * (2.0 * rho0 - 1.0))
        if objective.kind is DeflectionKind.NORMAL:
            bias_cov = _aug_cov_from_diag(H_e, alpha, _decision_cov_diag(rho0), sigma_w2)
        else:
            rho_bar = np.mean([rv.rho1 for rv in rho_list], axis=0)
            bias_cov = _aug_cov_from_diag(H_e, alpha, _decision_cov_diag(rho_bar), sigma_w2)
        biases = glr_biases(means1, mean0, bias_cov)
        # likelihood calibration of the branches: the bias derivation pairs
        # b_j with the weight Sigma^-1 (mu1_j - mu0); the fitted direction
        # keeps that weight's norm as its scale so branch maxima compare on
        # the log-likelihood scale
        w_cols = spd_solve(bias_cov, np.column_stack([m - mean0 for m in means1]))
        scales = np.linalg.norm(w_cols, axis=0)
        rules = [
            WlRule(a=a_j, bias=float(b), scale=float(max(s, np.finfo(float).tiny)))
            for a_j, b, s in zip(vecs, biases, scales)
        ]
        fusion = FilterBank(rules=rules, grid=objective.grid)
    else:
        fusion = WlRule(a=a, bias=0.0)

    return RhsDesign(
        phases=phases,
        fusion=fusion,
        objective_trace=np.asarray(trace),
        iterations=it,
        converged=converged,
        family=fam,
        kind=objective.kind,
        design_time_s=time.perf_counter() - t_start,
        trace_times_s=np.asarray(trace_times),
    )
