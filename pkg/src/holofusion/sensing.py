"""Local sensing layer: target emission model, per-sensor energy detectors,
and the detection/false-alarm probability vectors that drive fusion design.

Each sensor observes a zero-mean Gaussian emission attenuated by a power-law
amplitude attenuation function (AAF) of the target distance, thresholds its
received energy, and reports a binary decision mapped to {-1, +1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


def q_function(x):
    """Standard normal tail probability Q(x), computed through erfc."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def q_inverse(p):
    """Inverse of q_function on (0, 1)."""
    return np.sqrt(2.0) * special.erfcinv(2.0 * np.asarray(p, dtype=float))


@dataclass(frozen=True)
class SensingParams:
    """Target emission and AAF parameters shared by all sensors.

    theta_power: average emitted power of the target signature.
    eta_ref:     AAF reference distance, in wavelengths.
    alpha_exp:   AAF decay exponent.
    local_pfa:   design false-alarm rate of each local energy detector.
    """

    theta_power: float
    eta_ref: float
    alpha_exp: float
    local_pfa: float = 0.05

    def __post_init__(self):
        if not self.theta_power > 0:
            raise ValueError("theta_power must be > 0")
        if not self.eta_ref > 0:
            raise ValueError("eta_ref must be > 0")
        if not self.alpha_exp > 0:
            raise ValueError("alpha_exp must be > 0")
        if not 0.0 < self.local_pfa < 1.0:
            raise ValueError("local_pfa must lie in (0, 1)")


@dataclass(frozen=True)
class SensorField:
    """Known per-sensor quantities: positions, noise floors, transmit gains
    and energy-detector thresholds.
    """

    positions: np.ndarray   # (K, 3), wavelengths
    noise_vars: np.ndarray  # (K,)
    tx_gains: np.ndarray    # (K,)
    thresholds: np.ndarray  # (K,)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        object.__setattr__(self, "positions", pos)
        for name in ("noise_vars", "tx_gains", "thresholds"):
            arr = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            object.__setattr__(self, name, arr)
        k = pos.shape[0]
        if k < 1 or pos.shape[1] != 3:
            raise ValueError("positions must be a (K, 3) array with K >= 1")
        for name in ("noise_vars", "tx_gains", "thresholds"):
            arr = getattr(self, name)
            if arr.shape != (k,):
                raise ValueError(f"{name} must have length K={k}")
            if not np.all(arr > 0):
                raise ValueError(f"{name} entries must be strictly positive")

    @property
    def n_sensors(self) -> int:
        return self.positions.shape[0]

    @classmethod
    def with_common_pfa(cls, positions, noise_vars, tx_gains, local_pfa):
        """Build a field whose thresholds realize a common false-alarm rate."""
        noise_vars = np.atleast_1d(np.asarray(noise_vars, dtype=float))
        thr = np.array([threshold_from_local_pfa(local_pfa, s2) for s2 in noise_vars])
        return cls(positions, noise_vars, tx_gains, thr)


@dataclass(frozen=True)
class RhoVectors:
    """Per-sensor detection (rho1) and false-alarm (rho0) probabilities at a
    given target position, plus their difference rho10 = rho1 - rho0."""

    rho1: np.ndarray
    rho0: np.ndarray
    rho10: np.ndarray

    def __post_init__(self):
        for name in ("rho1", "rho0", "rho10"):
            object.__setattr__(self, name, np.atleast_1d(np.asarray(getattr(self, name), dtype=float)))
        if not (np.all(self.rho1 >= 0) and np.all(self.rho1 <= 1)):
            raise ValueError("rho1 entries must lie in [0, 1]")
        if not (np.all(self.rho0 >= 0) and np.all(self.rho0 <= 1)):
            raise ValueError("rho0 entries must lie in [0, 1]")
        if not np.allclose(self.rho10, self.rho1 - self.rho0, atol=1e-12):
            raise ValueError("rho10 must equal rho1 - rho0")

    @classmethod
    def from_pair(cls, rho1, rho0):
        rho1 = np.asarray(rho1, dtype=float)
        rho0 = np.asarray(rho0, dtype=float)
        return cls(rho1, rho0, rho1 - rho0)


@dataclass(frozen=True)
class SurveillanceArea:
    """Axis-aligned ground-plane rectangle holding the unknown target.

    bounds:    ((xmin, xmax), (ymin, ymax)) in wavelengths; targets sit at z=0.
    grid_side: candidate-position grid per side, N_t = grid_side**2.
    quad_side: per-side resolution of the midpoint quadrature grid used for
               expectations over the (uniform) target prior.
    """

    bounds: tuple
    grid_side: int
    quad_side: int = 64

    def __post_init__(self):
        (x0, x1), (y0, y1) = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise ValueError("bounds must describe a non-empty rectangle")
        if self.grid_side < 1:
            raise ValueError("grid_side must be >= 1")
        if self.quad_side < 8:
            raise ValueError("quad_side must be >= 8")
        object.__setattr__(self, "bounds", ((float(x0), float(x1)), (float(y0), float(y1))))

    @property
    def n_targets(self) -> int:
        return self.grid_side ** 2

    def _cell_centers(self, side):
        (x0, x1), (y0, y1) = self.bounds
        xs = x0 + (np.arange(side) + 0.5) * (x1 - x0) / side
        ys = y0 + (np.arange(side) + 0.5) * (y1 - y0) / side
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel(), np.zeros(side * side)])
        return pts

    def target_grid(self) -> np.ndarray:
        """Candidate target positions: an inclusive grid_side x grid_side
        lattice spanning the area (boundary points included); a single-point
        grid sits at the area center."""
        side = self.grid_side
        (x0, x1), (y0, y1) = self.bounds
        if side == 1:
            return np.array([[0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.0]])
        xs = np.linspace(x0, x1, side)
        ys = np.linspace(y0, y1, side)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel(), np.zeros(side * side)])

    def quad_grid(self) -> np.ndarray:
        """Midpoint-rule quadrature nodes for uniform-prior expectations."""
        return self._cell_centers(self.quad_side)

    def sample_targets(self, n, rng) -> np.ndarray:
        """Draw n uniform target positions on the ground plane."""
        (x0, x1), (y0, y1) = self.bounds
        pts = np.zeros((n, 3))
        pts[:, 0] = rng.uniform(x0, x1, size=n)
        pts[:, 1] = rng.uniform(y0, y1, size=n)
        return pts


def aaf(p_t, p_sen, params: SensingParams):
    """Amplitude attenuation g = 1/sqrt(1 + (d/eta)^alpha) of the target
    signature at distance d = ||p_t - p_sen||. Broadcasts over leading axes."""
    d = np.linalg.norm(np.asarray(p_t, dtype=float) - np.asarray(p_sen, dtype=float), axis=-1)
    return 1.0 / np.sqrt(1.0 + (d / params.eta_ref) ** params.alpha_exp)


def threshold_from_local_pfa(pfa, sigma_n2):
    """Energy threshold gamma realizing Pr(r^2 >= gamma | H0) = pfa for
    sensing noise variance sigma_n2."""
    if not 0.0 < pfa < 1.0:
        raise ValueError("pfa must lie in (0, 1)")
    if not sigma_n2 > 0:
        raise ValueError("sigma_n2 must be > 0")
    return float(sigma_n2 * q_inverse(pfa / 2.0) ** 2)


def local_pfa(gamma, sigma_n2):
    """False-alarm probability 2Q(sqrt(gamma/sigma_n2)) of the energy test."""
    return 2.0 * q_function(np.sqrt(np.asarray(gamma, dtype=float) / sigma_n2))


def local_pd(gamma, sigma_n2, theta_power, g):
    """Detection probability 2Q(sqrt(gamma/(sigma_n2 + theta g^2)))."""
    return 2.0 * q_function(np.sqrt(np.asarray(gamma, dtype=float)
                                    / (sigma_n2 + theta_power * np.asarray(g, dtype=float) ** 2)))


def local_llr(r, sigma_n2, theta_power, g):
    """Per-sensor log-likelihood ratio of a measurement r.

    Affine in the energy r^2 with a positive slope whenever theta*g^2 > 0,
    which is what makes the plain energy threshold test optimal.
    """
    s2 = theta_power * np.asarray(g, dtype=float) ** 2
    intercept = 0.5 * np.log(sigma_n2 / (sigma_n2 + s2))
    slope = s2 / (sigma_n2 * (sigma_n2 + s2))
    return intercept + slope * np.asarray(r, dtype=float) ** 2


def detection_probs(field: SensorField, params: SensingParams, points) -> np.ndarray:
    """Detection probabilities of every sensor for each target point.

    points: (..., 3); returns an array of shape (..., K).
    """
    points = np.asarray(points, dtype=float)
    g = aaf(points[..., None, :], field.positions, params)
    return local_pd(field.thresholds, field.noise_vars, params.theta_power, g)


def rho_vectors(field: SensorField, params: SensingParams, p_t) -> RhoVectors:
    """Detection/false-alarm probability vectors for a target at p_t."""
    rho1 = detection_probs(field, params, np.asarray(p_t, dtype=float))
    rho0 = local_pfa(field.thresholds, field.noise_vars)
    return RhoVectors.from_pair(rho1, rho0)


def false_alarm_probs(field: SensorField) -> np.ndarray:
    """False-alarm probability vector rho0 (target-position free)."""
    return np.asarray(local_pfa(field.thresholds, field.noise_vars), dtype=float)


def expected_rho1(field: SensorField, params: SensingParams, area: SurveillanceArea) -> np.ndarray:
    """Average detection-probability vector under a uniform target prior,
    via the midpoint rule on the area's quadrature grid."""
    pd_grid = detection_probs(field, params, area.quad_grid())
    return pd_grid.mean(axis=0)


def decision_cov(rho) -> np.ndarray:
    """Covariance 4*diag(p(1-p)) of the BPSK-mapped decision vector."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho > 1):
        raise ValueError("rho entries must lie in [0, 1]")
    return np.diag(4.0 * rho * (1.0 - rho))


def sample_decisions(field: SensorField, params: SensingParams, hypothesis, p_t, rng) -> np.ndarray:
    """Draw one BPSK decision vector x in {-1, +1}^K.

    hypothesis: "H0" or "H1"; p_t is required (and used) only under H1.
    """
    if hypothesis == "H1":
        p = detection_probs(field, params, np.asarray(p_t, dtype=float))
    elif hypothesis == "H0":
        p = false_alarm_probs(field)
    else:
        raise ValueError("hypothesis must be 'H0' or 'H1'")
    u = rng.uniform(size=field.n_sensors)
    return np.where(u < p, 1.0, -1.0)
