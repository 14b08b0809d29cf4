"""Widely-linear (augmented) second-order statistics of the received vector.

The decision-driven signal at the feeds is improper (nonzero
pseudo-covariance), so every fusion statistic and design objective works on
the augmented vector [y; conj(y)] and its 2N x 2N covariance. Augmented
objects store only their top half; the conjugate bottom half is implicit,
which makes the augmentation constraint impossible to violate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import linalg

from .sensing import RhoVectors


class DeflectionKind(Enum):
    """Which hypothesis' variance normalizes the deflection ratio."""

    NORMAL = 0    # variance under H0
    MODIFIED = 1  # variance under H1


@dataclass(frozen=True)
class AugmentedVector:
    """Vector [a; conj(a)] of logical length 2L, stored by its top half."""

    top: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "top", np.asarray(self.top, dtype=complex))

    @property
    def full(self) -> np.ndarray:
        return np.concatenate([self.top, self.top.conj()])

    @property
    def norm(self) -> float:
        """Norm of the full augmented vector, sqrt(2)*||top||."""
        return float(np.sqrt(2.0) * np.linalg.norm(self.top))

    def __len__(self) -> int:
        return 2 * self.top.shape[0]

    @classmethod
    def from_full(cls, vec, tol=1e-6):
        """Project a 2L vector onto the augmented structure; the bottom half
        must already be the conjugate of the top up to tol (relative)."""
        vec = np.asarray(vec, dtype=complex)
        if vec.shape[0] % 2:
            raise ValueError("augmented vectors have even length")
        l = vec.shape[0] // 2
        top, bottom = vec[:l], vec[l:]
        scale = max(np.linalg.norm(vec), 1.0)
        if np.linalg.norm(bottom.conj() - top) > tol * scale:
            raise ValueError("bottom half is not the conjugate of the top half")
        return cls(0.5 * (top + bottom.conj()))

    def normalized(self) -> "AugmentedVector":
        n = self.norm
        if n == 0:
            raise ValueError("cannot normalize a zero vector")
        return AugmentedVector(self.top / n)


@dataclass(frozen=True)
class SignalMoments:
    """Conditional means, (pseudo-)covariances and augmented covariances of
    the received vector under both hypotheses."""

    mean1: np.ndarray
    mean0: np.ndarray
    cov1: np.ndarray
    cov0: np.ndarray
    pcov1: np.ndarray
    pcov0: np.ndarray
    aug_cov1: np.ndarray
    aug_cov0: np.ndarray

    @property
    def mean_diff_aug(self) -> np.ndarray:
        """E{[y;y*] | H1} - E{[y;y*] | H0}."""
        d = self.mean1 - self.mean0
        return np.concatenate([d, d.conj()])


def augment_matrix(a: np.ndarray) -> np.ndarray:
    """Stack [A; conj(A)], the augmented matrix of A."""
    a = np.asarray(a)
    return np.vstack([a, a.conj()])


def augment_vector(v: np.ndarray) -> np.ndarray:
    """Stack [v; conj(v)]."""
    v = np.asarray(v)
    return np.concatenate([v, v.conj()])


def hermitize(s: np.ndarray) -> np.ndarray:
    """Symmetrize away the roundoff skew of a nominally Hermitian matrix."""
    return 0.5 * (s + s.conj().T)


def spd_solve(s: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve s x = b for Hermitian positive-definite s via Cholesky, with a
    tiny trace-scaled diagonal jitter retry for borderline inputs."""
    s = np.asarray(s)
    try:
        c = linalg.cho_factor(s, lower=True, check_finite=False)
        return linalg.cho_solve(c, b, check_finite=False)
    except linalg.LinAlgError:
        jitter = 1e-12 * np.trace(s).real / s.shape[0]
        c = linalg.cho_factor(s + jitter * np.eye(s.shape[0]), lower=True, check_finite=False)
        return linalg.cho_solve(c, b, check_finite=False)


def mean_y(H_e, tx_gains, rho) -> np.ndarray:
    """E{y | H} = H^e D_alpha (2 rho - 1) for a probability vector rho."""
    alpha = np.asarray(tx_gains, dtype=float)
    return np.asarray(H_e) @ (alpha * (2.0 * np.asarray(rho, dtype=float) - 1.0))


def moments_y(H_e, tx_gains, rho: RhoVectors, sigma_w2) -> SignalMoments:
    """Full second-order characterization of y under both hypotheses.

    Means are H^e D_alpha (2 rho_i - 1); covariances add sigma_w2 I to the
    decision-driven part H^e D_alpha C_i D_alpha H^e(^dagger/^T).
    """
    H_e = np.asarray(H_e)
    alpha = np.asarray(tx_gains, dtype=float)
    n = H_e.shape[0]
    out = {}
    for tag, rho in (("1", rho.rho1), ("0", rho.rho0)):
        c_diag = 4.0 * rho * (1.0 - rho)
        b = H_e * (alpha * np.sqrt(c_diag))[None, :]
        chan_cov = b @ b.conj().T
        chan_pcov = b @ b.T
        out["mean" + tag] = mean_y(H_e, alpha, rho)
        out["cov" + tag] = hermitize(chan_cov + sigma_w2 * np.eye(n))
        out["pcov" + tag] = 0.5 * (chan_pcov + chan_pcov.T)
        out["aug_cov" + tag] = augmented_cov(H_e, alpha, np.diag(c_diag), sigma_w2)
    return SignalMoments(**out)


def augmented_cov(H_e, tx_gains, c_mat, sigma_w2) -> np.ndarray:
    """Augmented covariance [H^e; H^e*] D_alpha C D_alpha [.]^dagger
    + sigma_w2 I_{2N}, for a diagonal PSD decision covariance C."""
    H_e = np.asarray(H_e)
    alpha = np.asarray(tx_gains, dtype=float)
    c_diag = np.diag(np.asarray(c_mat)) if np.ndim(c_mat) == 2 else np.asarray(c_mat, dtype=float)
    if np.any(c_diag < -1e-12):
        raise ValueError("decision covariance must be PSD")
    b = augment_matrix(H_e) * (alpha * np.sqrt(np.maximum(c_diag, 0.0)))[None, :]
    n2 = b.shape[0]
    return hermitize(b @ b.conj().T + sigma_w2 * np.eye(n2))


def deflection_wl(a: AugmentedVector, mean_diff_aug, aug_cov) -> float:
    """Deflection (a^H dmu)^2 / (a^H Sigma a) of the widely-linear statistic;
    scale-invariant in a and independent of any additive bias."""
    af = a.full
    num = float(np.real(np.vdot(af, np.asarray(mean_diff_aug)))) ** 2
    den = float(np.real(np.vdot(af, np.asarray(aug_cov) @ af)))
    if den <= 0:
        raise ValueError("augmented covariance must be positive definite")
    return num / den


def rayleigh_bound(mean_diff_aug, aug_cov) -> float:
    """Largest attainable deflection dmu^H Sigma^{-1} dmu over unit-norm a."""
    d = np.asarray(mean_diff_aug)
    return float(np.real(np.vdot(d, spd_solve(np.asarray(aug_cov), d))))
