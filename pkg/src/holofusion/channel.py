"""Wireless links of the holographic fusion receiver.

Three pieces: a Rician far-field channel H from the sensors to the
metasurface, a deterministic near-field (spherical-wave) channel G from the
surface elements to the receive feeds, and the phase-configured cascade
H^e = G diag(e^{j phi}) H seen by the digital fusion stage.

All distances are expressed in wavelengths; the carrier wavelength enters
only through the lambda/(4 pi) factor and the element gains of G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RhsGeometry:
    """Planar reconfigurable surface: element grid, orientation and pattern.

    element_positions follow the steering-vector convention: index
    m = m_y * n_h + m_x with the horizontal index m_x running fastest.
    """

    element_positions: np.ndarray  # (M, 3)
    center: np.ndarray             # (3,)
    boresight: np.ndarray          # unit (3,)
    axis_h: np.ndarray             # in-plane horizontal unit vector
    axis_v: np.ndarray             # in-plane vertical unit vector
    dx: float                      # horizontal element size/spacing
    dy: float                      # vertical element size/spacing
    q_factor: float
    efficiency: float = 1.0
    n_h: int = 0                   # grid dims; inferred square if left at 0
    n_v: int = 0

    def __post_init__(self):
        for name in ("element_positions", "center", "boresight", "axis_h", "axis_v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if abs(np.linalg.norm(self.boresight) - 1.0) > 1e-9:
            raise ValueError("boresight must be a unit vector")
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.q_factor < 0:
            raise ValueError("q_factor must be >= 0")
        rel = self.element_positions - self.center
        if np.max(np.abs(rel @ self.boresight)) > 1e-9:
            raise ValueError("element positions must be coplanar, normal to boresight")
        if np.max(np.abs(rel.mean(axis=0))) > 1e-9:
            raise ValueError("center must be the centroid of the elements")
        m = self.element_positions.shape[0]
        if self.n_h == 0 and self.n_v == 0:
            side = int(round(np.sqrt(m)))
            if side * side != m:
                raise ValueError("grid dims required for a non-square element count")
            object.__setattr__(self, "n_h", side)
            object.__setattr__(self, "n_v", side)
        if self.n_h * self.n_v != m:
            raise ValueError("n_h * n_v must equal the element count")

    @property
    def n_elements(self) -> int:
        return self.element_positions.shape[0]

    @classmethod
    def square(cls, side, spacing, center, q_factor, efficiency=1.0):
        """Square side x side array in the y-z plane, boresight along -x
        (facing a sensor field at smaller x), horizontal axis = +y."""
        center = np.asarray(center, dtype=float)
        axis_h = np.array([0.0, 1.0, 0.0])
        axis_v = np.array([0.0, 0.0, 1.0])
        offs = (np.arange(side) - (side - 1) / 2.0) * spacing
        # m_x (horizontal) fastest
        hh, vv = np.meshgrid(offs, offs, indexing="xy")
        pos = center + np.outer(hh.ravel(), axis_h) + np.outer(vv.ravel(), axis_v)
        return cls(
            element_positions=pos,
            center=center,
            boresight=np.array([-1.0, 0.0, 0.0]),
            axis_h=axis_h,
            axis_v=axis_v,
            dx=float(spacing),
            dy=float(spacing),
            q_factor=float(q_factor),
            efficiency=float(efficiency),
            n_h=int(side),
            n_v=int(side),
        )

    def aoa_angles(self, point) -> tuple:
        """(theta, phi) of a far-field point in the surface-local frame:
        theta is the polar angle off boresight, phi the in-plane azimuth."""
        d = np.asarray(point, dtype=float) - self.center
        d = d / np.linalg.norm(d)
        ct = float(np.clip(d @ self.boresight, -1.0, 1.0))
        theta = float(np.arccos(ct))
        phi = float(np.arctan2(d @ self.axis_v, d @ self.axis_h))
        return theta, phi


@dataclass(frozen=True)
class FeedGeometry:
    """Receive feeds, each pointed at the surface center (full illumination)."""

    feed_positions: np.ndarray  # (N, 3)
    dx: float
    dy: float
    q_factor: float

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.feed_positions, dtype=float))
        object.__setattr__(self, "feed_positions", pos)
        if pos.shape[0] < 1:
            raise ValueError("need at least one feed")
        if pos.shape[0] > 1:
            dists = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
            np.fill_diagonal(dists, np.inf)
            if dists.min() < 1e-9:
                raise ValueError("feed positions must be distinct")

    @property
    def n_feeds(self) -> int:
        return self.feed_positions.shape[0]

    @classmethod
    def grid(cls, layout, spacing, center, q_factor):
        """layout = (n_h, n_v) feeds along +x (horizontal) and +z (vertical),
        matching a linear-or-planar array oriented parallel to the x-axis."""
        nh, nv = layout
        center = np.asarray(center, dtype=float)
        xs = (np.arange(nh) - (nh - 1) / 2.0) * spacing
        zs = (np.arange(nv) - (nv - 1) / 2.0) * spacing
        hh, vv = np.meshgrid(xs, zs, indexing="xy")
        pos = center + np.outer(hh.ravel(), np.array([1.0, 0.0, 0.0])) \
            + np.outer(vv.ravel(), np.array([0.0, 0.0, 1.0]))
        return cls(feed_positions=pos, dx=float(spacing), dy=float(spacing), q_factor=float(q_factor))


@dataclass(frozen=True)
class LinkParams:
    """Large-scale propagation parameters of the sensor-to-surface links."""

    mu_ref: float                  # reference attenuation (linear power)
    d0: float                      # reference distance, wavelengths
    nu: float                      # path-loss exponent
    rician_db_range: tuple         # (lo, hi) of the Rician factor in dB
    wavelength: float = 1.0

    def __post_init__(self):
        lo, hi = self.rician_db_range
        if not self.d0 > 0:
            raise ValueError("d0 must be > 0")
        if self.nu < 0:
            raise ValueError("nu must be >= 0")
        if lo > hi:
            raise ValueError("rician_db_range must satisfy lo <= hi")
        object.__setattr__(self, "rician_db_range", (float(lo), float(hi)))


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the random sensor links plus the fixed near-field matrix."""

    H: np.ndarray          # (M, K)
    G: np.ndarray          # (N, M)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.H.real)) and np.all(np.isfinite(self.G.real))):
            raise ValueError("channel entries must be finite")


def path_loss(d, p: LinkParams):
    """Distance power law mu * (d/d0)^(-nu)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be > 0")
    return p.mu_ref * (d / p.d0) ** (-p.nu)


def upa_steering(theta, phi, mx, my, dh, dv) -> np.ndarray:
    """Uniform-planar-array response with zero-based indices, m_x fastest:
    entry exp(j 2 pi (m_x dh sin(theta)cos(phi) + m_y dv sin(theta)sin(phi))),
    spacings in wavelengths."""
    if mx < 1 or my < 1:
        raise ValueError("array dimensions must be >= 1")
    ix = np.arange(mx)
    iy = np.arange(my)
    ph = 2.0 * np.pi * (
        ix[None, :] * dh * np.sin(theta) * np.cos(phi)
        + iy[:, None] * dv * np.sin(theta) * np.sin(phi)
    )
    return np.exp(1j * ph).ravel()


def directivity(cos_theta, q):
    """Cosine-power element pattern 2(2q+1) cos^{2q}(theta) on the front
    hemisphere, zero behind; normalized to unit average over the sphere."""
    cos_theta = np.asarray(cos_theta, dtype=float)
    out = np.zeros_like(cos_theta)
    front = cos_theta > 0
    out[front] = 2.0 * (2.0 * q + 1.0) * cos_theta[front] ** (2.0 * q)
    if out.ndim == 0:
        return float(out)
    return out


def rician_factor_to_los_weight(kappa_db):
    """LoS amplitude weight b = sqrt(kappa/(1+kappa)) from a dB Rician factor.

    Written as 1/sqrt(1 + kappa^-1) so huge factors saturate cleanly at 1."""
    inv_kappa = 10.0 ** (-np.asarray(kappa_db, dtype=float) / 10.0)
    return 1.0 / np.sqrt(1.0 + inv_kappa)


def sensor_rhs_channel(sensor_pos, rhs: RhsGeometry, p: LinkParams, rng):
    """One Rician link from a sensor to all surface elements.

    Returns (h, meta) with h of length M and meta carrying the drawn Rician
    weight, phase offset and geometric angles. Per sensor the rng is consumed
    in the fixed order: kappa, tau, scattered component.
    """
    sensor_pos = np.asarray(sensor_pos, dtype=float)
    d = float(np.linalg.norm(sensor_pos - rhs.center))
    if d < 1e-12:
        raise ValueError("sensor must not coincide with the surface center")
    m = rhs.n_elements
    theta, phi = rhs.aoa_angles(sensor_pos)
    kappa_db = rng.uniform(*p.rician_db_range)
    b = float(rician_factor_to_los_weight(kappa_db))
    tau = rng.uniform(0.0, 2.0 * np.pi)
    scat = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) / np.sqrt(2.0)
    los = upa_steering(theta, phi, rhs.n_h, rhs.n_v, rhs.dx, rhs.dy) * np.exp(1j * tau)
    h = np.sqrt(path_loss(d, p)) * (b * los + np.sqrt(1.0 - b**2) * scat)
    meta = {"aoa_theta": theta, "aoa_phi": phi, "tau": tau, "b": b,
            "kappa_db": kappa_db, "distance": d}
    return h, meta


def rhs_feed_channel(rhs: RhsGeometry, feeds: FeedGeometry, wavelength=1.0, efficiency=None) -> np.ndarray:
    """Deterministic near-field matrix G between surface elements and feeds.

    Spherical-wave entries (lambda/4pi) sqrt(eta G_rhs G_fc) e^{-j2pi d/lambda}/d
    with cosine-power re-radiation and receive patterns; each feed's peak-gain
    direction points at the surface center.
    """
    eta = rhs.efficiency if efficiency is None else efficiency
    lam = wavelength
    pf = feeds.feed_positions          # (N, 3)
    pm = rhs.element_positions         # (M, 3)
    diff = pf[:, None, :] - pm[None, :, :]            # feed minus element
    dist = np.linalg.norm(diff, axis=-1)              # (N, M)
    if dist.min() < 1e-9:
        raise ValueError("a feed coincides with a surface element")

    # element pattern: angle between boresight and the element -> feed ray
    cos_rhs = (diff @ rhs.boresight) / dist
    # feed pattern: angle between the feed -> surface-center ray and the
    # feed -> element ray (normalized dot product)
    to_center = rhs.center[None, :] - pf
    to_center = to_center / np.linalg.norm(to_center, axis=-1, keepdims=True)
    to_elem = -diff / dist[..., None]
    cos_fc = np.einsum("nd,nmd->nm", to_center, to_elem)

    gain_rhs = (4.0 * np.pi / lam**2) * rhs.dx * rhs.dy * directivity(cos_rhs, rhs.q_factor)
    gain_fc = (4.0 * np.pi / lam**2) * feeds.dx * feeds.dy * directivity(cos_fc, feeds.q_factor)
    amp = (lam / (4.0 * np.pi)) * np.sqrt(eta * gain_rhs * gain_fc) / dist
    return amp * np.exp(-2j * np.pi * dist / lam)


def effective_channel(G, phases, H) -> np.ndarray:
    """Cascade G diag(e^{j phases}) H of the configured surface."""
    G = np.asarray(G)
    H = np.asarray(H)
    phases = np.asarray(phases, dtype=float)
    if G.shape[1] != phases.shape[0] or H.shape[0] != phases.shape[0]:
        raise ValueError("G, phases and H dimensions do not conform")
    return (G * np.exp(1j * phases)[None, :]) @ H


def sample_received(H_e, tx_gains, x, sigma_w2, rng) -> np.ndarray:
    """Received vector(s) y = H^e D_alpha x + w with w ~ CN(0, sigma_w2 I).

    x may be a single (K,) decision vector or a (K, T) batch; the output
    matches ((N,) or (N, T)).
    """
    H_e = np.asarray(H_e)
    x = np.asarray(x, dtype=float)
    mean = H_e @ (np.asarray(tx_gains, dtype=float).reshape(-1, *([1] * (x.ndim - 1))) * x)
    noise = rng.standard_normal(mean.shape) + 1j * rng.standard_normal(mean.shape)
    return mean + np.sqrt(sigma_w2 / 2.0) * noise


def write_complex_csv(matrix, path) -> None:
    """Dump a complex matrix as CSV rows of alternating re,im pairs
    (row-major), for cross-tool validation of H and G."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=complex))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# complex matrix {matrix.shape[0]}x{matrix.shape[1]} as re,im pairs\n")
        for row in matrix:
            cells = []
            for v in row:
                cells.append(repr(float(v.real)))
                cells.append(repr(float(v.imag)))
            fh.write(",".join(cells) + "\n")


def read_complex_csv(path) -> np.ndarray:
    """Inverse of write_complex_csv."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals = [float(x) for x in line.split(",")]
            rows.append([complex(re, im) for re, im in zip(vals[::2], vals[1::2])])
    return np.array(rows)


def draw_channel(sensor_positions, rhs: RhsGeometry, feeds: FeedGeometry,
                 link: LinkParams, rng, G=None) -> ChannelRealization:
    """Draw H for every sensor (fixed per-sensor rng order) and attach the
    deterministic G (recomputed unless supplied)."""
    sensor_positions = np.atleast_2d(np.asarray(sensor_positions, dtype=float))
    cols = []
    meta = {"aoa_theta": [], "aoa_phi": [], "tau": [], "b": [], "kappa_db": [], "distance": []}
    for pos in sensor_positions:
        h, m = sensor_rhs_channel(pos, rhs, link, rng)
        cols.append(h)
        for key in meta:
            meta[key].append(m[key])
    H = np.column_stack(cols)
    if G is None:
        G = rhs_feed_channel(rhs, feeds, wavelength=link.wavelength)
    return ChannelRealization(H=H, G=G, meta={k: np.asarray(v) for k, v in meta.items()})
