"""Positive-energy wave packets and their emergent classical trajectories.

A packet is stored by its momentum-space amplitudes on the lattice of a
periodic box, where the square-root dispersion

    omega(k) = sqrt(k^2 + m^2 c^2)        (hbar = 1)

is diagonal: free propagation multiplies each mode by exp(-i omega tau), so
unitarity is exact by construction.  Position-side quantities come from the
discrete Fourier transform of the modes.

The emergent-trajectory statement is that d<sigma>/dtau equals the velocity
expectation <pi / sqrt(m^2 c^2 + pi^2)> while <pi> is constant, so <sigma>
traces an exactly straight line; packets with vanishing dipole about that
line behave as effective classical particles on it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

UNITARITY_TOL = 1e-14
EDGE_MODE_TOL = 1e-10


@dataclass(frozen=True)
class WavePacket:
    """One-particle packet: complex amplitudes on a symmetric k lattice.

    ``k`` is the ascending lattice 2 pi j / L for j = -n/2 .. n/2 - 1; the
    single unpaired edge mode must carry negligible amplitude for the grid to
    count as symmetric about zero.  Amplitudes are normalized to
    sum |a_k|^2 dk = 1.
    """

    k: np.ndarray
    amplitudes: np.ndarray
    mass: float
    c: float
    box_length: float

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        amp = np.asarray(self.amplitudes, dtype=complex)
        if k.ndim != 1 or k.shape != amp.shape or k.size % 2:
            raise ValidationError("k grid and amplitudes must be congruent 1-D arrays "
                                  "of even length")
        dk = 2.0 * np.pi / self.box_length
        expected = dk * (np.arange(k.size) - k.size // 2)
        if not np.allclose(k, expected, atol=1e-9 * dk):
            raise ValidationError("k must be the ascending box lattice 2 pi j / L")
        peak = float(np.max(np.abs(amp)))
        if peak == 0.0:
            raise ValidationError("packet has no amplitude")
        if abs(amp[0]) > EDGE_MODE_TOL * peak:
            raise ValidationError("unpaired edge mode carries amplitude; "
                                  "k grid is not effectively symmetric about 0")
        if self.mass <= 0 or self.c <= 0:
            raise ValidationError("mass and c must be positive")
        norm = np.sqrt(np.sum(np.abs(amp) ** 2) * dk)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amplitudes", amp / norm)

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def omega(self) -> np.ndarray:
        return np.sqrt(self.k ** 2 + (self.mass * self.c) ** 2)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.dk)

    def position_density(self) -> tuple[np.ndarray, np.ndarray]:
        """(sigma grid, |g(sigma)|^2) from the DFT of the mode amplitudes."""
        n = self.k.size
        sigma = -0.5 * self.box_length + (self.box_length / n) * np.arange(n)
        modes = self.amplitudes * np.exp(1j * self.k * sigma[0])
        g = np.fft.ifft(np.fft.ifftshift(modes)) * n
        dens = np.abs(g) ** 2
        return sigma, dens / (np.sum(dens) * (self.box_length / n))


def gaussian_packet(k_mean: float, k_width: float, mass: float, c: float,
                    box_length: float, n_modes: int,
                    center: float = 0.0) -> WavePacket:
    """Minimal Gaussian packet: |a(k)|^2 has mean k_mean and std k_width."""
    if k_width <= 0:
        raise ValidationError("k_width must be positive")
    dk = 2.0 * np.pi / box_length
    k = dk * (np.arange(n_modes) - n_modes // 2)
    amp = np.exp(-((k - k_mean) ** 2) / (4.0 * k_width ** 2)) * np.exp(-1j * k * center)
    return WavePacket(k, amp, mass, c, box_length)


def propagate_free(packet: WavePacket, tau: float) -> WavePacket:
    """Multiply every mode by exp(-i omega_k tau); exactly norm-preserving."""
    return replace(packet,
                   amplitudes=packet.amplitudes * np.exp(-1j * packet.omega * tau))


@dataclass(frozen=True)
class Expectations:
    sigma: float
    pi: float
    velocity: float     # <pi / sqrt(m^2 c^2 + pi^2)>


def expectations(packet: WavePacket) -> Expectations:
    """Position, momentum and velocity expectation values of the packet."""
    weights = np.abs(packet.amplitudes) ** 2 * packet.dk
    total = weights.sum()
    pi_mean = float(np.sum(packet.k * weights) / total)
    vel_mean = float(np.sum(packet.k / packet.omega * weights) / total)
    sigma, dens = packet.position_density()
    dsig = packet.box_length / packet.k.size
    sigma_mean = float(np.sum(sigma * dens) * dsig)
    return Expectations(sigma_mean, pi_mean, vel_mean)


@dataclass(frozen=True)
class Multipoles:
    """Low moments of the position density about a reference point."""

    monopole: float
    dipole: float
    quadrupole: float
    reference: float


def multipoles_about(packet: WavePacket, sigma0: float) -> Multipoles:
    """Dipole <sigma> - sigma0 and quadrupole <(sigma - sigma0)^2>."""
    sigma, dens = packet.position_density()
    dsig = packet.box_length / packet.k.size
    mean = float(np.sum(sigma * dens) * dsig)
    quad = float(np.sum((sigma - sigma0) ** 2 * dens) * dsig)
    return Multipoles(1.0, mean - sigma0, quad, sigma0)


@dataclass(frozen=True)
class EmergentTrajectory:
    """Mean-position history with its straight-line diagnostics.

    ``ehrenfest_residual`` compares the finite-difference velocity of
    sigma_cl with the quantum velocity expectation at each node (one-sided
    second-order stencils at the ends); ``second_difference`` is the raw
    undivided second difference of sigma_cl; ``dipole_about_fit`` is the
    deviation from the least-squares straight line.
    """

    tau: np.ndarray
    sigma_cl: np.ndarray
    pi_mean: np.ndarray
    velocity_mean: np.ndarray
    ehrenfest_residual: np.ndarray
    second_difference: np.ndarray
    dipole_about_fit: np.ndarray
    fit_slope: float
    fit_intercept: float

    @property
    def max_ehrenfest_residual(self) -> float:
        return float(np.max(np.abs(self.ehrenfest_residual)))

    @property
    def max_second_difference(self) -> float:
        return float(np.max(np.abs(self.second_difference)))

    @property
    def max_dipole_about_fit(self) -> float:
        return float(np.max(np.abs(self.dipole_about_fit)))

    def write_csv(self, path, quadrupole: np.ndarray) -> None:
        from .reports import write_csv_atomic
        header = ("tau", "sigma_mean", "pi_mean", "velocity_mean", "dipole",
                  "quadrupole", "ehrenfest_residual")
        rows = [
            (self.tau[i], self.sigma_cl[i], self.pi_mean[i], self.velocity_mean[i],
             self.dipole_about_fit[i], quadrupole[i], self.ehrenfest_residual[i])
            for i in range(len(self.tau))
        ]
        write_csv_atomic(path, header, rows)


def _finite_difference_velocity(tau: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    dt = tau[1] - tau[0]
    vel = np.empty_like(sigma)
    vel[1:-1] = (sigma[2:] - sigma[:-2]) / (2.0 * dt)
    vel[0] = (-3.0 * sigma[0] + 4.0 * sigma[1] - sigma[2]) / (2.0 * dt)
    vel[-1] = (3.0 * sigma[-1] - 4.0 * sigma[-2] + sigma[-3]) / (2.0 * dt)
    return vel


def emergent_trajectory(packet: WavePacket, tau_grid) -> EmergentTrajectory:
    """Propagate, sample <sigma>(tau) and report its straight-line residuals."""
    tau = np.asarray(list(tau_grid), dtype=float)
    if tau.size < 3:
        raise ValidationError("tau grid needs at least 3 points")
    if not np.allclose(np.diff(tau), tau[1] - tau[0]):
        raise ValidationError("tau grid must be uniform")
    sigma_cl = np.empty(tau.size)
    pi_mean = np.empty(tau.size)
    vel_mean = np.empty(tau.size)
    for i, t in enumerate(tau):
        ex = expectations(propagate_free(packet, t))
        sigma_cl[i], pi_mean[i], vel_mean[i] = ex.sigma, ex.pi, ex.velocity
    residual = _finite_difference_velocity(tau, sigma_cl) - vel_mean
    second = np.zeros(tau.size)
    second[1:-1] = sigma_cl[2:] - 2.0 * sigma_cl[1:-1] + sigma_cl[:-2]
    slope, intercept = np.polyfit(tau, sigma_cl, 1)
    dipole = sigma_cl - (slope * tau + intercept)
    return EmergentTrajectory(tau, sigma_cl, pi_mean, vel_mean, residual, second,
                              dipole, float(slope), float(intercept))
