"""Two-body entanglement structure, non-relativistic and rest-frame versions.

Everything is one-dimensional: a particle coordinate lives on a periodic box
of length L sampled at n points, so a two-particle amplitude is an n x n
complex grid and every partial trace is an explicit quadrature.  The bound
state

    psi(x_e, x_p) = phi(x_e - x_p) * exp(i p (m_e x_e + m_p x_p) / M)

(total momentum p snapped to the box lattice 2 pi k / L) factorizes into a
center-of-mass plane wave and a relative wave function.  Tracing the center
of mass leaves the pure relative kernel phi(r) phi*(r'); tracing one particle
leaves a translation-covariant kernel whose modulus depends on x - x' only
and whose diagonal is flat: with a delocalized center of mass the particle is
equally likely to be found anywhere.

The rest-frame analogue keeps only the relative kernel.  Asking for a
single-particle reduced state of a rest-frame two-body state raises
:class:`RelativisticNonSeparability` unconditionally: after the rest-frame
conditions the particle factorization no longer exists, and only the
frozen-data (x) relative presentation of the Hilbert space survives.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import RelativisticNonSeparability, ValidationError

ENTROPY_EIGENVALUE_CUTOFF = 1e-12
HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on [-L/2, L/2)."""

    length: float
    n: int

    def __post_init__(self):
        if self.length <= 0 or self.n < 8:
            raise ValidationError("grid needs positive length and at least 8 points")

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def x(self) -> np.ndarray:
        return -0.5 * self.length + self.dx * np.arange(self.n)

    @property
    def weights(self) -> np.ndarray:
        # periodic trapezoid rule degenerates to uniform weights
        return np.full(self.n, self.dx)

    def wrap(self, r):
        return (np.asarray(r) + 0.5 * self.length) % self.length - 0.5 * self.length

    def lattice_momentum(self, p: float) -> float:
        """Nearest box momentum 2 pi k / L."""
        unit = 2.0 * np.pi / self.length
        return unit * round(p / unit)


@dataclass(frozen=True)
class TwoParticleWavefunction:
    """psi(x_e, x_p) on the grid square, with its relative-factor samples."""

    grid: Grid1D
    psi: np.ndarray            # (n, n) complex, unit L2 norm
    m_e: float
    m_p: float
    p: float                   # box-lattice total momentum actually used
    phi: np.ndarray            # (n,) relative wave function on grid.x, unit norm

    @property
    def total_mass(self) -> float:
        return self.m_e + self.m_p


def hydrogen_state(phi_int: Callable, p: float, m_e: float, m_p: float,
                   grid: Grid1D) -> TwoParticleWavefunction:
    """Bound state phi(x_e - x_p) e^{i p (m_e x_e + m_p x_p)/M} on the grid.

    ``phi_int`` is evaluated on the wrapped relative coordinate; the total
    momentum is snapped to the nearest lattice value so the center-of-mass
    plane wave is exactly periodic.
    """
    if m_e <= 0 or m_p <= 0:
        raise ValidationError("masses must be positive")
    x = grid.x
    phi = np.asarray([phi_int(r) for r in x], dtype=complex)
    norm_sq = float(np.sum(np.abs(phi) ** 2) * grid.dx)
    if not np.isfinite(norm_sq) or norm_sq <= 0:
        raise ValidationError("relative wave function is not square-integrable on the grid")
    phi = phi / np.sqrt(norm_sq)
    p_lattice = grid.lattice_momentum(p)
    total = m_e + m_p
    rel = np.asarray([[phi_int(grid.wrap(xe - xp)) for xp in x] for xe in x], dtype=complex)
    phase = np.exp(1j * p_lattice * (m_e * x[:, None] + m_p * x[None, :]) / total)
    psi = rel * phase
    psi_norm = np.sqrt(np.sum(np.abs(psi) ** 2) * grid.dx * grid.dx)
    return TwoParticleWavefunction(grid, psi / psi_norm, m_e, m_p, p_lattice, phi)


@dataclass(frozen=True)
class ReducedDensityMatrix:
    """Grid kernel rho(x, x') with quadrature weights."""

    kernel: np.ndarray
    weights: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        kernel = np.asarray(self.kernel, dtype=complex)
        weights = np.asarray(self.weights, dtype=float)
        if kernel.ndim != 2 or kernel.shape[0] != kernel.shape[1]:
            raise ValidationError("kernel must be square")
        if weights.shape != (kernel.shape[0],):
            raise ValidationError("weights must match the kernel dimension")
        object.__setattr__(self, "kernel", kernel)
        object.__setattr__(self, "weights", weights)

    def trace(self) -> float:
        return float(np.real(np.sum(np.diag(self.kernel) * self.weights)))

    def purity(self) -> float:
        """tr rho^2 under the quadrature measure."""
        weighted = self.kernel * self.weights[None, :]
        return float(np.real(np.trace(weighted @ weighted)))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.kernel - self.kernel.conj().T)))

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of the quadrature-weighted, symmetrized kernel."""
        if self.hermiticity_residual() > HERMITICITY_TOL:
            raise ValidationError(
                f"kernel is not Hermitian within {HERMITICITY_TOL:.1e} "
                f"(residual {self.hermiticity_residual():.3e})")
        sqrt_w = np.sqrt(self.weights)
        sym = sqrt_w[:, None] * self.kernel * sqrt_w[None, :]
        sym = 0.5 * (sym + sym.conj().T)
        return np.linalg.eigvalsh(sym)

    def entropy(self) -> float:
        """von Neumann entropy -sum lambda ln lambda over the weighted spectrum."""
        lam = self.eigenvalues()
        lam = lam[lam > ENTROPY_EIGENVALUE_CUTOFF]
        return float(-np.sum(lam * np.log(lam)))


def _normalize_trace(kernel: np.ndarray, weights: np.ndarray) -> ReducedDensityMatrix:
    tr = float(np.real(np.sum(np.diag(kernel) * weights)))
    if tr <= 0:
        raise ValidationError("reduced kernel has non-positive trace")
    return ReducedDensityMatrix(kernel / tr, weights)


def trace_out_particle(state: TwoParticleWavefunction, which: str) -> ReducedDensityMatrix:
    """Reduced kernel of one particle: the other coordinate is integrated out."""
    psi = state.psi
    dx = state.grid.dx
    if which == "electron":
        kernel = psi @ psi.conj().T * dx
    elif which == "proton":
        kernel = psi.T @ psi.conj() * dx
    else:
        raise ValidationError(f"which must be 'electron' or 'proton', got {which!r}")
    return _normalize_trace(kernel, state.grid.weights)


def trace_out_com(state: TwoParticleWavefunction) -> ReducedDensityMatrix:
    """Reduced kernel of the relative motion after removing the center of mass.

    In center-of-mass/relative variables the state is plane-wave x phi, so the
    trace over the (unimodular) center-of-mass factor leaves the pure kernel
    phi(r) phi*(r').
    """
    kernel = np.outer(state.phi, state.phi.conj())
    return _normalize_trace(kernel, state.grid.weights)


@dataclass(frozen=True)
class RelativeWavefunction:
    """Rest-frame relative wave function phi(rho) on a 1-D grid."""

    rho: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        phi = np.asarray(self.phi, dtype=complex)
        if rho.ndim != 1 or rho.shape != phi.shape:
            raise ValidationError("rho grid and phi samples must be 1-D and congruent")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "phi", phi)

    def quadrature_weights(self) -> np.ndarray:
        w = np.gradient(self.rho)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


def relativistic_reduced(state: RelativeWavefunction) -> ReducedDensityMatrix:
    """Pure relative kernel phi(rho) phi*(rho') of a rest-frame bound state."""
    weights = state.quadrature_weights()
    kernel = np.outer(state.phi, state.phi.conj())
    return _normalize_trace(kernel, weights)


def trace_out_relativistic_particle(state, which) -> None:
    """Always fails: rest-frame states have no single-particle subsystems.

    Particle subsystems exist only before the rest-frame conditions are
    imposed; afterwards the admissible factorization is the frozen
    collective data tensor the relative variables (presentation C), so there
    is nothing to trace against.
    """
    raise RelativisticNonSeparability(
        f"cannot trace out particle {which}: single-particle subsystems exist only "
        "before the rest-frame conditions; presentation C "
        "(frozen center-of-mass data x relative variables) is the only admissible "
        "factorization of a rest-frame two-body state")


def entanglement_entropy(rdm: ReducedDensityMatrix) -> float:
    """von Neumann entropy of a reduced kernel (quadrature-weighted spectrum)."""
    return rdm.entropy()


def translation_covariance_residual(rdm: ReducedDensityMatrix) -> float:
    """How far |rho(x, x')| is from a function of x - x' alone.

    Max over cyclic diagonals of the spread of the modulus; exact translation
    covariance (the reduced-particle structure theorem) gives zero.
    """
    mod = np.abs(rdm.kernel)
    n = mod.shape[0]
    worst = 0.0
    idx = np.arange(n)
    for offset in range(n):
        diag = mod[idx, (idx + offset) % n]
        worst = max(worst, float(diag.max() - diag.min()))
    return worst


def diagonal_flatness(rdm: ReducedDensityMatrix) -> float:
    """Spread of the position density rho(x, x); zero when every position is alike."""
    diag = np.real(np.diag(rdm.kernel))
    return float(diag.max() - diag.min())


class PresentationTag(enum.Enum):
    """The three unitarily equivalent two-body factorizations."""

    A = "particle-particle"
    B = "com-relative"
    C = "frozen-jacobi-relative"


@dataclass(frozen=True)
class PresentationMap:
    """Coordinate change of one presentation, with its Jacobian modulus."""

    tag: PresentationTag
    forward: Callable
    inverse: Callable
    jacobian_abs: float
    description: str


def presentation_map(state: TwoParticleWavefunction, tag: PresentationTag) -> PresentationMap:
    """Point transformation realizing a presentation of the two-body space.

    A keeps the particle coordinates, B passes to (mass-weighted mean,
    difference), C keeps B's coordinates but labels the first factor by its
    frozen (initial-time) value, which is the identity on coordinates at the
    frozen instant.  All three have unit Jacobian modulus, hence unitary
    L2 pullbacks.
    """
    if not isinstance(tag, PresentationTag):
        raise ValidationError(f"unknown presentation tag {tag!r}")
    m_e, m_p, total = state.m_e, state.m_p, state.total_mass
    if tag is PresentationTag.A:
        return PresentationMap(
            tag, lambda xe, xp: (xe, xp), lambda a, b: (a, b), 1.0,
            "particle x particle coordinates (x_e, x_p)")
    # B and C share the point transformation; C freezes the first factor's label
    def forward(xe, xp):
        return ((m_e * xe + m_p * xp) / total, xe - xp)

    def inverse(x, r):
        return (x + m_p * r / total, x - m_e * r / total)

    jac = abs(-(m_e + m_p) / total)   # det [[m_e/M, m_p/M], [1, -1]]
    if tag is PresentationTag.B:
        return PresentationMap(tag, forward, inverse, jac,
                               "center of mass x relative coordinates (x, r)")
    return PresentationMap(
        tag, forward, inverse, jac,
        "frozen center-of-mass datum x relative coordinates; the first factor "
        "is labeled by its initial-time value, identity on coordinates at the "
        "frozen instant")
