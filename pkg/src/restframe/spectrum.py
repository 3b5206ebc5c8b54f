"""Stationary invariant-mass spectrum via the reduced radial eigenproblem.

Quantizing the internal Hamiltonian H = pi^2 + V(rho^2) as -laplacian + V
(hbar = 1, no 1/2mu: the kinetic operator is pi-hat squared) and separating
angles leaves the reduced radial problem

    -u''(r) + [l(l+1)/r^2 + V(r^2)] u(r) = h u(r),   u(0) = u(r_max) = 0,

discretized with second-order central differences on a uniform grid whose
first node sits one spacing away from the origin (no regularization parameter
for Coulomb-class singularities).  The eigenvalues h_n then map to the
invariant-mass levels

    epsilon_n = sqrt(m1^2 c^2 + h_n) + sqrt(m2^2 c^2 + h_n),

and each level carries the 2l+1 magnetic multiplicity: the radial solve never
sees the m label, so degenerate members are not solved separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericalError, ValidationError
from .kinematics import FourVector
from .potentials import Potential


@dataclass(frozen=True)
class RadialGrid:
    """Uniform grid for the reduced radial function, Dirichlet at 0 and r_max."""

    r_max: float
    n_points: int

    def __post_init__(self):
        if not (np.isfinite(self.r_max) and self.r_max > 0):
            raise ValidationError(f"r_max must be positive, got {self.r_max}")
        if self.n_points < 16:
            raise ValidationError(f"n_points must be at least 16, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return self.r_max / (self.n_points + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.spacing * np.arange(1, self.n_points + 1)


def _check_singularity(V: Potential, grid: RadialGrid) -> None:
    """Reject potentials more singular at the origin than an integrable 1/r."""
    r1, r2 = grid.spacing * 0.125, grid.spacing * 0.25
    v1, v2 = float(V.value(r1 * r1)), float(V.value(r2 * r2))
    if not (np.isfinite(v1) and np.isfinite(v2)):
        raise ValidationError("potential is not finite near the origin")
    scale = max(1.0, abs(v2) * r2)
    if abs(v1) * r1 > 1.3 * scale:
        raise ValidationError(
            "potential is more singular than 1/r near the origin; "
            "the reduced radial operator is not bounded below on this grid")


def solve_reduced_hamiltonian(V: Potential, l: int, grid: RadialGrid,
                              n_levels: int = 8) -> np.ndarray:
    """Lowest eigenvalues h_n of -u'' + [l(l+1)/r^2 + V(r^2)] u on the grid."""
    if l < 0:
        raise ValidationError(f"l must be non-negative, got {l}")
    if not 1 <= n_levels <= grid.n_points:
        raise ValidationError(f"n_levels must be in [1, {grid.n_points}], got {n_levels}")
    _check_singularity(V, grid)
    r = grid.nodes
    dr = grid.spacing
    v_vals = np.asarray(V.value(r * r), dtype=float)
    if not np.all(np.isfinite(v_vals)):
        raise ValidationError("potential evaluates to non-finite values on the grid")
    diag = 2.0 / dr**2 + l * (l + 1) / r**2 + v_vals
    off = np.full(grid.n_points - 1, -1.0 / dr**2)
    try:
        vals = eigh_tridiagonal(diag, off, select="i",
                                select_range=(0, n_levels - 1), eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure path
        raise NumericalError(f"tridiagonal eigensolver failed: {exc}") from exc
    return np.asarray(vals, dtype=float)


@dataclass(frozen=True)
class MassLevel:
    n: int
    l: int
    h: float
    epsilon: float
    multiplicity: int

    def to_json_dict(self) -> dict:
        return {"n": self.n, "h": self.h, "epsilon": self.epsilon,
                "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class MassSpectrum:
    """Invariant-mass levels epsilon_n for one angular momentum l."""

    levels: tuple[MassLevel, ...]

    def __post_init__(self):
        eps = [lv.epsilon for lv in self.levels]
        if any(b < a for a, b in zip(eps, eps[1:])):
            raise ValidationError("mass levels must be nondecreasing in n")

    @property
    def epsilons(self) -> np.ndarray:
        return np.array([lv.epsilon for lv in self.levels])


def mass_spectrum(h_list, m1: float, m2: float, c: float = 1.0,
                  l: int = 0) -> MassSpectrum:
    """Map reduced-Hamiltonian eigenvalues to invariant-mass levels.

    epsilon = sqrt(m1^2 c^2 + h) + sqrt(m2^2 c^2 + h); a bound state below
    the mass gap (m_i^2 c^2 + h < 0) has no admissible invariant mass.
    """
    levels = []
    for n, h in enumerate(np.sort(np.asarray(list(h_list), dtype=float)), start=1):
        rad1 = m1 * m1 * c * c + h
        rad2 = m2 * m2 * c * c + h
        if rad1 < 0 or rad2 < 0:
            raise DomainError(
                f"level n={n}: h = {h:.6g} lies below the mass gap "
                f"-min(m_i^2 c^2) = {-min(m1 * m1, m2 * m2) * c * c:.6g}")
        eps = float(np.sqrt(rad1) + np.sqrt(rad2))
        levels.append(MassLevel(n, l, float(h), eps, 2 * l + 1))
    return MassSpectrum(tuple(levels))


def external_momentum(epsilon: float, k, c: float = 1.0) -> FourVector:
    """External 4-momentum of a stationary level in the frame tagged by k.

    P^mu = (epsilon sqrt(1 + k^2); epsilon k) / c, so P.P = (epsilon/c)^2
    for every k.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (3,):
        raise ValidationError("k must be a 3-vector")
    return FourVector(epsilon * np.sqrt(1.0 + k @ k) / c, epsilon * k / c)
