"""Wigner tetrad, rest-frame embedding, collective variables and the Moller tube.

Everything here lives on the external side of the description: the frozen
Jacobi data (z, h) of the decoupled center of mass together with the two
Casimirs (Mc, S).  Three collective 4-vectors can be built from them,

* the Fokker-Pryce center of inertia ``Y`` (covariant, non-canonical),
* the canonical center of mass ``x~`` (canonical, non-covariant),
* the Moller center of energy ``R`` (neither),

and scanning the latter two over all inertial frames sweeps a world-tube of
invariant radius |S|/Mc around ``Y``.

Metric signature is (+,-,-,-) throughout; every inner product is routed
through :func:`minkowski_dot`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ValidationError

#: absolute tolerance for algebraic identities (tetrad orthonormality, Casimirs)
ALGEBRAIC_TOL = 1e-12
#: absolute tolerance for scan limits (tube sup, non-relativistic fits)
SCAN_TOL = 1e-6


def _vec3(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"{name} must be finite, got {v}")
    return v


@dataclass(frozen=True)
class FourVector:
    """Minkowski 4-vector with explicit time component, signature (+,-,-,-)."""

    t: float
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", _vec3(self.x, "spatial part"))

    def as_array(self) -> np.ndarray:
        return np.concatenate(([self.t], self.x))

    @staticmethod
    def from_array(a) -> "FourVector":
        a = np.asarray(a, dtype=float)
        return FourVector(a[0], a[1:4])

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x)

    def __mul__(self, scalar: float) -> "FourVector":
        return FourVector(self.t * scalar, self.x * scalar)

    __rmul__ = __mul__


def minkowski_dot(a, b) -> float | np.ndarray:
    """Inner product a·b with signature (+,-,-,-).

    Accepts :class:`FourVector` or arrays whose last axis has length 4, in
    which case the product broadcasts over the leading axes.
    """
    if isinstance(a, FourVector):
        a = a.as_array()
    if isinstance(b, FourVector):
        b = b.as_array()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


@dataclass(frozen=True)
class CollectiveState:
    """Frozen Jacobi data plus Casimirs of the external center of mass.

    ``z`` has units momentum*length, ``h`` is the dimensionless P/Mc, ``Mc``
    the invariant mass in momentum units, ``S`` the rest spin.  The speed of
    light is kept explicit so that c -> infinity studies stay expressible.
    """

    z: np.ndarray
    h: np.ndarray
    Mc: float
    S: np.ndarray
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "z", _vec3(self.z, "z"))
        object.__setattr__(self, "h", _vec3(self.h, "h"))
        object.__setattr__(self, "S", _vec3(self.S, "S"))
        if not (np.isfinite(self.Mc) and self.Mc > 0):
            raise ValidationError(f"Mc must be positive, got {self.Mc}")
        if not (np.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"c must be positive, got {self.c}")

    @property
    def gamma(self) -> float:
        return float(np.sqrt(1.0 + self.h @ self.h))


@dataclass(frozen=True)
class Tetrad:
    """Time-like unit vector h^mu and the three space-like columns eps_r(h)."""

    h_mu: FourVector
    eps_r: tuple[FourVector, FourVector, FourVector]

    def eps_matrix(self) -> np.ndarray:
        """Columns eps^mu_r as a 4x3 array."""
        return np.stack([e.as_array() for e in self.eps_r], axis=1)

    def orthonormality_residual(self) -> float:
        """max of |h·h-1|, |h·eps_r| and |eps_r·eps_s + delta_rs|."""
        res = abs(minkowski_dot(self.h_mu, self.h_mu) - 1.0)
        for r, er in enumerate(self.eps_r):
            res = max(res, abs(minkowski_dot(self.h_mu, er)))
            for s, es in enumerate(self.eps_r):
                res = max(res, abs(minkowski_dot(er, es) + (1.0 if r == s else 0.0)))
        return float(res)


def wigner_tetrad(h) -> Tetrad:
    """Tetrad adapted to the rest frame selected by the boost datum h.

    The time leg is h^mu = (sqrt(1+h^2); h); the space legs are
    eps^0_r = h_r, eps^i_r = delta^i_r + h^i h_r / (1 + sqrt(1+h^2)),
    which makes 3-vectors living on the rest 3-space Wigner-covariant.
    """
    h = _vec3(h, "h")
    gamma = np.sqrt(1.0 + h @ h)
    h_mu = FourVector(gamma, h)
    eps = []
    for r in range(3):
        spatial = np.zeros(3)
        spatial[r] = 1.0
        spatial += h * h[r] / (1.0 + gamma)
        eps.append(FourVector(h[r], spatial))
    return Tetrad(h_mu, tuple(eps))


def fokker_pryce(cs: CollectiveState, tau: float) -> FourVector:
    """Fokker-Pryce center of inertia Y^mu(tau), the only true world-line."""
    gamma = cs.gamma
    shifted = tau + (cs.h @ cs.z) / cs.Mc
    t = gamma * shifted
    x = cs.z / cs.Mc + shifted * cs.h + np.cross(cs.S, cs.h) / (cs.Mc * (1.0 + gamma))
    return FourVector(t, x)


def canonical_cm(cs: CollectiveState, tau: float) -> FourVector:
    """Canonical (Newton-Wigner) center of mass x~^mu(tau)."""
    y = fokker_pryce(cs, tau)
    offset = -np.cross(cs.S, cs.h) / (cs.Mc * (1.0 + cs.gamma))
    return FourVector(y.t, y.x + offset)


def moller_center(cs: CollectiveState, tau: float) -> FourVector:
    """Moller center of energy R^mu(tau).

    R = Y + (0; -S x h / (Mc*gamma)): the displacement along -S x h whose
    magnitude exceeds the canonical one by the factor (1+gamma)/gamma, so the
    canonical center always lies strictly between Y and R, and the frame scan
    saturates the tube radius |S|/Mc from below.
    """
    y = fokker_pryce(cs, tau)
    offset = -np.cross(cs.S, cs.h) / (cs.Mc * cs.gamma)
    return FourVector(y.t, y.x + offset)


def embed(cs: CollectiveState, tau: float, sigma) -> FourVector:
    """Embedding z^mu(tau, sigma) = Y^mu(tau) + eps^mu_r(h) sigma^r of the rest 3-space."""
    sigma = _vec3(sigma, "sigma")
    y = fokker_pryce(cs, tau)
    eps = wigner_tetrad(cs.h).eps_matrix()
    return y + FourVector.from_array(eps @ sigma)


def moller_radius(Mc: float, S) -> float:
    """Invariant radius |S|/Mc of the non-covariance world-tube."""
    S = _vec3(S, "S")
    if not (np.isfinite(Mc) and Mc > 0):
        raise ValidationError(f"Mc must be positive, got {Mc}")
    return float(np.linalg.norm(S) / Mc)


@dataclass(frozen=True)
class TubeScanResult:
    """Per-frame offsets of the two pseudo-world-lines from Y, plus the tube radius."""

    h_samples: np.ndarray       # (n, 3)
    offset_xtilde: np.ndarray   # (n,)
    offset_moller: np.ndarray   # (n,)
    rho: float
    sup_offset: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sup_offset",
                           float(max(self.offset_xtilde.max(), self.offset_moller.max())))

    def write_csv(self, path) -> None:
        from .reports import write_csv_atomic
        rows = [
            (h[0], h[1], h[2], ox, om, self.rho)
            for h, ox, om in zip(self.h_samples, self.offset_xtilde, self.offset_moller)
        ]
        write_csv_atomic(path, ("hx", "hy", "hz", "offset_xtilde", "offset_R", "rho"), rows)


def tube_scan(cs: CollectiveState, h_samples) -> TubeScanResult:
    """Offsets |x~ - Y| and |R - Y| for every boost sample, against rho = |S|/Mc.

    The offsets are frame properties only: they do not depend on tau or z, so
    they are evaluated at tau = 0 with the state's z.
    """
    samples = [_vec3(h, "h sample") for h in h_samples]
    if not samples:
        raise ValidationError("tube_scan needs at least one h sample")
    rho = moller_radius(cs.Mc, cs.S)
    off_xt = np.empty(len(samples))
    off_mo = np.empty(len(samples))
    for i, h in enumerate(samples):
        boosted = replace(cs, h=h)
        y = fokker_pryce(boosted, 0.0)
        off_xt[i] = np.linalg.norm(canonical_cm(boosted, 0.0).x - y.x)
        off_mo[i] = np.linalg.norm(moller_center(boosted, 0.0).x - y.x)
    return TubeScanResult(np.array(samples), off_xt, off_mo, rho)
