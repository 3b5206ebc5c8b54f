"""Action-at-a-distance potentials V(rho^2) used inside the invariant mass.

The evaluators take the *squared* separation as argument, because that is how
the potential enters every square root in the theory.  Both the value and the
first derivative with respect to rho^2 are carried; the pair must agree with
a finite-difference probe, which :func:`check_consistency` enforces.

All built-in evaluators are written against :func:`restframe.dual.dsqrt`, so
they are transparent to the dual-number differentiation used by the bracket
engine and by the implicit-midpoint Newton solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dual import dsqrt
from .errors import ValidationError

FD_CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class Potential:
    """Pair of evaluators (V(s), V'(s)) with s = rho^2."""

    value: Callable
    derivative: Callable
    label: str = "custom"

    def __call__(self, s):
        return self.value(s)

    def check_consistency(self, samples, tol: float = FD_CONSISTENCY_TOL) -> float:
        """Max |dV/ds - V'(s)| over the samples, via central differences."""
        worst = 0.0
        for s in samples:
            step = 1e-6 * max(1.0, abs(s))
            fd = (self.value(s + step) - self.value(s - step)) / (2.0 * step)
            worst = max(worst, abs(fd - self.derivative(s)))
        if worst > tol:
            raise ValidationError(
                f"potential '{self.label}': derivative inconsistent with value "
                f"(max deviation {worst:.3e} > {tol:.1e})")
        return worst


def free() -> Potential:
    return Potential(lambda s: 0.0 * s if isinstance(s, np.ndarray) else 0.0,
                     lambda s: 0.0 * s if isinstance(s, np.ndarray) else 0.0,
                     label="free")


def oscillator(omega: float = 1.0) -> Potential:
    """V(rho^2) = omega^2 * rho^2."""
    w2 = float(omega) ** 2
    return Potential(lambda s: w2 * s, lambda s: w2 + 0.0 * s, label=f"oscillator(omega={omega})")


def coulomb(strength: float = 1.0) -> Potential:
    """V(rho^2) = -K / |rho|, attractive for K > 0."""
    k = float(strength)
    return Potential(lambda s: -k / dsqrt(s),
                     lambda s: 0.5 * k / dsqrt(s) ** 3,
                     label=f"coulomb(K={strength})")


def polynomial(coefficients) -> Potential:
    """V(rho^2) = sum_i c_i * (rho^2)^i with c = coefficients."""
    coeffs = [float(c) for c in coefficients]
    if not coeffs:
        raise ValidationError("polynomial potential needs at least one coefficient")

    def value(s):
        acc = coeffs[-1]
        for c in reversed(coeffs[:-1]):
            acc = acc * s + c
        return acc

    def derivative(s):
        acc = 0.0 * s if isinstance(s, np.ndarray) else 0.0
        for i in range(len(coeffs) - 1, 0, -1):
            acc = acc * s + i * coeffs[i]
        return acc

    return Potential(value, derivative, label=f"polynomial({coeffs})")


def from_spec(spec: dict) -> Potential:
    """Build a potential from a config mapping {kind: ..., ...}."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValidationError(f"potential spec must be a mapping with a 'kind' key, got {spec!r}")
    kind = spec["kind"]
    extras = {k: v for k, v in spec.items() if k != "kind"}
    if kind == "free":
        _expect_keys(extras, set(), kind)
        return free()
    if kind == "oscillator":
        _expect_keys(extras, {"omega"}, kind)
        return oscillator(float(extras.get("omega", 1.0)))
    if kind == "coulomb":
        _expect_keys(extras, {"strength"}, kind)
        return coulomb(float(extras.get("strength", 1.0)))
    if kind == "custom-polynomial":
        _expect_keys(extras, {"coefficients"}, kind)
        if "coefficients" not in extras:
            raise ValidationError("custom-polynomial potential needs 'coefficients'")
        return polynomial(extras["coefficients"])
    raise ValidationError(f"unknown potential kind {kind!r}")


def _expect_keys(extras: dict, allowed: set, kind: str) -> None:
    unknown = set(extras) - allowed
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)} in potential spec '{kind}'")
