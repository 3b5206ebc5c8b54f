"""Numerical Poisson brackets and the two realizations of the Poincare algebra.

The bracket engine differentiates scalar phase-space functions with
forward-mode dual numbers (central differences as fallback) and contracts the
gradients over the canonical pairs.  On top of it sit

* the *external* realization on the Jacobi data (z, h): generators
  P = Mc(sqrt(1+h^2); h), J = z x h + S, K = -sqrt(1+h^2) z + (S x h)/(1+sqrt(1+h^2));
* the *internal* realization on the un-physical rest-space coordinates
  (eta_i, kappa_i): mass Mc, momentum, spin, and boost built from the two
  particle energies sqrt(m_i^2 c^2 + kappa_i^2 + V).

Bracket conventions are frozen once here:

    {J^i,J^j} = eps^ijk J^k     {K^i,K^j} = -eps^ijk J^k
    {J^i,K^j} = eps^ijk K^k     {K^i,P^j} = -delta^ij P^0
    {J^i,P^j} = eps^ijk P^k     {K^i,P^0} = -P^i

and the internal set mirrors them with (Mc, P_int, S, K_int) in place of
(P^0, P, J, K).

For the external Lorentz sector to close at S != 0, the spin must carry its
own bracket {S^i,S^j} = eps^ijk S^k.  It is realized canonically through an
auxiliary conjugate pair (w, varpi) with S = w x varpi, so the whole engine
keeps working on plain canonical pairs.  The internal boost/mass relations
close exactly only on the rest-frame surface kappa_1 + kappa_2 = 0 when the
potential is switched on (off the surface they acquire a term proportional to
V' (rho . P_int)); closure is therefore sampled on that surface by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dual import Dual, dsqrt, value_of
from .errors import DomainError, NumericalError, ValidationError
from .kinematics import CollectiveState, FourVector, minkowski_dot
from .potentials import Potential

CANONICITY_TOL = 1e-10
CENTRAL_DIFF_STEP = 1e-6

_LAYOUT_PAIR_COUNTS = {"external": (1, 2), "internal": (2, 2), "relative": (1, 1)}

_EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS3[_i, _j, _k] = 1.0
    _EPS3[_i, _k, _j] = -1.0


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


@dataclass(frozen=True)
class PhaseSpacePoint:
    """Point of a canonical phase space, as (coordinate, momentum) 3-vector pairs.

    Layouts: ``external`` for the Jacobi data (z, h) with an optional
    spin-carrier pair, ``internal`` for ((eta_1, kappa_1), (eta_2, kappa_2)),
    ``relative`` for (rho, pi).
    """

    layout: str
    pairs: tuple

    def __post_init__(self):
        if self.layout not in _LAYOUT_PAIR_COUNTS:
            raise ValidationError(f"unknown layout {self.layout!r}")
        lo, hi = _LAYOUT_PAIR_COUNTS[self.layout]
        if not (lo <= len(self.pairs) <= hi):
            raise ValidationError(
                f"layout {self.layout!r} takes {lo}..{hi} pairs, got {len(self.pairs)}")
        clean = []
        for q, p in self.pairs:
            q = np.asarray(q, dtype=float)
            p = np.asarray(p, dtype=float)
            if q.shape != (3,) or p.shape != (3,):
                raise ValidationError("each canonical pair must be two 3-vectors")
            if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
                raise ValidationError("phase-space coordinates must be finite")
            clean.append((q, p))
        object.__setattr__(self, "pairs", tuple(clean))

    @property
    def n_coords(self) -> int:
        return 6 * len(self.pairs)


class _PerturbedPoint:
    """Duck-typed stand-in for PhaseSpacePoint holding Dual entries."""

    __slots__ = ("layout", "pairs")

    def __init__(self, layout, pairs):
        self.layout = layout
        self.pairs = pairs


def _perturb(pt, pair_idx: int, side: int, comp: int, entry):
    pairs = []
    for a, (q, p) in enumerate(pt.pairs):
        q = list(q)
        p = list(p)
        if a == pair_idx:
            if side == 0:
                q[comp] = entry(q[comp])
            else:
                p[comp] = entry(p[comp])
        pairs.append((q, p))
    return _PerturbedPoint(pt.layout, tuple(pairs))


def _gradient(f: Callable, pt, method: str) -> np.ndarray:
    """All partials of f at pt, shaped (n_pairs, 2, 3)."""
    grad = np.empty((len(pt.pairs), 2, 3))
    for a in range(len(pt.pairs)):
        for side in range(2):
            for i in range(3):
                grad[a, side, i] = _partial(f, pt, a, side, i, method)
    return grad


def _finite_or_raise(value: float) -> float:
    if not np.isfinite(value):
        raise NumericalError("evaluator returned a non-finite value at a perturbed point")
    return value


def _partial(f, pt, pair_idx, side, comp, method):
    if method in ("auto", "dual"):
        try:
            out = f(_perturb(pt, pair_idx, side, comp, lambda x: Dual(x, 1.0)))
            return _finite_or_raise(out.eps if isinstance(out, Dual) else 0.0)
        except (TypeError, AttributeError):
            if method == "dual":
                raise NumericalError(
                    "evaluator does not support dual numbers; use method='auto' or 'central'")
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise NumericalError(f"evaluation failed at perturbed point: {exc}") from exc
    x0 = pt.pairs[pair_idx][side][comp]
    step = CENTRAL_DIFF_STEP * max(1.0, abs(x0))
    try:
        hi = f(_perturb(pt, pair_idx, side, comp, lambda x: x + step))
        lo = f(_perturb(pt, pair_idx, side, comp, lambda x: x - step))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise NumericalError(f"evaluation failed at perturbed point: {exc}") from exc
    return _finite_or_raise((value_of(hi) - value_of(lo)) / (2.0 * step))


def poisson_bracket(f: Callable, g: Callable, pt, method: str = "auto") -> float:
    """{f, g} at pt, summed over all canonical pairs of the layout.

    ``method`` is one of ``auto`` (dual numbers, central differences when the
    evaluator refuses duals), ``dual`` or ``central``.
    """
    if method not in ("auto", "dual", "central"):
        raise ValidationError(f"unknown differentiation method {method!r}")
    gf = _gradient(f, pt, method)
    gg = _gradient(g, pt, method)
    return _bracket_from_gradients(gf, gg)


def _bracket_from_gradients(gf: np.ndarray, gg: np.ndarray) -> float:
    return float(np.sum(gf[:, 0, :] * gg[:, 1, :] - gf[:, 1, :] * gg[:, 0, :]))


# ---------------------------------------------------------------------------
# external realization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSet:
    """External generators: 4-momentum, rotations (axial) and boosts."""

    P: FourVector
    J: np.ndarray
    K: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "J", np.asarray(self.J, dtype=float))
        object.__setattr__(self, "K", np.asarray(self.K, dtype=float))
        mass_sq = minkowski_dot(self.P, self.P)
        if not (mass_sq > 0 and self.P.t > 0):
            raise ValidationError("external momentum must be time-like future-pointing")


def external_generators(cs: CollectiveState) -> GeneratorSet:
    """P, J, K evaluated on the collective state."""
    gamma = cs.gamma
    p = FourVector(cs.Mc * gamma, cs.Mc * cs.h)
    j = np.cross(cs.z, cs.h) + cs.S
    k = -gamma * cs.z + np.cross(cs.S, cs.h) / (1.0 + gamma)
    return GeneratorSet(p, j, k)


def spin_carrier(S) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic canonical pair (w, varpi) with w x varpi = S."""
    S = np.asarray(S, dtype=float)
    norm = np.linalg.norm(S)
    if norm == 0.0:
        return np.array([1.0, 0.0, 0.0]), np.zeros(3)
    s_hat = S / norm
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(s_hat)))] = 1.0
    e1 = seed - (seed @ s_hat) * s_hat
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(s_hat, e1)
    return e1, norm * e2


def external_point(cs: CollectiveState) -> PhaseSpacePoint:
    """Phase-space point for cs, with the spin realized on a carrier pair."""
    w, varpi = spin_carrier(cs.S)
    return PhaseSpacePoint("external", ((cs.z, cs.h), (w, varpi)))


def external_generator_functions(Mc: float) -> dict[str, Callable]:
    """Generator evaluators over an external PhaseSpacePoint.

    The spin is read off the carrier pair when present, else taken as zero.
    """

    def spin_of(pt):
        if len(pt.pairs) > 1:
            w, varpi = pt.pairs[1]
            return _cross(w, varpi)
        return (0.0, 0.0, 0.0)

    def p0(pt):
        _, h = pt.pairs[0]
        return Mc * dsqrt(1.0 + _dot(h, h))

    def p_i(i):
        def f(pt):
            return Mc * pt.pairs[0][1][i]
        return f

    def j_i(i):
        def f(pt):
            z, h = pt.pairs[0]
            return _cross(z, h)[i] + spin_of(pt)[i]
        return f

    def k_i(i):
        def f(pt):
            z, h = pt.pairs[0]
            gamma = dsqrt(1.0 + _dot(h, h))
            return -gamma * z[i] + _cross(spin_of(pt), h)[i] / (1.0 + gamma)
        return f

    funcs = {"P0": p0}
    for i in range(3):
        funcs[f"P{i + 1}"] = p_i(i)
        funcs[f"J{i + 1}"] = j_i(i)
        funcs[f"K{i + 1}"] = k_i(i)
    return funcs


# ---------------------------------------------------------------------------
# internal realization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InternalGeneratorSet:
    """Internal generators: invariant mass, rest momentum, spin and boost."""

    Mc: float
    P_int: np.ndarray
    S: np.ndarray
    K_int: np.ndarray

    def restframe_residuals(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.P_int)), float(np.linalg.norm(self.K_int))


def _particle_energy(kappa, rho_sq, m, c, V: Potential, which: int):
    radicand = m * m * c * c + _dot(kappa, kappa) + V.value(rho_sq)
    if value_of(radicand) < 0.0:
        raise DomainError(
            f"negative radicand for particle {which}: "
            f"m^2 c^2 + kappa^2 + V = {value_of(radicand):.6g}")
    return dsqrt(radicand)


def internal_generators(pt: PhaseSpacePoint, V: Potential, m1: float, m2: float,
                        c: float = 1.0) -> InternalGeneratorSet:
    """Mc, P_int, S, K_int on the un-physical internal coordinates."""
    if pt.layout != "internal":
        raise ValidationError(f"internal generators need layout 'internal', got {pt.layout!r}")
    (eta1, kappa1), (eta2, kappa2) = pt.pairs
    rho = eta1 - eta2
    rho_sq = float(rho @ rho)
    omega1 = _particle_energy(kappa1, rho_sq, m1, c, V, 1)
    omega2 = _particle_energy(kappa2, rho_sq, m2, c, V, 2)
    return InternalGeneratorSet(
        Mc=omega1 + omega2,
        P_int=kappa1 + kappa2,
        S=np.cross(eta1, kappa1) + np.cross(eta2, kappa2),
        K_int=-(eta1 * omega1 + eta2 * omega2),
    )


def internal_generator_functions(V: Potential, m1: float, m2: float,
                                 c: float = 1.0) -> dict[str, Callable]:
    """Generator evaluators over an internal PhaseSpacePoint."""

    def energies(pt):
        (eta1, kappa1), (eta2, kappa2) = pt.pairs
        rho = (eta1[0] - eta2[0], eta1[1] - eta2[1], eta1[2] - eta2[2])
        v = V.value(_dot(rho, rho))
        return (dsqrt(m1 * m1 * c * c + _dot(kappa1, kappa1) + v),
                dsqrt(m2 * m2 * c * c + _dot(kappa2, kappa2) + v))

    def mc(pt):
        w1, w2 = energies(pt)
        return w1 + w2

    def p_i(i):
        def f(pt):
            return pt.pairs[0][1][i] + pt.pairs[1][1][i]
        return f

    def s_i(i):
        def f(pt):
            (eta1, kappa1), (eta2, kappa2) = pt.pairs
            return _cross(eta1, kappa1)[i] + _cross(eta2, kappa2)[i]
        return f

    def k_i(i):
        def f(pt):
            w1, w2 = energies(pt)
            return -(pt.pairs[0][0][i] * w1 + pt.pairs[1][0][i] * w2)
        return f

    funcs = {"Mc": mc}
    for i in range(3):
        funcs[f"P{i + 1}"] = p_i(i)
        funcs[f"S{i + 1}"] = s_i(i)
        funcs[f"K{i + 1}"] = k_i(i)
    return funcs


def restframe_residuals(pt: PhaseSpacePoint, V: Potential, m1: float, m2: float,
                        c: float = 1.0) -> tuple[float, float]:
    """Norms (|P_int|, |K_int|) of the two rest-frame constraint vectors."""
    return internal_generators(pt, V, m1, m2, c).restframe_residuals()


def to_relative(eta1, eta2, kappa1, kappa2, m1: float, m2: float):
    """Physical relative variables rho = eta_1 - eta_2, pi = (m2 k1 - m1 k2)/M."""
    eta1, eta2 = np.asarray(eta1, float), np.asarray(eta2, float)
    kappa1, kappa2 = np.asarray(kappa1, float), np.asarray(kappa2, float)
    total_mass = m1 + m2
    return eta1 - eta2, (m2 * kappa1 - m1 * kappa2) / total_mass


def internal_cm(rho, pi, m1: float, m2: float, V: Potential, c: float = 1.0) -> np.ndarray:
    """Internal center of mass conjugate to the vanishing rest momentum.

    eta = [m1 sqrt(m2^2 c^2 + H) - m2 sqrt(m1^2 c^2 + H)]
          / [(m1 + m2)(sqrt(m1^2 c^2 + H) + sqrt(m2^2 c^2 + H))] * rho
    with H = pi^2 + V(rho^2).
    """
    rho = np.asarray(rho, dtype=float)
    pi = np.asarray(pi, dtype=float)
    H = float(pi @ pi) + V.value(float(rho @ rho))
    rad1 = m1 * m1 * c * c + H
    rad2 = m2 * m2 * c * c + H
    if rad1 < 0 or rad2 < 0:
        raise DomainError(f"negative radicand in internal center of mass: H = {H:.6g}")
    omega1, omega2 = math.sqrt(rad1), math.sqrt(rad2)
    return (m1 * omega2 - m2 * omega1) / ((m1 + m2) * (omega1 + omega2)) * rho


# ---------------------------------------------------------------------------
# algebra closure
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationCheck:
    relation: str
    max_residual: float
    worst_point: dict | None

    def to_json_dict(self) -> dict:
        return {"relation": self.relation, "max_residual": self.max_residual,
                "worst_point": self.worst_point}


@dataclass(frozen=True)
class ClosureReport:
    layout: str
    method: str
    n_points: int
    relations: tuple[RelationCheck, ...]

    @property
    def max_residual(self) -> float:
        return max(r.max_residual for r in self.relations)

    def to_json_dict(self) -> dict:
        return {"layout": self.layout, "method": self.method, "n_points": self.n_points,
                "max_residual": self.max_residual,
                "entries": [r.to_json_dict() for r in self.relations]}


def _vector_relations(a: str, b: str, rotations_of: str | None, sign: float):
    """Relations {a_i, b_j} = sign * eps_ijk rotations_of_k (or 0)."""
    rels = []
    for i in range(3):
        for j in range(3):
            if rotations_of is None and j <= i:
                continue  # antisymmetric and zero: upper triangle is enough
            def expected(values, i=i, j=j):
                if rotations_of is None:
                    return 0.0
                return sign * sum(_EPS3[i, j, k] * values[f"{rotations_of}{k + 1}"]
                                  for k in range(3))
            if rotations_of is None:
                label = f"{{{a}{i + 1},{b}{j + 1}}}=0"
            else:
                sgn = "-" if sign < 0 else ""
                label = f"{{{a}{i + 1},{b}{j + 1}}}={sgn}eps.{rotations_of}"
            rels.append((f"{a}{i + 1}", f"{b}{j + 1}", expected, label))
    return rels


def _poincare_relations(time_name: str, p_name: str, j_name: str, k_name: str):
    """Full bracket table of one Poincare realization, with expected values."""
    rels = []
    rels += _vector_relations(j_name, j_name, j_name, 1.0)
    rels += _vector_relations(j_name, k_name, k_name, 1.0)
    rels += _vector_relations(j_name, p_name, p_name, 1.0)
    rels += _vector_relations(k_name, k_name, j_name, -1.0)
    rels += _vector_relations(p_name, p_name, None, 0.0)
    for i in range(3):
        for j in range(3):
            def expected_kp(values, i=i, j=j):
                return -values[time_name] if i == j else 0.0
            rels.append((f"{k_name}{i + 1}", f"{p_name}{j + 1}", expected_kp,
                         f"{{{k_name}{i + 1},{p_name}{j + 1}}}=-delta.{time_name}"))
    for i in range(3):
        rels.append((f"{k_name}{i + 1}", time_name,
                     lambda values, i=i: -values[f"{p_name}{i + 1}"],
                     f"{{{k_name}{i + 1},{time_name}}}=-{p_name}{i + 1}"))
        rels.append((f"{j_name}{i + 1}", time_name, lambda values: 0.0,
                     f"{{{j_name}{i + 1},{time_name}}}=0"))
        rels.append((f"{p_name}{i + 1}", time_name, lambda values: 0.0,
                     f"{{{p_name}{i + 1},{time_name}}}=0"))
    return rels


def _closure_over_points(points, funcs_for_point, relations, method, layout):
    worst = {rel[3]: (0.0, None) for rel in relations}
    for idx, pt in enumerate(points):
        funcs = funcs_for_point(pt)
        values = {name: value_of(f(pt)) for name, f in funcs.items()}
        grads = {name: _gradient(f, pt, method) for name, f in funcs.items()}
        for fname, gname, expected, label in relations:
            bracket = _bracket_from_gradients(grads[fname], grads[gname])
            residual = abs(bracket - expected(values))
            if residual >= worst[label][0]:
                worst[label] = (residual, idx)
    checks = []
    for fname, gname, expected, label in relations:
        residual, idx = worst[label]
        point_info = None
        if idx is not None:
            point_info = {"point_index": idx,
                          "pairs": [[q.tolist(), p.tolist()] for q, p in points[idx].pairs]}
        checks.append(RelationCheck(label, residual, point_info))
    return ClosureReport(layout, method, len(points), tuple(checks))


def verify_poincare_algebra(layout: str, *, states: Sequence[CollectiveState] | None = None,
                            points: Sequence[PhaseSpacePoint] | None = None,
                            potential: Potential | None = None,
                            m1: float | None = None, m2: float | None = None,
                            c: float = 1.0, method: str = "auto") -> ClosureReport:
    """Evaluate every bracket relation of the chosen realization and report residuals.

    ``external`` takes collective states (spin realized on a carrier pair);
    ``internal`` takes internal phase-space points plus (potential, m1, m2, c).
    """
    if layout == "external":
        if not states:
            raise ValidationError("external closure needs at least one CollectiveState")
        pts = [external_point(cs) for cs in states]
        funcs_by_id = {id(pt): external_generator_functions(cs.Mc)
                       for pt, cs in zip(pts, states)}
        relations = _poincare_relations("P0", "P", "J", "K")
        return _closure_over_points(pts, lambda pt: funcs_by_id[id(pt)],
                                    relations, method, layout)
    if layout == "internal":
        if not points:
            raise ValidationError("internal closure needs at least one PhaseSpacePoint")
        if potential is None or m1 is None or m2 is None:
            raise ValidationError("internal closure needs potential, m1 and m2")
        funcs = internal_generator_functions(potential, m1, m2, c)
        relations = _poincare_relations("Mc", "P", "S", "K")
        return _closure_over_points(list(points), lambda pt: funcs, relations, method, layout)
    raise ValidationError(f"unknown layout {layout!r}")


# ---------------------------------------------------------------------------
# samplers and invariants used by the CLI and the test suites
# ---------------------------------------------------------------------------

def sample_external_states(n: int, rng: np.random.Generator, h_scale: float = 1.0,
                           z_scale: float = 1.0, spin_scale: float = 1.0) -> list[CollectiveState]:
    states = []
    for _ in range(n):
        states.append(CollectiveState(
            z=z_scale * rng.standard_normal(3),
            h=h_scale * rng.standard_normal(3),
            Mc=float(rng.uniform(0.5, 2.0)),
            S=spin_scale * rng.standard_normal(3),
        ))
    return states


def sample_internal_points(n: int, rng: np.random.Generator, scale: float = 1.0,
                           on_shell: bool = True) -> list[PhaseSpacePoint]:
    """Random internal points; on_shell pins kappa_1 + kappa_2 = 0."""
    points = []
    for _ in range(n):
        eta1 = scale * rng.standard_normal(3)
        eta2 = scale * rng.standard_normal(3)
        kappa1 = scale * rng.standard_normal(3)
        kappa2 = -kappa1 if on_shell else scale * rng.standard_normal(3)
        points.append(PhaseSpacePoint("internal", ((eta1, kappa1), (eta2, kappa2))))
    return points


def spin_casimir_residual(gen: GeneratorSet, Mc: float, S) -> float:
    """|W^2 + (Mc)^2 S^2| for the Pauli-Lubanski square of the external set."""
    S = np.asarray(S, dtype=float)
    p_vec = gen.P.x
    w0 = -(p_vec @ gen.J)
    w_vec = -gen.P.t * gen.J + np.cross(p_vec, gen.K)
    w_sq = w0 * w0 - w_vec @ w_vec
    return float(abs(w_sq + Mc * Mc * (S @ S)))
