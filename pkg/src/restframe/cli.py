"""Command-line driver: one subcommand per experiment.

    restframe <tube|algebra|orbit|spectrum|entangle|ehrenfest>
              [--config cfg.json] [--seed N] [--out DIR]

Each run validates its JSON config against a strict per-experiment schema
(unknown keys are rejected), executes the experiment, writes CSV/JSON
artifacts plus rendered figures into the output directory, and finishes with
a machine-readable ``report.json`` and one pass/fail line per check.

Exit codes: 0 all checks pass, 1 validation error, 2 numerical failure,
3 checks ran but failed.  Output directory resolution: --out flag, else the
RESTFRAME_OUT environment variable, else ./restframe_out/<experiment>.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import algebra, dynamics, ehrenfest, entanglement, kinematics, plotting, spectrum
from .errors import (DomainError, NumericalError, RelativisticNonSeparability,
                     ValidationError)
from .potentials import from_spec
from .reports import RunReport, write_csv_atomic, write_json_atomic


# ---------------------------------------------------------------------------
# config schema machinery
# ---------------------------------------------------------------------------

def _float(name, value):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ValidationError(f"config key '{name}' must be a number, got {value!r}")
    if not np.isfinite(out):
        raise ValidationError(f"config key '{name}' must be finite")
    return out


def _positive(name, value):
    out = _float(name, value)
    if out <= 0:
        raise ValidationError(f"config key '{name}' must be positive, got {out}")
    return out


def _positive_int(name, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"config key '{name}' must be an integer, got {value!r}")
    if value <= 0:
        raise ValidationError(f"config key '{name}' must be positive, got {value}")
    return value


def _vec3(name, value):
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ValidationError(f"config key '{name}' must be a 3-vector, got {value!r}")
    if len(out) != 3 or not all(np.isfinite(out)):
        raise ValidationError(f"config key '{name}' must be a finite 3-vector")
    return out


def _potential(name, value):
    from_spec(value)  # structure check; drivers rebuild from the echoed spec
    return value

def _layouts(name, value):
    if not isinstance(value, list) or not value:
        raise ValidationError(f"config key '{name}' must be a non-empty list")
    for item in value:
        if item not in ("external", "internal"):
            raise ValidationError(f"config key '{name}': unknown layout {item!r}")
    return value


def _int_list(name, value):
    if not isinstance(value, list) or not value:
        raise ValidationError(f"config key '{name}' must be a non-empty list")
    out = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, int) or item < 0:
            raise ValidationError(f"config key '{name}' must hold non-negative integers")
        out.append(item)
    return out


def _float_list(name, value):
    try:
        out = [float(v) for v in value]
    except (TypeError, ValueError):
        raise ValidationError(f"config key '{name}' must be a list of numbers")
    if not out:
        raise ValidationError(f"config key '{name}' must be non-empty")
    return out


def validate_config(raw: dict, schema: dict, experiment: str) -> dict:
    if not isinstance(raw, dict):
        raise ValidationError(f"{experiment} config must be a JSON object")
    unknown = set(raw) - set(schema)
    if unknown:
        raise ValidationError(f"{experiment} config has unknown keys: {sorted(unknown)}")
    config = {}
    for key, (default, converter) in schema.items():
        config[key] = converter(key, raw.get(key, default))
    return config


TUBE_SCHEMA = {
    "Mc": (1.0, _positive),
    "S": ([0.0, 0.0, 1.0], _vec3),
    "z": ([0.0, 0.0, 0.0], _vec3),
    "c": (1.0, _positive),
    "axis": ([1.0, 0.0, 0.0], _vec3),
    "t_max": (1.0e4, _positive),
    "n_axis_samples": (60, _positive_int),
    "n_random_samples": (40, _positive_int),
    "sup_tolerance": (1.0e-4, _positive),
    "betweenness_tolerance": (1.0e-12, _positive),
}

ALGEBRA_SCHEMA = {
    "layouts": (["external", "internal"], _layouts),
    "n_states": (50, _positive_int),
    "m1": (1.0, _positive),
    "m2": (1.0, _positive),
    "c": (1.0, _positive),
    "potential": ({"kind": "oscillator", "omega": 1.0}, _potential),
    "external_tolerance": (1.0e-8, _positive),
    "internal_tolerance": (1.0e-6, _positive),
    "canonicity_tolerance": (algebra.CANONICITY_TOL, _positive),
}

ORBIT_SCHEMA = {
    "potential": ({"kind": "oscillator", "omega": 1.0}, _potential),
    "m1": (1.0, _positive),
    "m2": (1.0, _positive),
    "c": (1.0, _positive),
    "rho0": ([1.0, 0.0, 0.0], _vec3),
    "pi0": ([0.0, 1.0, 0.0], _vec3),
    "step_size": (1.0e-3, _positive),
    "n_steps": (10000, _positive_int),
    "h": ([0.6, 0.0, 0.0], _vec3),
    "z": ([0.0, 0.0, 0.0], _vec3),
    "drift_tolerance": (1.0e-9, _positive),
    "roundtrip_tolerance": (1.0e-9, _positive),
    "mass_shell_tolerance": (1.0e-10, _positive),
    "equal_time_threshold": (1.0e-3, _positive),
}

SPECTRUM_SCHEMA = {
    "potential": ({"kind": "coulomb", "strength": 1.0}, _potential),
    "l_values": ([0], _int_list),
    "n_levels": (3, _positive_int),
    "r_max": (200.0, _positive),
    "n_points": (4000, _positive_int),
    "m1": (1.0, _positive),
    "m2": (1.0, _positive),
    "c": (1.0, _positive),
    "oracle_tolerance": (1.0e-3, _positive),
}

ENTANGLE_SCHEMA = {
    "box_length": (40.0, _positive),
    "n_points": (128, _positive_int),
    "m_e": (1.0, _positive),
    "m_p": (1836.15267343, _positive),
    "p": (0.7, _float),
    "phi_scale": (1.0, _positive),
    "structure_tolerance": (1.0e-10, _positive),
    "entropy_symmetry_tolerance": (1.0e-8, _positive),
    "purity_tolerance": (1.0e-10, _positive),
}

EHRENFEST_SCHEMA = {
    "mass": (1.0, _positive),
    "c": (1.0, _positive),
    "box_length": (80.0, _positive),
    "n_modes": (1024, _positive_int),
    "k_mean": (1.0, _float),
    "k_width": (0.25, _positive),
    "center": (-5.0, _float),
    "tau_max": (10.0, _positive),
    "n_tau": (101, _positive_int),
    "norm_tolerance": (1.0e-14, _positive),
    "velocity_residual_tolerance": (1.0e-6, _positive),
    "second_difference_tolerance": (1.0e-8, _positive),
    "narrow_velocity_tolerance": (1.0e-3, _positive),
}


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def run_tube(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("tube", seed, config)
    rng = np.random.default_rng(seed)
    axis = np.asarray(config["axis"], dtype=float)
    axis /= np.linalg.norm(axis)
    t_values = np.geomspace(1e-2, config["t_max"], config["n_axis_samples"])
    samples = [t * axis for t in t_values]
    for _ in range(config["n_random_samples"]):
        direction = rng.standard_normal(3)
        direction /= np.linalg.norm(direction)
        samples.append(float(rng.uniform(0.1, 10.0)) * direction)
    cs = kinematics.CollectiveState(z=config["z"], h=[0.0, 0.0, 0.0], Mc=config["Mc"],
                                    S=config["S"], c=config["c"])
    result = kinematics.tube_scan(cs, samples)

    csv_path = outdir / "tube_scan.csv"
    result.write_csv(csv_path)
    report.artifacts.append(str(csv_path))

    slack = 1e-12 * max(1.0, result.rho)
    worst_excess = max(result.offset_xtilde.max(), result.offset_moller.max()) - result.rho
    report.add("offsets_within_tube", worst_excess, slack)
    report.add("sup_offset_reaches_radius", result.rho - result.sup_offset,
               config["sup_tolerance"])
    report.add("canonical_between_Y_and_moller",
               _betweenness_residual(cs, samples), config["betweenness_tolerance"])

    fig_path = outdir / "tube_scan.png"
    plotting.save_tube_figure(result, fig_path)
    report.artifacts.append(str(fig_path))
    return report


def _betweenness_residual(cs, samples) -> float:
    """Max violation of 'canonical center strictly inside the segment Y..R'."""
    from dataclasses import replace
    worst = 0.0
    for h in samples:
        boosted = replace(cs, h=np.asarray(h, dtype=float))
        y = kinematics.fokker_pryce(boosted, 0.0).x
        xt = kinematics.canonical_cm(boosted, 0.0).x - y
        rm = kinematics.moller_center(boosted, 0.0).x - y
        r_norm_sq = float(rm @ rm)
        if r_norm_sq == 0.0:
            worst = max(worst, float(np.linalg.norm(xt)))   # R=Y forces x~=Y
            continue
        lam = float(xt @ rm) / r_norm_sq
        off_segment = float(np.linalg.norm(xt - lam * rm))
        worst = max(worst, off_segment, max(0.0, lam - 1.0), max(0.0, -lam))
    return worst


def run_algebra(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("algebra", seed, config)
    rng = np.random.default_rng(seed)
    potential = from_spec(config["potential"])
    closures = []
    if "external" in config["layouts"]:
        states = algebra.sample_external_states(config["n_states"], rng)
        closure = algebra.verify_poincare_algebra("external", states=states)
        closures.append(closure)
        report.add("external_closure_residual", closure.max_residual,
                   config["external_tolerance"])
    if "internal" in config["layouts"]:
        points = algebra.sample_internal_points(config["n_states"], rng, on_shell=True)
        closure = algebra.verify_poincare_algebra(
            "internal", points=points, potential=potential,
            m1=config["m1"], m2=config["m2"], c=config["c"])
        closures.append(closure)
        report.add("internal_closure_residual", closure.max_residual,
                   config["internal_tolerance"])
    report.add("canonicity_residual", _canonicity_residual(rng),
               config["canonicity_tolerance"])

    json_path = outdir / "closure.json"
    write_json_atomic(json_path, [c.to_json_dict() for c in closures])
    report.artifacts.append(str(json_path))
    fig_path = outdir / "closure.png"
    plotting.save_closure_figure(closures, fig_path)
    report.artifacts.append(str(fig_path))
    return report


def _canonicity_residual(rng) -> float:
    """Max deviation of elementary brackets from delta_ij on sampled points."""
    worst = 0.0
    for layout, n_pairs in (("external", 1), ("relative", 1), ("internal", 2)):
        pairs = tuple((rng.standard_normal(3), rng.standard_normal(3))
                      for _ in range(n_pairs))
        pt = algebra.PhaseSpacePoint(layout, pairs)
        for a in range(n_pairs):
            for i in range(3):
                for b in range(n_pairs):
                    for j in range(3):
                        q_fn = lambda p, a=a, i=i: p.pairs[a][0][i]
                        p_fn = lambda p, b=b, j=j: p.pairs[b][1][j]
                        expected = 1.0 if (a == b and i == j) else 0.0
                        worst = max(worst, abs(
                            algebra.poisson_bracket(q_fn, p_fn, pt) - expected))
                        worst = max(worst, abs(algebra.poisson_bracket(
                            q_fn, lambda p, b=b, j=j: p.pairs[b][0][j], pt)))
                        worst = max(worst, abs(algebra.poisson_bracket(
                            p_fn, lambda p, b=b, j=j: p.pairs[b][1][j], pt)))
    return worst


def run_orbit(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("orbit", seed, config)
    potential = from_spec(config["potential"])
    m1, m2, c = config["m1"], config["m2"], config["c"]
    cfg = dynamics.IntegratorConfig(step_size=config["step_size"],
                                    n_steps=config["n_steps"])
    s0 = dynamics.RelativeState(config["rho0"], config["pi0"])
    traj = dynamics.evolve(s0, potential, m1, m2, c, cfg)
    report.add("mc_relative_drift", traj.mc_drift(), config["drift_tolerance"])
    report.add("spin_drift", traj.spin_drift(), config["drift_tolerance"])

    reversed_end = dynamics.evolve(
        dynamics.RelativeState(traj.rho[-1], -traj.pi[-1]), potential, m1, m2, c, cfg)
    roundtrip = max(float(np.max(np.abs(reversed_end.rho[-1] - s0.rho))),
                    float(np.max(np.abs(-reversed_end.pi[-1] - s0.pi))))
    report.add("forward_backward_error", roundtrip, config["roundtrip_tolerance"])

    mc0 = float(traj.Mc[0])
    spin0 = traj.S[0]
    cs_boosted = kinematics.CollectiveState(z=config["z"], h=config["h"], Mc=mc0,
                                            S=spin0, c=c)
    wl = dynamics.worldlines(traj, cs_boosted, potential, m1, m2)
    report.add("mass_shell_residual", wl.mass_shell_residual(potential, m1, m2, c),
               config["mass_shell_tolerance"])

    cs_rest = kinematics.CollectiveState(z=config["z"], h=[0.0, 0.0, 0.0], Mc=mc0,
                                         S=spin0, c=c)
    wl_rest = dynamics.worldlines(traj, cs_rest, potential, m1, m2)
    report.add("equal_time_gap_rest_frame",
               dynamics.equal_time_check(wl_rest, cs_rest.h).max_gap, 0.0, "==")
    if np.linalg.norm(config["h"]) > 0:
        report.add("equal_time_gap_boosted",
                   dynamics.equal_time_check(wl, cs_boosted.h).max_gap,
                   config["equal_time_threshold"], ">")

    traj_path = outdir / "trajectory.csv"
    traj.write_csv(traj_path)
    wl_path = outdir / "worldlines.csv"
    wl.write_csv(wl_path)
    orbit_fig = outdir / "orbit.png"
    plotting.save_orbit_figure(traj, orbit_fig)
    wl_fig = outdir / "worldlines.png"
    plotting.save_worldline_figure(wl, wl_fig)
    report.artifacts += [str(traj_path), str(wl_path), str(orbit_fig), str(wl_fig)]
    return report


def _spectrum_oracle(kind_spec: dict, l: int, n_levels: int):
    """Closed-form levels for the built-in potentials, None otherwise."""
    kind = kind_spec["kind"]
    if kind == "coulomb":
        strength = float(kind_spec.get("strength", 1.0))
        return [-strength ** 2 / (4.0 * (n_r + l + 1) ** 2) for n_r in range(n_levels)]
    if kind == "oscillator":
        omega = float(kind_spec.get("omega", 1.0))
        return [2.0 * omega * (2 * n_r + l + 1.5) for n_r in range(n_levels)]
    return None


def run_spectrum(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("spectrum", seed, config)
    potential = from_spec(config["potential"])
    grid = spectrum.RadialGrid(config["r_max"], config["n_points"])
    m1, m2, c = config["m1"], config["m2"], config["c"]
    spectra = {}
    payload = []
    rows = []
    for l in config["l_values"]:
        h_vals = spectrum.solve_reduced_hamiltonian(potential, l, grid,
                                                    config["n_levels"])
        ms = spectrum.mass_spectrum(h_vals, m1, m2, c, l=l)
        spectra[l] = ms
        payload.append({"l": l, "levels": [lv.to_json_dict() for lv in ms.levels],
                        "grid": {"r_max": grid.r_max, "n_points": grid.n_points}})
        rows += [(l, lv.n, lv.h, lv.epsilon) for lv in ms.levels]
        oracle = _spectrum_oracle(config["potential"], l, config["n_levels"])
        if oracle is not None:
            worst = max(abs(h - exact) / max(abs(exact), 1e-30)
                        for h, exact in zip(h_vals, oracle))
            report.add(f"oracle_relative_error_l{l}", worst, config["oracle_tolerance"])
        report.add(f"levels_ordered_l{l}",
                   float(np.min(np.diff(ms.epsilons))) if len(ms.levels) > 1 else 1.0,
                   0.0, ">=")

    json_path = outdir / "spectrum.json"
    write_json_atomic(json_path, payload if len(payload) > 1 else payload[0])
    csv_path = outdir / "levels.csv"
    write_csv_atomic(csv_path, ("l", "n", "h", "epsilon"), rows)
    fig_path = outdir / "spectrum.png"
    plotting.save_spectrum_figure(spectra, fig_path)
    report.artifacts += [str(json_path), str(csv_path), str(fig_path)]
    return report


def run_entangle(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("entangle", seed, config)
    grid = entanglement.Grid1D(config["box_length"], config["n_points"])
    scale = config["phi_scale"]
    state = entanglement.hydrogen_state(
        lambda r: np.exp(-abs(r) / scale), config["p"], config["m_e"], config["m_p"], grid)
    rho_el = entanglement.trace_out_particle(state, "electron")
    rho_pr = entanglement.trace_out_particle(state, "proton")
    rho_rel = entanglement.trace_out_com(state)

    eq2 = entanglement.translation_covariance_residual(rho_el)
    report.add("structure_translation_residual", eq2, config["structure_tolerance"])
    report.add("diagonal_flatness", entanglement.diagonal_flatness(rho_el),
               config["structure_tolerance"])
    entropy_el = entanglement.entanglement_entropy(rho_el)
    report.add("schmidt_entropy_symmetry",
               abs(entropy_el - entanglement.entanglement_entropy(rho_pr)),
               config["entropy_symmetry_tolerance"])
    report.add("relative_kernel_purity_defect", abs(1.0 - rho_rel.purity()),
               config["purity_tolerance"])
    rel_state = entanglement.RelativeWavefunction(grid.x, state.phi)
    try:
        entanglement.trace_out_relativistic_particle(rel_state, 1)
        nonseparability = 0.0
    except RelativisticNonSeparability:
        nonseparability = 1.0
    report.add("relativistic_particle_trace_forbidden", nonseparability, 1.0, "==")

    kernel_path = outdir / "kernel.csv"
    x = grid.x
    rows = [(x[i], x[j], rho_el.kernel[i, j].real, rho_el.kernel[i, j].imag)
            for i in range(grid.n) for j in range(grid.n)]
    write_csv_atomic(kernel_path, ("x", "x_prime", "re", "im"), rows)
    scalars_path = outdir / "scalars.json"
    write_json_atomic(scalars_path, {
        "purity": rho_rel.purity(), "entropy": entropy_el, "eq2_residual": eq2})
    fig_path = outdir / "kernel.png"
    plotting.save_kernel_figure(rho_el, grid, fig_path)
    report.artifacts += [str(kernel_path), str(scalars_path), str(fig_path)]
    return report


def run_ehrenfest(config: dict, seed: int, outdir: Path) -> RunReport:
    report = RunReport("ehrenfest", seed, config)
    packet = ehrenfest.gaussian_packet(
        config["k_mean"], config["k_width"], config["mass"], config["c"],
        config["box_length"], config["n_modes"], config["center"])
    tau = np.linspace(0.0, config["tau_max"], config["n_tau"])
    traj = ehrenfest.emergent_trajectory(packet, tau)
    quadrupole = np.array([
        ehrenfest.multipoles_about(ehrenfest.propagate_free(packet, t),
                                   traj.fit_slope * t + traj.fit_intercept).quadrupole
        for t in tau])

    final = ehrenfest.propagate_free(packet, config["tau_max"])
    report.add("norm_drift", abs(final.norm_squared() - packet.norm_squared()),
               config["norm_tolerance"])
    report.add("ehrenfest_velocity_residual", traj.max_ehrenfest_residual,
               config["velocity_residual_tolerance"])
    report.add("second_difference", traj.max_second_difference,
               config["second_difference_tolerance"])

    mc = config["mass"] * config["c"]
    narrow = ehrenfest.gaussian_packet(config["k_mean"], 0.02, config["mass"],
                                       config["c"], 4000.0, 4096)
    exact_velocity = config["k_mean"] / np.sqrt(config["k_mean"] ** 2 + mc * mc)
    report.add("narrow_packet_velocity_error",
               abs(ehrenfest.expectations(narrow).velocity - exact_velocity),
               config["narrow_velocity_tolerance"])

    csv_path = outdir / "ehrenfest.csv"
    traj.write_csv(csv_path, quadrupole)
    fig_path = outdir / "ehrenfest.png"
    plotting.save_ehrenfest_figure(traj, quadrupole, fig_path)
    report.artifacts += [str(csv_path), str(fig_path)]
    return report


DRIVERS = {
    "tube": (run_tube, TUBE_SCHEMA),
    "algebra": (run_algebra, ALGEBRA_SCHEMA),
    "orbit": (run_orbit, ORBIT_SCHEMA),
    "spectrum": (run_spectrum, SPECTRUM_SCHEMA),
    "entangle": (run_entangle, ENTANGLE_SCHEMA),
    "ehrenfest": (run_ehrenfest, EHRENFEST_SCHEMA),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restframe",
        description="Rest-frame two-body experiments: collective-variable scans, "
                    "algebra closure, orbits, spectra, entanglement and wave packets.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DRIVERS:
        cmd = sub.add_parser(name, help=f"run the {name} experiment")
        cmd.add_argument("--config", type=Path, default=None,
                         help="JSON config file (defaults are built in)")
        cmd.add_argument("--seed", type=int, default=42,
                         help="seed for randomized sampling (default 42)")
        cmd.add_argument("--out", type=Path, default=None,
                         help="output directory (default $RESTFRAME_OUT or "
                              "./restframe_out/<experiment>)")
    return parser


def _resolve_outdir(args) -> Path:
    if args.out is not None:
        return args.out
    env = os.environ.get("RESTFRAME_OUT")
    if env:
        return Path(env) / args.command
    return Path("restframe_out") / args.command


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {args.config}: {exc}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {args.config} is not valid JSON: {exc}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    driver, schema = DRIVERS[args.command]
    try:
        config = validate_config(_load_config(args), schema, args.command)
        outdir = _resolve_outdir(args)
        outdir.mkdir(parents=True, exist_ok=True)
        report = driver(config, args.seed, outdir)
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    report_path = outdir / "report.json"
    report.write(report_path)
    for check in report.checks:
        print(check.summary_line())
    print(f"report: {report_path}")
    return 0 if report.passed else 3


if __name__ == "__main__":
    sys.exit(main())
