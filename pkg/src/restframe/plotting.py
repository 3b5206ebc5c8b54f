"""Figure rendering for the CLI report path.

Each driver gets one function that turns its result objects into a PNG next
to the delimited output.  Figures are diagnostics, not data products; the
CSV/JSON artifacts remain the canonical outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_tube_figure(result, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    hmag = np.linalg.norm(result.h_samples, axis=1)
    order = np.argsort(hmag)
    ax.plot(hmag[order], result.offset_xtilde[order], "o-", ms=3,
            label="|canonical - Y|")
    ax.plot(hmag[order], result.offset_moller[order], "s-", ms=3,
            label="|Moller - Y|")
    if result.sup_offset > 0:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.axhline(result.rho, color="k", ls="--", lw=1, label="tube radius |S|/Mc")
    ax.set_xlabel("|h|")
    ax.set_ylabel("offset from Y")
    ax.set_title("Frame scan of the non-covariance world-tube")
    ax.legend()
    _finish(fig, path)


def save_closure_figure(reports, path) -> None:
    fig, axes = plt.subplots(len(reports), 1, figsize=(8.0, 3.0 * len(reports)),
                             squeeze=False)
    for ax, report in zip(axes[:, 0], reports):
        residuals = np.array([max(r.max_residual, 1e-18) for r in report.relations])
        ax.bar(np.arange(residuals.size), residuals, width=0.8)
        ax.set_yscale("log")
        ax.set_ylabel("max |residual|")
        ax.set_title(f"{report.layout} realization, {report.n_points} sampled points")
        ax.set_xticks([])
    axes[-1, 0].set_xlabel("bracket relation")
    _finish(fig, path)


def save_orbit_figure(traj, path) -> None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 4.0))
    ax1.plot(traj.rho[:, 0], traj.rho[:, 1], lw=0.8)
    ax1.set_xlabel("rho_x")
    ax1.set_ylabel("rho_y")
    ax1.set_aspect("equal", adjustable="datalim")
    ax1.set_title("relative orbit")
    ax2.plot(traj.tau, np.abs(traj.Mc - traj.Mc[0]) / abs(traj.Mc[0]), lw=0.8,
             label="|Mc drift| (relative)")
    spin_scale = max(float(np.linalg.norm(traj.S[0])), 1.0)
    ax2.plot(traj.tau, np.max(np.abs(traj.S - traj.S[0]), axis=1) / spin_scale,
             lw=0.8, label="|S drift|")
    ax2.set_yscale("symlog", linthresh=1e-16)
    ax2.set_xlabel("tau")
    ax2.set_title("conserved-quantity drift")
    ax2.legend()
    _finish(fig, path)


def save_worldline_figure(wl, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(wl.x1[:, 1], wl.x1[:, 0], lw=0.8, label="particle 1")
    ax.plot(wl.x2[:, 1], wl.x2[:, 0], lw=0.8, label="particle 2")
    ax.set_xlabel("x^1")
    ax.set_ylabel("x^0")
    ax.set_title("reconstructed world-lines")
    ax.legend()
    _finish(fig, path)


def save_spectrum_figure(spectra_by_l, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for l, spectrum in spectra_by_l.items():
        for level in spectrum.levels:
            ax.hlines(level.epsilon, l - 0.3, l + 0.3, lw=2)
    ax.set_xlabel("l")
    ax.set_ylabel("invariant-mass level epsilon_n")
    ax.set_title("invariant-mass spectrum")
    ax.set_xticks(sorted(spectra_by_l))
    _finish(fig, path)


def save_kernel_figure(rdm, grid, path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    extent = (grid.x[0], grid.x[-1], grid.x[0], grid.x[-1])
    im = ax.imshow(np.abs(rdm.kernel), origin="lower", extent=extent, cmap="viridis")
    fig.colorbar(im, ax=ax, label="|rho(x, x')|")
    ax.set_xlabel("x'")
    ax.set_ylabel("x")
    ax.set_title("single-particle reduced kernel")
    _finish(fig, path)


def save_ehrenfest_figure(traj, quadrupole, path) -> None:
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.5, 6.0), sharex=True)
    ax1.plot(traj.tau, traj.sigma_cl, "o", ms=3, label="<sigma>(tau)")
    ax1.plot(traj.tau, traj.fit_slope * traj.tau + traj.fit_intercept, "-",
             lw=1, label="straight-line fit")
    ax1.set_ylabel("<sigma>")
    ax1.legend()
    ax1.set_title("emergent classical trajectory")
    ax2.plot(traj.tau, np.abs(traj.dipole_about_fit), lw=0.8, label="|dipole|")
    ax2.plot(traj.tau, quadrupole, lw=0.8, label="quadrupole")
    ax2.set_yscale("symlog", linthresh=1e-16)
    ax2.set_xlabel("tau")
    ax2.legend()
    _finish(fig, path)
