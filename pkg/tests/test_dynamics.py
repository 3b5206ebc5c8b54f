import numpy as np
import pytest
from scipy.integrate import solve_ivp

from restframe.dynamics import (IntegratorConfig, RelativeState, equal_time_check,
                                evolve, invariant_mass, nonrel_limit_check,
                                worldlines)
from restframe.errors import DomainError, ValidationError
from restframe.kinematics import CollectiveState, minkowski_dot
from restframe.potentials import Potential, free, oscillator


def collective(h, mc, spin, z=(0, 0, 0), c=1.0):
    return CollectiveState(z=np.array(z, float), h=np.array(h, float), Mc=mc,
                           S=np.asarray(spin, float), c=c)


def circular_state(radius=1.0):
    """|rho| = |pi| = R with rho . pi = 0 closes a circular oscillator orbit."""
    return RelativeState(rho=[radius, 0.0, 0.0], pi=[0.0, radius, 0.0])


class TestInvariantMass:
    def test_static(self):
        s = RelativeState([1, 0, 0], [0, 0, 0])
        assert invariant_mass(s, free(), 1.0, 2.0, c=2.0) == pytest.approx(6.0)

    def test_kinetic(self):
        s = RelativeState([0, 0, 0], np.sqrt(3.0) * np.array([1, 0, 0]))
        assert invariant_mass(s, free(), 1.0, 1.0) == pytest.approx(4.0)

    def test_with_potential(self):
        s = RelativeState([1, 0, 0], [0, 0, 0])
        assert invariant_mass(s, oscillator(1.0), 1.0, 1.0) == pytest.approx(
            2.0 * np.sqrt(2.0))

    def test_domain_error(self):
        well = Potential(lambda s: -9.0 + 0.0 * s, lambda s: 0.0 * s, "well")
        with pytest.raises(DomainError):
            invariant_mass(RelativeState([1, 0, 0], [0, 0, 0]), well, 1.0, 1.0)


class TestEvolve:
    def test_free_flow_is_straight(self):
        s0 = RelativeState([0.5, -1.0, 0.0], [0.2, 0.1, -0.3])
        cfg = IntegratorConfig(step_size=1e-2, n_steps=200)
        traj = evolve(s0, free(), 1.0, 1.5, 1.0, cfg)
        np.testing.assert_allclose(traj.pi, np.tile(s0.pi, (201, 1)), atol=1e-13)
        h = float(s0.pi @ s0.pi)
        speed = (1.0 / np.sqrt(1.0 + h) + 1.0 / np.sqrt(1.5 ** 2 + h))
        expected = s0.rho + np.outer(traj.tau, speed * s0.pi)
        np.testing.assert_allclose(traj.rho, expected, atol=1e-10)

    def test_circular_orbit_radius_and_oracle(self):
        radius = 1.0
        s0 = circular_state(radius)
        m1 = m2 = 1.0
        h0 = 2.0 * radius ** 2
        omega = 2.0 / np.sqrt(1.0 + h0)       # angular rate 2 g(H)
        period = 2.0 * np.pi / omega
        n_steps = int(round(10.0 * period / 1e-3))
        traj = evolve(s0, oscillator(1.0), m1, m2, 1.0,
                      IntegratorConfig(step_size=1e-3, n_steps=n_steps))
        radii = np.linalg.norm(traj.rho, axis=1)
        assert np.max(np.abs(radii - radius)) < 1e-6

        def rhs(t, y):
            h = y[3:] @ y[3:] + y[:3] @ y[:3]
            p = 1.0 / np.sqrt(m1 ** 2 + h) + 1.0 / np.sqrt(m2 ** 2 + h)
            return np.concatenate((p * y[3:], -p * y[:3]))

        oracle = solve_ivp(rhs, (0.0, traj.tau[-1]),
                           np.concatenate((s0.rho, s0.pi)),
                           method="RK45", rtol=1e-11, atol=1e-12)
        np.testing.assert_allclose(traj.rho[-1], oracle.y[:3, -1], atol=1e-4)

    def test_conservation_drift(self):
        traj = evolve(circular_state(), oscillator(1.0), 1.0, 1.0, 1.0,
                      IntegratorConfig(step_size=1e-3, n_steps=10000))
        assert traj.mc_drift() < 1e-9
        assert traj.spin_drift() < 1e-9

    def test_time_reversal(self):
        s0 = RelativeState([1.0, 0.2, -0.1], [0.0, 0.8, 0.3])
        cfg = IntegratorConfig(step_size=1e-3, n_steps=2000)
        forward = evolve(s0, oscillator(1.0), 1.0, 1.3, 1.0, cfg)
        back = evolve(RelativeState(forward.rho[-1], -forward.pi[-1]),
                      oscillator(1.0), 1.0, 1.3, 1.0, cfg)
        assert np.max(np.abs(back.rho[-1] - s0.rho)) < 1e-9
        assert np.max(np.abs(-back.pi[-1] - s0.pi)) < 1e-9

    def test_radicand_guard(self):
        well = Potential(lambda s: -0.999 + 0.0 * s, lambda s: 0.0 * s, "well")
        with pytest.raises(DomainError):
            evolve(RelativeState([1, 0, 0], [0, 0, 0]), well, 1.0, 1.0, 1.0,
                   IntegratorConfig(n_steps=1))

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            IntegratorConfig(step_size=-1e-3)
        with pytest.raises(ValidationError):
            IntegratorConfig(n_steps=0)


class TestWorldlines:
    def setup_method(self):
        self.V = oscillator(1.0)
        self.traj = evolve(circular_state(), self.V, 1.0, 1.0, 1.0,
                           IntegratorConfig(step_size=1e-2, n_steps=400))
        self.mc = float(self.traj.Mc[0])
        self.spin = self.traj.S[0]

    def test_rest_frame_times_are_tau(self):
        wl = worldlines(self.traj, collective([0, 0, 0], self.mc, self.spin),
                        self.V, 1.0, 1.0)
        np.testing.assert_array_equal(wl.x1[:, 0], self.traj.tau)
        np.testing.assert_array_equal(wl.x2[:, 0], self.traj.tau)

    def test_equal_mass_offsets_opposite(self):
        cs = collective([0.3, 0, 0], self.mc, self.spin)
        wl = worldlines(self.traj, cs, self.V, 1.0, 1.0)
        midpoint = 0.5 * (wl.x1 + wl.x2)
        np.testing.assert_allclose(wl.x1 - midpoint, -(wl.x2 - midpoint), atol=1e-14)

    def test_mass_shell(self):
        cs = collective([0.6, 0, 0], self.mc, self.spin)
        wl = worldlines(self.traj, cs, self.V, 1.0, 1.0)
        assert wl.mass_shell_residual(self.V, 1.0, 1.0) < 1e-10

    def test_mass_shell_unequal_masses(self):
        m1, m2 = 1.0, 1.7
        traj = evolve(circular_state(), self.V, m1, m2, 1.0,
                      IntegratorConfig(step_size=1e-2, n_steps=200))
        cs = collective([0.4, -0.2, 0.1], float(traj.Mc[0]), traj.S[0])
        wl = worldlines(traj, cs, self.V, m1, m2)
        assert wl.mass_shell_residual(self.V, m1, m2) < 1e-10

    def test_separation_invariant(self):
        # (x1 - x2).(x1 - x2) = -rho^2 in every frame (tetrad columns are unit space-like)
        for h in ([0, 0, 0], [0.6, 0, 0]):
            wl = worldlines(self.traj, collective(h, self.mc, self.spin),
                            self.V, 1.0, 1.0)
            sep = wl.x1 - wl.x2
            rho_sq = np.sum(self.traj.rho ** 2, axis=1)
            np.testing.assert_allclose(minkowski_dot(sep, sep), -rho_sq, atol=1e-12)


class TestEqualTime:
    def setup_method(self):
        self.V = oscillator(1.0)
        # planar orbit in the x-y plane
        self.traj = evolve(circular_state(), self.V, 1.0, 1.0, 1.0,
                           IntegratorConfig(step_size=1e-2, n_steps=300))
        self.mc = float(self.traj.Mc[0])
        self.spin = self.traj.S[0]

    def gap(self, h):
        wl = worldlines(self.traj, collective(h, self.mc, self.spin), self.V, 1.0, 1.0)
        return equal_time_check(wl, h).max_gap

    def test_rest_frame_zero(self):
        assert self.gap([0, 0, 0]) == 0.0

    def test_boost_in_orbit_plane(self):
        assert self.gap([0.6, 0, 0]) > 1e-3

    def test_boost_orthogonal_to_orbit(self):
        # h along z is orthogonal to rho(tau) for the whole planar orbit
        assert self.gap([0, 0, 0.6]) < 1e-14


class TestNonRelLimit:
    def test_trivial_zero_energy(self):
        report = nonrel_limit_check(free(), RelativeState([1, 0, 0], [0, 0, 0]),
                                    1.0, 1.0, [10.0, 100.0])
        np.testing.assert_array_equal(report.excess, [0.0, 0.0])
        assert np.isnan(report.decay_exponent)

    def test_limit_value(self):
        # H = 1, equal unit masses: excess -> H / (2 mu) = 1
        report = nonrel_limit_check(free(), RelativeState([0, 0, 0], [1, 0, 0]),
                                    1.0, 1.0, [10.0, 100.0, 1000.0, 10000.0])
        assert report.newtonian == pytest.approx(1.0)
        assert abs(report.excess[-1] - 1.0) < 1e-7

    def test_decay_exponent(self):
        report = nonrel_limit_check(oscillator(1.0),
                                    RelativeState([0.5, 0, 0], [0.5, 0.5, 0]),
                                    1.0, 1.3, [10.0, 100.0, 1000.0, 10000.0])
        assert report.decay_exponent == pytest.approx(2.0, abs=0.1)

    def test_needs_two_points(self):
        with pytest.raises(ValidationError):
            nonrel_limit_check(free(), RelativeState([0, 0, 0], [1, 0, 0]),
                               1.0, 1.0, [10.0])
