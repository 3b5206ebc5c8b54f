import math

import numpy as np
import pytest

from restframe.algebra import (poisson_bracket, sample_internal_points,
                               verify_poincare_algebra)
from restframe.dual import Dual
from restframe.errors import NumericalError, ValidationError
from restframe.potentials import (Potential, coulomb, free, from_spec, oscillator,
                                  polynomial)


class TestBuiltins:
    @pytest.mark.parametrize("pot,samples", [
        (free(), [0.1, 1.0, 10.0]),
        (oscillator(0.7), [0.1, 1.0, 10.0]),
        (coulomb(2.0), [0.3, 1.0, 4.0]),
        (polynomial([0.5, -1.0, 0.25]), [0.1, 1.0, 3.0]),
    ])
    def test_derivative_consistency(self, pot, samples):
        assert pot.check_consistency(samples) < 1e-6

    def test_oscillator_values(self):
        V = oscillator(2.0)
        assert V.value(3.0) == pytest.approx(12.0)
        assert V.derivative(3.0) == pytest.approx(4.0)

    def test_coulomb_values(self):
        V = coulomb(1.0)
        assert V.value(4.0) == pytest.approx(-0.5)
        arr = V.value(np.array([1.0, 4.0]))
        np.testing.assert_allclose(arr, [-1.0, -0.5])

    def test_polynomial_horner(self):
        V = polynomial([1.0, 2.0, 3.0])    # 1 + 2 s + 3 s^2
        assert V.value(2.0) == pytest.approx(17.0)
        assert V.derivative(2.0) == pytest.approx(14.0)

    def test_builtins_accept_duals(self):
        for pot in (oscillator(1.0), coulomb(1.0), polynomial([0.0, 1.0])):
            out = pot.value(Dual(2.0, 1.0))
            assert isinstance(out, Dual)
            assert out.eps == pytest.approx(pot.derivative(2.0))

    def test_inconsistent_pair_rejected(self):
        broken = Potential(lambda s: s * s, lambda s: 1.0, "broken")
        with pytest.raises(ValidationError):
            broken.check_consistency([1.0, 2.0])


class TestFromSpec:
    def test_known_kinds(self):
        assert from_spec({"kind": "free"}).label == "free"
        assert from_spec({"kind": "oscillator", "omega": 2.0}).value(1.0) == 4.0
        assert from_spec({"kind": "coulomb", "strength": 2.0}).value(1.0) == -2.0
        assert from_spec({"kind": "custom-polynomial",
                          "coefficients": [1.0, 1.0]}).value(2.0) == 3.0

    def test_unknown_kind(self):
        with pytest.raises(ValidationError):
            from_spec({"kind": "yukawa"})

    def test_unknown_extra_keys(self):
        with pytest.raises(ValidationError):
            from_spec({"kind": "oscillator", "omega": 1.0, "cutoff": 3.0})

    def test_missing_kind(self):
        with pytest.raises(ValidationError):
            from_spec({"omega": 1.0})


class TestBracketEngineFallback:
    def test_non_dual_potential_uses_central_differences(self):
        # math.sqrt refuses Duals, so the engine must fall back transparently
        stiff = Potential(lambda s: -1.0 / math.sqrt(s),
                          lambda s: 0.5 / math.sqrt(s) ** 3, "math-coulomb")
        rng = np.random.default_rng(17)
        points = sample_internal_points(5, rng, on_shell=True)
        report = verify_poincare_algebra("internal", points=points, potential=stiff,
                                         m1=1.0, m2=1.2)
        assert report.max_residual < 1e-6

    def test_dual_method_rejects_non_dual_evaluator(self):
        from restframe.algebra import PhaseSpacePoint
        pt = PhaseSpacePoint("relative", ((np.ones(3), np.ones(3)),))
        f = lambda p: math.sqrt(p.pairs[0][0][0])
        with pytest.raises(NumericalError):
            poisson_bracket(f, f, pt, method="dual")

    @pytest.mark.filterwarnings("ignore:invalid value encountered")
    def test_evaluation_failure_is_numerical_error(self):
        from restframe.algebra import PhaseSpacePoint
        pt = PhaseSpacePoint("relative", ((np.zeros(3), np.zeros(3)),))
        f = lambda p: (p.pairs[0][0][0] - 1e-7) ** 0.5   # negative at perturbed points
        with pytest.raises(NumericalError):
            poisson_bracket(f, f, pt, method="central")
