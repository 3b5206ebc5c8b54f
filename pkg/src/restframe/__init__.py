"""Rest-frame instant-form description of relativistic two-body systems.

The package splits along the physics:

* :mod:`restframe.kinematics` - Wigner tetrad, embedding, the three
  collective variables and the Moller world-tube;
* :mod:`restframe.algebra` - numerical Poisson brackets, external/internal
  Poincare realizations, rest-frame constraint residuals, relative variables;
* :mod:`restframe.dynamics` - invariant-mass Hamiltonian flow, world-line
  reconstruction, non-relativistic limit scans;
* :mod:`restframe.spectrum` - reduced radial eigenproblem and the
  invariant-mass spectrum;
* :mod:`restframe.entanglement` - reduced density matrices, the
  structure theorem for particle traces, and rest-frame non-separability;
* :mod:`restframe.ehrenfest` - positive-energy wave packets, multipoles and
  emergent classical trajectories;
* :mod:`restframe.cli` - the ``restframe`` executable driving each
  experiment.
"""

from .errors import (DomainError, NumericalError, RelativisticNonSeparability,
                     RestframeError, ValidationError)
from .kinematics import (CollectiveState, FourVector, Tetrad, TubeScanResult,
                         canonical_cm, embed, fokker_pryce, minkowski_dot,
                         moller_center, moller_radius, tube_scan, wigner_tetrad)
from .potentials import Potential, coulomb, free, oscillator, polynomial
from .algebra import (ClosureReport, GeneratorSet, InternalGeneratorSet,
                      PhaseSpacePoint, external_generators, internal_cm,
                      internal_generators, poisson_bracket, restframe_residuals,
                      to_relative, verify_poincare_algebra)
from .dynamics import (IntegratorConfig, RelativeState, Trajectory, WorldLinePair,
                       equal_time_check, evolve, invariant_mass, nonrel_limit_check,
                       worldlines)
from .spectrum import (MassSpectrum, RadialGrid, external_momentum, mass_spectrum,
                       solve_reduced_hamiltonian)
from .entanglement import (Grid1D, PresentationTag, ReducedDensityMatrix,
                           RelativeWavefunction, TwoParticleWavefunction,
                           entanglement_entropy, hydrogen_state, presentation_map,
                           relativistic_reduced, trace_out_com, trace_out_particle,
                           trace_out_relativistic_particle)
from .ehrenfest import (Multipoles, WavePacket, emergent_trajectory, expectations,
                        gaussian_packet, multipoles_about, propagate_free)

__version__ = "0.1.0"
