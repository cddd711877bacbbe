"""Steering a dissipative two-level system to its maximal-purity state.

Library + CLI: Lindblad-to-Bloch conversion, purity-growth geometry (the
escape chimney and its apogee), and direct variational solvers for the time-
and energy-minimal steering problems, validated by forward simulation.
"""

from .bloch import (BlochVector, DensityMatrix, DissipationModel,
                    HamiltonianControl, LindbladOperator, bloch_from_density,
                    bloch_rhs, build_dissipation, density_from_bloch,
                    lindblad_rhs, pauli_decompose, principal_axes, purity)
from .chimney import (BoundaryConditions, ChimneyGeometry, boundary_conditions,
                      find_apogee, fixed_point, in_chimney, purity_derivative,
                      radial_root)
from .errors import (BlochSteerError, DivergenceError, InternalConsistencyError,
                     NoChimneyError, NoConvergenceError, SimulationError,
                     SingularIntegrandError, ValidationError)
from .numerics import (Grid, OptimizerConfig, RandomSource, fd_gradient,
                       nelder_mead, quadrature, rk4_integrate, sample_linf_ball)
from .variational import (BasisCurve, ProblemSpec, Solution, TimeTrajectory,
                          basis_eval, control_from_slope_2d,
                          controls_from_slope_3d, curve_eval, endpoint_controls,
                          evaluate_costs, forward_simulate, functional,
                          lagrangian_energy_2d, lagrangian_energy_3d,
                          lagrangian_time, make_problem, residual_nu, solve,
                          terminal_fixed_point)

__version__ = "0.1.0"
