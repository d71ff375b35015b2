"""Self-consistent dressed one-particle states of the cutoff electron-positron field."""

from .dressing import (BoundsBox, DressingFunctions, GridMismatchError, ModelParams,
                       MomentumGrid, eval_dressing, membership_check, read_csv,
                       sup_distance, write_csv)
from .kernels import (Channel, KernelDomainError, kernel_tail, legendre_q0, legendre_q1,
                      reduced_kernel)
from .massless import massless_asymptote, massless_g1
from .observables import (Observables, compute_observables, physical_mass,
                          verify_mass_theorem, wavefunction_renorm)
from .quadrature import AccuracyWarning, GridQuadrature, IntegrandError, integrate_singular
from .solver import (ContractionData, FixedPointMap, SingularInputError, SolveReport,
                     apply_T, contraction_parameters, envelope_bounds, solve_fixed_point)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
