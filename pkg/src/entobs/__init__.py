"""Two-qubit negativity from spin-tensor observables."""

from ._accel import backend
from .entanglement import (DiscrepancyRecord, ObservableVector, ScenarioKind, ScenarioPoint, Variant,
                           discrepancy, family_negativity, negativity_batch, negativity_oracle,
                           observable_negativity, partial_transpose, scenario_negativity)
from .errors import *  # noqa: F401,F403
from .evolution import (FIGURES, Scenario, Surface, TimeGrid, VerificationReport, breaking_demo,
                        calibrate_time_scale, compute_surface, evolve, evolve_batch, fit_caption,
                        sweep_surface, verify_conservation, verify_relation_over_time)
from .linalg import EigenDecomposition, dagger, eigh_batch, exp_unitary, hermitian_eigen, kron
from .spin import (Form, HamiltonianCoefficients, NamedHamiltonian, Observable, expectation,
                   hamiltonian_from_coefficients, matches_form, named_hamiltonian, spin_tensor,
                   total_spin_squared, total_spin_z)
from .states import (DensityMatrix, FamilyParams, MixedInitialState, PureInitialState, build_family,
                     classify_family, mixed_initial, pure_initial, validate_density_matrix)

__version__ = "0.1.0"
