"""Transform-method solvers for the half-line Schrodinger equation and the
quarter-plane Laplace equation with a potential, with finite-difference oracles."""

from .completeness import (Reconstruction, completeness_reconstruct, completeness_sine_analogue,
                           residue_kernel)
from .config import ConfigError, load_config
from .errors import (BoundStatePresent, DivergentMoment, IntegrationFailure, LinearSolveFailure,
                     NearZeroWavenumber, OverflowRisk, PoleOnContour, PsiXZeroAtOrigin,
                     PsiZeroAtOrigin, QuadratureFailure, UnitransError)
from .fields import FieldSample, rel_l2
from .jost import (JostSolver, find_bound_states, jost_phi, jost_Phi, jost_psi, scattering_a,
                   scattering_b)
from .laplace import (LaplaceSpectralFns, algebraic_boundary_transform, algebraic_candidate,
                      discarded_terms, exponential_transform, global_relation_residual_laplace,
                      laplace_spectral_fns, mu_functions_check, rh_jump_residual,
                      solve_algebraic)
from .oracles import (LaplaceOracleConfig, OracleConfig, crank_nicolson_halfline,
                      exact_free_gaussian, laplace_fd_quarterplane)
from .potentials import (LaplaceData, Potential, SchrodingerData, Sech2Params, from_callable,
                         from_table, make_sech2, validate_moment, zero_potential)
from .schrodinger import (SchrodingerSolver, classical_dirichlet, dirichlet_via_sine_analogue,
                          reconstruct_deformed, reconstruct_field, reconstruct_longtime,
                          spectral_density_dirichlet, spectral_density_neumann)

__version__ = "0.1.0"
