"""Quantum relative entropy, trace distance and sharp continuity bounds.

Dense complex Hermitian linear algebra is done with a self-contained cyclic
Jacobi eigensolver, compiled with numba when available.  Set
``ENTROBOUND_BACKEND=numpy`` to force the pure-numpy kernels.
"""

from ._accel import BACKEND
from .bounds import (BoundInput, LemmaThreeInput, bound_corollary1, bound_corollary2,
                     bound_proposition, bound_theorem, equality_states_corollary2,
                     equality_states_theorem, extremal_pair_proposition, feasibility_gap,
                     lemma3_slack)
from .entropy import (RegularisationConfig, check_density, regularised_relative_entropy,
                      relative_entropy, trace_distance, von_neumann_entropy)
from .errors import (ConvergenceError, DomainError, EntroboundError, InfeasibleError,
                     MatrixFormatError)
from .hermitian import (EigenDecomposition, HermitianMatrix, JordanParts, eigh, is_psd,
                        jordan_decompose, load_matrix, matrix_log, min_eigenvalue,
                        operator_norm, save_matrix, trace_norm)
from .integrals import (LinearPath, QuadratureSpec, log_quadrature,
                        relative_entropy_path_integral, t_super, t_super_quadrature)
from .sampling import (SamplerConfig, sample_density_matrix, sample_equal_trace_pd_pair,
                       sample_traceless_hermitian)
from .sharpness import (DiagonalFamily, SlackRecord, fuzz_slack,
                        maximize_entropy_at_constraints, sharpness_report)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
