"""Wick squares of a free bosonic field on truncated Fock spaces, with certificates."""
from .errors import (ConfigurationError, CoverageError, DegenerateStateError, EndpointError,
                     InputError, MemoryGuardError, ModelError, PreconditionError, SpectralError,
                     TruncationError, WickFockError)
from .fock import (BlockOperator, FockTruncation, FockVector, OneParticleSpace, OperatorSum,
                   annihilation_op, antinormal_monomial, compress, creation_op, matrix, nest_bound,
                   normal_monomial, number_op, sym_basis)
from .quasifree import QuotientMap, TwoPointMatrix, embed, field_op, one_particle_space
from .models import (ChainModel, OscillatorModel, SpaceTimeGrid, TimeGrid, chain_two_point,
                     finite_difference, oscillator_two_point, sum_of_squares_smearing)
from .wick import (SmearingSpec, SmearingTerm, WickOperator, compression_T1, kernel_from_matrix,
                   kernel_from_smearing, second_quantization, wick_square_operator)
from .regularization import (build_cutoff_family, cutoff_kernels, graph_limit_experiment,
                             resolvent, squares_partition)
from .diagnostics import (KonradyConstants, commutator_identities, konrady_certificate,
                          konrady_constant, nelson_certificate, t1_scan, truncation_stability,
                          wuest_certificate)
from .report import CertificateReport

__version__ = "0.1.0"
