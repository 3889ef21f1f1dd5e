"""Classification, normal forms and unfoldings of real linear maps in
eigenspaces of order-two (anti)-automorphisms of the matrix algebra."""
from .decomp import InvariantBlock, JCDecomposition, invariant_blocks, jc_decompose
from .errors import (ClassificationError, IllConditionedSpectrumError,
                     IncompatibleStructuresError, InvalidBlockError, InvalidStructureError,
                     MalformedInputError, NumericFailureError, StructlinError)
from .linalg import DEFAULT_TOL, EigenvalueClass, Subspace, eigen_cluster, rank_kernel
from .normalform import (BlockLabel, ClassificationReport, classify, classify_block,
                         orbits_equivalent, reconstruct, type_of)
from .reduction import ReducedForm, reduce_block, standardize_bilinear
from .structure import (ANTI, AUT, EigenspaceSpec, StructureMap, apply_gamma, eigenspace_basis,
                        lie_algebra_basis, membership, normalize_structure, orthogonalize_family,
                        project)
from .unfolding import (CentralizerBasis, UnfoldingFamily, centralizer_basis,
                        miniversal_unfolding, sweep_eigenvalues)

__version__ = "0.1.0"
