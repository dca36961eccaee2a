"""Tomographic reconstruction kernels for finite, spin, photon-number and symplectic schemes."""

from .operator_space import (
    OperatorMatrix,
    RankOneProjector,
    fidelity,
    generator_basis,
    hs_inner,
    mat_to_vec,
    projector_from_vector,
    random_density_matrix,
    vec_to_mat,
)
from .special_functions import HalfInteger, wigner_3j, wigner_D, wigner_small_d
from .tomographic_sets import (
    GramKernel,
    Tomogram,
    TomographicSet,
    gram_schmidt,
    identity_check,
    is_minimal_tomographic_set,
    reconstruct,
    tomogram,
)

__version__ = "0.1.0"
