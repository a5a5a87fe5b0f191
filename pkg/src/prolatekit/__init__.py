"""prolatekit: finite-matrix certificates for prolate operators, truncated
Fourier transforms, and modular entropy operators.

The toolkit realizes three families of objects as finite matrices and
certifies, by computation, the identities that connect them:

* the prolate operator W(c) = div (1-r^2) grad - c^2 r^2 on the unit
  ball, its Legendre part L, and their Galerkin forms (``prolate1d``,
  ``sectors``);
* the truncated Fourier transform and the sinc/Bessel angle operators it
  squares to, together with the commutation ("lucky accident")
  certificates (``prolate1d``, ``sectors``);
* standard subspaces with their Tomita modular data, cutting
  projections, and entropy operators, including the field/momentum
  duality model (``modular``);
* Born / parabolic / Legendre / prolate entropies and their balance and
  wave-packet identities (``entropy``).
"""

from .entropy import (
    BallFunction,
    CauchyData,
    EntropyReport,
    entropy_report,
    general_radius_report,
    wave_entropy,
)
from .modular import (
    ComplexSpace,
    DualityModel,
    StandardSubspace,
    block_structure_certificate,
    build_duality_model,
    canonical_space,
    entropy_operator,
    make_standard_subspace,
    tomita_data,
    vector_entropy,
)
from .numerics import QuadratureRule, SymmetricSpectrum, gauss_rule, generalized_sym_eig, sym_eig
from .prolate1d import (
    KernelOperator,
    ProlateMatrix1D,
    angle_operator_nystrom,
    assemble_prolate_matrix,
    commutation_certificate,
    fourier_commutation_fullline,
    prolate_eigenpairs,
    truncated_fourier_nystrom,
)
from .sectors import (
    RadialForms,
    SpectralSector,
    assemble_radial_forms,
    hermiticity_witness,
    nd_commutation_certificate,
    sector_hankel_nystrom,
)

__version__ = "0.1.0"

__all__ = [
    "BallFunction",
    "CauchyData",
    "ComplexSpace",
    "DualityModel",
    "EntropyReport",
    "KernelOperator",
    "ProlateMatrix1D",
    "QuadratureRule",
    "RadialForms",
    "SpectralSector",
    "StandardSubspace",
    "SymmetricSpectrum",
    "angle_operator_nystrom",
    "assemble_prolate_matrix",
    "assemble_radial_forms",
    "block_structure_certificate",
    "build_duality_model",
    "canonical_space",
    "commutation_certificate",
    "entropy_operator",
    "entropy_report",
    "fourier_commutation_fullline",
    "gauss_rule",
    "general_radius_report",
    "generalized_sym_eig",
    "hermiticity_witness",
    "make_standard_subspace",
    "nd_commutation_certificate",
    "prolate_eigenpairs",
    "sector_hankel_nystrom",
    "sym_eig",
    "tomita_data",
    "truncated_fourier_nystrom",
    "vector_entropy",
    "wave_entropy",
]
