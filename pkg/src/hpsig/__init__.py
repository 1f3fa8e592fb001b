"""Simplicial Hilbert-Poincare complexes, signatures and controlled operators."""

from .errors import HpsigError
from .simplicial import (
    FundamentalCycle,
    ManifoldCertificate,
    OrientedSimplicialComplex,
    barycentric_subdivision,
    boundary_matrix,
    bounded_geometry_constant,
    build_complex,
    certify_manifold,
    double_along_boundary,
    orientation_reverse,
    product,
)
from .covers import CoverComplex, FiniteGroupData, build_cover, holonomy, twisted_boundary
from .chain import BasedChainComplex, dual, harmonic_basis, homology_rank, verify_chain_map
from .poincare import HilbertPoincareComplex, build_hp, cap_duality, symmetrize, validate_hp
from .signature import (
    MultiSignature,
    bordism_check,
    cup_oracle_signature,
    multisignature,
    product_epsilon,
    signature_complex,
    trace_value,
    verify_product_signature,
)

__version__ = "0.1.0"
