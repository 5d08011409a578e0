"""Exact computation of cohomology and K-rings of torus manifolds and torus-manifold bundles."""

from .baserings import BaseCohomRing, BaseKRing, load_base
from .bundlerings import (
    BundleNormalForm,
    build_R,
    build_RK,
    emit_conjecture_SJ,
    face_acyclic_ring,
    multiply_R,
    reduce_R,
    reduce_RK,
    verify_rank_R,
    verify_rank_RK,
)
from .charpair import CharacteristicPair, Fan, GeneralFacePoset, from_fan, load_input, validate
from .exactalg import IntMatrix, IntPoly, LaurentPoly, snf
from .facering import graded_rank_and_basis, reduce_H, sym_decompose
from .kfacering import (
    RestrictionTuple,
    augment_to_KX,
    check_compatibility,
    default_rt_basis,
    interpolate,
    iota,
    k_presentation,
    phi,
    phi_restrict,
    reduce_KX,
    rt_decompose,
    zeta_at_vertex,
)

__version__ = "0.1.0"

__all__ = [
    "BaseCohomRing",
    "BaseKRing",
    "load_base",
    "BundleNormalForm",
    "build_R",
    "build_RK",
    "emit_conjecture_SJ",
    "face_acyclic_ring",
    "multiply_R",
    "reduce_R",
    "reduce_RK",
    "verify_rank_R",
    "verify_rank_RK",
    "CharacteristicPair",
    "Fan",
    "GeneralFacePoset",
    "from_fan",
    "load_input",
    "validate",
    "IntMatrix",
    "IntPoly",
    "LaurentPoly",
    "snf",
    "graded_rank_and_basis",
    "reduce_H",
    "sym_decompose",
    "RestrictionTuple",
    "augment_to_KX",
    "check_compatibility",
    "default_rt_basis",
    "interpolate",
    "iota",
    "k_presentation",
    "phi",
    "phi_restrict",
    "reduce_KX",
    "rt_decompose",
    "zeta_at_vertex",
]
