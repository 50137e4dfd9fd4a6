"""Intersecting odd-set families and maximal commutative subalgebras of the Grassmann algebra G(n)."""

from .constructions import (
    blocks_b,
    c49,
    cone47,
    cone_singleton,
    delta47,
    family_example2,
    family_example3,
    fano,
)
from .grassmann import (
    GradedElement,
    SignedMonomial,
    commute_check,
    family_to_dimension,
    monomial_product,
    subalgebra_commutes_iff_intersecting,
    verify_metabelian_identity,
)
from .predicates import (
    is_algebraic_system,
    is_bicommutative,
    is_commutative_system,
    is_maximal_system,
    verify_macs,
)
from .setcore import (
    SetFamily,
    SubsetMask,
    cone_closure,
    enumerate_subsets,
    join_one,
    mask_from_indices,
    set_algebra,
)

__version__ = "0.1.0"
