"""Exact computations with exterior powers of elementary groups over finite rings."""

from .engine import ActionDomain, DomainCapExceeded, StabilizerChain, generate_group
from .exterior import compound, distance, index_sets, lex_rank, sign_shuffle, unrank, wedge_transvection
from .forms import (
    build_form,
    build_form_ideal,
    form_image,
    membership_GY_bar,
    membership_Gf,
    membership_Gf_bar,
    numeric_invariance_check,
    symbolic_invariance_check,
    transform_form,
)
from .level import (
    Net,
    OvergroupInstance,
    check_admissible,
    compute_level,
    congruence_member,
    generate_EwedgeE,
    normalizer_evidence,
    parse_net,
    sandwich_check,
    wedge_E_generators,
)
from .liealg import lie_dim, lie_dim_Gf, lie_dim_Gf_bar, lie_dim_GY_bar
from .linalg import Matrix, Transvection, det_division_free, transvection_matrix
from .ring import PrincipalIdeal, RingContext, RingElement, ideal_normalize, ideal_ops, parse_ring

__version__ = "0.1.0"
