"""Exact polynomial toolkit for Nambu structures and their commutativity."""

from .commute import (
    CommutePair,
    HighWitness,
    LieAction,
    WitnessStep,
    actions_commute,
    canonical_blade,
    common_hamiltonian_check,
    commute_degenerate,
    commute_family,
    commute_high,
    commute_low,
    is_integrable_presentation,
    lie_action_nambu,
    reduce,
    regime,
    verify_normal_form,
)
from .errors import *  # noqa: F401,F403
from .exterior import (
    CoordinateMap,
    Form,
    MultiVector,
    contract,
    exterior_derivative,
    interior,
    inverse_dual,
    lie_bracket,
    lie_derivative,
    pushforward,
    schouten,
    volume_dual,
    wedge,
    wedge_all,
)
from .polyring import (
    Context,
    Factorization,
    Polynomial,
    divides,
    exact_quotient,
    gcd,
    gcd_many,
    is_squarefree,
    squarefree_decomposition,
    term_limit,
)
from .structure import (
    MuVerdict,
    NambuStructure,
    SingularLocus,
    associated_nambu,
    hamiltonian,
    is_cit,
    is_first_integral,
    is_nambu,
    is_tangent_vector,
    mu_contains,
    primitive_part,
    singular_locus,
)
from .textio import ParseError, SourceSpan, from_json, parse, serialize

__version__ = "0.1.0"
