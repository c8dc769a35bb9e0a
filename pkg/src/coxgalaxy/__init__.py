"""Coxeter systems as complete edge-labelled graphs, and moves between them."""

from .classify import (
    BasicSubset,
    Compatible,
    Incompatible,
    NotIrreducible,
    SphericalType,
    basic_subsets,
    group_order,
    is_directly_decomposable_irreducible,
    is_spherical,
    matching_filter,
    spherical_type,
    visible_splittings,
)
from .coxsys import (
    INF,
    CoxeterError,
    CoxeterMatrix,
    GalaxyVertex,
    InvalidMatrix,
    MalformedInput,
    abelianization_rank,
    are_graph_isomorphic,
    canonical_form,
    dihedral,
    dump_system,
    irreducible_components,
    parse_system,
    subsystem,
    triangle,
)
from .galaxy import (
    Budget,
    BudgetExceeded,
    GalaxyFragment,
    Isomorphic,
    NonIsomorphic,
    Unknown,
    decide_isomorphic,
    explore,
    iso_rank_le3,
    spine,
    starlet,
    vertical_core,
)
from .moves import (
    InvalidMove,
    MoveRecord,
    PseudoTransposition,
    TwistDescriptor,
    apply_twist,
    blow_up,
    enumerate_twists,
    find_blow_downs,
    find_pseudo_transpositions,
    is_twist_trivial,
    statistics,
)
from .oracle import (
    CapExceeded,
    ExceedsCap,
    Finite,
    element_order,
    enumerate_group,
    normal_form,
    verify_generating_set,
)

__version__ = "0.1.0"
