"""Elliptic and K-theoretic stable envelopes of cyclic quiver varieties."""

from .errors import (
    DivergenceError,
    DomainError,
    EllStabError,
    GenericityError,
    NotQuasiPeriodicError,
    PoleError,
    ValidationError,
)
from .kernels import BACKEND
from .monomial import Monomial, q, t1, t2, u, x, z
from .parse import parse_expr, parse_monomial
from .partitions import (
    FixedPoint,
    LabeledPartition,
    Tree,
    admissible_trees,
    enumerate_fixed_points,
    kappa,
    l_subgraphs,
    subtree_boxes,
)
from .quiver import (
    Chamber,
    QuiverData,
    chamber_example,
    fixed_points,
    linear_quiver,
    order_fixed_points,
    parse_arrows,
    parse_chamber,
    parse_fixed_point,
    pol_example,
    polarization,
    restrict_map,
    split_attracting,
    tangent_space_at,
    virtual_tangent_space,
)
from .stab import k_stab, k_stab_matrix, quasiperiods_of_stab, stab, stab_matrix, thom_class
from .theta import (
    ThetaExpr,
    eval_numeric,
    equivalent,
    normal_form,
    phi,
    phi2,
    q_limit,
    quasi_period_factor,
    substitute,
    theta,
)

__version__ = "0.1.0"
