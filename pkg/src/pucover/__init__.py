"""Covers, star refinements and exact-rational partitions of unity on finite spaces."""

from .chain import (
    CoverSequence,
    RhoTable,
    chain_metric,
    quotient,
    rho,
    small_pou_from_sequence,
    validate_sequence,
)
from .discretize import (
    INF,
    alpha,
    discretize,
    enlarge,
    point_finite_shrinking,
    pou_from_sigma_discrete,
    sigma_discretize,
    sigma_refinement_from_pou,
    star_discretize,
)
from .generators import (
    GroupTable,
    ball_cover_sequence,
    cyclic_group,
    dihedral_group,
    group_cover_sequence,
    maximal_cover_sequence,
    random_cover,
)
from .metric import MetricTable
from .pou import (
    EmbeddingMap,
    FinitePartition,
    PartitionOfUnity,
    SimplicialComplex,
    carriers,
    carriers_basis_check,
    combine,
    derivative,
    is_small,
    l1_metric,
    metric_urysohn,
    nerve,
    normalize,
    urysohn_embed,
)
from .space import (
    Cover,
    FiniteSpace,
    PreconditionError,
    SetFamily,
    closure,
    is_discrete_family,
    is_point_finite,
    refines,
    star,
    star_basis_check,
    star_cover,
    star_refines,
    validate_space,
)

__version__ = "0.1.0"
