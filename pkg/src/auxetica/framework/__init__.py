from .model import (
    EdgeOrbit,
    PeriodicFramework,
    QuotientGraph,
    Violation,
    canonical_edge_key,
    constraint_jacobian_matrix,
    dof,
    gram,
    numeric_rank,
    pair_classes,
    pairwise_distances,
    pairwise_distances_at,
    sublattice_relax,
    validate,
)
from .catalog import (
    CATALOG_TAGS,
    CatalogId,
    catalog,
    cristobalite_gram,
    cristobalite_gram_dot,
    quartz_gram,
    quartz_gram_dot,
)

__all__ = [
    "CATALOG_TAGS",
    "CatalogId",
    "EdgeOrbit",
    "PeriodicFramework",
    "QuotientGraph",
    "Violation",
    "canonical_edge_key",
    "catalog",
    "constraint_jacobian_matrix",
    "cristobalite_gram",
    "cristobalite_gram_dot",
    "dof",
    "gram",
    "numeric_rank",
    "pair_classes",
    "pairwise_distances",
    "pairwise_distances_at",
    "quartz_gram",
    "quartz_gram_dot",
    "sublattice_relax",
    "validate",
]
