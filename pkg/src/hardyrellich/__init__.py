"""Admissible weights for the second-order Hardy-Rellich inequality: rearrangements, norms, criteria, checks."""

from .admissibility import AdmissibilityVerdict, Criterion, Status, UnsupportedGeometry, classify
from .profiles import DomainError, DomainSpec, RadialWeight, catalog_lookup, catalog_names
from .rearrange import RearrangedProfile, rearrangement

__all__ = [
    "AdmissibilityVerdict", "Criterion", "Status", "UnsupportedGeometry", "classify",
    "DomainError", "DomainSpec", "RadialWeight", "catalog_lookup", "catalog_names",
    "RearrangedProfile", "rearrangement",
]
