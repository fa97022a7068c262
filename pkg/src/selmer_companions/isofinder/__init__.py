"""Constructing and certifying isomorphisms E1[m] = E2[m].

``families`` specialises universal families (m = 3, 4, 5); ``explicit``
builds a polynomial map on x-coordinates at a split prime and certifies it.
"""

from .explicit import (
    IsoCertificate, TwistWitness, certify_iso, character_basis, compute_phi,
    eliminate_twist, find_split_prime, run_a2, search_phi,
)
from .families import (
    FamilyData, a1_search, a1_test_member, build_family, family_j,
    find_specializations, load_family,
)

__all__ = [
    "IsoCertificate", "TwistWitness", "certify_iso", "character_basis",
    "compute_phi", "eliminate_twist", "find_split_prime", "run_a2", "search_phi",
    "FamilyData", "a1_search", "a1_test_member", "build_family", "family_j",
    "find_specializations", "load_family",
]
