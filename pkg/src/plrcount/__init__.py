"""Exact enumeration of partial Latin rectangles.

Four independent counting routes (exhaustive backtracking, class-merged
row DP, block/chromatic assembly, inclusion-exclusion polynomials) plus
Burnside class counting, cross-verified against each other and against
published tables.
"""

from .core import (
    CycleStructure,
    Isotopism,
    Paratopism,
    PartialLatinRectangle,
    Permutation,
    Shape,
    TriPoly,
    UniPoly,
    WeightDistribution,
    apply_paratopism,
    cycle_structure,
    cycle_structures,
    permutations_with_structure,
)

__all__ = [
    "CycleStructure",
    "Isotopism",
    "Paratopism",
    "PartialLatinRectangle",
    "Permutation",
    "Shape",
    "TriPoly",
    "UniPoly",
    "WeightDistribution",
    "apply_paratopism",
    "cycle_structure",
    "cycle_structures",
    "permutations_with_structure",
]

__version__ = "0.1.0"
