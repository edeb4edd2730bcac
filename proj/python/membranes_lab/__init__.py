"""Numerical laboratory for the N-membranes obstacle system.

Thin Python layer over the C++ core: ordered-cone projected SOR solves,
Weiss-type energy monotonicity sweeps, blow-up rescaling and half-space
classification on disk grids.
"""

from membranes_lab._core import (
    BlowupProfile,
    Domain,
    Stack,
    build_domain,
    classify,
    contact_multiplicity,
    example46_boundary,
    example46_stack,
    find_blowup_base,
    homogeneity_defect,
    normalize_average,
    optimal_omega,
    pava_project,
    rescale,
    solve,
    stack_from_values,
    weiss_energy,
    weiss_of_category,
    weiss_sweep,
)

__all__ = [
    "BlowupProfile",
    "Domain",
    "Stack",
    "build_domain",
    "classify",
    "contact_multiplicity",
    "example46_boundary",
    "example46_stack",
    "find_blowup_base",
    "homogeneity_defect",
    "normalize_average",
    "optimal_omega",
    "pava_project",
    "rescale",
    "solve",
    "stack_from_values",
    "weiss_energy",
    "weiss_of_category",
    "weiss_sweep",
]

__version__ = "0.1.0"
