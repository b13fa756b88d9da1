"""Desk-scale algebra-valued models for paraconsistent set theories.

Finite Heyting algebras, F-structures with non-deterministic negation,
bounded-rank name universes, truth-value evaluation, ZF-axiom checks, a
Hilbert-style proof kernel and brute-force countermodel search.
"""

from .algebra import (
    FiniteHeytingAlgebra,
    FiniteLattice,
    boolean_algebra,
    chain,
    derive_heyting,
    enumerate_heyting,
    is_boolean,
    validate_lattice,
)
from .errors import CapExceeded, PstError
from .fidel import FStructure, is_leibniz_comega, is_substructure, saturate, validate_comega, validate_n4

__all__ = [
    "CapExceeded",
    "FStructure",
    "FiniteHeytingAlgebra",
    "FiniteLattice",
    "PstError",
    "boolean_algebra",
    "chain",
    "derive_heyting",
    "enumerate_heyting",
    "is_boolean",
    "is_leibniz_comega",
    "is_substructure",
    "saturate",
    "validate_comega",
    "validate_lattice",
    "validate_n4",
]
