"""Dynamical Lie algebra of the periodic transverse-field Ising chain.

Exact Pauli-string algebra, cyclic symmetrization, the closure algorithm,
the center/su(2) decomposition, a dense-matrix oracle and the three-site
reachability example.
"""

from .closure import (
    ClosureResult,
    DlaBasis,
    GeneratorSet,
    commutator_table,
    compute_closure,
    generators,
    hamiltonian,
    named_basis,
    span_equal,
    table_closed_form,
)
from .errors import (
    DlaError,
    InconsistencyError,
    InvarianceError,
    RankInstabilityError,
    SizeCapError,
    StructuralError,
)
from .pauli import OperatorElement, PauliString, Symbol, element_bracket, element_inner, string_bracket
from .structure import center, center_by_solving, decompose, ideal, roots, verify_ideal
from .symmetry import OrbitKey, SymmetricCoordinates, canonical, orbit, rotate, symmetrize, to_coordinates

__version__ = "0.1.0"

__all__ = [
    "ClosureResult", "DlaBasis", "GeneratorSet", "commutator_table", "compute_closure", "generators",
    "hamiltonian", "named_basis", "span_equal", "table_closed_form",
    "DlaError", "InconsistencyError", "InvarianceError", "RankInstabilityError", "SizeCapError", "StructuralError",
    "OperatorElement", "PauliString", "Symbol", "element_bracket", "element_inner", "string_bracket",
    "center", "center_by_solving", "decompose", "ideal", "roots", "verify_ideal",
    "OrbitKey", "SymmetricCoordinates", "canonical", "orbit", "rotate", "symmetrize", "to_coordinates",
]
