"""Nodes, combinatorial types and certificates for quintic spectrahedral symmetroids."""
from .classify import (AmbiguousClassification, CombType, NodeSolution, NongenericPencil, Tolerances,
                       admissible_types, classify_endpoints, comb_type, eta, pd_witness_search, radon_hurwitz)
from .pencil import Pencil, PencilParseError, format_pencil, parse_pencil
from .polysys import Chart, NodeSystem

__version__ = "0.1.0"

__all__ = [
    "AmbiguousClassification", "Chart", "CombType", "NodeSolution", "NodeSystem", "NongenericPencil",
    "Pencil", "PencilParseError", "Tolerances", "admissible_types", "classify_endpoints", "comb_type",
    "eta", "format_pencil", "parse_pencil", "pd_witness_search", "radon_hurwitz",
]
