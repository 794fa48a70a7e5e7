"""Exact verification of spherical adjunctions over prime fields."""

from .complexes import ChainComplex, ChainMap, homology, is_qis
from .homotopy import check_24_condition1, check_24_condition2, hocolim, holim, sphere_twist
from .linalg import Matrix
from .posets import FinitePoset, PosetDiagram, constant_diagram, sphere_poset

__version__ = "0.1.0"

__all__ = [
    "ChainComplex",
    "ChainMap",
    "FinitePoset",
    "Matrix",
    "PosetDiagram",
    "check_24_condition1",
    "check_24_condition2",
    "constant_diagram",
    "hocolim",
    "holim",
    "homology",
    "is_qis",
    "sphere_poset",
    "sphere_twist",
]
