"""Crossed simplicial groups, Delta-G-sets, subdivisions and exact homology."""
from .csg import CrossedFamily, GroupElement, SimplicialOperator, CrossedMorphism
from .dgset import DGSet, DGMap
from .smith import BACKEND

__all__ = ["CrossedFamily", "GroupElement", "SimplicialOperator", "CrossedMorphism",
           "DGSet", "DGMap", "BACKEND"]
__version__ = "0.1.0"
