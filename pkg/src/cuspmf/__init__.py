"""Exact combinatorics and matrix factorizations of degenerate cusps.

Band/loop words, their conversion and normalization, the canonical matrix
factorizations of xyz, the mirror matrices of immersed loops, the
Macaulayfication resolution pipeline, the strip-counting oracle and the
x^3 + y^2 + xyz family, all over exact arithmetic.
"""

from .ring import LaurentLambda, Poly, PolyMatrix, RatFunc
from .words import BandDatum, CyclicWord, LoopDatum, UnitMonomial

__all__ = [
    "BandDatum", "CyclicWord", "LaurentLambda", "LoopDatum", "Poly",
    "PolyMatrix", "RatFunc", "UnitMonomial",
]

__version__ = "0.1.0"
