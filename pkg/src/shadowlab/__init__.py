"""Exact tools for planar shadows of rational polytopes.

Admissibility of projection planes, certified single-degeneration walks
between planes, and the edge-2-face compensation test for
equiprojectivity, all over exact rational arithmetic.
"""

__version__ = "0.1.0"
