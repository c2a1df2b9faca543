"""Numerical laboratory for closed G2-structures, Laplacian-flow shrinkers,
and the weighted-estimate experiments built on top of them."""

__version__ = "0.1.0"
