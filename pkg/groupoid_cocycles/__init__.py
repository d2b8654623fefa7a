"""
groupoid_cocycles.

Verification of GNS constructions, correspondences and Dirichlet forms on
finite groupoids.
"""

__version__ = "0.1.0"
