"""
Core numerics
=============

Lattice transforms, window profiles, coverings, norms and operators.
"""
