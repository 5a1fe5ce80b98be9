"""Orbifold Landau-Ginzburg invariants of invertible polynomials with diagonal and permutation symmetries."""

__version__ = "0.1.0"
