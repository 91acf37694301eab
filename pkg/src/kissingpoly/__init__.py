"""Multiprecision toolkit for polynomials orthogonal w.r.t. exp(i omega x) on [-1, 1]."""
__version__ = "0.1.0"
