"""Averaged characteristic polynomials of Gaussian and chiral Gaussian ensembles with a source."""

__version__ = "0.1.0"
