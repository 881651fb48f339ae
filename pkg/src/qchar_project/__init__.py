"""Exact q-characters for the Borel subalgebra of quantum affine sl2."""

__version__ = "0.1.0"
