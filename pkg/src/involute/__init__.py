"""Exact Spencer cohomology, Cartan characters and Hilbert polynomials of PDE symbols."""

from .exact_core import BACKEND

__version__ = "0.1.0"
