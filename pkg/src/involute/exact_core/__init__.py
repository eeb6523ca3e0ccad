"""Exact rational linear algebra and symmetric/exterior tensor bases."""

from . import _backend
from .matrix import (
    RationalMatrix,
    format_rational,
    kernel_from_rref,
    parse_rational,
    rank_kernel,
)
from .tensors import (
    ExtBasis,
    MultiIndex,
    SymBasis,
    comultiply,
    degree,
    delta_columns,
    delta_matrix,
    ext_basis,
    sym_basis,
    sym_dim,
)

BACKEND = _backend.NAME

__all__ = [
    "BACKEND",
    "ExtBasis",
    "MultiIndex",
    "RationalMatrix",
    "SymBasis",
    "comultiply",
    "degree",
    "delta_columns",
    "delta_matrix",
    "ext_basis",
    "format_rational",
    "kernel_from_rref",
    "parse_rational",
    "rank_kernel",
    "sym_basis",
    "sym_dim",
]
