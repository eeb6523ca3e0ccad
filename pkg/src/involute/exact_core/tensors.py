"""Monomial and exterior bases, comultiplication and the Koszul differential.

Symmetric powers S^d T* are modelled as homogeneous polynomials of degree d
in the coordinate covectors x_1..x_n; a monomial is an exponent tuple.
Exterior powers are indexed by strictly increasing index tuples.

Tensor layout contract (used by every matrix in the package):

* ``S^d (x) W``: column ``mono * dim W + w`` -- the fiber index varies fastest.
* ``S^d (x) W (x) Lambda^i``: column ``(omega * dim S^d + mono) * dim W + w``,
  i.e. the exterior index is the slowest, so a subspace ``g (x) Lambda^i``
  is block diagonal with one copy of ``g`` per exterior basis element.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb, prod
from typing import NamedTuple

from .matrix import RationalMatrix

MultiIndex = tuple[int, ...]


def degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def _compositions(n: int, d: int) -> list[MultiIndex]:
    # lexicographically descending
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d, -1, -1):
        for rest in _compositions(n - 1, d - first):
            out.append((first,) + rest)
    return out


class SymBasis(NamedTuple):
    """Ordered monomial basis of S^d T* for dim T = n."""

    n: int
    d: int
    elements: tuple[MultiIndex, ...]
    index: dict

    def __len__(self) -> int:
        return len(self.elements)


class ExtBasis(NamedTuple):
    """Ordered basis of Lambda^i T*: increasing index tuples, lexicographic."""

    n: int
    i: int
    elements: tuple[tuple[int, ...], ...]
    index: dict

    def __len__(self) -> int:
        return len(self.elements)


@lru_cache(maxsize=None)
def sym_basis(n: int, d: int) -> SymBasis:
    if n < 1 or d < 0:
        raise ValueError(f"sym_basis needs n >= 1 and d >= 0, got n={n}, d={d}")
    elems = tuple(_compositions(n, d))
    return SymBasis(n, d, elems, {a: k for k, a in enumerate(elems)})


@lru_cache(maxsize=None)
def ext_basis(n: int, i: int) -> ExtBasis:
    if n < 1 or not 0 <= i <= n:
        raise ValueError(f"ext_basis needs 0 <= i <= n, got n={n}, i={i}")
    elems = tuple(combinations(range(n), i))
    return ExtBasis(n, i, elems, {w: k for k, w in enumerate(elems)})


def sym_dim(n: int, d: int) -> int:
    """dim S^d T* = binom(n + d - 1, d); zero for negative d."""
    if d < 0:
        return 0
    return comb(n + d - 1, d)


def comultiply(alpha: MultiIndex, l: int) -> list[tuple[MultiIndex, MultiIndex, int]]:
    """Split x^alpha into sum of coeff * x^beta (x) x^gamma with |beta| = l.

    This is the (l, |alpha| - l) component of the coproduct of the polynomial
    algebra in which every x_i is primitive, so coeff = prod binom(alpha_i, beta_i).
    Terms come out in the descending order of ``beta``.
    """
    if not 0 <= l <= sum(alpha):
        raise ValueError(f"cannot split degree {sum(alpha)} monomial with l={l}")
    return list(_comultiply(tuple(alpha), l))


@lru_cache(maxsize=None)
def _comultiply(alpha: MultiIndex, l: int) -> tuple:
    out = []
    for beta in sym_basis(len(alpha), l).elements:
        if all(b <= a for a, b in zip(alpha, beta)):
            gamma = tuple(a - b for a, b in zip(alpha, beta))
            out.append((beta, gamma, prod(comb(a, b) for a, b in zip(alpha, beta))))
    return tuple(out)


def wedge_insert(j: int, omega: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """dx_j ^ dx_omega as (sign, sorted index tuple), or None when j is in omega."""
    if j in omega:
        return None
    pos = sum(1 for o in omega if o < j)
    return (-1) ** pos, omega[:pos] + (j,) + omega[pos:]


def delta_image(n: int, alpha: MultiIndex, omega: tuple[int, ...]) -> list[tuple[int, MultiIndex, tuple[int, ...]]]:
    """delta(x^alpha (x) dx_omega) = sum_j alpha_j x^(alpha - e_j) (x) dx_j ^ dx_omega."""
    terms = []
    for j in range(n):
        if alpha[j] == 0:
            continue
        w = wedge_insert(j, omega)
        if w is None:
            continue
        sign, new_omega = w
        beta = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1:]
        terms.append((sign * alpha[j], beta, new_omega))
    return terms


@lru_cache(maxsize=64)
def delta_columns(n: int, d: int, i: int, fiber_dim: int) -> tuple:
    """Sparse columns of delta: S^d (x) W (x) Lambda^i -> S^(d-1) (x) W (x) Lambda^(i+1).

    Entry ``c`` is a tuple of ``(row, value)`` pairs for source column ``c``.
    """
    if d < 1:
        raise ValueError("delta needs symbol degree d >= 1")
    if not 0 <= i < n:
        raise ValueError(f"delta target exterior degree {i + 1} exceeds n={n}")
    src, tgt = sym_basis(n, d), sym_basis(n, d - 1)
    ext_src, ext_tgt = ext_basis(n, i), ext_basis(n, i + 1)
    m = fiber_dim
    cols = []
    for omega in ext_src.elements:
        for alpha in src.elements:
            images = [
                ((ext_tgt.index[om] * len(tgt) + tgt.index[beta]) * m, c)
                for c, beta, om in delta_image(n, alpha, omega)
            ]
            for w in range(m):
                cols.append(tuple((r + w, c) for r, c in images))
    return tuple(cols)


def delta_matrix(n: int, d: int, i: int, fiber_dim: int) -> RationalMatrix:
    """Matrix of the Koszul (de Rham symbol) differential delta.

    Rows index S^(d-1) (x) W (x) Lambda^(i+1), columns S^d (x) W (x) Lambda^i,
    both in the package tensor layout.
    """
    cols = delta_columns(n, d, i, fiber_dim)
    nrows = sym_dim(n, d - 1) * fiber_dim * comb(n, i + 1)
    return RationalMatrix.from_sparse_columns(nrows, cols)
