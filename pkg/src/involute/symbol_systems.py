"""Principal symbols, their prolongations and the graded symbolic system.

A symbol of order k is a linear map S^k T* (x) N -> V stored as a matrix in
the package tensor layout (see ``exact_core.tensors``). The symbolic system
g = (+) g_t consists of the full spaces S^t T* (x) N below the order and of
the kernels of the prolonged symbols from the order on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, lcm

from .exact_core import (
    RationalMatrix,
    comultiply,
    delta_columns,
    kernel_from_rref,
    sym_basis,
    sym_dim,
)


class WellDefinednessError(RuntimeError):
    """delta applied to the stored basis of g_t left g_(t-1): a basis bug."""


@dataclass(frozen=True)
class SymbolMap:
    """Principal symbol S^k T* (x) N -> V of a linear operator at a point."""

    n: int
    order: int
    source_dim: int
    target_dim: int
    matrix: RationalMatrix
    name: str = ""

    def __post_init__(self):
        expected = (self.target_dim, sym_dim(self.n, self.order) * self.source_dim)
        if self.matrix.shape != expected:
            raise ValueError(
                f"symbol {self.name or '?'}: matrix shape {self.matrix.shape} does not match "
                f"(n={self.n}, k={self.order}, dim N={self.source_dim}, dim V={self.target_dim}) -> {expected}"
            )

    @property
    def source_total(self) -> int:
        return self.matrix.ncols

    def rank(self) -> int:
        return self.matrix.rank()


def prolong(s: SymbolMap, l: int) -> SymbolMap:
    """The l-th prolongation S^(k+l) (x) N -> S^l (x) V.

    x^alpha (x) w  |->  sum binom(alpha, beta) x^beta (x) sigma(x^gamma (x) w)
    over the splittings alpha = beta + gamma with |beta| = l.
    """
    if l < 0:
        raise ValueError("prolongation order must be nonnegative")
    if l == 0:
        return s
    n, k, m, v = s.n, s.order, s.source_dim, s.target_dim
    src = sym_basis(n, k + l)
    low, top = sym_basis(n, l), sym_basis(n, k)
    scols = s.matrix.sparse_columns()
    cols = []
    for alpha in src.elements:
        parts = [(low.index[beta] * v, top.index[gamma] * m, c) for beta, gamma, c in comultiply(alpha, l)]
        for w in range(m):
            col: dict[int, int] = {}
            for row_off, col_off, c in parts:
                for r, x in scols[col_off + w]:
                    col[row_off + r] = col.get(row_off + r, 0) + c * x
            cols.append([(r, x) for r, x in col.items() if x])
    mat = RationalMatrix.from_sparse_columns(len(low) * v, cols, s.matrix.denominator)
    return SymbolMap(n, k + l, m, len(low) * v, mat, f"{s.name}^({l})" if s.name else "")


def direct_sum(a: SymbolMap, b: SymbolMap) -> SymbolMap:
    """Block-diagonal symbol on N_a (+) N_b -> V_a (+) V_b.

    The fiber of the sum lists the basis of N_a before that of N_b, so source
    columns interleave per monomial according to the tensor layout.
    """
    if a.n != b.n or a.order != b.order:
        raise ValueError(f"direct sum needs equal n and order, got {(a.n, a.order)} and {(b.n, b.order)}")
    ma, mb = a.source_dim, b.source_dim
    m, v = ma + mb, a.target_dim + b.target_dim
    nmono = sym_dim(a.n, a.order)
    acols, bcols = a.matrix.sparse_columns(), b.matrix.sparse_columns()
    d = lcm(a.matrix.denominator, b.matrix.denominator)
    fa, fb = d // a.matrix.denominator, d // b.matrix.denominator
    cols = []
    for mono in range(nmono):
        for w in range(ma):
            cols.append([(r, fa * x) for r, x in acols[mono * ma + w]])
        for w in range(mb):
            cols.append([(a.target_dim + r, fb * x) for r, x in bcols[mono * mb + w]])
    mat = RationalMatrix.from_sparse_columns(v, cols, d)
    name = f"{a.name}+{b.name}" if a.name and b.name else ""
    return SymbolMap(a.n, a.order, m, v, mat, name)


@dataclass(frozen=True)
class SymbolicSystem:
    """g_0, ..., g_T of a pure order-k system.

    ``kernels[t]`` (t >= k) holds a basis of g_t as matrix columns and
    ``free[t]`` the free column that carries each basis vector; below the
    order g_t is the whole space and nothing is stored.
    """

    symbol: SymbolMap
    truncation: int
    dims: tuple[int, ...]
    ranks: dict = field(repr=False)
    kernels: dict = field(repr=False)
    free: dict = field(repr=False)

    @property
    def n(self) -> int:
        return self.symbol.n

    @property
    def order(self) -> int:
        return self.symbol.order

    @property
    def fiber_dim(self) -> int:
        return self.symbol.source_dim

    def dim(self, t: int) -> int:
        if t < 0:
            return 0
        return self.dims[t]

    def ambient_dim(self, t: int) -> int:
        return sym_dim(self.n, t) * self.fiber_dim


def build_system(s: SymbolMap, truncation: int | None = None) -> SymbolicSystem:
    """Compute dim g_t and kernel bases for t = 0..T (default T = k + 5)."""
    k = s.order
    T = k + 5 if truncation is None else truncation
    if T < k:
        raise ValueError(f"truncation {T} below the order {k}")
    dims, ranks, kernels, free = [], {}, {}, {}
    for t in range(T + 1):
        if t < k:
            dims.append(sym_dim(s.n, t) * s.source_dim)
            continue
        mat = prolong(s, t - k).matrix
        pivots, red = mat.rref()
        K, fr = kernel_from_rref(mat.ncols, pivots, red)
        ranks[t] = len(pivots)
        kernels[t] = K
        free[t] = fr
        dims.append(mat.ncols - len(pivots))
    return SymbolicSystem(s, T, tuple(dims), ranks, kernels, free)


def annihilator(basis: RationalMatrix) -> RationalMatrix:
    """Rows spanning the functionals that vanish on the column span of ``basis``."""
    K, _ = kernel_from_rref(basis.nrows, *basis.transpose().rref())
    return K.transpose()


def prolong_by_intersection(sys: SymbolicSystem, t: int) -> tuple[int, RationalMatrix]:
    """(g_k (x) S^(t-k)) intersected with S^t (x) N, from the basis of g_k alone.

    S^t (x) N sits inside S^(t-k) (x) S^k (x) N through comultiplication; an
    element lies in S^(t-k) (x) g_k iff every S^(t-k) slice is annihilated by
    the functionals cutting out g_k. The stacked constraints are solved here
    without using the prolonged symbol.
    """
    k, n, m = sys.order, sys.n, sys.fiber_dim
    if t <= k:
        raise ValueError("intersection prolongation needs t > k")
    A = annihilator(sys.kernels[k])
    ncon = A.nrows
    by_mono: dict[int, list[tuple[int, int, int]]] = {}
    for q, r in enumerate(A.numerators):
        for j, x in enumerate(r):
            if x:
                mono, w = divmod(j, m)
                by_mono.setdefault(mono, []).append((q, w, x))
    src, low, top = sym_basis(n, t), sym_basis(n, t - k), sym_basis(n, k)
    rows: dict[int, dict[int, int]] = {}
    for a_idx, alpha in enumerate(src.elements):
        for beta, gamma, c in comultiply(alpha, t - k):
            b_off = low.index[beta] * ncon
            for q, w, x in by_mono.get(top.index[gamma], ()):
                row = rows.setdefault(b_off + q, {})
                col = a_idx * m + w
                row[col] = row.get(col, 0) + c * x
    ncols = len(src) * m
    dense = []
    for r in sorted(rows):
        line = [0] * ncols
        for j, x in rows[r].items():
            line[j] = x
        dense.append(line)
    C = RationalMatrix.from_ints(dense, ncols)
    pivots, red = C.rref()
    K, _ = kernel_from_rref(ncols, pivots, red)
    return ncols - len(pivots), K


@dataclass(frozen=True)
class SpencerComplexSlice:
    """Total degree t of the Spencer complex restricted to g.

    Term i is g_(t-i) (x) Lambda^i; ``maps[i]`` is delta from term i to term
    i + 1 written in the stored bases (standard bases below the order).
    """

    t: int
    n: int
    term_dims: tuple[int, ...]
    maps: tuple[RationalMatrix, ...]

    def ranks(self) -> list[int]:
        return [mp.rank() for mp in self.maps]

    def cohomology(self, ranks: list[int] | None = None) -> list[int]:
        """dim H^(t-i, i) for every term i."""
        r = self.ranks() if ranks is None else ranks
        out = []
        for i, d in enumerate(self.term_dims):
            outgoing = r[i] if i < len(r) else 0
            incoming = r[i - 1] if i > 0 else 0
            out.append(d - outgoing - incoming)
        return out

    def composites_vanish(self) -> bool:
        return all((b @ a).is_zero() for a, b in zip(self.maps, self.maps[1:]))


def _basis_columns(sys: SymbolicSystem, a: int) -> list[list[tuple[int, int]]]:
    if a < sys.order:
        return [[(j, 1)] for j in range(sys.ambient_dim(a))]
    return sys.kernels[a].sparse_columns()


def _restricted_delta(sys: SymbolicSystem, a: int, i: int) -> RationalMatrix:
    """delta: g_a (x) Lambda^i -> g_(a-1) (x) Lambda^(i+1) in the stored bases."""
    n, m = sys.n, sys.fiber_dim
    amb_src, amb_tgt = sys.ambient_dim(a), sys.ambient_dim(a - 1)
    dcols = delta_columns(n, a, i, m)
    src_basis = _basis_columns(sys, a)
    n_src_ext, n_tgt_ext = comb(n, i), comb(n, i + 1)
    implicit_target = a - 1 < sys.order
    if implicit_target:
        tgt_dim = amb_tgt
    else:
        K = sys.kernels[a - 1]
        tgt_dim = K.ncols
        tcols = K.sparse_columns()
        lead = []
        for q, f in enumerate(sys.free[a - 1]):
            lead.append(next(x for r, x in tcols[q] if r == f))
        free_pos = {f: q for q, f in enumerate(sys.free[a - 1])}
        scale = 1
        for c in lead:
            scale = lcm(scale, c)

    columns = []
    for e in range(n_src_ext):
        base = e * amb_src
        for vec in src_basis:
            img: dict[int, int] = {}
            for idx, x in vec:
                for r, c in dcols[base + idx]:
                    img[r] = img.get(r, 0) + c * x
            img = {r: x for r, x in img.items() if x}
            if implicit_target:
                columns.append(sorted(img.items()))
                continue
            col = []
            for r, x in img.items():
                blk, pos = divmod(r, amb_tgt)
                q = free_pos.get(pos)
                if q is not None:
                    col.append((blk * tgt_dim + q, x * (scale // lead[q])))
            columns.append(col)
            if not _in_span(img, col, tcols, amb_tgt, tgt_dim, scale):
                raise WellDefinednessError(
                    f"delta(g_{a} x Lambda^{i}) is not contained in g_{a - 1} x Lambda^{i + 1}"
                )
    return RationalMatrix.from_sparse_columns(n_tgt_ext * tgt_dim, columns, 1 if implicit_target else scale)


def _in_span(img, coords, tcols, amb_tgt, tgt_dim, scale) -> bool:
    # scale * img must equal sum coords[q] * K[:, q] exactly
    acc = {r: scale * x for r, x in img.items()}
    for row, val in coords:
        blk, q = divmod(row, tgt_dim)
        for rr, kx in tcols[q]:
            key = blk * amb_tgt + rr
            acc[key] = acc.get(key, 0) - val * kx
    return not any(acc.values())


def spencer_slice(sys: SymbolicSystem, t: int) -> SpencerComplexSlice:
    """Spencer complex 0 -> g_t -> g_(t-1) (x) T* -> ... in total degree t."""
    if not 0 <= t <= sys.truncation:
        raise ValueError(f"total degree {t} outside 0..{sys.truncation}")
    n = sys.n
    terms = [i for i in range(n + 1) if t - i >= 0]
    term_dims = tuple(sys.dim(t - i) * comb(n, i) for i in terms)
    maps = []
    for i in terms[:-1]:
        if t - i - 1 < 0:
            break
        maps.append(_restricted_delta(sys, t - i, i))
    return SpencerComplexSlice(t, n, term_dims, tuple(maps))
