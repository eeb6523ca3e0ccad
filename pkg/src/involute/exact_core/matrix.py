"""Dense exact rational matrices.

A ``RationalMatrix`` stores integer numerators with one shared positive
denominator, always reduced so that the denominator is coprime to the gcd
of all numerators. Entries are exposed as ``fractions.Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from . import _backend
from ._elim_py import fraction_rank


def parse_rational(value) -> Fraction:
    """Parse ``int``, ``Fraction`` or a canonical ``"num/den"`` string."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"not a rational: {value!r}") from None
        if d == 0:
            raise ZeroDivisionError(f"zero denominator in {value!r}")
        return Fraction(n, d)
    raise TypeError(f"cannot read {type(value).__name__} as a rational")


def format_rational(q: Fraction | int) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class RationalMatrix:
    """Immutable dense matrix over Q."""

    __slots__ = ("nrows", "ncols", "_num", "_den", "_sparse_cols")

    def __init__(self, rows: Iterable[Iterable] = (), ncols: int | None = None):
        fr = [[parse_rational(x) for x in row] for row in rows]
        if ncols is None:
            ncols = len(fr[0]) if fr else 0
        if any(len(r) != ncols for r in fr):
            raise ValueError("ragged rows")
        den = 1
        for r in fr:
            for x in r:
                if x.denominator != 1:
                    den = lcm(den, x.denominator)
        num = [[int(x * den) for x in r] for r in fr]
        self._set(len(fr), ncols, num, den)

    def _set(self, nrows, ncols, num, den):
        if den < 0:
            num = [[-x for x in r] for r in num]
            den = -den
        if den != 1:
            g = den
            for r in num:
                for x in r:
                    if x:
                        g = gcd(g, x)
                        if g == 1:
                            break
                if g == 1:
                    break
            if g > 1:
                num = [[x // g for x in r] for r in num]
                den //= g
        self.nrows = nrows
        self.ncols = ncols
        self._num = tuple(tuple(r) for r in num)
        self._den = den
        self._sparse_cols = None

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_ints(cls, rows: Sequence[Sequence[int]], ncols: int | None = None, den: int = 1) -> "RationalMatrix":
        self = cls.__new__(cls)
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        self._set(len(rows), ncols, rows, den)
        return self

    @classmethod
    def from_sparse_columns(cls, nrows: int, columns: Sequence[Iterable[tuple[int, int]]], den: int = 1) -> "RationalMatrix":
        """Build from integer ``(row, value)`` pairs per column."""
        ncols = len(columns)
        rows = [[0] * ncols for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, v in col:
                rows[i][j] += v
        out = cls.from_ints(rows, ncols, den)
        if out._den == den:
            out._sparse_cols = [[(i, v) for i, v in _merge(col)] for col in columns]
        return out

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls.from_ints([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_ints([[int(i == j) for j in range(n)] for i in range(n)], n)

    # -- access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def denominator(self) -> int:
        return self._den

    @property
    def numerators(self) -> tuple[tuple[int, ...], ...]:
        return self._num

    def __getitem__(self, key) -> Fraction:
        i, j = key
        return Fraction(self._num[i][j], self._den)

    def rows(self) -> list[list[Fraction]]:
        d = self._den
        return [[Fraction(x, d) for x in r] for r in self._num]

    def column(self, j: int) -> list[Fraction]:
        return [Fraction(r[j], self._den) for r in self._num]

    def sparse_columns(self) -> list[list[tuple[int, int]]]:
        """Nonzero ``(row, numerator)`` pairs per column (shared denominator)."""
        if self._sparse_cols is None:
            cols = [[] for _ in range(self.ncols)]
            for i, r in enumerate(self._num):
                for j, x in enumerate(r):
                    if x:
                        cols[j].append((i, x))
            self._sparse_cols = cols
        return self._sparse_cols

    def nnz(self) -> int:
        return sum(1 for r in self._num for x in r if x)

    def is_zero(self) -> bool:
        return not any(x for r in self._num for x in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._den == other._den and self._num == other._num

    def __hash__(self):
        return hash((self.shape, self._den, self._num))

    def __repr__(self) -> str:
        return f"RationalMatrix({self.nrows}x{self.ncols}, den={self._den})"

    # -- algebra ----------------------------------------------------------

    def transpose(self) -> "RationalMatrix":
        rows = [list(c) for c in zip(*self._num)] if self.nrows else [[] for _ in range(self.ncols)]
        return RationalMatrix.from_ints(rows, self.nrows, self._den)

    T = property(transpose)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix.from_ints([[-x for x in r] for r in self._num], self.ncols, self._den)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        d = lcm(self._den, other._den)
        a, b = d // self._den, d // other._den
        rows = [[a * x + b * y for x, y in zip(r, s)] for r, s in zip(self._num, other._num)]
        return RationalMatrix.from_ints(rows, self.ncols, d)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, c) -> "RationalMatrix":
        c = parse_rational(c)
        return RationalMatrix.from_ints([[c.numerator * x for x in r] for r in self._num],
                                        self.ncols, self._den * c.denominator)

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        brows = [[(j, x) for j, x in enumerate(r) if x] for r in other._num]
        out = []
        for r in self._num:
            acc = [0] * other.ncols
            for k, a in enumerate(r):
                if a:
                    for j, b in brows[k]:
                        acc[j] += a * b
            out.append(acc)
        return RationalMatrix.from_ints(out, other.ncols, self._den * other._den)

    def apply(self, vec: Sequence) -> list[Fraction]:
        """Matrix times a column vector given as a sequence of rationals."""
        v = [parse_rational(x) for x in vec]
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return [sum((Fraction(a, self._den) * x for a, x in zip(r, v) if a and x), Fraction(0)) for r in self._num]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix.from_ints([[self._num[i][j] for j in cols] for i in rows], len(cols), self._den)

    @staticmethod
    def hstack(mats: Sequence["RationalMatrix"]) -> "RationalMatrix":
        nrows = mats[0].nrows
        if any(m.nrows != nrows for m in mats):
            raise ValueError("hstack needs equal row counts")
        d = 1
        for m in mats:
            d = lcm(d, m._den)
        rows = [[] for _ in range(nrows)]
        for m in mats:
            f = d // m._den
            for i, r in enumerate(m._num):
                rows[i].extend(f * x for x in r)
        return RationalMatrix.from_ints(rows, sum(m.ncols for m in mats), d)

    @staticmethod
    def vstack(mats: Sequence["RationalMatrix"]) -> "RationalMatrix":
        ncols = mats[0].ncols
        if any(m.ncols != ncols for m in mats):
            raise ValueError("vstack needs equal column counts")
        d = 1
        for m in mats:
            d = lcm(d, m._den)
        rows = []
        for m in mats:
            f = d // m._den
            rows.extend([f * x for x in r] for r in m._num)
        return RationalMatrix.from_ints(rows, ncols, d)

    @staticmethod
    def block_diag(mats: Sequence["RationalMatrix"]) -> "RationalMatrix":
        d = 1
        for m in mats:
            d = lcm(d, m._den)
        ncols = sum(m.ncols for m in mats)
        rows = []
        off = 0
        for m in mats:
            f = d // m._den
            for r in m._num:
                row = [0] * ncols
                row[off:off + m.ncols] = [f * x for x in r]
                rows.append(row)
            off += m.ncols
        return RationalMatrix.from_ints(rows, ncols, d)

    # -- elimination ------------------------------------------------------

    def rref(self) -> tuple[list[int], list[list[int]]]:
        """Pivot columns and primitive integer RREF rows (see ``_elim_py.echelon``)."""
        return _rref_by_components(self)

    def rank(self) -> int:
        return len(self.rref()[0])

    def rank_kernel(self) -> tuple[int, "RationalMatrix"]:
        return rank_kernel(self)

    def fraction_rank(self, reverse_columns: bool = False) -> int:
        """Rank through the independent textbook route (slow; for cross-checks)."""
        return fraction_rank(self._num, self.ncols, reverse_columns)

    def det(self) -> Fraction:
        if self.nrows != self.ncols:
            raise ValueError("det of a non-square matrix")
        n = self.nrows
        a = [list(r) for r in self._num]
        sign, prev = 1, 1
        for c in range(n):
            p = next((r for r in range(c, n) if a[r][c]), None)
            if p is None:
                return Fraction(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                sign = -sign
            for r in range(c + 1, n):
                for j in range(c + 1, n):
                    a[r][j] = (a[c][c] * a[r][j] - a[r][c] * a[c][j]) // prev
                a[r][c] = 0
            prev = a[c][c]
        return Fraction(sign * (a[n - 1][n - 1] if n else 1), self._den ** n)

    def solve(self, b: Sequence) -> list[Fraction] | None:
        """One solution x of M x = b, or None if inconsistent. Free variables are 0."""
        rhs = [parse_rational(x) for x in b]
        aug = RationalMatrix.hstack([self, RationalMatrix([[x] for x in rhs], 1) if rhs else RationalMatrix.zeros(0, 1)])
        pivots, red = aug.rref()
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [Fraction(0)] * self.ncols
        for p, row in zip(pivots, red):
            x[p] = Fraction(row[self.ncols], row[p])
        return x

    def inverse(self) -> "RationalMatrix":
        if self.nrows != self.ncols:
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = RationalMatrix.hstack([self, RationalMatrix.identity(n)])
        pivots, red = aug.rref()
        if pivots != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return RationalMatrix([[Fraction(row[n + j], row[i]) for j in range(n)] for i, row in enumerate(red)], n)


def _merge(col):
    acc: dict[int, int] = {}
    for i, v in col:
        acc[i] = acc.get(i, 0) + v
    return sorted((i, v) for i, v in acc.items() if v)


def _components(cols: list, nrows: int, ncols: int) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column nonzero graph."""
    parent = list(range(nrows + ncols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j, col in enumerate(cols):
        cj = find(nrows + j)
        for i, _ in col:
            ri = find(i)
            if ri != cj:
                parent[ri] = cj
    groups: dict[int, tuple[list, list]] = {}
    for i in range(nrows):
        groups.setdefault(find(i), ([], []))[0].append(i)
    for j in range(ncols):
        groups.setdefault(find(nrows + j), ([], []))[1].append(j)
    return [g for g in groups.values() if g[0] and g[1]]


def _rref_by_components(m: "RationalMatrix") -> tuple[list[int], list[list[int]]]:
    # The RREF of a matrix that is block diagonal up to permutation is the
    # union of the blockwise RREFs, so each component is reduced on its own.
    num, ncols = m.numerators, m.ncols
    found = []
    for rows, cols in _components(m.sparse_columns(), m.nrows, ncols):
        sub = [[num[i][j] for j in cols] for i in rows]
        piv, red = _backend.echelon(sub, len(cols))
        for p, r in zip(piv, red):
            dense = [0] * ncols
            for k, v in zip(cols, r):
                dense[k] = v
            found.append((cols[p], dense))
    found.sort(key=lambda t: t[0])
    return [p for p, _ in found], [r for _, r in found]


def kernel_from_rref(ncols: int, pivots: list[int], red: list[list[int]]) -> tuple[RationalMatrix, list[int]]:
    """Kernel basis (as columns) and the free column owning each basis vector.

    Each kernel vector is a primitive integer vector that is positive at its
    free column and vanishes at every other free column.
    """
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    cols = []
    for f in free:
        entries = [(f, 1, 1)]
        for p, row in zip(pivots, red):
            if row[f]:
                entries.append((p, -row[f], row[p]))
        L = 1
        for _, _, q in entries:
            L = lcm(L, q)
        vec = [(i, a * (L // q)) for i, a, q in entries]
        g = 0
        for _, v in vec:
            g = gcd(g, v)
        cols.append([(i, v // g) for i, v in vec])
    kernel = RationalMatrix.from_sparse_columns(ncols, cols) if cols else RationalMatrix.zeros(ncols, 0)
    return kernel, free


def rank_kernel(m: RationalMatrix) -> tuple[int, RationalMatrix]:
    """Rank of ``m`` and a kernel basis as the columns of a matrix.

    Kernel vectors are ordered by their free (non-pivot) column.
    """
    pivots, red = m.rref()
    kernel, _ = kernel_from_rref(m.ncols, pivots, red)
    return len(pivots), kernel


def rank(m: RationalMatrix) -> int:
    return m.rank()
