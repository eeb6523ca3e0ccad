"""Spencer cohomology tables, Cartan characters and Hilbert polynomials."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .exact_core import RationalMatrix, sym_basis, sym_dim
from .symbol_systems import SymbolicSystem, prolong, spencer_slice


class GenericityFailure(RuntimeError):
    """Random flags kept producing different characters."""

    def __init__(self, candidates):
        self.candidates = candidates
        super().__init__(f"no two sampled flags agree; candidates: {candidates}")


class InterpolationMismatch(RuntimeError):
    pass


def binom(a: int, b: int) -> int:
    """Binomial coefficient, zero when a < b or b < 0."""
    if b < 0 or a < b:
        return 0
    return comb(a, b)


# -- cohomology ---------------------------------------------------------------

@dataclass(frozen=True)
class CohomologyTable:
    n: int
    order: int
    truncation: int
    dims: dict  # (i, j) -> dim H^{i,j}
    ranks: dict  # t -> ranks of the slice maps
    term_dims: dict  # t -> dims of the slice terms
    gdims: tuple

    def __getitem__(self, key) -> int:
        return self.dims.get(key, 0)

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.dims.items()) if v}

    def h_vector(self) -> list[int]:
        """(h_0, ..., h_n) with h_0 = H^{0,0} and h_l = H^{k-1,l}."""
        k = self.order
        return [self[0, 0]] + [self[k - 1, l] for l in range(1, self.n + 1)]

    def euler_ok(self) -> bool:
        """Alternating sum of H equals that of dim g_(t-i) * C(n, i) for every slice."""
        for t, terms in self.term_dims.items():
            lhs = sum((-1) ** j * self[t - j, j] for j in range(len(terms)))
            rhs = sum((-1) ** i * self.gdims[t - i] * comb(self.n, i) for i in range(len(terms)))
            if lhs != rhs:
                return False
        return True


def cohomology_table(sys: SymbolicSystem, T: int | None = None) -> CohomologyTable:
    T = sys.truncation if T is None else T
    if T > sys.truncation:
        raise ValueError(f"table degree {T} beyond truncation {sys.truncation}")
    dims, ranks, terms = {}, {}, {}
    for t in range(T + 1):
        sl = spencer_slice(sys, t)
        r = sl.ranks()
        for j, h in enumerate(sl.cohomology(r)):
            dims[(t - j, j)] = h
        ranks[t], terms[t] = tuple(r), sl.term_dims
    return CohomologyTable(sys.n, sys.order, T, dims, ranks, terms, sys.dims[: T + 1])


@dataclass(frozen=True)
class InvolutivityVerdict:
    involutive: bool
    cartan_pass: bool | None
    cohomology_clean: bool
    offending: tuple = ()


def is_involutive_symbolic(table: CohomologyTable, k: int, cartan: "CartanData | None" = None) -> InvolutivityVerdict:
    """Cartan verdict when characters are supplied, corroborated by the table.

    Without characters the verdict falls back on the vanishing pattern
    H^{i,j} = 0 for i != k-1, i+j > 0 over the computed range.
    """
    if table.truncation < k + 2:
        raise ValueError("table must reach total degree k + 2")
    bad = tuple(key for key, v in table.nonzero().items() if key[0] != k - 1 and sum(key) > 0)
    clean = not bad
    cartan_pass = None if cartan is None else cartan.passes
    verdict = clean if cartan_pass is None else cartan_pass
    return InvolutivityVerdict(verdict, cartan_pass, clean, bad)


# -- Cartan characters ------------------------------------------------------------

@dataclass(frozen=True)
class CartanData:
    characters: tuple
    flag: RationalMatrix
    derived: tuple  # tail sums s_i + ... + s_n
    derived_direct: tuple  # same numbers measured on g_{k+1} along the flag
    dim_next: int
    passes: bool
    seed: int
    samples: tuple = field(default=(), repr=False)

    @property
    def weighted_sum(self) -> int:
        return sum(i * s for i, s in enumerate(self.characters, 1))

    @property
    def genre(self) -> tuple[int, int]:
        """(index of the last nonzero character, its value)."""
        for i in range(len(self.characters), 0, -1):
            if self.characters[i - 1]:
                return i, self.characters[i - 1]
        return 0, 0


def _substitution(C: list[list[int]], d: int) -> RationalMatrix:
    """Matrix of S^d C: monomial y^alpha in new covectors -> old monomials.

    New covector y_a is column a of C written in the old basis x.
    """
    n = len(C)
    basis = sym_basis(n, d)
    cols = []
    for alpha in basis.elements:
        poly = {(0,) * n: 1}
        for a in range(n):
            for _ in range(alpha[a]):
                nxt = {}
                for mono, c in poly.items():
                    for b in range(n):
                        if C[b][a]:
                            e = list(mono)
                            e[b] += 1
                            e = tuple(e)
                            nxt[e] = nxt.get(e, 0) + c * C[b][a]
                poly = nxt
        cols.append(sorted((basis.index[e], c) for e, c in poly.items() if c))
    return RationalMatrix.from_sparse_columns(len(basis.elements), cols)


def _flag_dims(matrix: RationalMatrix, C, d: int, m: int) -> list[int]:
    """dim(ker matrix restricted to S^d V_i (x) N) for i = 0..n along the flag of C.

    V_i is spanned by the new covectors y_(i+1), ..., y_n.
    """
    n = len(C)
    sub = _substitution(C, d)
    # lift S^d C to S^d C (x) id_N
    cols = []
    for j, col in enumerate(sub.sparse_columns()):
        for w in range(m):
            cols.append([(r * m + w, x) for r, x in col])
    lifted = RationalMatrix.from_sparse_columns(sub.nrows * m, cols)
    M = matrix @ lifted
    out = []
    elements = sym_basis(n, d).elements
    for i in range(n + 1):
        keep = [a * m + w for a, alpha in enumerate(elements) if not any(alpha[:i]) for w in range(m)]
        if not keep:
            out.append(0)
            continue
        out.append(len(keep) - M.submatrix(range(M.nrows), keep).rank())
    return out


def _random_flag(rng: random.Random, n: int, bound: int) -> list[list[int]]:
    while True:
        C = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
        if RationalMatrix(C).det() != 0:
            return C


def _sample(sys: SymbolicSystem, C) -> tuple[tuple, tuple]:
    k, m = sys.order, sys.fiber_dim
    dk = _flag_dims(sys.symbol.matrix, C, k, m)
    dk1 = _flag_dims(prolong(sys.symbol, 1).matrix, C, k + 1, m)
    s = tuple(dk[i - 1] - dk[i] for i in range(1, sys.n + 1))
    s1 = tuple(dk1[i - 1] - dk1[i] for i in range(1, sys.n + 1))
    return s, s1


def cartan_characters(sys: SymbolicSystem, seed: int = 0, bound: int = 10, escalations: int = 3) -> CartanData:
    """Characters along seeded random flags; two agreeing samples are accepted."""
    if sys.truncation < sys.order + 1:
        raise ValueError("system must be built through order k + 1")
    rng = random.Random(seed)
    seen = []
    for attempt in range(2 + escalations):
        if attempt >= 2:
            bound *= 2
        C = _random_flag(rng, sys.n, bound)
        s, s1 = _sample(sys, C)
        monotone = all(a >= b for a, b in zip(s, s[1:]))
        for prev_s, prev_s1, prev_C in seen:
            if monotone and prev_s == s:
                k = sys.order
                tails = tuple(sum(s[i:]) for i in range(len(s)))
                dim_next = sys.dim(k + 1)
                passes = dim_next == sum(i * x for i, x in enumerate(s, 1))
                return CartanData(s, RationalMatrix(C), tails, s1, dim_next, passes, seed,
                                  tuple(x[0] for x in seen) + (s,))
        seen.append((s, s1, C))
    raise GenericityFailure([x[0] for x in seen])


def cartan_test(sys: SymbolicSystem, chars: Sequence[int]) -> bool:
    return sys.dim(sys.order + 1) == sum(i * s for i, s in enumerate(chars, 1))


# -- conversion formulas --------------------------------------------------------

def _check_nonneg(values, what, allow_negative):
    if not allow_negative and any(v < 0 for v in values):
        raise ValueError(f"{what} must be nonnegative")


def chars_from_cohomology(h: Sequence[int], k: int, n: int, allow_negative: bool = False) -> list[int]:
    """(s_0, ..., s_n) from (h_0, ..., h_n), triangular in h."""
    if len(h) != n + 1:
        raise ValueError(f"expected {n + 1} cohomology numbers")
    _check_nonneg(h, "cohomology dimensions", allow_negative)
    s = [h[0]]
    for l in range(1, n + 1):
        v = binom(n + k - l - 1, k - 1) * h[0]
        for i in range(n - l + 1, n + 1):
            v += (-1) ** ((n - l - i) % 2) * binom(i - 1, n - l) * h[i]
        s.append(v)
    return s


def cohomology_from_chars(s: Sequence[int], k: int, n: int, allow_negative: bool = False) -> list[int]:
    """(h_0, ..., h_n) from (s_0, ..., s_n) via the Euler characteristic of the slices."""
    if len(s) != n + 1:
        raise ValueError(f"expected {n + 1} characters")
    _check_nonneg(s, "characters", allow_negative)
    h = [s[0]]
    for l in range(1, n + 1):
        a = sum(s[j] * sum((-1) ** i * comb(n, i) * binom(l + j - i - 2, j - 1) for i in range(l))
                for j in range(1, n + 1))
        b = s[0] * sum((-1) ** i * comb(n, i) * binom(k + l + n - i - 2, n - 1) for i in range(l, n + 1))
        h.append((-1) ** l * (a + b))
    return h


# -- polynomials ------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial with Fraction coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    def __call__(self, z) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        size = max(len(a), len(b))
        return Poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(size))

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        out = [Fraction(0)] * max(len(self.coeffs) + len(other.coeffs) - 1, 0)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def binomial(cls, shift: int, r: int) -> "Poly":
        """The polynomial z -> C(z + shift, r)."""
        p = cls([1])
        for i in range(r):
            p = p * cls([shift - i, 1])
        return p * Fraction(1, factorial(r))

    @classmethod
    def interpolate(cls, points: Sequence[tuple]) -> "Poly":
        """Lagrange interpolation through (x, y) pairs."""
        total = cls()
        for i, (xi, yi) in enumerate(points):
            term = cls([yi])
            for j, (xj, _) in enumerate(points):
                if j != i:
                    term = term * cls([Fraction(-xj, xi - xj), Fraction(1, xi - xj)])
            total = total + term
        return total


@dataclass(frozen=True)
class HilbertData:
    order: int
    n: int
    binomial_coeffs: tuple  # s_l against C(z + l - k - 1, l - 1)
    dim_poly: Poly
    cumulative: Poly
    routes: tuple  # names of the routes that agreed


def _poly_from_h(h, k, n) -> Poly:
    p = Poly.binomial(n - 1, n - 1) * h[0]
    for l in range(1, n + 1):
        p = p + Poly.binomial(n - k - l, n - 1) * ((-1) ** l * h[l])
    return p


def _poly_from_s(s, k, n) -> Poly:
    p = Poly()
    for l in range(1, n + 1):
        p = p + Poly.binomial(l - k - 1, l - 1) * s[l]
    return p


def hilbert_data(sys: SymbolicSystem | None = None, h: Sequence[int] | None = None,
                 s: Sequence[int] | None = None, k: int | None = None, n: int | None = None) -> HilbertData:
    """dim g_z as a polynomial from cohomology, characters and/or computed dims.

    ``s`` is (s_0, s_1, ..., s_n). Every supplied route must give the same
    polynomial and it must match the computed dims of ``sys`` for z >= k.
    """
    if sys is not None:
        k = sys.order if k is None else k
        n = sys.n if n is None else n
        if (k, n) != (sys.order, sys.n):
            raise ValueError("k and n disagree with the system")
    if k is None or n is None:
        raise ValueError("k and n are required without a system")
    routes = {}
    if h is not None:
        routes["cohomology"] = _poly_from_h(h, k, n)
    if s is not None:
        routes["characters"] = _poly_from_s(s, k, n)
    if sys is not None:
        pts = [(t, sys.dim(t)) for t in range(k, sys.truncation + 1)]
        if not routes and len(pts) < n:
            raise ValueError(f"need dims at {n} degrees >= k to interpolate; raise the truncation")
        routes["interpolation"] = Poly.interpolate(pts[:n]) if len(pts) >= n else Poly.interpolate(pts)
    if not routes:
        raise ValueError("no input to build the polynomial from")
    polys = list(routes.values())
    ref = polys[0]
    if any(p != ref for p in polys[1:]):
        raise InterpolationMismatch(", ".join(f"{name}: {p}" for name, p in routes.items()))
    if sys is not None:
        bad = [t for t in range(k, sys.truncation + 1) if ref(t) != sys.dim(t)]
        if bad:
            raise InterpolationMismatch(f"polynomial misses computed dim g_t at t = {bad}")
    m = s[0] if s is not None else h[0] if h is not None else sys.fiber_dim
    low = [sys.dim(t) if sys is not None else m * sym_dim(n, t) for t in range(k)]
    # cumulative sum is a degree-n polynomial; pin it down from n + 1 values
    pts, acc = [], sum(low)
    for z in range(k, k + n + 1):
        acc += ref(z)
        pts.append((z, acc))
    cumulative = Poly.interpolate(pts)
    if s is not None:
        coeffs = tuple(s[1:])
    else:
        coeffs = tuple(_binomial_coords(ref, k, n))
    return HilbertData(k, n, coeffs, ref, cumulative, tuple(routes))


def _binomial_coords(p: Poly, k: int, n: int) -> list[Fraction]:
    """Coordinates of p against C(z + l - k - 1, l - 1), l = 1..n (top degree first)."""
    rem = p
    out = [Fraction(0)] * n
    for l in range(n, 0, -1):
        b = Poly.binomial(l - k - 1, l - 1)
        lead = rem.coeffs[l - 1] if len(rem.coeffs) >= l else Fraction(0)
        c = lead / b.coeffs[-1]
        out[l - 1] = c
        rem = rem + b * (-c)
    if rem.coeffs:
        raise InterpolationMismatch("polynomial has degree >= n")
    return out
