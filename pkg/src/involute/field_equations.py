"""Symbols of the relativistic field operators.

Quadrics in S^2 T* are handled as symmetric matrices: the monomial x_i^2 is
E_ii and x_i x_j (i < j) is (E_ij + E_ji) / 2, so the quadric p.q of two
covectors is (p q^T + q p^T) / 2. Pairings <p, q> and traces go through the
inverse metric. Each order-2 generator checks its bilinear index formula
against the decomposable formula p^2 (x) q^2 when it is built.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial, lcm, prod
from typing import Sequence

from .exact_core import RationalMatrix, parse_rational, sym_basis, sym_dim
from .symbol_systems import SymbolMap, direct_sum

Vec = list  # list of Fraction
Mat = list  # list of lists of Fraction


@dataclass(frozen=True)
class Metric:
    n: int
    g: RationalMatrix
    g_inv: RationalMatrix
    name: str = "custom"

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], name: str = "custom") -> "Metric":
        g = RationalMatrix(rows)
        n = g.nrows
        if g.ncols != n:
            raise ValueError("metric must be square")
        if g != g.transpose():
            raise ValueError("metric must be symmetric")
        if g.det() == 0:
            raise ValueError("degenerate metric")
        return cls(n, g, g.inverse(), name)

    @classmethod
    def minkowski(cls, n: int = 4) -> "Metric":
        return cls.from_rows([[(-1 if i == 0 else 1) if i == j else 0 for j in range(n)] for i in range(n)], "minkowski")

    @classmethod
    def euclidean(cls, n: int = 4) -> "Metric":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], "euclidean")

    @property
    def G(self) -> Mat:
        return self.g_inv.rows()

    @property
    def lower(self) -> Mat:
        return self.g.rows()

    def pair(self, p: Vec, q: Vec) -> Fraction:
        """<p, q>_g of two covectors."""
        G = self.G
        return sum((p[i] * G[i][j] * q[j] for i in range(self.n) for j in range(self.n)), Fraction(0))

    def norm2_vector(self, v: Vec) -> Fraction:
        g = self.lower
        return sum((v[i] * g[i][j] * v[j] for i in range(self.n) for j in range(self.n)), Fraction(0))

    def raise_index(self, p: Vec) -> Vec:
        G = self.G
        return [sum((G[i][j] * p[j] for j in range(self.n)), Fraction(0)) for i in range(self.n)]

    def lower_index(self, v: Vec) -> Vec:
        g = self.lower
        return [sum((g[i][j] * v[j] for j in range(self.n)), Fraction(0)) for i in range(self.n)]


@dataclass(frozen=True)
class PointData:
    """Background values at a point for the pointwise symbols."""

    k: tuple | None = None
    U: tuple | None = None
    eps: Fraction | None = None
    pressure: Fraction = Fraction(0)
    dpressure: Fraction = Fraction(0)
    T: tuple | None = None
    Lambda: Fraction = Fraction(0)


# -- small dense helpers -------------------------------------------------------

def _vec(v) -> Vec:
    return [parse_rational(x) for x in v]


def _mat(rows) -> Mat:
    return [[parse_rational(x) for x in r] for r in rows]


def _mm(a: Mat, b: Mat) -> Mat:
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))] for i in range(len(a))]


def _mv(a: Mat, v: Vec) -> Vec:
    return [sum((r[k] * v[k] for k in range(len(v))), Fraction(0)) for r in a]


def _tr(a: Mat) -> Fraction:
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def _quadric_matrix(n: int, alpha) -> Mat:
    idx = [i for i in range(n) for _ in range(alpha[i])]
    A = [[Fraction(0)] * n for _ in range(n)]
    i, j = idx
    if i == j:
        A[i][i] = Fraction(1)
    else:
        A[i][j] = A[j][i] = Fraction(1, 2)
    return A


def _quadric_coeffs(n: int, A: Mat) -> Vec:
    out = []
    for alpha in sym_basis(n, 2).elements:
        idx = [i for i in range(n) for _ in range(alpha[i])]
        i, j = idx
        out.append(A[i][i] if i == j else A[i][j] + A[j][i])
    return out


def _outer_sym(p: Vec, q: Vec) -> Mat:
    n = len(p)
    return [[(p[i] * q[j] + q[i] * p[j]) / 2 for j in range(n)] for i in range(n)]


def power_coeffs(p: Sequence, d: int) -> Vec:
    """Coefficients of the polynomial (sum p_i x_i)^d in the monomial basis."""
    p = _vec(p)
    out = []
    for alpha in sym_basis(len(p), d).elements:
        c = Fraction(factorial(d), prod(factorial(a) for a in alpha))
        out.append(c * prod((x ** a for x, a in zip(p, alpha)), start=Fraction(1)))
    return out


def evaluate(s: SymbolMap, sym_part: Vec, fiber: Vec) -> Vec:
    """sigma(P (x) w) for P in S^k T* and w in N given as coefficient vectors."""
    m = s.source_dim
    vec = [Fraction(0)] * s.matrix.ncols
    for a, x in enumerate(sym_part):
        if x:
            for w, y in enumerate(fiber):
                if y:
                    vec[a * m + w] += x * y
    return s.matrix.apply(vec)


def _build(n: int, order: int, m: int, v: int, column, name: str) -> SymbolMap:
    cols = []
    for alpha in sym_basis(n, order).elements:
        for w in range(m):
            cols.append(column(alpha, w))
    rows = [[cols[j][i] for j in range(len(cols))] for i in range(v)]
    return SymbolMap(n, order, m, v, RationalMatrix(rows, len(cols)), name)


def _check_decomposables(s: SymbolMap, formula, n: int) -> None:
    # coordinate covectors and pairwise sums cover every monomial column
    probes = [[Fraction(int(i == a) + int(i == b)) for i in range(n)] for a in range(n) for b in range(a, n)]
    for p, q in product(probes, repeat=2):
        got = evaluate(s, power_coeffs(p, 2), power_coeffs(q, 2))
        want = formula(p, q)
        if got != want:
            raise AssertionError(f"{s.name}: bilinear extension disagrees with the decomposable formula at p={p}, q={q}")


# -- operator symbols -----------------------------------------------------------

def ricci_symbol(metric: Metric) -> SymbolMap:
    """zeta(P (x) Q) = sym(P g^-1 Q) - (Tr_g(P) Q + Tr_g(Q) P) / 2 on S^2 (x) S^2 -> S^2."""
    n = metric.n
    if n < 3:
        raise ValueError("Ricci symbol needs n >= 3")
    G = metric.G
    quads = sym_basis(n, 2).elements

    def column(alpha, w):
        P, Q = _quadric_matrix(n, alpha), _quadric_matrix(n, quads[w])
        PGQ = _mm(_mm(P, G), Q)
        trP, trQ = _tr(_mm(G, P)), _tr(_mm(G, Q))
        out = [[(PGQ[i][j] + PGQ[j][i]) / 2 - (trP * Q[i][j] + trQ * P[i][j]) / 2 for j in range(n)] for i in range(n)]
        return _quadric_coeffs(n, out)

    s = _build(n, 2, len(quads), len(quads), column, "ricci")

    def formula(p, q):
        pq, pp, qq = metric.pair(p, q), metric.pair(p, p), metric.pair(q, q)
        A = _outer_sym(p, q)
        B, C = _outer_sym(q, q), _outer_sym(p, p)
        return _quadric_coeffs(n, [[pq * A[i][j] - (pp * B[i][j] + qq * C[i][j]) / 2 for j in range(n)] for i in range(n)])

    _check_decomposables(s, formula, n)
    return s


def bianchi_symbol(metric: Metric) -> SymbolMap:
    """Symbol of div_g o G: p (x) q.r -> (<p,q> r + <p,r> q - <q,r> p) / 2."""
    n = metric.n
    G = metric.G
    quads = sym_basis(n, 2).elements

    def column(alpha, w):
        p = [Fraction(a) for a in alpha]
        Q = _quadric_matrix(n, quads[w])
        QGp = _mv(Q, _mv(G, p))
        trQ = _tr(_mm(G, Q))
        return [QGp[i] - trQ * p[i] / 2 for i in range(n)]

    return _build(n, 1, len(quads), n, column, "bianchi")


def grav_trace_reversal(metric: Metric, inverse: bool = False) -> SymbolMap:
    """G(h) = h - Tr_g(h) g / 2, or its inverse h - Tr_g(h) g / (n - 2), as an order-0 map."""
    n = metric.n
    if n <= 2:
        raise ValueError("trace reversal is invertible only for n > 2")
    G, g = metric.G, metric.lower
    c = Fraction(1, n - 2) if inverse else Fraction(1, 2)
    quads = sym_basis(n, 2).elements

    def column(alpha, w):
        H = _quadric_matrix(n, quads[w])
        trH = _tr(_mm(G, H))
        return _quadric_coeffs(n, [[H[i][j] - c * trH * g[i][j] for j in range(n)] for i in range(n)])

    return _build(n, 0, len(quads), len(quads), column, "G^-1" if inverse else "G")


def maxwell_symbol(metric: Metric) -> SymbolMap:
    """Symbol of delta_g o d on 1-forms: Q (x) p -> p _| Q - Tr_g(Q) p."""
    n = metric.n
    G = metric.G

    def column(alpha, w):
        Q = _quadric_matrix(n, alpha)
        p = [Fraction(int(i == w)) for i in range(n)]
        QGp = _mv(Q, _mv(G, p))
        trQ = _tr(_mm(G, Q))
        return [QGp[i] - trQ * p[i] for i in range(n)]

    s = _build(n, 2, n, n, column, "maxwell")

    def formula(xi, p):
        # here the second probe plays the covector p, evaluated on xi^2 (x) p
        return [metric.pair(xi, p) * xi[i] - metric.pair(xi, xi) * p[i] for i in range(n)]

    for xi in ([Fraction(int(i == a) + int(i == b)) for i in range(n)] for a in range(n) for b in range(a, n)):
        for w in range(n):
            p = [Fraction(int(i == w)) for i in range(n)]
            if evaluate(s, power_coeffs(xi, 2), p) != formula(xi, p):
                raise AssertionError("maxwell: bilinear extension disagrees with the decomposable formula")
    return s


def codifferential_symbol(metric: Metric) -> SymbolMap:
    """q (x) p -> <p, q>_g on T* (x) T* -> R."""
    n = metric.n
    G = metric.G

    def column(alpha, w):
        q = [Fraction(a) for a in alpha]
        return [sum((q[i] * G[i][w] for i in range(n)), Fraction(0))]

    return _build(n, 1, n, 1, column, "codifferential")


def wave_symbol(metric: Metric) -> SymbolMap:
    """Scalar wave operator: P -> Tr_g(P), order 2, N = V = R."""
    n = metric.n
    G = metric.G
    return _build(n, 2, 1, 1, lambda alpha, w: [_tr(_mm(G, _quadric_matrix(n, alpha)))], "wave")


def einstein_maxwell_symbol(metric: Metric) -> SymbolMap:
    """Weakly uncoupled Einstein-Maxwell symbol: Ricci block (+) Maxwell block."""
    s = direct_sum(ricci_symbol(metric), maxwell_symbol(metric))
    return SymbolMap(s.n, s.order, s.source_dim, s.target_dim, s.matrix, "einstein_maxwell")


def energy_momentum_div_symbol(metric: Metric, T: Sequence[Sequence], Lambda=0) -> SymbolMap:
    """Symbol in g of div_g(T - Lambda g) with the covariant T held fixed.

    p (x) q^2 -> (|q|^2 T_L p - <T_L q, q> p) / 2 where T_L = T - Lambda g is
    lifted to an endomorphism of T* through the metric.
    """
    n = metric.n
    A = _mat(T)
    if [list(r) for r in zip(*A)] != A:
        raise ValueError("energy-momentum tensor must be symmetric")
    L = parse_rational(Lambda)
    g, G = metric.lower, metric.G
    TL = [[A[i][j] - L * g[i][j] for j in range(n)] for i in range(n)]
    TLG = _mm(TL, G)
    quads = sym_basis(n, 2).elements

    def column(alpha, w):
        p = [Fraction(a) for a in alpha]
        Q = _quadric_matrix(n, quads[w])
        trQ = _tr(_mm(G, Q))
        tq = _tr(_mm(_mm(G, TLG), Q))
        Tp = _mv(TLG, p)
        return [(trQ * Tp[i] - tq * p[i]) / 2 for i in range(n)]

    return _build(n, 1, len(quads), n, column, "div_T")


def block_triangular_symbol(einstein_block: SymbolMap, coupling: SymbolMap, field_block: SymbolMap) -> SymbolMap:
    """[[zeta_G, 0], [zeta_L^g, zeta_L^phi]] on (S^2 (+) N1) -> (S^2 (+) N2)."""
    e, c, f = einstein_block, coupling, field_block
    if not (e.order == c.order == f.order and e.n == c.n == f.n):
        raise ValueError("blocks must share n and order")
    if c.source_dim != e.source_dim or c.target_dim != f.target_dim:
        raise ValueError("coupling block must map the metric fiber to the field target")
    m1, m2 = e.source_dim, f.source_dim
    ecols, ccols, fcols = e.matrix.sparse_columns(), c.matrix.sparse_columns(), f.matrix.sparse_columns()

    d = lcm(e.matrix.denominator, c.matrix.denominator, f.matrix.denominator)
    se, sc, sf = d // e.matrix.denominator, d // c.matrix.denominator, d // f.matrix.denominator
    cols = []
    for mono in range(sym_dim(e.n, e.order)):
        for w in range(m1):
            j = mono * m1 + w
            cols.append([(r, se * x) for r, x in ecols[j]] + [(e.target_dim + r, sc * x) for r, x in ccols[j]])
        for w in range(m2):
            cols.append([(e.target_dim + r, sf * x) for r, x in fcols[mono * m2 + w]])
    mat = RationalMatrix.from_sparse_columns(e.target_dim + f.target_dim, cols, d)
    return SymbolMap(e.n, e.order, m1 + m2, e.target_dim + f.target_dim, mat, "block_triangular")


def scalar_coupling_symbol(metric: Metric) -> SymbolMap:
    """An order-2 coupling S^2 (x) S^2 -> R: P (x) h -> Tr_g(P g^-1 h)."""
    n = metric.n
    G = metric.G
    quads = sym_basis(n, 2).elements
    return _build(n, 2, len(quads), 1,
                  lambda alpha, w: [_tr(_mm(_mm(G, _quadric_matrix(n, alpha)), _mm(G, _quadric_matrix(n, quads[w]))))],
                  "coupling")


# -- pointwise determinacy symbols ------------------------------------------------

def _pairing(p: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(p, v)), Fraction(0))


def radiation_symbol_at(p: Sequence, point: PointData, metric: Metric) -> RationalMatrix:
    """l_p(kappa, e) = (<p,k> kappa, <p,kappa> + <p,k> e / eps) on T (+) R."""
    n = metric.n
    k, eps = _vec(point.k), parse_rational(point.eps)
    p = _vec(p)
    if not any(k) or metric.norm2_vector(k) != 0:
        raise ValueError("pure radiation needs a nonzero null vector k")
    if eps <= 0:
        raise ValueError("energy density must be positive")
    pk = _pairing(p, k)
    rows = [[pk if i == j else 0 for j in range(n)] + [0] for i in range(n)]
    rows.append(list(p) + [pk / eps])
    return RationalMatrix(rows, n + 1)


def fluid_symbol_at(p: Sequence, point: PointData, metric: Metric) -> RationalMatrix:
    """[[(eps+P)<p,U> I, pi_{U-perp}(p) P'], [(eps+P) p, <p,U>]] on T (+) R."""
    n = metric.n
    U, eps = _vec(point.U), parse_rational(point.eps)
    P, dP = parse_rational(point.pressure), parse_rational(point.dpressure)
    p = _vec(p)
    U2 = metric.norm2_vector(U)
    if U2 != -1:
        raise ValueError("fluid velocity must satisfy |U|^2 = -1")
    a = eps + P
    if a == 0:
        raise ValueError("eps + P must not vanish")
    c = _pairing(p, U)
    proj = [x - c / U2 * u for x, u in zip(metric.raise_index(p), U)]
    rows = [[a * c if i == j else 0 for j in range(n)] + [proj[i] * dP] for i in range(n)]
    rows.append([a * x for x in p] + [c])
    return RationalMatrix(rows, n + 1)


def deturck_symbol_at(p: Sequence, metric: Metric, T: Sequence[Sequence], dphi: Sequence[Sequence]) -> RationalMatrix:
    """l_p(phi)(q) = |p|^2 T(phi, dphi(q#)) + <p,q> T(phi, dphi(p#)) as an n x n matrix.

    Column c is the image of the c-th coordinate vector; row b is the value
    on the b-th coordinate covector q.
    """
    n = metric.n
    A, D = _mat(T), _mat(dphi)
    if RationalMatrix(D).det() == 0:
        raise ValueError("dphi must be invertible")
    p = _vec(p)
    G = metric.G
    p2 = metric.pair(p, p)
    Dp = _mv(D, metric.raise_index(p))
    Gp = metric.raise_index(p)
    rows = []
    for b in range(n):
        Dq = _mv(D, [G[i][b] for i in range(n)])
        rows.append([p2 * _pairing(A[c], Dq) + Gp[b] * _pairing(A[c], Dp) for c in range(n)])
    return RationalMatrix(rows, n)
