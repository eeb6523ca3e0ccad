"""Pure-Python elimination kernels.

``echelon`` is the fallback for the compiled kernel in ``_elim_ext``; both
return the reduced row echelon form in the same canonical integer encoding,
so results do not depend on which backend is loaded.

``fraction_rank`` is a deliberately plain dense Gauss over ``Fraction`` used
only as an independent cross-check.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def echelon(rows: list[list[int]], ncols: int) -> tuple[list[int], list[list[int]]]:
    """Reduced row echelon form of an integer matrix.

    Gauss-Jordan over sparse integer rows; every updated row is divided by
    its content so no fractions ever appear. Columns are scanned left to
    right, which makes the pivot set and the reduced rows canonical.

    Returns ``(pivots, reduced)`` where ``reduced[r]`` is the r-th RREF row
    scaled to a primitive integer vector with a positive pivot entry.
    """
    work: list[dict] = []
    by_col: list[set] = [set() for _ in range(ncols)]
    for row in rows:
        d = {c: v for c, v in enumerate(row) if v}
        if d:
            rid = len(work)
            work.append(_primitive(d))
            for c in d:
                by_col[c].add(rid)

    pivots: list[int] = []
    pivot_rows: list[int] = []
    used = [False] * len(work)
    for c in range(ncols):
        holders = by_col[c]
        cand = [r for r in holders if not used[r]]
        if not cand:
            continue
        # sparsest candidate row, ties by creation order for determinism
        p = min(cand, key=lambda r: (len(work[r]), r))
        used[p] = True
        prow = work[p]
        pv = prow[c]
        for r in list(holders):
            if r == p:
                continue
            row = work[r]
            a = row[c]
            g = gcd(pv, a)
            mp, ma = pv // g, a // g
            new = {k: mp * v for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - ma * v
                if nv:
                    if k not in new:
                        by_col[k].add(r)
                    new[k] = nv
                else:
                    if k in new:
                        del new[k]
                        by_col[k].discard(r)
            work[r] = _primitive(new)
        pivots.append(c)
        pivot_rows.append(p)

    reduced = []
    for c, p in zip(pivots, pivot_rows):
        row = work[p]
        sign = 1 if row[c] > 0 else -1
        dense = [0] * ncols
        for k, v in row.items():
            dense[k] = sign * v
        reduced.append(dense)
    return pivots, reduced


def fraction_rank(rows: list[list], ncols: int, reverse_columns: bool = False) -> int:
    """Rank by textbook Gaussian elimination over Fraction."""
    order = list(range(ncols))
    if reverse_columns:
        order.reverse()
    m = [[Fraction(row[c]) for c in order] for row in rows]
    rank = 0
    for c in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if m[r][c] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        top = m[rank]
        for r in range(rank + 1, len(m)):
            f = m[r][c]
            if f:
                f = f / top[c]
                m[r] = [x - f * y for x, y in zip(m[r], top)]
        rank += 1
    return rank
