# cython: language_level=3, boundscheck=False, wraparound=False
"""Fraction-free Gauss-Jordan (Bareiss) elimination on GMP integers.

Same contract as ``_elim_py.echelon``: canonical RREF rows returned as
primitive Python integer lists with positive pivot entries.
"""

from libc.stdlib cimport malloc, free

cdef extern from "gmp.h":
    ctypedef struct __mpz_struct:
        pass
    ctypedef __mpz_struct* mpz_ptr
    void mpz_init(mpz_ptr)
    void mpz_clear(mpz_ptr)
    void mpz_set(mpz_ptr, mpz_ptr)
    void mpz_set_si(mpz_ptr, long)
    int mpz_set_str(mpz_ptr, const char*, int)
    char* mpz_get_str(char*, int, mpz_ptr)
    int mpz_sgn(mpz_ptr)
    int mpz_fits_slong_p(mpz_ptr)
    long mpz_get_si(mpz_ptr)
    void mpz_mul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_submul(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_divexact(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_gcd(mpz_ptr, mpz_ptr, mpz_ptr)
    void mpz_neg(mpz_ptr, mpz_ptr)
    int mpz_cmp_si(mpz_ptr, long)
    void mpz_swap(mpz_ptr, mpz_ptr)

cdef extern from "stdlib.h":
    void c_free "free"(void*)


cdef void _load(mpz_ptr z, object x) except *:
    cdef long v
    try:
        v = x
        mpz_set_si(z, v)
    except OverflowError:
        s = format(x, "x").encode()
        mpz_set_str(z, s, 16)


cdef object _dump(mpz_ptr z):
    cdef char* buf
    if mpz_fits_slong_p(z):
        return mpz_get_si(z)
    buf = mpz_get_str(NULL, 16, z)
    try:
        return int(buf.decode(), 16)
    finally:
        c_free(buf)


def echelon(rows, Py_ssize_t ncols):
    """Reduced row echelon form of an integer matrix (list of int lists)."""
    cdef Py_ssize_t nr = len(rows), nc = ncols
    cdef Py_ssize_t i, j, c, p, r = 0, rank
    cdef __mpz_struct* data
    cdef __mpz_struct** row
    cdef __mpz_struct* tmp_row
    cdef __mpz_struct prev_s, piv_s, aic_s, t_s
    cdef mpz_ptr prev = &prev_s
    cdef mpz_ptr piv = &piv_s
    cdef mpz_ptr aic = &aic_s
    cdef mpz_ptr t = &t_s
    if nr == 0 or nc == 0:
        return [], []
    data = <__mpz_struct*> malloc(nr * nc * sizeof(__mpz_struct))
    row = <__mpz_struct**> malloc(nr * sizeof(__mpz_struct*))
    if data == NULL or row == NULL:
        free(data)
        free(row)
        raise MemoryError()
    for i in range(nr * nc):
        mpz_init(&data[i])
    mpz_init(prev)
    mpz_init(piv)
    mpz_init(aic)
    mpz_init(t)
    pivots = []
    try:
        for i in range(nr):
            row[i] = &data[i * nc]
            src = rows[i]
            for j in range(nc):
                x = src[j]
                if x:
                    _load(&row[i][j], x)
        mpz_set_si(prev, 1)
        for c in range(nc):
            if r == nr:
                break
            p = -1
            for i in range(r, nr):
                if mpz_sgn(&row[i][c]) != 0:
                    p = i
                    break
            if p < 0:
                continue
            if p != r:
                tmp_row = row[p]
                row[p] = row[r]
                row[r] = tmp_row
            mpz_set(piv, &row[r][c])
            for i in range(nr):
                if i == r:
                    continue
                mpz_set(aic, &row[i][c])
                for j in range(nc):
                    if mpz_sgn(&row[r][j]) == 0:
                        if mpz_sgn(&row[i][j]) == 0:
                            continue
                        mpz_mul(t, piv, &row[i][j])
                    else:
                        mpz_mul(t, piv, &row[i][j])
                        mpz_submul(t, aic, &row[r][j])
                    mpz_divexact(&row[i][j], t, prev)
            mpz_set(prev, piv)
            pivots.append(c)
            r += 1
        rank = r
        reduced = []
        for i in range(rank):
            mpz_set_si(t, 0)
            for j in range(nc):
                if mpz_sgn(&row[i][j]) != 0:
                    mpz_gcd(t, t, &row[i][j])
            if mpz_sgn(&row[i][pivots[i]]) < 0:
                mpz_neg(t, t)
            out = [0] * nc
            for j in range(nc):
                if mpz_sgn(&row[i][j]) != 0:
                    mpz_divexact(aic, &row[i][j], t)
                    out[j] = _dump(aic)
            reduced.append(out)
        return pivots, reduced
    finally:
        for i in range(nr * nc):
            mpz_clear(&data[i])
        mpz_clear(prev)
        mpz_clear(piv)
        mpz_clear(aic)
        mpz_clear(t)
        free(data)
        free(row)
