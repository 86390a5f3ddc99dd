# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled integer kernels, twin of _kernels_py.

Inputs are guarded by kernels.py so that every Bareiss intermediate is a
minor bounded by 2**62 in magnitude; products of two such minors then fit
comfortably in the 128-bit accumulators used here. C division truncates
toward zero, which agrees with exact division.
"""

cdef extern from *:
    ctypedef long long i128 "__int128"


def det_int(rows):
    cdef Py_ssize_t n = len(rows), i, j, k
    cdef i128 m[12][12]
    cdef i128 prev, pivot, mik, tmp
    cdef long long entry
    cdef int sign = 1
    cdef bint found
    if n == 0:
        return 1
    if n > 12:
        raise ValueError("matrix too large for the compiled kernel")
    for i in range(n):
        row = rows[i]
        if len(row) != n:
            raise ValueError("determinant needs a square matrix")
        for j in range(n):
            entry = row[j]
            m[i][j] = entry
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            found = False
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    for j in range(n):
                        tmp = m[k][j]
                        m[k][j] = m[i][j]
                        m[i][j] = tmp
                    sign = -sign
                    found = True
                    break
            if not found:
                return 0
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                m[i][j] = (pivot * m[i][j] - mik * m[k][j]) / prev
            m[i][k] = 0
        prev = pivot
    # The guarded entry bounds keep the determinant itself below 2**62.
    return sign * <long long> m[n - 1][n - 1]


def rank_int(rows):
    cdef Py_ssize_t nrows = len(rows), ncols, i, j, col, piv
    cdef i128 m[64][12]
    cdef i128 prev, pivot, mic, tmp, num
    cdef long long entry
    cdef Py_ssize_t rank = 0
    cdef bint have_piv
    if nrows == 0:
        return 0
    if nrows > 64:
        raise ValueError("matrix too large for the compiled kernel")
    ncols = len(rows[0])
    if ncols > 12:
        raise ValueError("matrix too large for the compiled kernel")
    for i in range(nrows):
        row = rows[i]
        if len(row) != ncols:
            raise ValueError("ragged matrix")
        for j in range(ncols):
            entry = row[j]
            m[i][j] = entry
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        have_piv = False
        for i in range(rank, nrows):
            if m[i][col] != 0:
                piv = i
                have_piv = True
                break
        if not have_piv:
            continue
        if piv != rank:
            for j in range(ncols):
                tmp = m[rank][j]
                m[rank][j] = m[piv][j]
                m[piv][j] = tmp
        pivot = m[rank][col]
        for i in range(rank + 1, nrows):
            mic = m[i][col]
            for j in range(col + 1, ncols):
                num = pivot * m[i][j] - mic * m[rank][j]
                m[i][j] = num / prev
            m[i][col] = 0
        prev = pivot
        rank += 1
    return rank


def sign_range(points, normal, offset):
    cdef Py_ssize_t d = len(normal), i, j, npts = len(points)
    cdef long long nv[12]
    cdef long long entry
    cdef i128 s, off
    cdef int lo = 0, hi = 0
    if d > 12:
        raise ValueError("dimension too large for the compiled kernel")
    for j in range(d):
        entry = normal[j]
        nv[j] = entry
    off = <long long> offset
    for i in range(npts):
        p = points[i]
        s = -off
        for j in range(d):
            entry = p[j]
            s += <i128> nv[j] * entry
        if s < 0:
            lo = -1
            if hi > 0:
                break
        elif s > 0:
            hi = 1
            if lo < 0:
                break
    return lo, hi
