"""Integer matrix kernels, pure Python reference implementation.

Every exact determinant, rank and hyperplane side test in the package
funnels through these three functions after denominators are cleared.
A compiled twin lives in _core.pyx; kernels.py selects one at import.
"""


def det_int(rows):
    """Determinant of a square integer matrix by Bareiss elimination.

    The empty matrix has determinant 1. All intermediate divisions are
    exact, so the result is an exact integer.
    """
    n = len(rows)
    if n == 0:
        return 1
    m = [list(r) for r in rows]
    for r in m:
        if len(r) != n:
            raise ValueError("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = m[k][k]
        rk = m[k]
        for i in range(k + 1, n):
            ri = m[i]
            mik = ri[k]
            for j in range(k + 1, n):
                # Bareiss update: exact division by the previous pivot.
                ri[j] = (pivot * ri[j] - mik * rk[j]) // prev
            ri[k] = 0
        prev = pivot
    return sign * m[n - 1][n - 1]


def rank_int(rows):
    """Rank of a rectangular integer matrix, fraction-free elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    if nrows == 0:
        return 0
    ncols = len(m[0])
    for r in m:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        piv = None
        for i in range(rank, nrows):
            if m[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            m[rank], m[piv] = m[piv], m[rank]
        pivot = m[rank][col]
        rk = m[rank]
        for i in range(rank + 1, nrows):
            ri = m[i]
            mic = ri[col]
            for j in range(col + 1, ncols):
                q, rem = divmod(pivot * ri[j] - mic * rk[j], prev)
                if rem:
                    raise AssertionError("fraction-free update was not exact")
                ri[j] = q
            ri[col] = 0
        prev = pivot
        rank += 1
    return rank


def sign_range(points, normal, offset):
    """Extreme signs of n.x - offset over integer points.

    Returns (lo, hi) with lo = min observed sign and hi = max observed
    sign, each one of -1, 0, +1. Exits early once both strict signs have
    been seen, which is the common case in facet scans.
    """
    lo = 0
    hi = 0
    for p in points:
        s = -offset
        for a, b in zip(p, normal):
            s += a * b
        if s < 0:
            lo = -1
            if hi > 0:
                break
        elif s > 0:
            hi = 1
            if lo < 0:
                break
    return lo, hi
