"""Small exact linear algebra over duck-typed fields (Fraction et al.)."""

from __future__ import annotations

from fractions import Fraction

from .scalars import is_zero


def identity(n, one=None):
    one = Fraction(1) if one is None else one
    zero = one - one
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = 0
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    return [sum_prod(row, v) for row in a]


def sum_prod(row, v):
    acc = 0
    for x, y in zip(row, v):
        acc = acc + x * y
    return acc


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, c):
    return [[c * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_eq(a, b):
    from .scalars import scalar_equal
    return all(
        scalar_equal(x, y) for ra, rb in zip(a, b) for x, y in zip(ra, rb)
    )


def mat_inv(a):
    """Gauss-Jordan inverse; raises ValueError on a singular matrix."""
    n = len(a)
    m = [list(row) for row in a]
    inv = identity(n, _one_of(a))
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            raise ValueError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r != col and not is_zero(m[r][col]):
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv


def _one_of(a):
    for row in a:
        for x in row:
            try:
                return x - x + 1
            except TypeError:
                break
    return Fraction(1)


def solve_linear(rows, rhs):
    """One solution of rows * x = rhs over an exact field, or None if
    inconsistent.  Free variables are set to zero."""
    if not rows:
        return []
    ncols = len(rows[0])
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(m)):
            if not is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        m[rank] = [x / p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and not is_zero(m[r][col]):
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
        if rank == len(m):
            break
    for r in range(rank, len(m)):
        if not is_zero(m[r][ncols]):
            return None
    zero = Fraction(0)
    if rows and rows[0]:
        zero = rows[0][0] - rows[0][0]
    x = [zero] * ncols
    for r, col in enumerate(pivots):
        x[col] = m[r][ncols]
    return x
