"""Exact linear algebra over the rationals.

Matrices are plain lists of lists of Fraction.  Everything here is
denominator-exact; no floats appear anywhere in the package.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def mat(rows) -> Matrix:
    return [[frac(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(n: int, m: int) -> Matrix:
    return [[Fraction(0)] * m for _ in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a: Matrix) -> Matrix:
    c = frac(c)
    return [[c * x for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def mat_vec(a: Matrix, v: Vector) -> Vector:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def mat_eq(a: Matrix, b: Matrix) -> bool:
    return a == b


def det(a: Matrix) -> Fraction:
    """Determinant by fraction-free-ish Gaussian elimination."""
    n = len(a)
    m = [row[:] for row in a]
    sign = 1
    acc = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        acc *= p
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / p
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return acc * sign


def solve(a: Matrix, rhs: Vector) -> Vector:
    """Solve a x = rhs for square nonsingular a."""
    n = len(a)
    m = [row[:] + [rhs[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [row[:] + identity(n)[i] for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def nullspace(a: Matrix) -> list[Vector]:
    """Basis of the right kernel of a (possibly non-square)."""
    if not a:
        return []
    rows = len(a)
    cols = len(a[0])
    m = [row[:] for row in a]
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = None
        for rr in range(r, rows):
            if m[rr][c] != 0:
                piv = rr
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for rr in range(rows):
            if rr != r and m[rr][c] != 0:
                f = m[rr][c]
                m[rr] = [x - f * y for x, y in zip(m[rr], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def is_integral(a: Matrix) -> bool:
    return all(x.denominator == 1 for row in a for x in row)


def denominator_lcm(a: Matrix) -> int:
    d = 1
    for row in a:
        for x in row:
            d = d * x.denominator // gcd(d, x.denominator)
    return d


def hnf(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form (upper echelon, positive pivots, entries
    above a pivot reduced into [0, pivot)).  Zero rows are dropped."""
    m = [list(r) for r in rows]
    if not m:
        return []
    nrows = len(m)
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        # gcd-reduce column c below row r
        while True:
            nz = [i for i in range(r, nrows) if m[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[piv] = m[piv], m[r]
            if m[r][c] < 0:
                m[r] = [-x for x in m[r]]
            done = True
            for i in range(r + 1, nrows):
                if m[i][c] != 0:
                    qq = m[i][c] // m[r][c]
                    m[i] = [x - qq * y for x, y in zip(m[i], m[r])]
                    if m[i][c] != 0:
                        done = False
            if done:
                break
        if r < nrows and m[r][c] != 0:
            for i in range(r):
                qq = m[i][c] // m[r][c]
                if qq:
                    m[i] = [x - qq * y for x, y in zip(m[i], m[r])]
            r += 1
            if r == nrows:
                break
    return [row for row in m[:r] if any(row)]


def lattice_intersection(bases: list[list[list[int]]], n: int) -> list[list[int]]:
    """Intersection of full-rank integer lattices in Z^n given by row bases.

    Uses duality: (L1 cap L2)* = L1* + L2*, with duals computed exactly
    over Q and rescaled to integer matrices.
    """

    def dual_rows(b: list[list[int]]) -> Matrix:
        binv = inverse(mat(b))
        return transpose(binv)

    acc = bases[0]
    for nxt in bases[1:]:
        d1 = dual_rows(acc)
        d2 = dual_rows(nxt)
        scale = 1
        for rows in (d1, d2):
            scale_l = denominator_lcm(rows)
            scale = scale * scale_l // gcd(scale, scale_l)
        stacked = [[int(x * scale) for x in row] for row in d1 + d2]
        summed = hnf(stacked)
        if len(summed) != n:
            raise ValueError("lattices do not span")
        dsum = [[Fraction(x, scale) for x in row] for row in summed]
        inter = dual_rows(dsum)
        den = denominator_lcm(inter)
        if den != 1:
            raise ValueError("intersection is not integral")
        acc = hnf([[int(x) for x in row] for row in inter])
    return acc


def charpoly(a: Matrix) -> list[Fraction]:
    """Characteristic polynomial of a (monic, coefficients low-to-high)
    by the Faddeev-LeVerrier recursion."""
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = identity(n)
    c = Fraction(1)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        tr = sum((m[i][i] for i in range(n)), Fraction(0))
        c = -tr / k
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] += c
    return coeffs


def poly_mul(p: list, q: list, zero):
    out = [zero] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        for j, y in enumerate(q):
            out[i + j] = out[i + j] + x * y
    return out


def poly_nth_root(q: list, m: int, one, zero) -> list:
    """Monic m-th root of the monic polynomial q (coefficients low-to-high).

    Raises ValueError if q is not an exact m-th power.
    """
    deg_q = len(q) - 1
    if deg_q % m:
        raise ValueError("degree not divisible")
    deg = deg_q // m
    p = [zero] * deg + [one]
    for j in range(1, deg + 1):
        cur = p
        acc = [one]
        for _ in range(m):
            acc = poly_mul(acc, cur, zero)
        target_idx = m * deg - j
        delta = q[target_idx] - acc[target_idx]
        p[deg - j] = delta / m
    acc = [one]
    for _ in range(m):
        acc = poly_mul(acc, p, zero)
    if len(acc) != len(q) or any(acc[i] != q[i] for i in range(len(q))):
        raise ValueError("polynomial is not an exact m-th power")
    return p
