"""Exact rational linear algebra on plain Python lists of ``Fraction``.

Vectors are lists of ``Fraction``; matrices are lists of rows.  Every routine
returns fresh lists and never mutates its arguments.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Sequence

from .errors import ParseError, SingularMatrixError

Vector = list
Matrix = list


def frac(x) -> Fraction:
    """Coerce ints, Fractions, floats and ``"p/q"`` strings to ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational literal: {x!r}") from exc
    if isinstance(x, bool):
        raise ParseError(f"not a rational literal: {x!r}")
    return Fraction(x)


def fmt(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(values: Iterable) -> Vector:
    return [frac(v) for v in values]


def mat(rows: Iterable[Iterable]) -> Matrix:
    return [[frac(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def dot(u: Sequence, v: Sequence) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def add(u: Sequence, v: Sequence) -> Vector:
    return [x + y for x, y in zip(u, v)]


def sub(u: Sequence, v: Sequence) -> Vector:
    return [x - y for x, y in zip(u, v)]


def scale(c, u: Sequence) -> Vector:
    return [c * x for x in u]


def norm_sq(u: Sequence) -> Fraction:
    return dot(u, u)


def mat_vec(a: Matrix, v: Sequence) -> Vector:
    return [dot(row, v) for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def mat_scale(c, a: Matrix) -> Matrix:
    return [[c * x for x in row] for row in a]


def columns(a: Matrix) -> list[Vector]:
    return transpose(a) if a else []


def from_columns(cols: Sequence[Sequence], rows: int | None = None) -> Matrix:
    if not cols:
        return [[] for _ in range(rows or 0)]
    return [list(r) for r in zip(*cols)]


def gram(cols: Sequence[Sequence]) -> Matrix:
    """Gram matrix of a list of column vectors."""
    return [[dot(u, v) for v in cols] for u in cols]


def is_integral(values: Iterable) -> bool:
    return all(frac(v).denominator == 1 for v in values)


def det(a: Matrix) -> Fraction:
    n = len(a)
    m = [row[:] for row in a]
    result = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            m[c], m[p] = m[p], m[c]
            result = -result
        pivot = m[c][c]
        result *= pivot
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / pivot
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return result


def invert(a: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination."""
    n = len(a)
    if any(len(row) != n for row in a):
        raise SingularMatrixError("matrix is not square")
    m = [row[:] + e for row, e in zip(a, identity(n))]
    for c in range(n):
        p = next((r for r in range(c, n) if m[r][c] != 0), None)
        if p is None:
            raise SingularMatrixError("matrix is singular")
        m[c], m[p] = m[p], m[c]
        pivot = m[c][c]
        m[c] = [x / pivot for x in m[c]]
        for r in range(n):
            if r != c and m[r][c] != 0:
                f = m[r][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return [row[n:] for row in m]


def rref(a: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    m = [row[:] for row in a]
    rows = len(m)
    cols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pivot = m[r][c]
        m[r] = [x / pivot for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def _normalize_sign(v: Vector) -> Vector:
    lead = next((x for x in v if x != 0), Fraction(0))
    return [-x for x in v] if lead < 0 else v


def solve_linear(a: Matrix, b: Sequence, ncols: int | None = None) -> tuple[Vector | None, list[Vector]]:
    """Solve ``a x = b`` exactly.

    Returns ``(particular, kernel)`` where ``particular`` is ``None`` when the
    system is infeasible and ``kernel`` is a list of vectors spanning
    ``ker(a)`` (first nonzero entry positive).  ``ncols`` is needed only when
    ``a`` has no rows.
    """
    n = len(a[0]) if a else (ncols or 0)
    if len(a) != len(b):
        raise ValueError("row count of a does not match dim of b")
    aug = [list(row) + [frac(v)] for row, v in zip(a, b)]
    m, pivots = rref(aug) if aug else ([], [])
    if n in pivots:
        return None, _kernel_from_rref(m, [p for p in pivots if p < n], n)
    particular = [Fraction(0)] * n
    for row, p in zip(m, pivots):
        particular[p] = row[n]
    return particular, _kernel_from_rref(m, pivots, n)


def _kernel_from_rref(m: Matrix, pivots: list[int], n: int) -> list[Vector]:
    free = [c for c in range(n) if c not in pivots]
    kernel = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, p in zip(m, pivots):
            v[p] = -row[f]
        kernel.append(_normalize_sign(v))
    return kernel


def rank(a: Matrix) -> int:
    return len(rref(a)[1]) if a and a[0] else 0


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf(m: Matrix) -> tuple[Matrix, Matrix]:
    """Column-style Hermite normal form ``H = M U`` with ``U`` unimodular.

    Nonzero columns of ``H`` come first, their pivot rows strictly increase,
    pivots are positive and entries left of a pivot lie in ``[0, pivot)``.
    """
    rows = len(m)
    k = len(m[0]) if m else 0
    if not is_integral(x for row in m for x in row):
        raise ValueError("hnf needs an integer matrix")
    # work column-major on ints: h[j] is column j of H, u[j] column j of U
    h = [[int(m[i][j]) for i in range(rows)] for j in range(k)]
    u = [[int(i == j) for i in range(k)] for j in range(k)]
    c = 0
    for i in range(rows):
        if c == k:
            break
        for j in range(c + 1, k):
            b = h[j][i]
            if b == 0:
                continue
            a = h[c][i]
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            for cols in (h, u):
                cc, cj = cols[c], cols[j]
                cols[c] = [x * p + y * q for p, q in zip(cc, cj)]
                cols[j] = [-bg * p + ag * q for p, q in zip(cc, cj)]
        pivot = h[c][i]
        if pivot == 0:
            continue
        if pivot < 0:
            h[c] = [-v for v in h[c]]
            u[c] = [-v for v in u[c]]
            pivot = -pivot
        for j in range(c):
            q = h[j][i] // pivot
            if q:
                h[j] = [p - q * s for p, s in zip(h[j], h[c])]
                u[j] = [p - q * s for p, s in zip(u[j], u[c])]
        c += 1
    to_matrix = lambda cols, nrows: [[Fraction(cols[j][i]) for j in range(k)] for i in range(nrows)]
    return to_matrix(h, rows), to_matrix(u, k)


def integer_solutions(a: Matrix, b: Sequence, ncols: int) -> tuple[Vector, list[Vector]] | None:
    """All integer ``t`` with ``a t = b`` as ``t0 + span_Z(kernel)``.

    Rows of ``a`` and ``b`` may be rational; each row is scaled to integers
    first.  Returns ``None`` when no integer solution exists.
    """
    if not a:
        return [Fraction(0)] * ncols, [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ia, ib = [], []
    for row, v in zip(a, b):
        den = 1
        for x in list(row) + [frac(v)]:
            den = den * x.denominator // gcd(den, x.denominator)
        ia.append([x * den for x in row])
        ib.append(frac(v) * den)
    h, u = hnf(ia)
    k = ncols
    w: list[Fraction] = []
    col = 0
    # forward substitution along pivot rows of the column echelon form
    for i in range(len(h)):
        acc = ib[i] - sum((h[i][j] * w[j] for j in range(col)), Fraction(0))
        if col < k and h[i][col] != 0:
            q = acc / h[i][col]
            if q.denominator != 1:
                return None
            w.append(q)
            col += 1
        elif acc != 0:
            return None
    ucols = columns(u)
    t0 = [Fraction(0)] * k
    for coeff, ucol in zip(w, ucols):
        t0 = add(t0, scale(coeff, ucol))
    return t0, [list(c) for c in ucols[col:]]


def ldl_pivots(g: Matrix) -> list[Fraction] | None:
    """Pivots of symmetric Gaussian elimination; ``None`` if not PSD."""
    n = len(g)
    m = [row[:] for row in g]
    pivots = []
    for c in range(n):
        p = m[c][c]
        if p < 0:
            return None
        if p == 0:
            if any(m[c][j] != 0 for j in range(c, n)):
                return None
            pivots.append(p)
            continue
        pivots.append(p)
        for r in range(c + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / p
                m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return pivots


def is_psd(g: Matrix) -> bool:
    return ldl_pivots(g) is not None


def is_positive_definite(g: Matrix) -> bool:
    piv = ldl_pivots(g)
    return piv is not None and all(p > 0 for p in piv)


def sqrt_floor(q: Fraction) -> int:
    """``floor(sqrt(q))`` for rational ``q >= 0``."""
    return isqrt(q.numerator // q.denominator)


def integer_range(center: Fraction, radius_sq: Fraction) -> range:
    """Integers ``t`` with ``(t - center)**2 <= radius_sq``, exactly."""
    center, radius_sq = frac(center), frac(radius_sq)
    if radius_sq < 0:
        return range(0)
    s = sqrt_floor(radius_sq)
    lo = -((-center.numerator) // center.denominator) - s - 1
    hi = center.numerator // center.denominator + s + 1
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def to_float_matrix(a: Matrix):
    import numpy as np

    return np.array([[float(x) for x in row] for row in a], dtype=float)


def dyadic(x: float, bits: int = 48) -> Fraction:
    """Round a float to a multiple of ``2**-bits``."""
    return Fraction(round(x * (1 << bits)), 1 << bits)
