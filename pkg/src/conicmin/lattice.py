"""Lattice reduction, exact shortest/closest vector search and flatness directions.

The workhorses operate on Gram matrices so callers that only know a quadratic
form (the minimizer works in coefficient space) can use them directly.  All
arithmetic is exact.  Enumeration is Fincke-Pohst style on an LLL-reduced
basis and is meant for rank up to about 8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import exact as ex
from .errors import DegenerateError, ShapeMismatchError

DEFAULT_DELTA = Fraction(3, 4)


@dataclass(frozen=True)
class LatticeBasis:
    """Columns of ``basis`` generate the lattice."""

    basis: tuple

    def __init__(self, basis):
        rows = ex.mat(basis)
        if not rows or not rows[0]:
            raise ShapeMismatchError("lattice basis needs at least one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ShapeMismatchError("ragged basis matrix")
        if ex.rank(rows) != len(rows[0]):
            raise DegenerateError("basis columns are linearly dependent")
        object.__setattr__(self, "basis", tuple(tuple(r) for r in rows))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "LatticeBasis":
        return cls(ex.from_columns([ex.vec(c) for c in cols]))

    @classmethod
    def identity(cls, n: int) -> "LatticeBasis":
        return cls(ex.identity(n))

    @property
    def ambient_dim(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis[0])

    def matrix(self) -> list:
        return [list(r) for r in self.basis]

    def columns(self) -> list:
        return ex.columns(self.matrix())

    def gram(self) -> list:
        return ex.gram(self.columns())

    def point(self, coeffs: Sequence) -> list:
        return ex.mat_vec(self.matrix(), ex.vec(coeffs))


# ---------------------------------------------------------------- Gram level


def _gso(g: list) -> tuple[list, list]:
    """Gram-Schmidt data ``(mu, bstar)`` from a Gram matrix."""
    k = len(g)
    mu = [[Fraction(0)] * k for _ in range(k)]
    bstar = [Fraction(0)] * k
    for i in range(k):
        for j in range(i):
            s = g[i][j] - sum((mu[j][l] * mu[i][l] * bstar[l] for l in range(j)), Fraction(0))
            mu[i][j] = s / bstar[j]
        bstar[i] = g[i][i] - sum((mu[i][l] ** 2 * bstar[l] for l in range(i)), Fraction(0))
        if bstar[i] <= 0:
            raise DegenerateError("Gram matrix is not positive definite")
        mu[i][i] = Fraction(1)
    return mu, bstar


def _round(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def lll_gram(g: list, delta=DEFAULT_DELTA) -> tuple[list, list]:
    """LLL on a Gram matrix.  Returns ``(G', U)`` with ``G' = Uᵀ G U``."""
    delta = ex.frac(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    k = len(g)
    g = [row[:] for row in g]
    u = ex.identity(k)

    def col_op(i, j, q):
        # b_i <- b_i - q b_j
        for r in range(k):
            g[r][i] -= q * g[r][j]
        for c in range(k):
            g[i][c] -= q * g[j][c]
        for r in range(k):
            u[r][i] -= q * u[r][j]

    def swap(i, j):
        for row in g:
            row[i], row[j] = row[j], row[i]
        g[i], g[j] = g[j], g[i]
        for row in u:
            row[i], row[j] = row[j], row[i]

    mu, bstar = _gso(g)
    i = 1
    while i < k:
        for j in range(i - 1, -1, -1):
            q = _round(mu[i][j])
            if q:
                col_op(i, j, q)
                for l in range(j + 1):
                    mu[i][l] -= q * mu[j][l]
        if bstar[i] >= (delta - mu[i][i - 1] ** 2) * bstar[i - 1]:
            i += 1
        else:
            swap(i, i - 1)
            mu, bstar = _gso(g)
            i = max(i - 1, 1)
    return g, u


def enumerate_gram(g: list, target: Sequence, bound) -> list[tuple[Fraction, list]]:
    """All integer ``t`` with ``(t - y)ᵀ G (t - y) <= bound`` as ``(value, t)``."""
    k = len(g)
    y = ex.vec(target)
    bound = ex.frac(bound)
    mu, bstar = _gso(g)
    out = []
    x = [0] * k

    def rec(i: int, used: Fraction):
        center = y[i] - sum((mu[j][i] * (x[j] - y[j]) for j in range(i + 1, k)), Fraction(0))
        for t in ex.integer_range(center, (bound - used) / bstar[i]):
            x[i] = t
            val = used + bstar[i] * (t - center) ** 2
            if i == 0:
                out.append((val, [Fraction(v) for v in x]))
            else:
                rec(i - 1, val)

    if bound >= 0:
        rec(k - 1, Fraction(0))
    return out


def _search(g: list, y: list, bound: Fraction, accept, key):
    """Best-first exact search with a shrinking inclusive bound."""
    k = len(g)
    mu, bstar = _gso(g)
    x = [0] * k
    best = [None, None]  # (value, key)

    def rec(i: int, used: Fraction, bound_ref: list):
        center = y[i] - sum((mu[j][i] * (x[j] - y[j]) for j in range(i + 1, k)), Fraction(0))
        rng = ex.integer_range(center, (bound_ref[0] - used) / bstar[i])
        for t in sorted(rng, key=lambda t: (abs(t - center), t)):
            val = used + bstar[i] * (t - center) ** 2
            if val > bound_ref[0]:
                continue
            x[i] = t
            if i == 0:
                if accept(x):
                    kk = key(x)
                    if best[0] is None or (val, kk) < (best[0], best[1]):
                        best[0], best[1] = val, kk
                        bound_ref[0] = val
            else:
                rec(i - 1, val, bound_ref)
        x[i] = 0

    rec(k - 1, Fraction(0), [bound])
    return best


def _sign_normalize(t: list) -> list:
    lead = next((v for v in t if v != 0), 0)
    return [-v for v in t] if lead < 0 else t


def svp_gram(g: list, delta=DEFAULT_DELTA) -> list:
    """Integer coefficient vector of a shortest nonzero vector for Gram ``g``.

    Ties are resolved to the lexicographically smallest coefficient vector
    whose first nonzero entry is positive.
    """
    g = ex.mat(g)
    k = len(g)
    gr, u = lll_gram(g, delta)
    bound = min(gr[i][i] for i in range(k))

    def accept(x):
        return any(x)

    def key(x):
        return tuple(_sign_normalize(ex.mat_vec(u, [Fraction(v) for v in x])))

    _, best = _search(gr, [Fraction(0)] * k, bound, accept, key)
    return list(best)


def cvp_gram(g: list, target: Sequence, delta=DEFAULT_DELTA) -> list:
    """Integer ``t`` minimizing ``(t - y)ᵀ G (t - y)``; lexicographic ties."""
    g = ex.mat(g)
    y = ex.vec(target)
    k = len(g)
    gr, u = lll_gram(g, delta)
    uinv = ex.invert(u)
    yr = ex.mat_vec(uinv, y)
    # Babai-style rounding gives a finite starting bound
    babai = [Fraction(_round(v)) for v in yr]
    diff = ex.sub(babai, yr)
    bound = ex.dot(diff, ex.mat_vec(gr, diff))

    def key(x):
        return tuple(ex.mat_vec(u, [Fraction(v) for v in x]))

    _, best = _search(gr, yr, bound, lambda x: True, key)
    return list(best)


# ---------------------------------------------------------------- basis level


def lll_reduce(lat: LatticeBasis, delta=DEFAULT_DELTA) -> LatticeBasis:
    _, u = lll_gram(lat.gram(), delta)
    return LatticeBasis(ex.mat_mul(lat.matrix(), u))


def svp(lat: LatticeBasis) -> list:
    """Shortest nonzero lattice vector (ambient coordinates)."""
    return lat.point(svp_gram(lat.gram()))


def coefficients_of_projection(lat: LatticeBasis, target: Sequence) -> list:
    """Coefficients of the orthogonal projection of ``target`` onto span(L)."""
    b = lat.matrix()
    return ex.mat_vec(ex.invert(lat.gram()), ex.mat_vec(ex.transpose(b), ex.vec(target)))


def cvp(lat: LatticeBasis, target: Sequence) -> list:
    """Closest lattice vector to ``target`` (ambient coordinates)."""
    target = ex.vec(target)
    if len(target) != lat.ambient_dim:
        raise ShapeMismatchError("target dimension does not match the lattice")
    y = coefficients_of_projection(lat, target)
    return lat.point(cvp_gram(lat.gram(), y))


@dataclass(frozen=True)
class FlatnessCertificate:
    direction: tuple
    width_sq: Fraction

    @property
    def width(self) -> float:
        """Decimal approximation of the width; ``width_sq`` is authoritative."""
        return math.sqrt(self.width_sq)


def direction_form(shape: list, lat: LatticeBasis) -> list:
    """Quadratic form ``M`` with ``width_c(E)² = 4 cᵀ M c`` for coefficient directions ``c``."""
    b = lat.matrix()
    ginv = ex.invert(lat.gram())
    # ambient functional for coefficient direction c is d = B G⁻¹ c
    d = ex.mat_mul(b, ginv)
    ad = ex.mat_mul(ex.transpose(shape), d)
    return ex.mat_mul(ex.transpose(ad), ad)


def flatness_direction(ellipsoid, lat: LatticeBasis) -> FlatnessCertificate:
    """Integer direction in coefficient space minimizing the ellipsoid's width."""
    shape = [list(r) for r in ellipsoid.shape]
    if len(shape) != lat.ambient_dim:
        raise ShapeMismatchError("ellipsoid and lattice dimensions differ")
    m = direction_form(shape, lat)
    if not ex.is_positive_definite(m):
        raise DegenerateError("ellipsoid is flat inside span(L)")
    c = svp_gram(m)
    return flatness_from_form(m, c)


def flatness_from_form(m: list, c: list) -> FlatnessCertificate:
    return FlatnessCertificate(tuple(c), 4 * ex.dot(c, ex.mat_vec(m, c)))
