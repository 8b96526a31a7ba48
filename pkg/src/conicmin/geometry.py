"""Ellipsoids, cones and V-polytopes.

Everything here is exact except :func:`polytope_distance`, which projects a
float point onto a convex hull with Wolfe's minimum-norm-point method.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact as ex
from .errors import (
    NonpositiveFactorError,
    ShapeMismatchError,
    SingularMatrixError,
    ZeroDirectionError,
)


@dataclass(frozen=True)
class Ellipsoid:
    """``El(A, a) = {a + A u : |u| <= 1}``."""

    shape: tuple
    center: tuple

    def __init__(self, shape, center):
        a = ex.mat(shape)
        c = ex.vec(center)
        n = len(c)
        if len(a) != n or any(len(r) != n for r in a):
            raise ShapeMismatchError("shape must be n x n with n = len(center)")
        if n and ex.det(a) == 0:
            raise SingularMatrixError("ellipsoid shape is singular")
        object.__setattr__(self, "shape", tuple(tuple(r) for r in a))
        object.__setattr__(self, "center", tuple(c))

    @classmethod
    def ball(cls, center, radius=1) -> "Ellipsoid":
        r = ex.frac(radius)
        if r <= 0:
            raise NonpositiveFactorError("radius must be positive")
        return cls(ex.mat_scale(r, ex.identity(len(center))), center)

    @property
    def dim(self) -> int:
        return len(self.center)

    def shape_matrix(self) -> list:
        return [list(r) for r in self.shape]

    def contains(self, x: Sequence) -> bool:
        u = ex.mat_vec(ex.invert(self.shape_matrix()), ex.sub(ex.vec(x), self.center))
        return ex.norm_sq(u) <= 1

    def det(self) -> Fraction:
        """Determinant of the shape; volume is ``|det|`` times the unit-ball volume."""
        return ex.det(self.shape_matrix())


def ellipsoid_transform(b, e: Ellipsoid) -> Ellipsoid:
    """Image ``{B x : x in E}`` as ``El(BA, Ba)``."""
    b = ex.mat(b)
    if len(b) != e.dim or ex.det(b) == 0:
        raise SingularMatrixError("transform must be nonsingular and match E")
    return Ellipsoid(ex.mat_mul(b, e.shape_matrix()), ex.mat_vec(b, e.center))


def scale_about_center(e: Ellipsoid, factor) -> Ellipsoid:
    f = ex.frac(factor)
    if f <= 0:
        raise NonpositiveFactorError("scale factor must be positive")
    return Ellipsoid(ex.mat_scale(f, e.shape_matrix()), e.center)


def width_along(e: Ellipsoid, c: Sequence) -> Fraction:
    """Squared width ``4 |cᵀA|²`` of ``e`` along ``c``."""
    c = ex.vec(c)
    if not any(c):
        raise ZeroDirectionError("direction must be nonzero")
    cta = ex.mat_vec(ex.transpose(e.shape_matrix()), c)
    return 4 * ex.norm_sq(cta)


# ---------------------------------------------------------------- exact LP


def nonneg_solution(m: list, b: Sequence) -> list | None:
    """Some ``t >= 0`` with ``m t = b``, or ``None``.  Exact phase-one simplex."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    b = ex.vec(b)
    if rows == 0:
        return [Fraction(0)] * cols
    # tableau rows: [m | I | b], sign-flipped so b >= 0
    tab = []
    for i in range(rows):
        s = -1 if b[i] < 0 else 1
        tab.append([s * v for v in m[i]] + [Fraction(int(i == j)) for j in range(rows)] + [s * b[i]])
    basis = [cols + i for i in range(rows)]
    width = cols + rows
    # objective: minimize the sum of artificials, reduced cost row
    cost = [Fraction(0)] * (width + 1)
    for i in range(rows):
        for j in range(width + 1):
            cost[j] -= tab[i][j]
    for i in range(rows):
        cost[cols + i] += 1
    while True:
        # Bland: lowest index with negative reduced cost
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(rows):
            if tab[i][enter] > 0:
                ratio = tab[i][-1] / tab[i][enter]
                if best is None or (ratio, basis[i]) < (best[0], basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded cannot happen in phase one
            break
        r = best[1]
        piv = tab[r][enter]
        tab[r] = [v / piv for v in tab[r]]
        for i in range(rows):
            if i != r and tab[i][enter] != 0:
                f = tab[i][enter]
                tab[i] = [x - f * y for x, y in zip(tab[i], tab[r])]
        f = cost[enter]
        cost = [x - f * y for x, y in zip(cost, tab[r])]
        basis[r] = enter
    if -cost[-1] != 0:
        return None
    t = [Fraction(0)] * width
    for i, j in enumerate(basis):
        t[j] = tab[i][-1]
    return t[:cols]


@dataclass(frozen=True)
class ConeAtApex:
    """``apex + cone(generators)``."""

    apex: tuple
    generators: tuple

    def __init__(self, apex, generators):
        object.__setattr__(self, "apex", tuple(ex.vec(apex)))
        gens = tuple(tuple(ex.vec(g)) for g in generators)
        if any(len(g) != len(self.apex) for g in gens):
            raise ShapeMismatchError("generator dimension differs from apex")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def over_points(cls, points: Sequence[Sequence], apex: Sequence) -> "ConeAtApex":
        """``cone(points | apex)``: rays from the apex pointing away from each point."""
        apex = ex.vec(apex)
        return cls(apex, [ex.sub(apex, ex.vec(p)) for p in points])


def cone_member(c: ConeAtApex, y: Sequence) -> bool:
    y = ex.vec(y)
    if len(y) != len(c.apex):
        raise ShapeMismatchError("point dimension differs from cone")
    rhs = ex.sub(y, c.apex)
    if not c.generators:
        return not any(rhs)
    m = ex.from_columns(c.generators)
    return nonneg_solution(m, rhs) is not None


@dataclass(frozen=True)
class VPolytope:
    vertices: tuple

    def __init__(self, vertices):
        vs = tuple(tuple(ex.vec(v)) for v in vertices)
        if not vs:
            raise ShapeMismatchError("polytope needs at least one vertex")
        if any(len(v) != len(vs[0]) for v in vs):
            raise ShapeMismatchError("vertex dimensions differ")
        object.__setattr__(self, "vertices", vs)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])


def polytope_member(p: VPolytope, y: Sequence) -> bool:
    y = ex.vec(y)
    if len(y) != p.dim:
        raise ShapeMismatchError("point dimension differs from polytope")
    m = ex.from_columns(p.vertices) + [[Fraction(1)] * len(p.vertices)]
    return nonneg_solution(m, y + [Fraction(1)]) is not None


# ---------------------------------------------------------------- float projection


def _min_norm_point(pts: np.ndarray, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    """Wolfe's algorithm: the point of ``conv(pts)`` closest to the origin."""
    scale = max(1.0, float(np.max(np.sum(pts * pts, axis=1))))
    j = int(np.argmin(np.sum(pts * pts, axis=1)))
    active = [j]
    w = np.array([1.0])
    x = pts[j].copy()
    for _ in range(max_iter):
        j = int(np.argmin(pts @ x))
        if x @ pts[j] >= x @ x - tol * scale or j in active:
            break
        active.append(j)
        w = np.append(w, 0.0)
        while True:
            s = pts[active]
            k = len(active)
            kkt = np.zeros((k + 1, k + 1))
            kkt[:k, :k] = s @ s.T
            kkt[:k, k] = 1.0
            kkt[k, :k] = 1.0
            rhs = np.zeros(k + 1)
            rhs[k] = 1.0
            alpha = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
            if np.all(alpha > 1e-14):
                w = alpha
                break
            neg = alpha <= 1e-14
            theta = np.min(w[neg] / (w[neg] - alpha[neg]))
            w = theta * alpha + (1 - theta) * w
            keep = w > 1e-14
            if not keep.any():
                keep[int(np.argmax(w))] = True
            active = [a for a, kp in zip(active, keep) if kp]
            w = w[keep] / w[keep].sum()
        x = w @ pts[active]
    return x


def polytope_distance(p: VPolytope, y: Sequence[float]) -> float:
    """Euclidean distance from ``y`` to ``conv(p.vertices)`` (float, tolerance 1e-9)."""
    pts = np.array([[float(v) for v in vert] for vert in p.vertices], dtype=float)
    yv = np.array([float(v) for v in y], dtype=float)
    if pts.shape[1] != yv.shape[0]:
        raise ShapeMismatchError("point dimension differs from polytope")
    x = _min_norm_point(pts - yv)
    return float(np.linalg.norm(x))
