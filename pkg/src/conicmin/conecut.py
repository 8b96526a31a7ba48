"""Cone cuts: the pyramid walk that certifies a cone of larger values, and the
ellipsoid covering a ball minus such a cone.

The walk is geometric and runs in floating point.  Every point handed to the
oracle is first rounded to a dyadic rational, so comparisons stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exact as ex
from .errors import IterationCapError, ShrinkViolationError
from .geometry import ConeAtApex, Ellipsoid

WIDEN = Fraction(255, 256)
POINT_BITS = 40
SHAPE_BITS = 30
INFLATE = 1 + 1e-6


def cap_volume(alpha: float, n: int) -> float:
    """Volume ratio of the smallest ellipsoid around ``B ∩ {x·u <= alpha}``."""
    if alpha >= 1.0 / n:
        return 1.0
    axial = n * (1 + alpha) / (n + 1)
    trans = n * math.sqrt(1 - alpha * alpha) / math.sqrt(n * n - 1)
    return axial * trans ** (n - 1)


@dataclass(frozen=True)
class ConeCutParams:
    c_hat: Fraction = Fraction(1, 2)

    def __post_init__(self):
        c = ex.frac(self.c_hat)
        if not 0 < c <= 1:
            raise ValueError("c_hat must lie in (0, 1]")
        object.__setattr__(self, "c_hat", c)

    @staticmethod
    def cos_phi(n: int) -> Fraction:
        """Cosine of the working angle, a hair wider than arccos(1/(2n))."""
        return WIDEN / (2 * n)

    @staticmethod
    def beta(n: int) -> float:
        return cap_volume(1.0 / (2 * n), n) ** (1.0 / n)

    @staticmethod
    def beta_hat(n: int) -> float:
        return (1 + ConeCutParams.beta(n)) / 2

    @staticmethod
    def gamma(n: int) -> Fraction:
        cos = Fraction(1, 2 * n)
        return (1 - n * cos) / (1 + n)

    @staticmethod
    def shrink_bound(n: int) -> Fraction:
        """Rational upper bound for ``beta_hat(n)**n`` (rounded up at 1e-12)."""
        v = ConeCutParams.beta_hat(n) ** n
        return Fraction(math.ceil(v * 10**12), 10**12)

    def with_c_hat(self, c_hat) -> "ConeCutParams":
        return ConeCutParams(c_hat)


def regular_simplex(m: int) -> np.ndarray:
    """``m + 1`` unit vectors in ``R^m`` forming a regular simplex around 0."""
    if m == 1:
        return np.array([[1.0], [-1.0]])
    v = np.eye(m + 1) - 1.0 / (m + 1)
    q, _ = np.linalg.qr(v[:, :m])
    pts = v @ q
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def _orth_complement(u: np.ndarray) -> np.ndarray:
    n = len(u)
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(n)]))
    return q[:, 1:n]


def pyramid_angles(n: int) -> tuple[float, float]:
    """Face angle ``phi`` and height-to-edge angle ``psi``."""
    phi = math.acos(float(ConeCutParams.cos_phi(n)))
    psi = math.atan((n - 1) * math.tan(phi))
    return phi, psi


def pyramid_base(p: np.ndarray, psi: float, frame: np.ndarray | None = None) -> np.ndarray:
    """Base vertices of the regular pyramid with apex ``p`` (relative to the ball center).

    Each base vertex ``v`` is orthogonal to the edge ``p - v``, so
    ``|v| = |p| sin(psi)``.
    """
    n = len(p)
    norm = np.linalg.norm(p)
    u = p / norm
    comp = _orth_complement(u) if frame is None else frame
    dirs = regular_simplex(n - 1) @ comp.T
    edge = norm * math.cos(psi)
    return np.array([p + edge * (-math.cos(psi) * u + math.sin(psi) * d) for d in dirs])


def walk_cap(n: int) -> int:
    _, psi = pyramid_angles(n)
    proven = math.ceil(math.log(1.0 / n) / math.log(math.sin(psi)))
    return 10 * max(proven, 1)


@dataclass
class ConeCut:
    """Outcome of the pyramid walk, in the caller's float frame."""

    apex: np.ndarray
    axis: np.ndarray
    base: np.ndarray
    apices: list = field(default_factory=list)
    comparisons: int = 0

    def cone(self, to_point: Callable) -> ConeAtApex:
        return ConeAtApex.over_points([to_point(v) for v in self.base], to_point(self.apex))


def dyadic_point(x: np.ndarray) -> list:
    return [ex.dyadic(float(v), POINT_BITS) for v in x]


def cone_cut_construct(
    leq: Callable,
    center: np.ndarray,
    radius: float,
    rotation: np.ndarray | None = None,
    to_point: Callable = dyadic_point,
) -> ConeCut:
    """Walk regular pyramids inside the ball ``center + radius·B`` until the
    apex is oracle-maximal among its pyramid's vertices.

    ``leq(x, y)`` compares two rational points.  The returned cone
    ``cone(base | apex)`` holds only points no better than the apex.
    """
    center = np.asarray(center, dtype=float)
    n = len(center)
    _, psi = pyramid_angles(n)
    simplex = regular_simplex(n) * radius
    if rotation is not None:
        simplex = simplex @ rotation.T
    point = lambda rel: to_point(center + rel)
    comparisons = 0
    best = simplex[0]
    for v in simplex[1:]:
        comparisons += 1
        if not leq(point(v), point(best)):
            best = v
    p = best
    apices = [p]
    cap = walk_cap(n)
    while True:
        base = pyramid_base(p, psi)
        top = p
        for v in base:
            comparisons += 1
            if not leq(point(v), point(top)):
                top = v
        if top is p:
            break
        p = top
        apices.append(p)
        if len(apices) > cap:
            raise IterationCapError(f"pyramid walk exceeded {cap} steps")
    axis = p / np.linalg.norm(p)
    return ConeCut(center + p, axis, center + base, apices=[center + a for a in apices], comparisons=comparisons)


def cut_height(offset: np.ndarray, axis: np.ndarray, cos_phi: float) -> float:
    """Height ``h`` such that ``B \\ C ⊆ B ∩ {x·axis <= h}`` for a cone of half-angle
    ``phi`` around ``axis`` with apex ``offset`` (unit ball frame)."""
    sin_phi = math.sqrt(1 - cos_phi * cos_phi)
    along = float(offset @ axis)
    across = float(np.linalg.norm(offset - along * axis))
    t = along + across * cos_phi / sin_phi
    disc = 1 - t * t * sin_phi * sin_phi
    if disc < 0 or t < -1:
        return 1.0
    return t * sin_phi * sin_phi + cos_phi * math.sqrt(disc)


def covering_ellipsoid(center, radius, cut: ConeCut, params: ConeCutParams | None = None) -> Ellipsoid:
    """An ellipsoid containing ``W \\ C`` for the ball ``W`` and the cut's cone.

    The apex is slid along the axis until the cone's rotation core fits
    inside ``C``; what remains of ``W`` lies under a plane, and the minimal
    ellipsoid of that cap is returned (rationalized, slightly inflated).
    Raises :class:`ShrinkViolationError` when the volume ratio exceeds
    ``beta_hat**n``.
    """
    c = np.array([float(v) for v in center])
    n = len(c)
    rad = float(radius)
    offset = (np.asarray(cut.apex) - c) / rad
    u = np.asarray(cut.axis, dtype=float)
    h = cut_height(offset, u, float(ConeCutParams.cos_phi(n)))
    ratio = cap_volume(h, n)
    bound = ConeCutParams.shrink_bound(n)
    # leave room for the inflation and for later re-rounding of the shape
    if ratio * (INFLATE * (1 + 2.0**-20)) ** n > float(bound):
        raise ShrinkViolationError(f"volume ratio {ratio:.6f} exceeds {float(bound):.6f}")
    tau = (1 - n * h) / (n + 1)
    axial = n * (1 + h) / (n + 1)
    trans = n * math.sqrt(1 - h * h) / math.sqrt(n * n - 1)
    shape = INFLATE * rad * (trans * np.eye(n) + (axial - trans) * np.outer(u, u))
    new_center = c - rad * tau * u
    e = Ellipsoid(
        [[ex.dyadic(float(v), SHAPE_BITS) for v in row] for row in shape],
        [ex.dyadic(float(v), SHAPE_BITS) for v in new_center],
    )
    if abs(e.det()) > bound * Fraction(rad) ** n:
        raise ShrinkViolationError("rationalized covering ellipsoid misses the volume budget")
    return e
