"""Exhaustive enumeration of lattice points and exact first/second minima."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import exact as ex
from .errors import TooLargeError
from .lattice import LatticeBasis, enumerate_gram

LIMIT = 10**7


@dataclass
class EnumerationDomain:
    center: list
    radius: Fraction
    norm: str = "l2"
    lattice: LatticeBasis | None = None
    exclusions: list = field(default_factory=list)
    subspace: tuple | None = None

    def __post_init__(self):
        self.center = ex.vec(self.center)
        self.radius = ex.frac(self.radius)
        if self.norm not in ("l2", "linf"):
            raise ValueError("norm must be 'l2' or 'linf'")
        self.exclusions = [tuple(ex.vec(p)) for p in self.exclusions]

    def contains(self, x: Sequence) -> bool:
        d = ex.sub(x, self.center)
        if self.norm == "l2":
            inside = ex.norm_sq(d) <= self.radius**2
        else:
            inside = max(abs(v) for v in d) <= self.radius
        if not inside or tuple(x) in self.exclusions:
            return False
        if self.subspace is not None:
            a, b = self.subspace
            return ex.mat_vec(ex.mat(a), x) == ex.vec(b)
        return True


def enumerate_points(dom: EnumerationDomain, limit: int = LIMIT) -> list:
    """Every lattice point of the domain, sorted lexicographically."""
    n = len(dom.center)
    if dom.lattice is None or dom.lattice.matrix() == ex.identity(n):
        lo = [math.ceil(c - dom.radius) for c in dom.center]
        hi = [math.floor(c + dom.radius) for c in dom.center]
        count = math.prod(max(0, h - l + 1) for l, h in zip(lo, hi))
        if count > limit:
            raise TooLargeError(f"domain box holds {count} points")
        cands = ([Fraction(v) for v in p] for p in itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))))
    else:
        lat = dom.lattice
        g = lat.gram()
        reach = dom.radius**2 * (n if dom.norm == "linf" else 1)
        k = lat.rank
        vol = math.pi ** (k / 2) / math.gamma(k / 2 + 1) * float(reach) ** (k / 2)
        if vol / math.sqrt(float(ex.det(g))) > limit:
            raise TooLargeError("lattice ball too large to enumerate")
        b = lat.matrix()
        y = ex.mat_vec(ex.invert(g), ex.mat_vec(ex.transpose(b), dom.center))
        off = ex.sub(dom.center, lat.point(y))
        cands = (lat.point(t) for _, t in enumerate_gram(g, y, reach - ex.norm_sq(off)))
    return sorted((p for p in cands if dom.contains(p)), key=tuple)


def brute_min(oracle, points: Sequence) -> tuple[list, list]:
    """First and second minima sets of ``points`` under ``oracle``.

    One pass: two comparisons per point, plus one more for each point that
    lands in (or displaces) the runner-up bucket.
    """
    first: list = []
    second: list = []
    for x in points:
        if not first:
            first = [x]
            continue
        if oracle.compare_leq(x, first[0]):
            if oracle.compare_leq(first[0], x):
                first.append(x)
            else:
                second, first = first, [x]
            continue
        if not second:
            second = [x]
        elif oracle.compare_leq(x, second[0]):
            if oracle.compare_leq(second[0], x):
                second.append(x)
            else:
                second = [x]
    return first, second


def brute_argmin(oracle, dom: EnumerationDomain) -> tuple[list, list]:
    return brute_min(oracle, enumerate_points(dom))
