"""Lower-bound families, their conic extensions and oracle-count reports."""

from __future__ import annotations

import itertools
import math
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import exact as ex
from .errors import EmptyFamilyError, TooLargeError, UnsupportedDimensionError
from .geometry import ConeAtApex, VPolytope, cone_member, polytope_distance, polytope_member
from .oracles import ComparisonOracle

GENERAL = "general"
EVEN = "even"
TIE_TOL = 1e-9


@dataclass(frozen=True)
class AdversaryInstance:
    points: tuple
    values: tuple
    variant: str
    n: int
    r: int

    def value_of(self, x) -> int:
        return dict(zip(self.points, self.values))[tuple(x)]

    def ordered(self) -> list:
        """``(point, value)`` pairs by value, the origin first for EVEN."""
        pairs = sorted(zip(self.points, self.values), key=lambda pv: (pv[1], pv[0]))
        if self.variant == EVEN:
            pairs.insert(0, ((0,) * self.n, -1))
        return pairs


def _check(n: int, r: int, variant: str) -> None:
    if variant not in (GENERAL, EVEN):
        raise ValueError(f"unknown variant {variant!r}")
    if n < 1:
        raise ValueError("n must be positive")
    if variant == GENERAL and r < 1 or variant == EVEN and r < 2:
        raise EmptyFamilyError(f"the {variant} family is empty for r = {r}")


def _slices(r: int, variant: str) -> range:
    return range(-r + 1, r) if variant == GENERAL else range(1, r)


def _lift(points: dict, level: int, offset: int) -> dict:
    return {p + (level,): v + offset for p, v in points.items()}


def _build(n: int, choose, r: int, variant: str) -> dict:
    """Half set (EVEN) or full set (GENERAL) as ``{point: value}``."""
    if n == 0:
        return {(): 0}
    i = choose(_slices(r, variant))
    if variant == GENERAL:
        step = 3 ** (n - 1)
        t1, t2, t3 = (_build(n - 1, choose, r, variant) for _ in range(3))
        return {**_lift(t1, i - 1, step), **_lift(t2, i, 0), **_lift(t3, i + 1, 2 * step)}
    step = 2 ** (n - 1)
    t1, t2 = (_build(n - 1, choose, r, variant) for _ in range(2))
    return {**_lift(t1, i, 0), **_lift(t2, i + 1, step)}


def _instance(n: int, r: int, variant: str, table: dict) -> AdversaryInstance:
    if variant == EVEN:
        table = {**table, **{tuple(-v for v in p): val for p, val in table.items()}}
    items = sorted(table.items())
    return AdversaryInstance(tuple(p for p, _ in items), tuple(v for _, v in items), variant, n, r)


def sample_family(n: int, r: int, variant: str = GENERAL, seed: int = 0) -> AdversaryInstance:
    _check(n, r, variant)
    rng = random.Random(seed)
    return _instance(n, r, variant, _build(n, lambda s: rng.choice(list(s)), r, variant))


def enumerate_family(n: int, r: int, variant: str = GENERAL) -> Iterator[AdversaryInstance]:
    """Every member of the family (exponential; meant for tiny ``n``, ``r``)."""
    _check(n, r, variant)

    def rec(m: int):
        if m == 0:
            yield {(): 0}
            return
        parts = 3 if variant == GENERAL else 2
        step = (3 if variant == GENERAL else 2) ** (m - 1)
        for i in _slices(r, variant):
            for combo in itertools.product(list(rec(m - 1)), repeat=parts):
                if variant == GENERAL:
                    t1, t2, t3 = combo
                    yield {**_lift(t1, i - 1, step), **_lift(t2, i, 0), **_lift(t3, i + 1, 2 * step)}
                else:
                    t1, t2 = combo
                    yield {**_lift(t1, i, 0), **_lift(t2, i + 1, step)}

    for table in rec(n):
        yield _instance(n, r, variant, table)


def family_size(n: int, r: int, variant: str = GENERAL) -> int:
    _check(n, r, variant)
    if variant == GENERAL:
        return (2 * r - 1) ** ((3**n - 1) // 2)
    return (r - 1) ** (2**n - 1)


def analytic_bound(n: int, r: int, variant: str = GENERAL) -> float:
    """``log2`` of the family size."""
    _check(n, r, variant)
    if variant == GENERAL:
        return (3**n - 1) / 2 * math.log2(2 * r - 1)
    return (2**n - 1) * math.log2(r - 1)


# ---------------------------------------------------------------- cone hulls


def cone_hull_member(ranked: Sequence[tuple], y: Sequence) -> bool:
    """Is ``y`` in the cone hull of ``ranked`` (pairs ``(point, value)``)?"""
    if len(ranked) <= 1:
        return False
    y = ex.vec(y)
    for z, fz in ranked:
        m = [x for x, fx in ranked if fx <= fz and tuple(x) != tuple(z)]
        if m and cone_member(ConeAtApex.over_points(m, z), y):
            return True
    return False


def hull_violations(inst: AdversaryInstance) -> list:
    """Points ``x`` of the sorted sequence lying in the cone hull of strictly better points."""
    seq = inst.ordered()
    bad = []
    for x, fx in seq:
        prior = [(p, fp) for p, fp in seq if fp < fx]
        if cone_hull_member(prior, x):
            bad.append(x)
    return bad


def verify_nonsingularity(first: Sequence, second: Sequence) -> bool:
    """No cone with apex at a first minimum, over the other minima, hits a second minimum.

    Cones over subsets are contained in the cone over the full set, so only
    the full set is tested for each apex.
    """
    ys = [tuple(ex.vec(p)) for p in first]
    zs = [tuple(ex.vec(p)) for p in second]
    if not ys or not zs:
        raise ValueError("both minima sets must be nonempty")
    if set(ys) & set(zs):
        raise ValueError("minima sets must be disjoint")
    if len(ys) + len(zs) > 10:
        raise TooLargeError("at most 10 points are supported")
    for y in ys:
        others = [p for p in ys + zs if p != y]
        cone = ConeAtApex.over_points(others, y)
        if any(cone_member(cone, z) for z in zs):
            return False
    return True


# ---------------------------------------------------------------- extensions


@dataclass
class LayeredExtension:
    """A conic function agreeing with an instance's values on its points.

    Layer ``i`` is the hull of every point with value at most
    ``layer_values[i]``; between consecutive layers the value grows linearly
    with the distance to the smaller hull.
    """

    layers: list
    layer_values: list
    spans: list
    tolerance: float = TIE_TOL

    def __call__(self, x) -> float:
        xq = ex.vec(x)
        xf = [float(v) for v in xq]
        for i, layer in enumerate(self.layers):
            if polytope_member(layer, xq):
                if i == 0:
                    return float(self.layer_values[0])
                t = polytope_distance(self.layers[i - 1], xf)
                lo, hi = self.layer_values[i - 1], self.layer_values[i]
                return lo + (hi - lo) * t / self.spans[i]
        return float(self.layer_values[-1]) + polytope_distance(self.layers[-1], xf)


def build_extension(inst: AdversaryInstance) -> LayeredExtension:
    if inst.n > 3:
        raise UnsupportedDimensionError("extensions are supported for n <= 3")
    seq = inst.ordered()
    values = sorted({v for _, v in seq})
    layers, spans = [], []
    for i, v in enumerate(values):
        layer = VPolytope([p for p, fp in seq if fp <= v])
        if i == 0:
            spans.append(0.0)
        else:
            prev = layers[-1]
            tau = max(polytope_distance(prev, [float(c) for c in vert]) for vert in layer.vertices)
            if tau <= 0:
                raise ValueError("layer adds no new volume; instance is not hull-avoiding")
            spans.append(tau)
        layers.append(layer)
    return LayeredExtension(layers, values, spans)


def adversary_oracle(ext: LayeredExtension) -> ComparisonOracle:
    dim = len(ext.layers[0].vertices[0])
    return ComparisonOracle(lambda x, y: ext(x) <= ext(y) + ext.tolerance, dim)


# ---------------------------------------------------------------- reports


def box_violation(r) -> callable:
    r = ex.frac(r)
    return lambda x: max(Fraction(0), max(abs(v) for v in x) - r)


def _box_points(n: int, r: int, exclude_origin: bool) -> list:
    pts = itertools.product(range(-r, r + 1), repeat=n)
    return [p for p in pts if not exclude_origin or any(p)]


def lower_bound_report(n: int, r: int, variant: str = GENERAL, trials: int = 1, seed: int = 0, params=None) -> dict:
    """Oracle counts of the minimizer on sampled family members, beside the bound.

    The bound is a worst case over all algorithms and inputs, so per-instance
    counts are reported rather than asserted against it.  ``found_minimum``
    compares the returned value with the extension's minimum over the box,
    found by exhaustive evaluation outside the counted oracle.
    """
    from .minimizer import minimize_box

    if n > 3:
        raise UnsupportedDimensionError("extensions are supported for n <= 3")
    bound = analytic_bound(n, r, variant)
    rows = []
    for trial in range(trials):
        s = seed + trial
        inst = sample_family(n, r, variant, s)
        ext = build_extension(inst)
        oracle = adversary_oracle(ext)
        res = minimize_box(oracle, n, r, exclude_origin=variant == EVEN, even=variant == EVEN, params=params, seed=s)
        best = min(ext(x) for x in _box_points(n, r, variant == EVEN))
        found = res.point is not None and ext(res.point) <= best + TIE_TOL
        rows.append({
            "n": n, "r": r, "seed": s, "variant": variant,
            "oracle_calls": res.oracle_calls, "analytic_bound": bound,
            "shrink_iters": res.total_shrink_iters, "branches": res.total_branches,
            "found_minimum": found,
            "point": None if res.point is None else [ex.fmt(v) for v in res.point],
        })
    calls = [row["oracle_calls"] for row in rows]
    return {
        "n": n, "r": r, "variant": variant, "trials": trials, "seed": seed,
        "analytic_bound": bound, "family_size": family_size(n, r, variant),
        "calls_min": min(calls, default=0), "calls_max": max(calls, default=0),
        "calls_mean": statistics.fmean(calls) if calls else 0.0,
        "all_minima_found": all(row["found_minimum"] for row in rows),
        "rows": rows,
    }
