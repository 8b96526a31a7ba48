"""Value and comparison oracles, conic-preserving combinators and JSON parsing.

Values are ``Fraction`` scalars or tuples of values; Python compares tuples
lexicographically, which is exactly the order used for lex pairs.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, Sequence

from . import exact as ex
from .errors import NegativeWeightError, ParseError, ShapeMismatchError


def _point(x) -> tuple:
    return tuple(ex.frac(v) for v in x)


class ValueOracle:
    """A deterministic map from rational points of ``R^dim`` to ordered values."""

    def __init__(self, fn: Callable, dim: int, even: bool = False):
        if dim < 1:
            raise ShapeMismatchError("domain dimension must be positive")
        self._fn = fn
        self.dim = dim
        self.even = even

    def __call__(self, x):
        x = _point(x)
        if len(x) != self.dim:
            raise ShapeMismatchError(f"expected a point of dimension {self.dim}")
        return self._fn(x)


class ComparisonOracle:
    """Answers ``f(x) <= f(y)`` and counts every invocation."""

    def __init__(self, leq: Callable, dim: int):
        self._leq = leq
        self.dim = dim
        self._calls = 0
        self._lock = threading.Lock()

    def compare_leq(self, x, y) -> bool:
        x, y = _point(x), _point(y)
        if len(x) != self.dim or len(y) != self.dim:
            raise ShapeMismatchError(f"expected points of dimension {self.dim}")
        with self._lock:
            self._calls += 1
        return bool(self._leq(x, y))

    __call__ = compare_leq

    @property
    def calls(self) -> int:
        return self._calls

    def reset(self) -> None:
        with self._lock:
            self._calls = 0


def from_value_oracle(v: ValueOracle) -> ComparisonOracle:
    return ComparisonOracle(lambda x, y: v(x) <= v(y), v.dim)


# ---------------------------------------------------------------- combinators


def combinator_max(fs: Sequence[ValueOracle], ws: Sequence | None = None) -> ValueOracle:
    if not fs:
        raise ShapeMismatchError("max needs at least one function")
    ws = [Fraction(1)] * len(fs) if ws is None else [ex.frac(w) for w in ws]
    if len(ws) != len(fs):
        raise ShapeMismatchError("one weight per function")
    if any(w < 0 for w in ws):
        raise NegativeWeightError("weights must be nonnegative")
    dim = fs[0].dim
    if any(f.dim != dim for f in fs):
        raise ShapeMismatchError("domains differ")
    return ValueOracle(lambda x: max(w * f(x) for f, w in zip(fs, ws)), dim)


def combinator_affine(f: ValueOracle, a, b) -> ValueOracle:
    a = ex.mat(a)
    b = ex.vec(b)
    if len(a) != f.dim or len(b) != f.dim or not a or any(len(r) != len(a[0]) for r in a):
        raise ShapeMismatchError("affine map does not match the inner domain")
    n = len(a[0])
    return ValueOracle(lambda x: f(ex.add(ex.mat_vec(a, x), b)), n)


def combinator_monotone(f: ValueOracle, h: ValueOracle) -> ValueOracle:
    """``h o f`` for a nondecreasing scalar ``h`` (caller's obligation)."""
    if h.dim != 1:
        raise ShapeMismatchError("outer map must be scalar")
    return ValueOracle(lambda x: h((f(x),)), f.dim, f.even)


IDENTITY = ValueOracle(lambda t: t[0], 1)
POSITIVE_PART = ValueOracle(lambda t: max(Fraction(0), t[0]), 1)


def combinator_lex_pair(f1: ValueOracle, f2: ValueOracle) -> ValueOracle:
    if f1.dim != f2.dim:
        raise ShapeMismatchError("domains differ")
    return ValueOracle(lambda x: (f1(x), f2(x)), f1.dim, f1.even and f2.even)


def constrained_reduction(f: ValueOracle, gs: Sequence[ValueOracle]) -> ValueOracle:
    """``h(x) = (max(0, max_i g_i(x)), f(x))``; its lex-argmin is the constrained argmin."""
    if any(g.dim != f.dim for g in gs):
        raise ShapeMismatchError("domains differ")

    def h(x):
        t = max((g(x) for g in gs), default=Fraction(0))
        return (max(Fraction(0), t), f(x))

    return ValueOracle(h, f.dim)


def constraint_guard(c: ComparisonOracle, violation: Callable) -> ComparisonOracle:
    """Lex-guard a comparison oracle by an exact violation measure.

    ``violation(x) >= 0`` is compared first; ``c`` is consulted only on ties,
    so ``c`` sees feasible pairs whenever some point is feasible.
    """

    def leq(x, y):
        vx, vy = violation(x), violation(y)
        if vx != vy:
            return vx < vy
        return c.compare_leq(x, y)

    return ComparisonOracle(leq, c.dim)


def ball_violation(center, radius_sq) -> Callable:
    center = ex.vec(center)
    radius_sq = ex.frac(radius_sq)
    return lambda x: max(Fraction(0), ex.norm_sq(ex.sub(x, center)) - radius_sq)


def is_conic_witness(c: ComparisonOracle, samples) -> list:
    """Triples ``(y, z, t)`` with ``f(y) <= f(z)`` but ``f(z + t(z-y)) < f(z)``."""
    bad = []
    for y, z, t in samples:
        y, z, t = ex.vec(y), ex.vec(z), ex.frac(t)
        if c.compare_leq(y, z):
            far = ex.add(z, ex.scale(t, ex.sub(z, y)))
            if not c.compare_leq(z, far):
                bad.append((y, z, t))
    return bad


# ---------------------------------------------------------------- polynomials and JSON


class Polynomial:
    """Sparse polynomial with rational coefficients, evaluated exactly."""

    def __init__(self, nvars: int, monomials: Sequence[tuple]):
        self.nvars = nvars
        self.monomials = []
        for coef, exps in monomials:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ParseError("monomial exponents do not match vars")
            self.monomials.append((ex.frac(coef), exps))

    def __call__(self, x) -> Fraction:
        total = Fraction(0)
        for coef, exps in self.monomials:
            term = coef
            for xi, e in zip(x, exps):
                if e:
                    term *= xi**e
            total += term
        return total

    def oracle(self) -> ValueOracle:
        even = all(sum(e) % 2 == 0 for _, e in self.monomials)
        return ValueOracle(self, self.nvars, even)


def _need(node: dict, key: str):
    if key not in node:
        raise ParseError(f"{node.get('kind', '?')} node needs {key!r}")
    return node[key]


def parse_function(node) -> ValueOracle:
    """Build a :class:`ValueOracle` from a JSON function tree."""
    if not isinstance(node, dict):
        raise ParseError("function node must be an object")
    kind = _need(node, "kind")
    try:
        if kind == "polynomial":
            mons = [(m["coef"], m["exps"]) for m in _need(node, "monomials")]
            return Polynomial(int(_need(node, "vars")), mons).oracle()
        if kind == "max":
            args = [parse_function(a) for a in _need(node, "args")]
            f = combinator_max(args, node.get("weights"))
            f.even = all(a.even for a in args)
            return f
        if kind == "affine":
            return combinator_affine(parse_function(_need(node, "arg")), _need(node, "A"), _need(node, "b"))
        if kind == "monotone":
            maps = {"identity": IDENTITY, "pos": POSITIVE_PART}
            name = node.get("map", "identity")
            if name not in maps:
                raise ParseError(f"unknown monotone map {name!r}")
            return combinator_monotone(parse_function(_need(node, "arg")), maps[name])
        if kind == "lex":
            args = [parse_function(a) for a in _need(node, "args")]
            if len(args) < 2:
                raise ParseError("lex needs at least two args")
            f = args[-1]
            for g in reversed(args[:-1]):
                f = combinator_lex_pair(g, f)
            return f
        if kind == "constrained":
            f = parse_function(_need(node, "objective"))
            gs = [parse_function(g) for g in node.get("constraints", [])]
            return constrained_reduction(f, gs)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind} node: {exc}") from exc
    raise ParseError(f"unknown function kind {kind!r}")
