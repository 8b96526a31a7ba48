"""Minimizing a conic function over ball ∩ lattice ∩ affine subspace using
only comparisons.

Each subproblem lives in lattice coordinates: points are ``x = p + B y`` with
``y`` integral, and the search ellipsoid ``E = El(A, y0)`` is kept in
``y``-space with an exact rational shape.  One shrink step maps ``E`` to the
unit ball, runs the pyramid walk near an integral point of the scaled
ellipsoid, and replaces ``E`` by the covering ellipsoid of the remainder.
Once ``E`` is flat in some integral direction the problem splits into
parallel hyperplanes, each solved recursively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import exact as ex
from .conecut import ConeCutParams, cone_cut_construct, covering_ellipsoid
from .errors import InvariantViolation, ShrinkViolationError
from .lattice import LatticeBasis, cvp_gram, lll_gram, svp_gram
from .oracles import ComparisonOracle, ball_violation, constraint_guard

MAX_BACKOFF = 3
SQRT_BITS = 30
ROUND_BITS = 48


@dataclass
class ProblemInstance:
    oracle: ComparisonOracle
    center: list
    radius: Fraction
    lattice: LatticeBasis | None = None
    subspace: tuple | None = None  # (A, b) for {x : A x = b}

    def __post_init__(self):
        self.center = ex.vec(self.center)
        self.radius = ex.frac(self.radius)
        if self.lattice is None:
            self.lattice = LatticeBasis.identity(len(self.center))
        if self.subspace is None:
            self.subspace = ([], [])
        else:
            self.subspace = (ex.mat(self.subspace[0]), ex.vec(self.subspace[1]))


@dataclass
class Preprocessed:
    shift: list
    sublattice: LatticeBasis | None  # None when the section is a single point
    center: list
    radius: Fraction
    section_radius_sq: Fraction


EMPTY = None


@dataclass
class MinimizeResult:
    point: list | None
    oracle_calls: int
    shrink_iters: dict = field(default_factory=dict)
    branches: dict = field(default_factory=dict)
    det_ratios: list = field(default_factory=list)
    cvp_fallbacks: int = 0
    c_hat: Fraction = Fraction(1, 2)

    @property
    def empty(self) -> bool:
        return self.point is None

    @property
    def total_shrink_iters(self) -> int:
        return sum(self.shrink_iters.values())

    @property
    def total_branches(self) -> int:
        return sum(self.branches.values())


# ---------------------------------------------------------------- preprocessing


def _section(center: list, radius_sq: Fraction, p: list, b: list | None):
    """Projection of ``center`` onto ``p + span(b)`` and the section radius²."""
    if b is None or not b[0]:
        d = ex.sub(center, p)
        return p, radius_sq - ex.norm_sq(d), []
    cols = ex.columns(b)
    g = ex.gram(cols)
    y = ex.mat_vec(ex.invert(g), ex.mat_vec(ex.transpose(b), ex.sub(center, p)))
    proj = ex.add(p, ex.mat_vec(b, y))
    return proj, radius_sq - ex.norm_sq(ex.sub(center, proj)), y


def preprocess(inst: ProblemInstance) -> Preprocessed | None:
    """Parametrize ``L ∩ H`` as ``p + L'`` or certify the ball section empty."""
    bl = inst.lattice.matrix()
    k = inst.lattice.rank
    a, rhs = inst.subspace
    if a:
        sol = ex.integer_solutions(ex.mat_mul(a, bl), rhs, k)
        if sol is None:
            return EMPTY
        t0, kernel = sol
    else:
        t0, kernel = [Fraction(0)] * k, [[Fraction(int(i == j)) for i in range(k)] for j in range(k)]
    p = ex.mat_vec(bl, t0)
    r2 = inst.radius**2
    if not kernel:
        proj, rho2, _ = _section(inst.center, r2, p, None)
        if rho2 < 0:
            return EMPTY
        return Preprocessed(p, None, proj, inst.radius, rho2)
    sub = ex.mat_mul(bl, ex.from_columns(kernel))
    _, u = lll_gram(ex.gram(ex.columns(sub)))
    sub = ex.mat_mul(sub, u)
    proj, rho2, _ = _section(inst.center, r2, p, sub)
    if rho2 < 0:
        return EMPTY
    return Preprocessed(p, LatticeBasis(sub), proj, inst.radius, rho2)


# ---------------------------------------------------------------- helpers


def _sqrt_up(q: Fraction) -> Fraction:
    """A dyadic rational ``s >= sqrt(q)``."""
    scale = 1 << (2 * SQRT_BITS)
    return Fraction(math.isqrt(q.numerator * scale // q.denominator) + 1, 1 << SQRT_BITS)


def initial_shape(gram: list, rho2: Fraction) -> list:
    """Rational ``A`` with ``A Aᵀ ⪰ rho2 · G⁻¹``, so ``El(A, y_c)`` covers the section."""
    k = len(gram)
    # G = Rᵀ D R with R unit upper triangular
    m = [row[:] for row in gram]
    r = ex.identity(k)
    d = []
    for c in range(k):
        d.append(m[c][c])
        for i in range(c + 1, k):
            f = m[i][c] / m[c][c]
            r[c][i] = f
            m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    rinv = ex.invert(r)
    diag = [_sqrt_up(rho2 / di) for di in d]
    return [[rinv[i][j] * diag[j] for j in range(k)] for i in range(k)]


def round_shape(a: list, bits: int = ROUND_BITS) -> list:
    """A short dyadic shape whose ellipsoid contains ``El(a, ·)``, else ``a`` itself.

    Exact products of shapes grow by a few dozen bits per shrink step; this
    keeps them short.  Containment ``A_r A_rᵀ ⪰ A Aᵀ`` is verified exactly.
    """
    peak = max(abs(v) for row in a for v in row)
    shift = bits - math.frexp(float(peak))[1]
    target = ex.mat_mul(a, ex.transpose(a))
    for grow in (2.0**-24, 2.0**-16):
        cand = [[Fraction(round(float(v) * (1 + grow) * 2.0**shift)) / Fraction(2) ** shift for v in row] for row in a]
        gap = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(ex.mat_mul(cand, ex.transpose(cand)), target)]
        if ex.is_psd(gap) and ex.det(cand) != 0:
            return cand
    return a


def _random_rotation(k: int, seed: int) -> np.ndarray | None:
    if not seed:
        return None
    rng = np.random.default_rng(seed)
    q, rr = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(rr))


def minimize_dim1(oracle: ComparisonOracle, points: Sequence) -> list:
    """Argmin along an arithmetic progression by bisection on adjacent pairs.

    Uses ``ceil(log2(len(points)))`` comparisons; ties go to the smaller index.
    """
    pts = list(points)
    if not pts:
        raise ValueError("need at least one point")
    lo, hi = 0, len(pts) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if oracle.compare_leq(pts[mid], pts[mid + 1]):
            hi = mid
        else:
            lo = mid + 1
    return pts[lo]


# ---------------------------------------------------------------- main recursion


class _Solver:
    def __init__(self, guard: ComparisonOracle, center, radius, params, seed, max_depth, observer):
        self.leq = guard.compare_leq
        self.center = center
        self.r2 = radius**2
        self.radius = radius
        self.params = params
        self.seed = seed
        self.max_depth = max_depth
        self.observer = observer
        self.shrink_iters: dict = {}
        self.branches: dict = {}
        self.det_ratios: list = []
        self.cvp_fallbacks = 0

    def in_ball(self, x) -> bool:
        return ex.norm_sq(ex.sub(x, self.center)) <= self.r2

    def best_of(self, candidates: list):
        best = None
        for c in candidates:
            if c is None:
                continue
            if best is None or not self.leq(best, c):
                best = c
        return best

    def solve(self, p: list, b: list | None, depth: int):
        if depth > self.max_depth:
            raise InvariantViolation("recursion deeper than max_depth")
        if b is None or not b or not b[0]:
            return p if self.in_ball(p) else None
        cols = ex.columns(b)
        g = ex.gram(cols)
        gr, u = lll_gram(g)
        b = ex.mat_mul(b, u)
        g = gr
        proj, rho2, yc = _section(self.center, self.r2, p, b)
        if rho2 < 0:
            return None
        k = len(g)
        if k == 1:
            pts = [ex.add(p, ex.scale(Fraction(t), ex.columns(b)[0]))
                   for t in ex.integer_range(yc[0], rho2 / g[0][0])]
            if not pts:
                return None
            x = minimize_dim1(_Leq(self.leq), pts)
            return x if self.in_ball(x) else None
        a = initial_shape(g, rho2)
        y0 = yc
        to_x = lambda y: ex.add(p, ex.mat_vec(b, y))
        self._emit("start", depth, a, y0, p, b)
        c, y0, p_form = self._shrink_loop(a, y0, k, depth, p, b, to_x)
        # branch on every integral value of cᵀy over E
        ts = ex.integer_range(ex.dot(c, y0), ex.dot(c, ex.mat_vec(p_form, c)))
        self.branches[depth] = self.branches.get(depth, 0) + len(ts)
        results = []
        for t in ts:
            sol = ex.integer_solutions([list(c)], [Fraction(t)], k)
            if sol is None:
                continue
            yt, kernel = sol
            pt = to_x(yt)
            bt = ex.mat_mul(b, ex.from_columns(kernel, k)) if kernel else None
            results.append(self.solve(pt, bt, depth + 1))
        return self.best_of(results)

    def _emit(self, kind, depth, a, y0, p, b):
        if self.observer is not None:
            self.observer({"event": kind, "depth": depth, "shape": a, "center": y0, "shift": p, "basis": b})

    def _shrink_loop(self, a, y0, k, depth, p, b, to_x):
        rotation = _random_rotation(k, self.seed + depth) if self.seed else None
        bound = ConeCutParams.shrink_bound(k)
        backoffs = 0
        while True:
            pf = ex.mat_mul(a, ex.transpose(a))
            scale = self.params.c_hat / (2 * k)
            c = svp_gram(pf)
            w2 = 4 * scale**2 * ex.dot(c, ex.mat_vec(pf, c))
            if w2 <= k * k:
                return c, y0, pf
            q = ex.invert(pf)
            z = cvp_gram(q, y0)
            dz = ex.sub(z, y0)
            if ex.dot(dz, ex.mat_vec(q, dz)) > scale**2:
                # flatness guarantee failed numerically; branch instead
                self.cvp_fallbacks += 1
                return c, y0, pf
            ainv = ex.invert(a)
            zf = np.array([float(v) for v in ex.mat_vec(ainv, dz)])
            leq = lambda u, v: self.leq(to_x(ex.add(y0, ex.mat_vec(a, u))), to_x(ex.add(y0, ex.mat_vec(a, v))))
            try:
                cut = cone_cut_construct(leq, zf, float(scale), rotation)
                cover = covering_ellipsoid([0] * k, 1, cut, self.params)
            except ShrinkViolationError:
                backoffs += 1
                if backoffs > MAX_BACKOFF:
                    raise
                self.params = self.params.with_c_hat(self.params.c_hat / 2)
                continue
            backoffs = 0
            y0 = ex.add(y0, ex.mat_vec(a, list(cover.center)))
            a_new = round_shape(ex.mat_mul(a, cover.shape_matrix()))
            ratio = abs(ex.det(a_new) / ex.det(a))
            if ratio > bound:
                raise InvariantViolation("shrink step exceeded the volume budget")
            a = a_new
            # z must survive: it may be the only minimizer seen so far
            dz = ex.sub(z, y0)
            if ex.dot(dz, ex.mat_vec(ex.invert(ex.mat_mul(a, ex.transpose(a))), dz)) > 1:
                raise InvariantViolation("covering ellipsoid lost the integral anchor point")
            self.det_ratios.append((k, ratio))
            self.shrink_iters[depth] = self.shrink_iters.get(depth, 0) + 1
            self._emit("shrink", depth, a, y0, p, b)


class _Leq:
    def __init__(self, leq):
        self.compare_leq = leq


def minimize(
    inst: ProblemInstance,
    params: ConeCutParams | None = None,
    seed: int = 0,
    max_depth: int = 64,
    observer: Callable | None = None,
) -> MinimizeResult:
    """Minimize the instance's oracle over ball ∩ lattice ∩ subspace.

    The oracle is consulted through a lex guard that prefers points inside the
    ball, so cuts anchored at integral points just outside the ball never
    discard feasible minimizers.
    """
    params = params or ConeCutParams()
    start = inst.oracle.calls
    pre = preprocess(inst)
    guard = constraint_guard(inst.oracle, ball_violation(inst.center, inst.radius**2))
    solver = _Solver(guard, inst.center, inst.radius, params, seed, max_depth, observer)
    if pre is None:
        point = None
    else:
        b = pre.sublattice.matrix() if pre.sublattice is not None else None
        point = solver.solve(pre.shift, b, 0)
    return MinimizeResult(
        point=point,
        oracle_calls=inst.oracle.calls - start,
        shrink_iters=solver.shrink_iters,
        branches=solver.branches,
        det_ratios=solver.det_ratios,
        cvp_fallbacks=solver.cvp_fallbacks,
        c_hat=solver.params.c_hat,
    )


# ---------------------------------------------------------------- unions of subproblems


def _merge(into: dict, other: dict) -> None:
    for key, val in other.items():
        into[key] = into.get(key, 0) + val


def punctured_pieces(n: int, even: bool = False) -> list:
    """Split ``Z^n \\ {0}`` into half-spaces of coordinate hyperplanes.

    Piece ``(j, s)`` holds points with ``x_0 = … = x_{j-1} = 0`` and
    ``s·x_j >= 1``.  For even objectives the ``s = -1`` pieces mirror the
    ``s = +1`` ones and are dropped.
    """
    pieces = []
    for j in range(n):
        rows = [[Fraction(int(i == c)) for c in range(n)] for i in range(j)]
        for s in (1,) if even else (1, -1):
            viol = (lambda j, s: lambda x: max(Fraction(0), 1 - s * x[j]))(j, s)
            pieces.append(((rows, [Fraction(0)] * j) if rows else None, viol))
    return pieces


def minimize_pieces(
    oracle: ComparisonOracle,
    center,
    radius,
    pieces: list,
    violation: Callable | None = None,
    params: ConeCutParams | None = None,
    seed: int = 0,
    max_depth: int = 64,
) -> MinimizeResult:
    """Minimize over the union of ``pieces`` (pairs of subspace and violation).

    ``violation`` is an extra exact constraint measure shared by all pieces;
    points with positive violation are reported as EMPTY.
    """
    base = violation or (lambda x: Fraction(0))
    start = oracle.calls
    total = MinimizeResult(None, 0)
    candidates = []
    for subspace, piece in pieces:
        viol = base if piece is None else (lambda piece: lambda x: max(base(x), piece(x)))(piece)
        guarded = constraint_guard(oracle, viol)
        res = minimize(ProblemInstance(guarded, center, radius, subspace=subspace), params, seed, max_depth)
        params = ConeCutParams(res.c_hat)
        _merge(total.shrink_iters, res.shrink_iters)
        _merge(total.branches, res.branches)
        total.det_ratios.extend(res.det_ratios)
        total.cvp_fallbacks += res.cvp_fallbacks
        if res.point is not None and viol(res.point) == 0:
            candidates.append(res.point)
    final = constraint_guard(oracle, base)
    best = None
    for c in candidates:
        if best is None or not final.compare_leq(best, c):
            best = c
    total.point = best
    total.c_hat = params.c_hat if params else total.c_hat
    total.oracle_calls = oracle.calls - start
    return total


def ball_radius_for_box(n: int, r) -> int:
    """Smallest integer ``R`` with ``R**2 >= n r**2`` (the box fits in the ball)."""
    r = ex.frac(r)
    q = n * r * r
    s = math.isqrt(q.numerator // q.denominator)
    return s if s * s >= q else s + 1


def minimize_box(
    oracle: ComparisonOracle,
    n: int,
    r,
    exclude_origin: bool = False,
    even: bool = False,
    params: ConeCutParams | None = None,
    seed: int = 0,
) -> MinimizeResult:
    """Minimize over ``r·B_inf ∩ Z^n`` (optionally without the origin)."""
    r = ex.frac(r)
    box = lambda x: max(Fraction(0), max(abs(v) for v in x) - r)
    pieces = punctured_pieces(n, even) if exclude_origin else [(None, None)]
    return minimize_pieces(oracle, [0] * n, ball_radius_for_box(n, r), pieces, box, params, seed)
