import math
import random

import numpy as np
import pytest

from conicmin import exact as ex
from conicmin.conecut import (
    ConeCutParams,
    cap_volume,
    cone_cut_construct,
    covering_ellipsoid,
    pyramid_angles,
    pyramid_base,
    walk_cap,
)
from conicmin.errors import IterationCapError, ShrinkViolationError
from conicmin.geometry import cone_member


def leq_of(f):
    return lambda x, y: f([float(v) for v in x]) <= f([float(v) for v in y])


def test_constants():
    assert ConeCutParams.gamma(3) == pytest.approx(1 / 8)
    assert ConeCutParams.gamma(2) == pytest.approx(1 / 6)
    assert ConeCutParams.beta(2) == pytest.approx(0.96524, abs=1e-5)
    assert (1 - ConeCutParams.beta(2)) * 4 == pytest.approx(0.139, abs=1e-3)
    assert ConeCutParams.beta_hat(2) == pytest.approx(0.98262, abs=1e-5)
    bound = ConeCutParams.shrink_bound(2)
    assert bound >= ConeCutParams.beta_hat(2) ** 2
    assert float(bound) - ConeCutParams.beta_hat(2) ** 2 <= 1e-12


def test_c_hat_validation():
    with pytest.raises(ValueError):
        ConeCutParams(0)
    assert ConeCutParams().with_c_hat("1/4").c_hat == ex.frac("1/4")


def test_cap_volume_limits():
    assert cap_volume(0.6, 2) == 1.0
    assert cap_volume(-0.99, 3) < 0.01
    assert cap_volume(0.0, 2) < 1


def test_pyramid_base_geometry():
    for n in (2, 3, 4):
        _, psi = pyramid_angles(n)
        p = np.arange(1.0, n + 1.0)
        base = pyramid_base(p, psi)
        assert len(base) == n
        for v in base:
            assert abs(v @ (p - v)) < 1e-9
            assert np.linalg.norm(v) == pytest.approx(np.linalg.norm(p) * math.sin(psi))
        # face angle between an edge and the height is psi
        u = p / np.linalg.norm(p)
        for v in base:
            e = (v - p) / np.linalg.norm(v - p)
            assert -(e @ u) == pytest.approx(math.cos(psi))


@pytest.mark.parametrize("n", [2, 3])
def test_norm_squared_cone_excludes_center(n):
    f = lambda x: sum(v * v for v in x)
    cut = cone_cut_construct(leq_of(f), np.zeros(n), 1.0)
    cone = cut.cone(lambda x: [ex.dyadic(float(v), 40) for v in x])
    assert not cone_member(cone, [0] * n)
    rng = random.Random(n)
    apex = np.asarray(cut.apex)
    fa = f(apex)
    for _ in range(1000):
        w = [rng.random() for _ in cut.base]
        pt = apex + sum(wi * (apex - b) for wi, b in zip(w, cut.base))
        assert f(pt) >= fa - 1e-12 >= f(np.zeros(n)) - 1e-12


def test_linear_walk_is_strictly_increasing():
    f = lambda x: x[0]
    cut = cone_cut_construct(leq_of(f), np.zeros(2), 1.0)
    vals = [f(a) for a in cut.apices]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert np.linalg.norm(cut.apex) >= 1.0 / 2
    assert cut.axis[0] > 0.9


@pytest.mark.parametrize("n", [2, 3])
def test_walk_apex_norm_recurrence(n):
    rng = np.random.default_rng(10 + n)
    _, psi = pyramid_angles(n)
    for _ in range(50):
        a = rng.normal(size=(n, n))
        m = rng.uniform(-0.9, 0.9, size=n)
        f = lambda x: float(np.sum((a @ (np.asarray(x) - m)) ** 2))
        cut = cone_cut_construct(leq_of(f), np.zeros(n), 1.0, rotation=np.linalg.qr(rng.normal(size=(n, n)))[0])
        norms = [np.linalg.norm(p) for p in cut.apices]
        for k, r in enumerate(norms):
            assert r == pytest.approx(math.sin(psi) ** k, rel=1e-9)
        assert min(norms) > 1.0 / n
        vals = [f(p) for p in cut.apices]
        assert all(x < y for x, y in zip(vals, vals[1:]))


def test_walk_cap_on_nonconic_oracle():
    # strictly "every new point is larger": never terminates
    bad = lambda x, y: False
    with pytest.raises(IterationCapError):
        cone_cut_construct(bad, np.zeros(2), 1.0)
    assert walk_cap(2) >= 10


@pytest.mark.parametrize("n", [2, 3])
def test_covering_contains_ball_minus_cone(n):
    rng = np.random.default_rng(n)
    f = lambda x: (x[0] - 3) ** 2 + sum(v * v for v in x[1:])
    # the minimizer walks a small ball near the center, then covers the unit ball
    cut = cone_cut_construct(leq_of(f), np.full(n, 0.005), 1 / (16 * n))
    e = covering_ellipsoid([0] * n, 1, cut)
    cone = cut.cone(lambda x: [ex.dyadic(float(v), 40) for v in x])
    assert abs(e.det()) <= ConeCutParams.shrink_bound(n)
    a = np.array([[float(v) for v in row] for row in e.shape_matrix()])
    c = np.array([float(v) for v in e.center])
    ainv = np.linalg.inv(a)
    hits = 0
    while hits < 10_000:
        x = rng.normal(size=n)
        x *= rng.random() ** (1 / n) / np.linalg.norm(x)
        if cone_member(cone, [ex.dyadic(float(v), 40) for v in x]):
            continue
        hits += 1
        assert np.linalg.norm(ainv @ (x - c)) <= 1 + 1e-9


def test_covering_rejects_far_apex():
    from conicmin.conecut import ConeCut

    u = np.array([1.0, 0.0])
    # apex near the rim: the cone removes almost nothing
    cut = ConeCut(apex=np.array([0.9, 0.0]), axis=u, base=np.zeros((2, 2)))
    with pytest.raises(ShrinkViolationError):
        covering_ellipsoid([0, 0], 1, cut)
