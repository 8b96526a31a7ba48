import math
from fractions import Fraction as F

import pytest

from conicmin.adversary import (
    EVEN,
    GENERAL,
    adversary_oracle,
    analytic_bound,
    build_extension,
    cone_hull_member,
    enumerate_family,
    family_size,
    hull_violations,
    lower_bound_report,
    sample_family,
    verify_nonsingularity,
)
from conicmin.errors import EmptyFamilyError, TooLargeError, UnsupportedDimensionError


def test_base_case_values():
    for seed in range(10):
        inst = sample_family(1, 2, GENERAL, seed)
        pts = [p[0] for p in inst.points]
        i = pts[1]
        assert pts == [i - 1, i, i + 1] and i in (-1, 0, 1)
        assert list(inst.values) == [1, 0, 2]


def test_family_sizes_by_enumeration():
    for r in range(1, 6):
        assert len({inst.points + inst.values for inst in enumerate_family(1, r)}) == 2 * r - 1
    assert len({inst.points + inst.values for inst in enumerate_family(2, 2)}) == 81 == family_size(2, 2)
    assert len({inst.points + inst.values for inst in enumerate_family(2, 3, EVEN)}) == 8 == family_size(2, 3, EVEN)


def test_empty_family():
    with pytest.raises(EmptyFamilyError):
        sample_family(1, 1, EVEN)
    with pytest.raises(EmptyFamilyError):
        family_size(2, 0)


def test_bounds():
    assert analytic_bound(1, 8) == pytest.approx(3.91, abs=1e-2)
    assert analytic_bound(2, 2) == pytest.approx(6.34, abs=1e-2)
    assert analytic_bound(2, 3, EVEN) == 3
    assert analytic_bound(3, 4) == pytest.approx(13 * math.log2(7))


def test_cone_hull_examples():
    assert not cone_hull_member([((0,), 0)], (5,))
    line = [((0,), 0), ((1,), 1)]
    assert cone_hull_member(line, (2,))
    assert not cone_hull_member(line, (-1,))


def test_general_instances_avoid_hulls():
    for n in (1, 2):
        for seed in range(10):
            assert hull_violations(sample_family(n, 3, GENERAL, seed)) == []


def test_even_instances_can_violate_hulls():
    # origin (-1) then the pair ±i (0) then ±(i+1) (1): i+1 lies on the ray beyond i
    inst = sample_family(1, 3, EVEN, 0)
    assert hull_violations(inst) != []


def test_nonsingularity_examples():
    assert verify_nonsingularity([(0, 0)], [(3, 1)])
    assert not verify_nonsingularity([(0, 0)], [(1, 0), (-1, 0)])
    assert verify_nonsingularity([(0, 0)], [(1, 0), (2, 0)])
    with pytest.raises(TooLargeError):
        verify_nonsingularity([(i, 0) for i in range(6)], [(i, 1) for i in range(6)])
    with pytest.raises(ValueError):
        verify_nonsingularity([(0, 0)], [(0, 0)])


def test_extension_reproduces_values():
    for n, r in ((1, 4), (2, 2), (2, 3), (3, 2)):
        inst = sample_family(n, r, GENERAL, 5)
        ext = build_extension(inst)
        for p, v in zip(inst.points, inst.values):
            assert ext(p) == pytest.approx(v, abs=1e-9)


def test_extension_first_layer_and_midpoints():
    inst = sample_family(1, 4, GENERAL, 2)
    ext = build_extension(inst)
    i = inst.points[1][0]
    assert ext((F(i),)) == 0
    # layers: {i} (0), [i-1, i] (1), [i-1, i+1] (2); both midpoints sit at t = tau/2
    assert ext((F(2 * i + 1, 2),)) == pytest.approx(1.5)
    assert ext((F(2 * i - 1, 2),)) == pytest.approx(0.5)


def test_extension_dimension_cap():
    with pytest.raises(UnsupportedDimensionError):
        build_extension(sample_family(4, 2, GENERAL, 0))


def test_adversary_oracle():
    inst = sample_family(2, 2, GENERAL, 1)
    o = adversary_oracle(build_extension(inst))
    ranked = sorted(zip(inst.values, inst.points))
    assert o.compare_leq(ranked[0][1], ranked[-1][1])
    assert o.compare_leq(ranked[3][1], ranked[3][1])


def test_report_general():
    rep = lower_bound_report(1, 8, GENERAL, trials=5, seed=0)
    assert len(rep["rows"]) == 5
    assert rep["analytic_bound"] == pytest.approx(3.91, abs=1e-2)
    assert rep["all_minima_found"]


def test_report_even_and_cap():
    rep = lower_bound_report(2, 3, EVEN, trials=2, seed=1)
    assert rep["analytic_bound"] == 3 and rep["all_minima_found"]
    with pytest.raises(UnsupportedDimensionError):
        lower_bound_report(4, 2)


def _conv_triples(rng, pts, n, count):
    def conv():
        w = [F(rng.randint(0, 9)) for _ in pts]
        s = sum(w) or F(1)
        return [sum(wi * p[j] for wi, p in zip(w, pts)) / s for j in range(n)]

    for _ in range(count):
        yield conv(), conv(), F(rng.randint(0, 20), 8)


@pytest.mark.parametrize("n, r", [(1, 4), (2, 3)])
def test_extension_is_conic_on_hull(n, r):
    import random

    from conicmin.oracles import ComparisonOracle, is_conic_witness

    inst = sample_family(n, r, GENERAL, 3)
    ext = build_extension(inst)
    oracle = ComparisonOracle(lambda x, y: ext(x) <= ext(y) + 1e-7, n)
    pts = [[F(v) for v in p] for p in inst.points]
    assert is_conic_witness(oracle, _conv_triples(random.Random(n), pts, n, 10_000)) == []


def test_even_oracle_is_symmetric():
    for n, r in ((1, 4), (2, 3), (3, 2)):
        inst = sample_family(n, r, EVEN, 4)
        o = adversary_oracle(build_extension(inst))
        for p in inst.points:
            q = tuple(-v for v in p)
            assert o.compare_leq(p, q) and o.compare_leq(q, p)


def test_family_shapes_up_to_n5():
    for n in range(1, 6):
        g = sample_family(n, 3, GENERAL, n)
        assert len(set(g.points)) == 3**n
        assert sorted(g.values) == list(range(3**n))
        assert all(max(map(abs, p)) <= 3 for p in g.points)
        e = sample_family(n, 3, EVEN, n)
        assert len(set(e.points)) == 2 * 2**n
        assert sorted(set(e.values)) == list(range(2**n))
        assert all(max(map(abs, p)) <= 3 for p in e.points)
