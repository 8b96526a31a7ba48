import random
from fractions import Fraction as F

import pytest

from conicmin.bruteforce import EnumerationDomain, brute_argmin, brute_min, enumerate_points
from conicmin.errors import TooLargeError
from conicmin.lattice import LatticeBasis
from conicmin.oracles import ValueOracle, from_value_oracle


def test_enumerate_examples():
    assert len(enumerate_points(EnumerationDomain([0, 0], 1, "linf"))) == 9
    assert {tuple(p) for p in enumerate_points(EnumerationDomain([0, 0], 1))} == {
        (0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(enumerate_points(EnumerationDomain([0, 0], 1, exclusions=[[0, 0]]))) == 4


def test_enumerate_is_sorted_and_deterministic():
    dom = EnumerationDomain(["1/2", "-1/3"], 3)
    pts = enumerate_points(dom)
    assert pts == sorted(pts, key=tuple) == enumerate_points(dom)


def test_enumerate_sublattice_and_subspace():
    lat = LatticeBasis.from_columns([[2, 0], [1, 1]])
    pts = enumerate_points(EnumerationDomain([0, 0], 3, lattice=lat))
    box = [(a, b) for a in range(-3, 4) for b in range(-3, 4) if a * a + b * b <= 9 and (a + b) % 2 == 0]
    assert sorted(map(tuple, pts)) == sorted(box)
    line = enumerate_points(EnumerationDomain([0, 0], 2, subspace=([[1, 1]], [1])))
    assert {tuple(p) for p in line} == {(0, 1), (1, 0)}


def test_too_large():
    with pytest.raises(TooLargeError):
        enumerate_points(EnumerationDomain([0] * 3, 1000, "linf"))


def test_brute_min_examples():
    dom = EnumerationDomain([0, 0], 1, "linf")
    first, second = brute_argmin(from_value_oracle(ValueOracle(lambda x: x[0] ** 2 + x[1] ** 2, 2)), dom)
    assert first == [[0, 0]]
    assert {tuple(p) for p in second} == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    first, second = brute_argmin(from_value_oracle(ValueOracle(lambda x: 0, 2)), dom)
    assert len(first) == 9 and second == []
    first, _ = brute_argmin(from_value_oracle(ValueOracle(lambda x: x[0], 2)), dom)
    assert {tuple(p) for p in first} == {(-1, -1), (-1, 0), (-1, 1)}


def test_brute_min_against_sorting():
    rng = random.Random(8)
    pts = [[F(i)] for i in range(60)]
    for _ in range(50):
        vals = [rng.randint(0, 6) for _ in pts]
        o = from_value_oracle(ValueOracle(lambda x: vals[int(x[0])], 1))
        first, second = brute_min(o, pts)
        lo = sorted(set(vals))
        assert {int(p[0]) for p in first} == {i for i, v in enumerate(vals) if v == lo[0]}
        want = {i for i, v in enumerate(vals) if len(lo) > 1 and v == lo[1]}
        assert {int(p[0]) for p in second} == want
        # two comparisons per point, plus one per runner-up bucket update
        assert o.calls <= 3 * len(pts)
