import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairmclp import EUCLIDEAN, L1, LINF, Instance, Norm, covers, distance, one_center
from fairmclp.geometry import (Ball, DimensionError, UnsupportedNormError, candidate_locations,
                               circle_intersections, cluster_feasible, coverage_matrix,
                               incompatible_sets)

coords = st.floats(min_value=-5, max_value=5, allow_nan=False, allow_infinity=False)
point_sets = st.lists(st.tuples(coords, coords), min_size=1, max_size=12)


def meb_oracle(pts):
    """Smallest ball among all balls spanned by pairs and triples that enclose every point."""
    pts = np.asarray(pts, dtype=float)
    if len(pts) == 1:
        return 0.0
    best = math.inf
    cands = []
    for i, j in itertools.combinations(range(len(pts)), 2):
        cands.append(((pts[i] + pts[j]) / 2, np.linalg.norm(pts[i] - pts[j]) / 2))
    for i, j, k in itertools.combinations(range(len(pts)), 3):
        a, b, c = pts[i], pts[j], pts[k]
        dmat = 2 * np.array([b - a, c - a])
        if abs(np.linalg.det(dmat)) < 1e-12:
            continue
        rhs = np.array([b @ b - a @ a, c @ c - a @ a])
        ctr = np.linalg.solve(dmat, rhs)
        cands.append((ctr, np.linalg.norm(ctr - a)))
    for ctr, r in cands:
        if np.all(np.linalg.norm(pts - ctr, axis=1) <= r * (1 + 1e-9) + 1e-12):
            best = min(best, r)
    return best


def test_distance_three_four_five():
    assert distance((0, 0), (3, 4)) == 5.0
    assert distance((0, 0), (3, 4), L1) == 7.0
    assert distance((0, 0), (3, 4), LINF) == 4.0
    assert distance((0, 0), (3, 4), Norm.ltau(3)) == pytest.approx((27 + 64) ** (1 / 3))


def test_distance_dimension_mismatch():
    with pytest.raises(DimensionError):
        distance((0, 0), (1, 2, 3))


def test_norm_parse_and_special_cases():
    assert Norm.parse("l1") == L1
    assert Norm.parse("LINF") == LINF
    assert Norm.ltau(2) == EUCLIDEAN
    assert Norm.parse("l3").tau == 3.0
    with pytest.raises(ValueError):
        Norm("ltau", 0.5)


def test_boundary_point_is_covered():
    assert covers(Ball((0.0, 0.0), 1.0), (0.0, 1.0))
    assert not covers(Ball((0.0, 0.0), 1.0), (0.0, 1.0 + 1e-6))


def test_coverage_matrix_matches_covers():
    rng = np.random.default_rng(1)
    sites, pts = rng.random((5, 2)), rng.random((7, 2))
    cov = coverage_matrix(sites, pts, 0.3)
    for j, i in itertools.product(range(5), range(7)):
        assert cov[j, i] == covers(Ball(tuple(sites[j]), 0.3), pts[i])


def test_one_center_two_points():
    res = one_center([(0, 0), (2, 0)])
    assert res.center == pytest.approx((1.0, 0.0))
    assert res.radius == pytest.approx(1.0)


def test_one_center_third_point_on_boundary():
    res = one_center([(0, 0), (2, 0), (1, 1)])
    assert res.center == pytest.approx((1.0, 0.0))
    assert res.radius == pytest.approx(1.0)


def test_one_center_single_point():
    res = one_center([(0.3, 0.7)])
    assert res.radius == 0.0 and res.center == (0.3, 0.7)


@settings(max_examples=150, deadline=None)
@given(point_sets)
def test_one_center_matches_enumeration_oracle(pts):
    res = one_center(pts)
    arr = np.asarray(pts, dtype=float)
    assert np.all(np.linalg.norm(arr - res.center, axis=1) <= res.radius * (1 + 1e-9) + 1e-9)
    assert res.radius == pytest.approx(meb_oracle(pts), rel=1e-7, abs=1e-9)
    assert len(res.support) <= 3


@settings(max_examples=100, deadline=None)
@given(point_sets)
def test_removing_support_point_never_grows_radius(pts):
    res = one_center(pts)
    for s in res.support:
        rest = [p for j, p in enumerate(pts) if j != s]
        if rest:
            assert one_center(rest).radius <= res.radius * (1 + 1e-9) + 1e-12


def test_one_center_higher_dimension():
    rng = np.random.default_rng(3)
    pts = rng.random((30, 4))
    res = one_center(pts)
    assert np.all(np.linalg.norm(pts - res.center, axis=1) <= res.radius * (1 + 1e-9))
    assert len(res.support) <= 5


@settings(max_examples=100, deadline=None)
@given(point_sets)
def test_linf_and_l1_centers_against_grid(pts):
    arr = np.asarray(pts, dtype=float)
    for norm in (LINF, L1):
        res = one_center(arr, norm)
        worst = max(distance(res.center, p, norm) for p in arr)
        assert worst == pytest.approx(res.radius, abs=1e-9)
        # no grid point does better
        lo, hi = arr.min(axis=0) - 1, arr.max(axis=0) + 1
        xs = np.linspace(lo[0], hi[0], 21)
        ys = np.linspace(lo[1], hi[1], 21)
        for x in xs:
            for y in ys:
                r = max(distance((x, y), p, norm) for p in arr)
                assert r >= res.radius - 1e-9


def test_l1_in_three_dimensions_is_unsupported():
    with pytest.raises(UnsupportedNormError):
        one_center(np.zeros((3, 3)), L1)


def _inst(pts):
    return Instance.from_arrays(np.asarray(pts, dtype=float), np.ones(len(pts)))


def test_cluster_feasibility_examples():
    inst = _inst([(0, 0), (1, 0), (0.5, 0.8), (3, 3)])
    assert cluster_feasible([0, 1], inst, 0.5)
    assert not cluster_feasible([0, 1], inst, 0.49)
    assert not cluster_feasible([0, 3], inst, 1.0)
    assert cluster_feasible([2], inst, 1e-9)


@pytest.mark.parametrize("seed", range(15))
def test_helly_reduction_to_triples(seed):
    rng = np.random.default_rng(seed)
    inst = _inst(rng.random((7, 2)))
    R = float(rng.uniform(0.2, 0.5))
    for k in range(2, 6):
        for Q in itertools.combinations(range(7), k):
            small = all(cluster_feasible(S, inst, R) for j in (2, 3) for S in itertools.combinations(Q, j)
                        if j <= k)
            assert cluster_feasible(Q, inst, R) == small


@pytest.mark.parametrize("seed", range(10))
def test_incompatible_sets_are_minimal_and_complete(seed):
    rng = np.random.default_rng(100 + seed)
    inst = _inst(rng.random((8, 2)))
    R = float(rng.uniform(0.15, 0.45))
    found = set(incompatible_sets(inst, R))
    for Q in found:
        assert not cluster_feasible(Q, inst, R)
        for S in itertools.combinations(Q, len(Q) - 1):
            if len(S) >= 2:
                assert cluster_feasible(S, inst, R)
    for k in (2, 3):
        for Q in itertools.combinations(range(8), k):
            if not cluster_feasible(Q, inst, R):
                assert any(set(S) <= set(Q) for S in found)


def test_nonminimal_triples_enumerate_every_infeasible_triple():
    rng = np.random.default_rng(4)
    inst = _inst(rng.random((7, 2)))
    got = incompatible_sets(inst, 0.3, size=3, minimal=False)
    want = [Q for Q in itertools.combinations(range(7), 3) if not cluster_feasible(Q, inst, 0.3)]
    assert got == want


def test_circle_intersections_lie_on_both_circles():
    for c in circle_intersections((0, 0), (1, 0), 1.0):
        assert distance(c, (0, 0)) == pytest.approx(1.0)
        assert distance(c, (1, 0)) == pytest.approx(1.0)
    assert circle_intersections((0, 0), (3, 0), 1.0) == []
    assert circle_intersections((0, 0), (2, 0), 1.0) == [(1.0, 0.0)]
    assert circle_intersections((0, 0), (0, 0), 1.0) == []


@pytest.mark.parametrize("seed", range(8))
def test_candidate_locations_dominate_the_plane(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((6, 2))
    inst = _inst(pts)
    R = 0.3
    cands = candidate_locations(inst, R)
    cov = coverage_matrix(cands, pts, R)
    sets = [frozenset(np.flatnonzero(row)) for row in cov]
    for x in rng.uniform(-0.2, 1.2, size=(400, 2)):
        here = frozenset(np.flatnonzero(np.linalg.norm(pts - x, axis=1) <= R))
        assert any(here <= s for s in sets)


def test_candidate_locations_need_planar_euclidean():
    with pytest.raises(UnsupportedNormError):
        candidate_locations(Instance.from_arrays(np.zeros((2, 3)), [1, 1]), 0.1)
