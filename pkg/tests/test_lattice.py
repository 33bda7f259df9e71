import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import box_scan
from torus_waves.errors import Degenerate, InvalidLevel, IOFailure
from torus_waves.lattice import (
    LatticeSet,
    arc_concentration,
    direction_set,
    enumerate_lattice,
    fourth_fourier,
    gauss_circle_count,
    load_lattice,
    min_separation,
    save_lattice,
)


@pytest.mark.parametrize(
    "d,m,N",
    [(2, 5, 8), (2, 3, 0), (3, 1, 6), (2, 25, 12), (2, 65, 16), (2, 325, 24), (3, 3, 8), (3, 2, 12)],
)
def test_counts(d, m, N):
    assert enumerate_lattice(d, m).N == N


def test_m5_points():
    L = enumerate_lattice(2, 5)
    want = {(1, 2), (2, 1), (-1, 2), (2, -1), (1, -2), (-2, 1), (-1, -2), (-2, -1)}
    assert {tuple(p) for p in L.points.tolist()} == want


def test_empty_is_not_an_error():
    L = enumerate_lattice(2, 3)
    assert L.empty and L.N == 0


@pytest.mark.parametrize("m", [4, 7, 8, 12, 15, 28])
def test_excluded_residues_d3(m):
    with pytest.raises(InvalidLevel):
        enumerate_lattice(3, m)


@pytest.mark.parametrize("d,m", [(4, 1), (2, 0), (2, -3)])
def test_invalid_levels(d, m):
    with pytest.raises(InvalidLevel):
        enumerate_lattice(d, m)


def test_paired_layout_and_negation_closure():
    for d, m in [(2, 65), (2, 325), (3, 3), (3, 11)]:
        L = enumerate_lattice(d, m)
        h = L.N // 2
        assert np.array_equal(L.points[h:], -L.points[:h])
        pts = {tuple(p) for p in L.points.tolist()}
        assert pts == {tuple(-c for c in p) for p in pts}
        assert L.pairs[0] == (0, h)


def test_agrees_with_box_scan_small():
    ref2 = box_scan(2, 600)
    for m in range(1, 601):
        assert {tuple(p) for p in enumerate_lattice(2, m).points.tolist()} == ref2.get(m, set())
    ref3 = box_scan(3, 120)
    for m in range(1, 121):
        if m % 8 in (0, 4, 7):
            continue
        assert {tuple(p) for p in enumerate_lattice(3, m).points.tolist()} == ref3.get(m, set())


@pytest.mark.parametrize("m,want", [(5, math.sqrt(2)), (1, math.sqrt(2)), (2, 2.0)])
def test_min_separation(m, want):
    assert min_separation(enumerate_lattice(2, m)) == pytest.approx(want, abs=1e-15)


def test_min_separation_needs_two_points():
    with pytest.raises(Degenerate):
        min_separation(LatticeSet(2, 1, np.array([[1, 0]])))


def test_arc_concentration_examples():
    assert arc_concentration(enumerate_lattice(2, 25)) == 1
    for m in (5, 25, 65, 325):
        L = enumerate_lattice(2, m)
        assert arc_concentration(L, 2 * math.pi * L.lam) == L.N
    assert arc_concentration(enumerate_lattice(2, 5), 1e-9) == 1


def test_arc_concentration_monotone():
    L = enumerate_lattice(2, 5525)
    lens = np.linspace(1e-6, 2 * math.pi * L.lam, 200)
    vals = [arc_concentration(L, x) for x in lens]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("m,want", [(1, 1.0), (5, -0.28), (2, -1.0)])
def test_fourth_fourier(m, want):
    assert fourth_fourier(enumerate_lattice(2, m)) == pytest.approx(want, abs=1e-15)


def test_fourth_fourier_matches_angle_formula_and_relabeling(rng):
    for m in (25, 65, 325, 1105):
        L = enumerate_lattice(2, m)
        th = np.arctan2(L.points[:, 1], L.points[:, 0])
        direct = float(np.mean(np.cos(4 * th)))
        v = fourth_fourier(L)
        assert -1 <= v <= 1
        assert v == pytest.approx(direct, abs=1e-12)
        perm = L.points[rng.permutation(L.N)]
        assert fourth_fourier(LatticeSet.from_points(perm)) == v


@pytest.mark.parametrize("x,want", [(100, 317), (1, 5), (2, 9)])
def test_gauss_circle(x, want):
    assert gauss_circle_count(x) == want


def test_gauss_circle_matches_r2_sum():
    assert gauss_circle_count(400) == 1 + sum(enumerate_lattice(2, n).N for n in range(1, 401))


def test_direction_set_dedups_antipodes():
    # m=1: differences are +/-2e1, +/-2e2 and (+/-1, +/-1): four line directions
    D = direction_set(enumerate_lattice(2, 1))
    assert np.allclose(D, [0, math.pi / 4, math.pi / 2, 3 * math.pi / 4])
    two = LatticeSet.from_points([[1, 0], [-1, 0]])
    assert np.allclose(direction_set(two), [0.0])


def test_from_points_validation():
    with pytest.raises(ValueError):
        LatticeSet.from_points([[1, 0], [0, 1]])  # not closed under negation
    with pytest.raises(ValueError):
        LatticeSet.from_points([[1, 0], [-1, 0], [1, 1], [-1, -1]])  # mixed norms


def test_cache_round_trip(tmp_path):
    L = enumerate_lattice(2, 325)
    p = tmp_path / "l.json"
    save_lattice(L, p)
    assert load_lattice(p) == L
    E = enumerate_lattice(2, 3)
    save_lattice(E, p)
    assert load_lattice(p) == E
    p.write_text("{not json")
    with pytest.raises(IOFailure):
        load_lattice(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000))
def test_norms_and_count_parity(m):
    L = enumerate_lattice(2, m)
    assert np.all((L.points**2).sum(axis=1) == m)
    assert L.N % 4 == 0
