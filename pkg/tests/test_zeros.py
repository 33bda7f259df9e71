import math

import numpy as np
import pytest

from conftest import complex_wave, curve_position, dense_grid_zero_count
from torus_waves.errors import InvalidSample
from torus_waves.geometry import CurveSampler, default_helix, make_circle_curve, make_segment_curve
from torus_waves.lattice import LatticeSet, direction_set, enumerate_lattice
from torus_waves.wave import CoefficientModel, WaveSample, evaluate_F, sample_coefficients, trial_seed
from torus_waves.zeros import bad_components, count_zeros, restrict_to_good_set, scaling_invariance_check


def cos_fixture(k):
    L = LatticeSet.from_points([[k, 0], [-k, 0]])
    return WaveSample(L, [1.0], [0.0]), make_segment_curve([1.0, 0.0])


@pytest.mark.parametrize("k", [1, 2, 3, 5, 8])
def test_cosine_fixture(k):
    s, seg = cos_fixture(k)
    zc = count_zeros(s, seg)
    want = (2 * np.arange(2 * k) + 1) / (4 * k)
    assert zc.certified
    assert zc.count == 2 * k
    assert np.allclose(zc.roots, want, atol=1e-12)
    assert np.all(np.abs(evaluate_F(s, seg, zc.roots)) < 1e-10)


def test_cosine_fixture_half_open_interval():
    s, seg = cos_fixture(1)
    assert count_zeros(s, seg, interval=(0.25, 0.75)).count == 1  # 1/4 counted, 3/4 excluded
    assert count_zeros(s, seg, interval=(0.0, 0.25)).count == 0


def test_positive_fixture_has_no_zeros():
    L = enumerate_lattice(2, 1)
    rows = [tuple(p) for p in L.half.tolist()]
    c1 = np.array([2.0 if p == (1, 0) else 1.0 for p in rows])
    s = WaveSample(L, c1, np.zeros(2))
    seg = make_segment_curve([0.0, 1.0])
    # F = sqrt(1/2) (2 + cos 2 pi t) >= sqrt(1/2)
    assert evaluate_F(s, seg, np.linspace(0, 1, 101)).min() >= math.sqrt(0.5) - 1e-15
    zc = count_zeros(s, seg)
    assert zc.count == 0 and zc.certified and zc.roots.size == 0


def test_nan_rejected():
    L = enumerate_lattice(2, 5)
    with pytest.raises(InvalidSample):
        WaveSample(L, [np.nan, 0, 0, 0], np.zeros(4))


def _oracle_count(L, s, spec):
    F = complex_wave(L.points, s.c1, s.c2)
    a, b = spec["domain"]
    return dense_grid_zero_count(F, lambda t: curve_position(spec, t), a, b)


@pytest.mark.parametrize("d,m,n", [(2, 65, 60), (2, 325, 30), (3, 3, 40), (3, 11, 20)])
def test_dense_grid_oracle(d, m, n):
    L = enumerate_lattice(d, m)
    curve = make_circle_curve() if d == 2 else default_helix()
    spec = dict(curve.to_dict(), domain=curve.domain)
    sampler = CurveSampler.for_level(curve, m)
    for i in range(n):
        s = sample_coefficients(CoefficientModel(), L, trial_seed(99, i))
        zc = count_zeros(s, sampler)
        want, roots = _oracle_count(L, s, spec)
        assert zc.certified
        assert zc.count == want
        assert np.allclose(zc.roots, roots, atol=1e-9)


def test_roots_strictly_increasing_and_small_residual():
    L = enumerate_lattice(2, 325)
    c = make_circle_curve()
    for i in range(10):
        s = sample_coefficients(CoefficientModel("bernoulli"), L, i)
        zc = count_zeros(s, c)
        assert np.all(np.diff(zc.roots) > 0)
        assert np.abs(evaluate_F(s, c, zc.roots)).max() < 1e-10
        assert zc.count == len(zc.roots)
        assert zc.grid_resolution >= 32 * L.lam


@pytest.mark.parametrize("c", [2.0, -1.0, 1e-6])
def test_scaling_invariance(c):
    L = enumerate_lattice(2, 65)
    for i in range(5):
        s = sample_coefficients(CoefficientModel(), L, i)
        assert scaling_invariance_check(s, make_circle_curve(), c)


def test_union_of_intervals(rng):
    L = enumerate_lattice(2, 65)
    c = make_circle_curve()
    for i in range(20):
        s = sample_coefficients(CoefficientModel(), L, 1000 + i)
        a, b_, e = np.sort(rng.uniform(0, 1, 3))
        whole = count_zeros(s, c, interval=(a, e))
        assert not np.any(np.abs(whole.roots - b_) < 1e-9)
        left = count_zeros(s, c, interval=(a, b_))
        right = count_zeros(s, c, interval=(b_, e))
        assert left.count + right.count == whole.count


def test_near_double_root_escalates():
    # g(t) = cos(2 pi t) - (1 - eps) has two roots about 4.5e-3 apart near
    # t = 0; the coarse grid cannot certify those cells and must refine
    L = LatticeSet.from_points([[1, 0], [-1, 0], [0, 1], [0, -1]])
    seg = make_segment_curve([1.0, 0.0])
    eps = 1e-4
    rows = [tuple(p) for p in L.half.tolist()]
    c1 = np.array([1.0 if p == (1, 0) else -(1.0 - eps) for p in rows])
    s = WaveSample(L, c1, np.zeros(2))
    zc = count_zeros(s, seg, interval=(-0.2501, 0.25), grid_factor=2)
    assert zc.count == 2
    assert zc.escalations >= 1
    want = math.acos(1 - eps) / (2 * math.pi)
    assert np.allclose(zc.roots, [-want, want], atol=1e-11)


def test_uncertified_is_reported_not_raised():
    L = LatticeSet.from_points([[1, 0], [-1, 0], [0, 1], [0, -1]])
    seg = make_segment_curve([1.0, 0.0])
    rows = [tuple(p) for p in L.half.tolist()]
    # exact double root at t = 0 of 1 - cos 2 pi t shifted off the grid
    c1 = np.array([1.0 if p == (1, 0) else -1.0 for p in rows])
    s = WaveSample(L, c1, np.zeros(2))
    zc = count_zeros(s, seg, interval=(-0.2113, 0.3), grid_factor=2, max_escalations=1)
    assert not zc.certified and zc.unresolved > 0


def test_bad_set_m5_circle():
    L = enumerate_lattice(2, 5)
    c = make_circle_curve()
    kappa = L.N**-3.0
    D = direction_set(L)
    assert D.size <= L.N * (L.N - 1)
    comps = bad_components(c, L)
    measure = sum(hi - lo for lo, hi in comps)
    assert measure <= 56 * 2 * kappa / math.pi
    # on the 2 pi curvature circle each direction line is hit twice, each time
    # for a parameter window of width 2 kappa / (2 pi)
    assert measure == pytest.approx(2 * D.size * 2 * kappa / (2 * math.pi), rel=1e-6)
    # the component through t = 0 is split by the domain ends
    assert len(comps) == 2 * D.size + 1
    good = restrict_to_good_set(c, L, [(0.0, 1.0)])
    kept = sum(hi - lo for lo, hi in good)
    assert kept == pytest.approx(1 - measure, abs=1e-15)
    assert kept >= 1 - 56 * 2 * kappa / math.pi


def test_bad_set_two_point_lattice():
    L = LatticeSet.from_points([[1, 0], [-1, 0]])
    c = make_circle_curve()
    comps = bad_components(c, L)
    # tangent is horizontal at t = 1/4 and t = 3/4 only
    assert len(comps) == 2
    for (lo, hi), t in zip(comps, (0.25, 0.75)):
        assert lo < t < hi and hi - lo < 0.1


def test_kappa_zero_returns_input():
    L = enumerate_lattice(2, 5)
    ivs = [(0.0, 0.3), (0.5, 1.0)]
    assert restrict_to_good_set(make_circle_curve(), L, ivs, kappa=0.0) == ivs
