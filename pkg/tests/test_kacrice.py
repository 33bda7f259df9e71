import math

import numpy as np
import pytest

from torus_waves.errors import QuadratureUnconverged, SingularCell
from torus_waves.geometry import default_helix, make_circle_curve, make_segment_curve
from torus_waves.kacrice import (
    covariance_matrix,
    expected_abs_product,
    first_intensity,
    predict,
    predict_mean,
    second_intensity,
    variance_integral,
)
from torus_waves.lattice import LatticeSet, enumerate_lattice


@pytest.mark.parametrize("d,m,want", [(2, 2, 2.0), (3, 3, 2.0), (2, 65, math.sqrt(130))])
def test_predict_mean(d, m, want):
    assert predict_mean(d, m) == pytest.approx(want, rel=1e-15)


def test_predict_mean_identity(rng):
    for _ in range(50):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(1, 10**6))
        if d == 3 and m % 8 in (0, 4, 7):
            continue
        mu = predict_mean(d, m)
        assert mu * mu * d / 4 == pytest.approx(m, rel=1e-12)
        assert first_intensity(d, m) == pytest.approx(mu, rel=1e-14)


@pytest.mark.parametrize("d,m,want", [(2, 1, math.sqrt(2)), (3, 3, 2.0)])
def test_first_intensity(d, m, want):
    assert first_intensity(d, m) == pytest.approx(want, rel=1e-15)


def test_single_point_covariance_table():
    for d, m, c in [(2, 65, make_circle_curve()), (2, 1105, make_circle_curve()), (3, 3, default_helix())]:
        L = enumerate_lattice(d, m)
        alpha = 4 * math.pi**2 * m / d
        for t in (0.1, 0.45, 0.8):
            S = covariance_matrix(L, c, t, t + 0.3)
            assert S[0, 0] == pytest.approx(1.0, abs=1e-10)
            assert S[1, 1] == pytest.approx(1.0, abs=1e-10)
            assert abs(S[0, 2]) < 1e-10 and abs(S[1, 3]) < 1e-10  # r_1(t, t) = 0
            assert S[2, 2] == pytest.approx(alpha, rel=1e-10)
            assert np.allclose(S, S.T, atol=1e-12)
            assert np.linalg.eigvalsh(S).min() >= -1e-10


def test_covariance_psd_on_grid():
    L = enumerate_lattice(2, 65)
    c = make_circle_curve()
    for t1 in np.linspace(0, 1, 9):
        for t2 in np.linspace(0, 1, 9):
            assert np.linalg.eigvalsh(covariance_matrix(L, c, t1, t2)).min() >= -1e-10


def test_expected_abs_product():
    assert expected_abs_product(1.3, 0.7, 0.0) == pytest.approx(2 / math.pi * 1.3 * 0.7)
    assert expected_abs_product(1.0, 1.0, 1.0) == pytest.approx(1.0)
    rng = np.random.default_rng(5)
    for rho in (-0.6, 0.3, 0.9):
        z = rng.multivariate_normal([0, 0], [[4, 2 * 3 * rho], [2 * 3 * rho, 9]], size=400_000)
        mc = np.abs(z[:, 0] * z[:, 1]).mean()
        assert expected_abs_product(2, 3, rho) == pytest.approx(mc, rel=0.01)


def test_second_intensity_independence_limit():
    L = enumerate_lattice(2, 1105)
    c = make_circle_curve()
    k1 = first_intensity(2, 1105)
    t1, t2 = 0.0, 0.369
    S = covariance_matrix(L, c, t1, t2)
    assert abs(S[0, 1]) < 0.1
    assert second_intensity(L, c, t1, t2) == pytest.approx(k1 * k1, rel=0.05)


def test_second_intensity_symmetric_and_singular():
    L = enumerate_lattice(2, 65)
    c = make_circle_curve()
    a = second_intensity(L, c, 0.1, 0.6)
    b = second_intensity(L, c, 0.6, 0.1)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)
    with pytest.raises(SingularCell):
        second_intensity(L, c, 0.3, 0.3)
    with pytest.raises(SingularCell):
        second_intensity(L, c, 0.3, 0.3 + 1e-9)


def test_variance_integral_converges_m5():
    L = enumerate_lattice(2, 5)
    vi = variance_integral(L, make_circle_curve(), 128)
    assert abs(vi.value - vi.value_coarse) < 1e-6 * abs(vi.value)
    assert vi.integrand_max <= 0


@pytest.mark.parametrize("theta", [math.pi / 6, 0.4, 1.1])
def test_variance_integral_single_direction_closed_form(theta):
    # mu = +/-(1, 0), straight segment at angle theta: integrand 4(cos^4 - 1)
    L = LatticeSet.from_points([[1, 0], [-1, 0]])
    seg = make_segment_curve([math.cos(theta), math.sin(theta)])
    vi = variance_integral(L, seg, 64)
    want = (1 / 2) * 4 * (math.cos(theta) ** 4 - 1)
    assert vi.value == pytest.approx(want, rel=1e-12)
    assert vi.integrand_min == pytest.approx(vi.integrand_max, rel=1e-12)


def test_variance_integral_diagonal_recorded():
    # angle-equidistributed sets give an integrand near 4(3/8 - 1) on the diagonal
    L = enumerate_lattice(2, 5**6)
    vi = variance_integral(L, make_circle_curve(), 64)
    assert vi.integrand_min < 0 and vi.integrand_max < 0


def test_variance_integral_errors():
    L = enumerate_lattice(2, 65)
    with pytest.raises(ValueError):
        variance_integral(L, make_circle_curve(), 32)
    with pytest.raises(QuadratureUnconverged):
        variance_integral(enumerate_lattice(2, 5**8), make_circle_curve(), 64, rtol=1e-300)


def test_predict_record():
    L = enumerate_lattice(2, 65)
    p = predict(L, make_circle_curve(), variance=True)
    d = p.to_dict()
    assert d["mean"] == pytest.approx(math.sqrt(130))
    assert d["alpha"] == pytest.approx(4 * math.pi**2 * 65 / 2)
    assert d["variance_leading"] == pytest.approx(-12.1875, rel=1e-9)
    assert predict(enumerate_lattice(3, 3)).tau4 is None
