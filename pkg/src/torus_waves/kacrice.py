"""Gaussian Kac-Rice predictions for nodal intersections.

For unit-variance components the covariance of (F, F') at one point is
diag(1, alpha) with alpha = 4 pi^2 m / d, so the first intensity is
sqrt(alpha)/pi = 2 sqrt(m/d) and the expected count on a unit-length curve
equals it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureUnconverged, SingularCell
from .geometry import as_curve
from .lattice import LatticeSet, check_level, fourth_fourier


def predict_mean(d: int, m: int) -> float:
    """Expected number of zeros on a unit-length curve: (2/sqrt d) sqrt m."""
    check_level(d, m)
    return 2.0 * math.sqrt(m) / math.sqrt(d)


def first_intensity(d: int, m: int) -> float:
    alpha = 4.0 * math.pi**2 * m / d
    return math.sqrt(alpha) / math.pi


@dataclass
class VarianceIntegral:
    value: float
    value_coarse: float
    nodes: int
    integrand_min: float
    integrand_max: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _gl_panels(a: float, b: float, nodes: int, per_panel: int = 16):
    panels = max(1, nodes // per_panel)
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def _variance_quadrature(L: LatticeSet, crv, nodes: int):
    t, w = _gl_panels(*crv.domain, nodes)
    v = crv.velocity(t)
    unit = L.points.astype(float) / math.sqrt(L.m)
    proj2 = (v @ unit.T) ** 2  # (M, N)
    inner = proj2 @ proj2.T / L.N
    integrand = 4.0 * (inner - 1.0)
    return (L.m / L.N) * float(w @ integrand @ w), integrand


def variance_integral(L: LatticeSet, curve, quad_nodes: int = 128, rtol: float = 1e-6) -> VarianceIntegral:
    """(m/N) * double integral of 4[(1/N) sum_mu <mu^,g'(t1)>^2 <mu^,g'(t2)>^2 - 1].

    The sum over mu sits inside the bracket next to the 1/N factor.  Under
    this placement the integrand is never positive.  The value is returned
    as a diagnostic, not as a variance.
    Composite Gauss-Legendre (16-point panels) on a tensor grid; the
    result at ``quad_nodes`` is compared with ``2 * quad_nodes``.
    """
    if L.d != 2:
        raise ValueError("variance_integral is defined for d = 2")
    if quad_nodes < 64:
        raise ValueError("quad_nodes must be at least 64")
    crv = as_curve(curve)
    coarse, _ = _variance_quadrature(L, crv, quad_nodes)
    fine, integrand = _variance_quadrature(L, crv, 2 * quad_nodes)
    if abs(fine - coarse) > rtol * max(abs(fine), 1e-300):
        raise QuadratureUnconverged(f"node doubling changed the integral from {coarse!r} to {fine!r}")
    return VarianceIntegral(
        value=fine,
        value_coarse=coarse,
        nodes=2 * quad_nodes,
        integrand_min=float(integrand.min()),
        integrand_max=float(integrand.max()),
    )


def covariance_matrix(L: LatticeSet, curve, t1: float, t2: float) -> np.ndarray:
    """Covariance of (F(t1), F(t2), F'(t1), F'(t2)) for unit-variance coefficients.

    Built as (2/N) A A^T from the cos/sin feature rows, so it is symmetric
    positive semidefinite by construction.
    """
    crv = as_curve(curve)
    p, v, _, _ = crv.jet(np.array([t1, t2], dtype=float))
    mu = L.half.astype(float)
    ph = 2.0 * math.pi * (p @ mu.T)
    dp = 2.0 * math.pi * (v @ mu.T)
    cs, sn = np.cos(ph), np.sin(ph)
    rows = np.stack(
        [
            np.concatenate([cs[0], sn[0]]),
            np.concatenate([cs[1], sn[1]]),
            np.concatenate([-dp[0] * sn[0], dp[0] * cs[0]]),
            np.concatenate([-dp[1] * sn[1], dp[1] * cs[1]]),
        ]
    )
    return (2.0 / L.N) * rows @ rows.T


def expected_abs_product(s1: float, s2: float, rho: float) -> float:
    """E|XY| for a centred bivariate normal with sds s1, s2 and correlation rho."""
    rho = min(1.0, max(-1.0, rho))
    return 2.0 * s1 * s2 / math.pi * (rho * math.asin(rho) + math.sqrt(1.0 - rho * rho))


def second_intensity(L: LatticeSet, curve, t1: float, t2: float, min_eig: float = 1e-10) -> float:
    """K2(t1, t2) = phi(0, 0) E[|F'(t1) F'(t2)| | F(t1) = F(t2) = 0]."""
    if t1 == t2:
        raise SingularCell("t1 and t2 must differ")
    S = covariance_matrix(L, curve, t1, t2)
    eig = np.linalg.eigvalsh(S)
    if eig.min() <= min_eig:
        raise SingularCell(f"covariance is singular at ({t1}, {t2}); min eigenvalue {eig.min():.3e}")
    A, B, C = S[:2, :2], S[:2, 2:], S[2:, 2:]
    omega = C - B.T @ np.linalg.solve(A, B)
    s1, s2 = math.sqrt(omega[0, 0]), math.sqrt(omega[1, 1])
    rho = 0.5 * (omega[0, 1] + omega[1, 0]) / (s1 * s2)
    density = 1.0 / (2.0 * math.pi * math.sqrt(np.linalg.det(A)))
    return density * expected_abs_product(s1, s2, rho)


@dataclass
class KacRicePrediction:
    d: int
    m: int
    mean: float
    alpha: float
    tau4: float | None = None
    variance_leading: float | None = None
    variance_integral: VarianceIntegral | None = None

    def to_dict(self) -> dict:
        out = {
            "d": self.d,
            "m": self.m,
            "mean": self.mean,
            "alpha": self.alpha,
            "first_intensity": first_intensity(self.d, self.m),
            "tau4": self.tau4,
            "variance_leading": self.variance_leading,
        }
        if self.variance_integral is not None:
            out["variance_integral"] = self.variance_integral.to_dict()
        return out


def predict(L: LatticeSet, curve=None, variance: bool = False, quad_nodes: int = 128) -> KacRicePrediction:
    pred = KacRicePrediction(
        d=L.d,
        m=L.m,
        mean=predict_mean(L.d, L.m),
        alpha=4.0 * math.pi**2 * L.m / L.d,
        tau4=fourth_fourier(L) if L.d == 2 and L.N else None,
    )
    if variance and L.d == 2 and curve is not None:
        vi = variance_integral(L, curve, quad_nodes)
        pred.variance_integral = vi
        pred.variance_leading = vi.value
    return pred
