"""Reference curves on T^d: closed-form families, arc-length reparametrisation,
curvature/torsion, and the curve validator.

Curves live on the unwrapped lift in R^d; reduction mod Z^d happens only
inside phase evaluation.  Family functions accept real or complex parameter
arrays so the analytic continuation is available for derivative-growth
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import DegenerateSpeed, NotUnitSpeed, RadiusOutOfRange

UNIT_SPEED_TOL = 1e-9

# family(t, **params) -> (pos, vel, acc, jerk), each shaped (M, d)
FamilyFn = Callable[..., tuple]


def _stack(*cols):
    return np.stack(cols, axis=-1)


def _circle(t, radius):
    s = t / radius
    c, n = np.cos(s), np.sin(s)
    r = radius
    return (
        _stack(r * c, r * n),
        _stack(-n, c),
        _stack(-c / r, -n / r),
        _stack(n / r**2, -c / r**2),
    )


def _helix(t, a, alpha, b):
    s = alpha * t
    c, n = np.cos(s), np.sin(s)
    z = np.zeros_like(c)
    return (
        _stack(a * c, a * n, b * t),
        _stack(-a * alpha * n, a * alpha * c, b + z),
        _stack(-a * alpha**2 * c, -a * alpha**2 * n, z),
        _stack(a * alpha**3 * n, -a * alpha**3 * c, z),
    )


def _product(t, radius):
    # (gamma0(t / sqrt 2), t / sqrt 2) with gamma0 the arc-length circle
    q = 1.0 / math.sqrt(2.0)
    p0, v0, a0, j0 = _circle(t * q, radius)
    z = np.zeros_like(t * q)
    return (
        np.concatenate([p0, (t * q)[..., None]], axis=-1),
        np.concatenate([v0 * q, (z + q)[..., None]], axis=-1),
        np.concatenate([a0 * q**2, z[..., None]], axis=-1),
        np.concatenate([j0 * q**3, z[..., None]], axis=-1),
    )


def _segment(t, direction, origin=None, length=1.0):
    u = np.asarray(direction, dtype=float)
    o = np.zeros_like(u) if origin is None else np.asarray(origin, dtype=float)
    t = np.asarray(t)
    one = np.ones_like(t)
    zero = np.zeros_like(t)
    return (
        o + t[..., None] * u,
        one[..., None] * u,
        zero[..., None] * u,
        zero[..., None] * u,
    )


def _circle_warp(s, radius, exponent):
    # rho (cos 2 pi w, sin 2 pi w), w = s^p; deliberately not unit speed
    p = exponent
    w = s**p
    w1 = p * s ** (p - 1)
    w2 = p * (p - 1) * s ** (p - 2) if p != 1 else 0.0 * s
    w3 = p * (p - 1) * (p - 2) * s ** (p - 3) if p not in (1, 2) else 0.0 * s
    k = 2.0 * np.pi
    c, n = np.cos(k * w), np.sin(k * w)
    r = radius
    pos = _stack(r * c, r * n)
    vel = _stack(-r * k * w1 * n, r * k * w1 * c)
    acc = _stack(
        -r * (k * w1) ** 2 * c - r * k * w2 * n,
        -r * (k * w1) ** 2 * n + r * k * w2 * c,
    )
    jerk = _stack(
        r * (k * w1) ** 3 * n - 3 * r * k**2 * w1 * w2 * c - r * k * w3 * n,
        -r * (k * w1) ** 3 * c - 3 * r * k**2 * w1 * w2 * n + r * k * w3 * c,
    )
    return pos, vel, acc, jerk


def _circle_pos(t, radius):
    s = t / radius
    return _stack(radius * np.cos(s), radius * np.sin(s))


def _helix_pos(t, a, alpha, b):
    s = alpha * t
    return _stack(a * np.cos(s), a * np.sin(s), b * t)


# position-only shortcuts for the hot bisection path
POSITIONS = {"circle": _circle_pos, "helix": _helix_pos}

FAMILIES: dict[str, tuple[FamilyFn, int]] = {
    "circle": (_circle, 2),
    "helix": (_helix, 3),
    "product": (_product, 3),
    "segment": (_segment, 0),
    "circle_warp": (_circle_warp, 2),
}


class CurveSpec:
    """A parametrised curve c: [s0, s1] -> R^d from a named family.

    Parameters are kept as a plain dict so the spec serialises to
    ``{"family": ..., "params": ...}``.
    """

    def __init__(self, family: str, params: dict, domain=(0.0, 1.0)):
        if family not in FAMILIES:
            raise ValueError(f"unknown curve family {family!r}")
        self.family = family
        self.params = dict(params)
        self._fn, d = FAMILIES[family]
        if d == 0:
            d = len(self.params["direction"])
        self.d = d
        self.domain = (float(domain[0]), float(domain[1]))
        self._length = None

    def __repr__(self):
        return f"CurveSpec({self.family!r}, {self.params!r}, domain={self.domain})"

    def __eq__(self, other):
        return isinstance(other, CurveSpec) and self.to_dict() == other.to_dict()

    def to_dict(self) -> dict:
        return {"family": self.family, "params": _jsonable(self.params)}

    # raw derivatives in the native parameter ---------------------------------
    def jet(self, t):
        t = np.asarray(t)
        scalar = t.ndim == 0
        pos, vel, acc, jerk = self._fn(np.atleast_1d(t), **self.params)
        if scalar:
            return pos[0], vel[0], acc[0], jerk[0]
        return pos, vel, acc, jerk

    def position(self, t):
        fast = POSITIONS.get(self.family)
        if fast is None:
            return self.jet(t)[0]
        t = np.asarray(t)
        out = fast(np.atleast_1d(t), **self.params)
        return out[0] if t.ndim == 0 else out

    def velocity(self, t):
        return self.jet(t)[1]

    def acceleration(self, t):
        return self.jet(t)[2]

    @property
    def length(self) -> float:
        if self._length is None:
            s0, s1 = self.domain
            speed = lambda s: float(np.linalg.norm(self.velocity(s)))
            self._length = integrate.quad(speed, s0, s1, limit=200, epsabs=1e-14, epsrel=1e-13)[0]
        return self._length

    @property
    def unit_speed(self) -> bool:
        return self.family in ("circle", "helix", "product", "segment")

    @property
    def sub_unit(self) -> bool:
        return self.length < 1.0 - 1e-12

    @property
    def accel_bound(self) -> float:
        """Upper bound on |gamma''| over the domain (exact for the closed-form families)."""
        p = self.params
        if self.family == "circle":
            return 1.0 / p["radius"]
        if self.family == "helix":
            return abs(p["a"]) * p["alpha"] ** 2
        if self.family == "product":
            return 0.5 / p["radius"]
        if self.family == "segment":
            return 0.0
        s = np.linspace(*self.domain, 4097)
        return 1.05 * float(np.linalg.norm(self.acceleration(s), axis=-1).max())

    def curvature(self, t):
        return curvature(self, t)

    def torsion(self, t):
        return torsion(self, t)


class ArcLengthCurve(CurveSpec):
    """Arc-length reparametrisation gamma(u) = c(s(u)) of a base curve.

    s(u) comes from an adaptive-quadrature length table on panels plus a
    safeguarded Newton inversion; per-panel partial lengths use 24-point
    Gauss-Legendre, which is spectrally accurate for the analytic families.
    """

    _GL = np.polynomial.legendre.leggauss(24)

    def __init__(self, base: CurveSpec, panels: int = 256):
        self.base = base
        self.family = "arclength"
        self.params = {"base": base.to_dict()}
        self.d = base.d
        s0, s1 = base.domain
        edges = np.linspace(s0, s1, panels + 1)
        inner = 0.5 * (edges[:-1] + edges[1:])
        sp = np.linalg.norm(base.velocity(inner), axis=-1)
        if sp.min() < 1e-12:
            raise DegenerateSpeed("speed vanishes inside the parameter domain")
        speed = lambda s: float(np.linalg.norm(base.velocity(s)))
        seg = [integrate.quad(speed, a, b, epsabs=1e-15, epsrel=1e-14)[0] for a, b in zip(edges[:-1], edges[1:])]
        self._edges = edges
        self._cum = np.concatenate([[0.0], np.cumsum(seg)])
        self._length = float(self._cum[-1])
        self.domain = (0.0, self._length)

    def to_dict(self) -> dict:
        return {"family": "arclength", "params": {"base": self.base.to_dict()}}

    @property
    def unit_speed(self) -> bool:
        return True

    @property
    def accel_bound(self) -> float:
        u = np.linspace(0.0, self._length, 4097)
        return 1.05 * float(np.linalg.norm(self.acceleration(u), axis=-1).max())

    def _partial(self, s, k):
        # length from edges[k] to s
        x, w = self._GL
        a = self._edges[k]
        half = 0.5 * (s - a)
        nodes = a[:, None] + half[:, None] * (x[None, :] + 1.0)
        sp = np.linalg.norm(self.base.velocity(nodes.ravel()), axis=-1).reshape(nodes.shape)
        return half * (sp @ w)

    def param(self, u) -> np.ndarray:
        """Base parameter s(u) for arc length u."""
        u = np.clip(np.atleast_1d(np.asarray(u, dtype=float)), 0.0, self._length)
        k = np.clip(np.searchsorted(self._cum, u, side="right") - 1, 0, len(self._edges) - 2)
        lo = self._edges[k].copy()
        hi = self._edges[k + 1].copy()
        frac = (u - self._cum[k]) / np.maximum(self._cum[k + 1] - self._cum[k], 1e-300)
        s = lo + frac * (hi - lo)
        for _ in range(60):
            f = self._cum[k] + self._partial(s, k) - u
            lo = np.where(f < 0, s, lo)
            hi = np.where(f > 0, s, hi)
            sp = np.linalg.norm(self.base.velocity(s), axis=-1)
            step = f / np.maximum(sp, 1e-300)
            s_new = s - step
            bad = (s_new <= lo) | (s_new >= hi) | ~np.isfinite(s_new)
            s_new = np.where(bad, 0.5 * (lo + hi), s_new)
            done = np.abs(s_new - s) < 1e-15 * max(1.0, abs(self._edges[-1]))
            s = s_new
            if np.all(done):
                break
        return s

    def jet(self, u):
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        s = self.param(u)
        p, v, a, j = self.base.jet(s)
        sp = np.linalg.norm(v, axis=-1)
        # tangent limit where the base speed vanishes (isolated endpoints)
        zero = sp < 1e-300
        if np.any(zero):
            eps = 1e-9 * (self.base.domain[1] - self.base.domain[0])
            nudge = np.clip(s[zero] + eps, *self.base.domain)
            nudge = np.where(nudge == s[zero], s[zero] - eps, nudge)
            v_n = self.base.velocity(nudge)
            v = v.copy()
            sp = sp.copy()
            v[zero] = v_n / np.linalg.norm(v_n, axis=-1)[:, None]
            sp[zero] = 1.0
            a = a.copy()
            a[zero] = 0.0
        T = v / sp[:, None]
        vdota = (v * a).sum(-1)
        acc = a / sp[:, None] ** 2 - v * (vdota / sp**4)[:, None]
        # third derivative is not needed by callers; torsion uses the base jet
        jerk = np.full_like(acc, np.nan)
        if scalar:
            return p[0], T[0], acc[0], jerk[0]
        return p, T, acc, jerk

    def curvature(self, u):
        return curvature(self.base, self.param(u))

    def torsion(self, u):
        return torsion(self.base, self.param(u))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in list(obj)]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def curve_from_dict(data: dict) -> CurveSpec:
    family = data["family"]
    params = dict(data.get("params", {}))
    if family == "arclength":
        return ArcLengthCurve(curve_from_dict(params["base"]))
    if family == "circle":
        return make_circle_curve(params.get("radius", 1.0 / (2.0 * math.pi)))
    if family == "helix":
        return make_helix_curve(params["a"], params["alpha"], params["b"])
    if family == "product":
        return make_product_curve(params.get("radius", 1.0 / (2.0 * math.pi)))
    if family == "segment":
        return make_segment_curve(params["direction"], params.get("origin"), params.get("length", 1.0))
    if family == "circle_warp":
        return CurveSpec("circle_warp", params)
    raise ValueError(f"unknown curve family {family!r}")


# constructors ---------------------------------------------------------------

def make_circle_curve(radius: float = 1.0 / (2.0 * math.pi)) -> CurveSpec:
    """Arc-length circle of radius ``radius`` centred at the origin.

    Total length 2 pi radius must not exceed 1.
    """
    if not (0.0 < radius <= 1.0 / (2.0 * math.pi) * (1 + 1e-15)):
        raise RadiusOutOfRange(f"radius must lie in (0, 1/(2 pi)], got {radius}")
    return CurveSpec("circle", {"radius": float(radius)}, domain=(0.0, 2.0 * math.pi * radius))


def make_helix_curve(a: float, alpha: float, b: float) -> CurveSpec:
    """gamma(t) = (a cos(alpha t), a sin(alpha t), b t), t in [0, 1]; needs a^2 alpha^2 + b^2 = 1."""
    if a * alpha == 0:
        raise NotUnitSpeed("a * alpha must be nonzero")
    if abs(a * a * alpha * alpha + b * b - 1.0) > 1e-12:
        raise NotUnitSpeed(f"a^2 alpha^2 + b^2 = {a * a * alpha * alpha + b * b!r}, expected 1")
    return CurveSpec("helix", {"a": float(a), "alpha": float(alpha), "b": float(b)})


def default_helix(turns: float = 1.0) -> CurveSpec:
    """Unit-speed helix with a alpha = b = 1/sqrt(2) and ``turns`` windings."""
    alpha = 2.0 * math.pi * turns
    a = 1.0 / (math.sqrt(2.0) * alpha)
    b = math.sqrt(1.0 - (a * alpha) ** 2)
    return make_helix_curve(a, alpha, b)


def make_product_curve(radius: float = 1.0 / (2.0 * math.pi)) -> CurveSpec:
    """(gamma0(t/sqrt 2), t/sqrt 2) on T^3, gamma0 the arc-length circle of ``radius``."""
    if radius <= 0:
        raise RadiusOutOfRange("radius must be positive")
    return CurveSpec("product", {"radius": float(radius)})


def make_segment_curve(direction, origin=None, length: float = 1.0) -> CurveSpec:
    u = [float(x) for x in direction]
    if abs(math.hypot(*u) - 1.0) > 1e-12:
        raise NotUnitSpeed("segment direction must be a unit vector")
    params = {"direction": u}
    if origin is not None:
        params["origin"] = [float(x) for x in origin]
    if length != 1.0:
        params["length"] = float(length)
    return CurveSpec("segment", params, domain=(0.0, float(length)))


def default_curve(d: int) -> CurveSpec:
    return make_circle_curve() if d == 2 else default_helix()


def reparametrize_arclength(spec: CurveSpec) -> CurveSpec:
    """Return a unit-speed version of ``spec`` with the same image."""
    if spec.unit_speed:
        return spec
    return ArcLengthCurve(spec)


# differential invariants ----------------------------------------------------

def _cross(a, b):
    if a.shape[-1] == 2:
        return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return np.cross(a, b)


def curvature(spec: CurveSpec, t) -> np.ndarray:
    """|c' x c''| / |c'|^3, valid in any parametrisation."""
    _, v, a, _ = spec.jet(np.atleast_1d(t))
    cr = _cross(v, a)
    num = np.abs(cr) if cr.ndim == 1 else np.linalg.norm(cr, axis=-1)
    return num / np.linalg.norm(v, axis=-1) ** 3


def torsion(spec: CurveSpec, t) -> np.ndarray:
    """(c' x c'') . c''' / |c' x c''|^2 (d = 3 only)."""
    if spec.d != 3:
        raise ValueError("torsion needs a space curve")
    _, v, a, j = spec.jet(np.atleast_1d(t))
    cr = np.cross(v, a)
    den = (cr * cr).sum(-1)
    return np.where(den > 0, (cr * j).sum(-1) / np.where(den > 0, den, 1.0), 0.0)


# sampler --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CurveSampler:
    """A curve with cached jets on a uniform grid over its domain."""

    curve: CurveSpec
    t: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    acc: np.ndarray

    @classmethod
    def build(cls, curve: CurveSpec, nodes: int) -> "CurveSampler":
        t = np.linspace(*curve.domain, nodes)
        p, v, a, _ = curve.jet(t)
        for arr in (t, p, v, a):
            arr.setflags(write=False)
        return cls(curve, t, p, v, a)

    @classmethod
    def for_level(cls, curve: CurveSpec, m: int, grid_factor: float = 32.0) -> "CurveSampler":
        """Grid with at least ``grid_factor * lambda`` nodes per unit length."""
        lam = 2.0 * math.pi * math.sqrt(m)
        n = int(math.ceil(grid_factor * lam * (curve.domain[1] - curve.domain[0]))) + 1
        return cls.build(curve, max(n, 17))

    @property
    def resolution(self) -> float:
        return (len(self.t) - 1) / (self.t[-1] - self.t[0])

    @property
    def d(self) -> int:
        return self.curve.d

    @property
    def domain(self):
        return self.curve.domain

    def jet(self, t):
        return self.curve.jet(t)


def as_curve(curve) -> CurveSpec:
    return curve.curve if isinstance(curve, CurveSampler) else curve


# validation -----------------------------------------------------------------

@dataclass
class Condition1Report:
    unit_speed_err: float
    min_curvature: float
    min_torsion: float | None
    planar: bool
    ball_nonconfinement: bool | None
    length: float
    sub_unit: bool
    passes: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def validate_condition1(
    spec: CurveSpec,
    grid: int = 2049,
    lam: float | None = None,
    N: int | None = None,
    alpha: float | None = None,
    c0: float = 1.0,
    curvature_floor: float = 1e-8,
) -> Condition1Report:
    """Grid checks of unit speed, positive curvature and (d = 3) torsion.

    If ``lam``, ``N`` and ``alpha`` are all given, also checks that no
    parameter window of length c0/lam stays inside a ball of radius
    N^-alpha / lam.  The check is conservative: it passes a window when half
    its sampled diameter exceeds the radius.
    """
    u = np.linspace(*spec.domain, grid)
    _, v, _, _ = spec.jet(u)
    speed_err = float(np.abs(np.linalg.norm(v, axis=-1) - 1.0).max())
    kappa = curvature(spec, u)
    min_k = float(kappa.min())
    planar = spec.d == 2
    min_tau = None
    if spec.d == 3:
        tau = torsion(spec, u)
        planar = bool(np.all(np.abs(tau) < 1e-12))
        min_tau = None if planar else float(np.abs(tau).min())

    ball = None
    if lam is not None and N is not None and alpha is not None:
        ball = _ball_nonconfinement(spec, lam, N, alpha, c0)

    passes = speed_err <= UNIT_SPEED_TOL and min_k > curvature_floor
    if spec.d == 3 and not planar:
        passes = passes and min_tau > curvature_floor
    if ball is not None:
        passes = passes and ball
    return Condition1Report(
        unit_speed_err=speed_err,
        min_curvature=min_k,
        min_torsion=min_tau,
        planar=planar,
        ball_nonconfinement=ball,
        length=spec.length,
        sub_unit=spec.sub_unit,
        passes=bool(passes),
    )


def _ball_nonconfinement(spec, lam, N, alpha, c0, windows=512, per_window=33) -> bool:
    s0, s1 = spec.domain
    w = c0 / lam
    radius = N ** (-alpha) / lam
    if w >= s1 - s0:
        starts = np.array([s0])
        w = s1 - s0
    else:
        starts = np.linspace(s0, s1 - w, windows)
    for a in starts:
        p = spec.position(np.linspace(a, a + w, per_window))
        diff = p[:, None, :] - p[None, :, :]
        diam = float(np.sqrt((diff * diff).sum(-1)).max())
        if diam / 2.0 <= radius:
            return False
    return True
