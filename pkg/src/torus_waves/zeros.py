"""Certified counting of zeros of g(t) = F(gamma(t)) on [a, b).

The counter works on a uniform grid with ``grid_factor * lambda`` nodes per
unit length.  Every grid cell must be *certified* before it is accepted:

* a cell with a sign change holds exactly one root if g' keeps one sign on
  it, which follows from |g'| at the end nodes and a bound B >= sup |g''|;
* a cell without a sign change holds no root if the two one-sided
  quadratic lower bounds for |g| stay positive on each half of the cell.

B is a rigorous per-cell bound built from the coefficient amplitudes, the
tangent projections <mu, gamma'> at the left node, and sup |gamma''|.  Cells
that fail are split in four, at most ``max_escalations`` times; whatever is
still open afterwards makes the result uncertified.  Brackets are refined
by bisection only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidSample
from .geometry import CurveSampler, as_curve
from .lattice import LatticeSet, direction_set
from .wave import WaveSample


@dataclass
class ZeroCount:
    count: int
    roots: np.ndarray = field(repr=False)
    certified: bool
    min_gap: float
    grid_resolution: float
    escalations: int = 0
    unresolved: int = 0

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "roots": [float(r) for r in self.roots],
            "certified": self.certified,
            "min_gap": None if math.isinf(self.min_gap) else self.min_gap,
            "grid_resolution": self.grid_resolution,
            "escalations": self.escalations,
            "unresolved": self.unresolved,
        }


def _bisect(sample: WaveSample, curve, lo, hi, glo, xtol):
    lo = lo.copy()
    hi = hi.copy()
    slo = np.sign(glo)
    while lo.size and np.max(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        gm = sample.values_at(curve.position(mid))
        exact = gm == 0
        left = np.sign(gm) == slo
        lo = np.where(left | exact, mid, lo)
        hi = np.where(~left | exact, mid, hi)
    return 0.5 * (lo + hi)


def count_zeros(
    sample: WaveSample,
    curve,
    interval=None,
    grid_factor: float = 32.0,
    max_escalations: int = 3,
    xtol: float = 1e-12,
) -> ZeroCount:
    """Count zeros of F along ``curve`` on the half-open ``interval``.

    ``curve`` may be a :class:`CurveSpec` or a :class:`CurveSampler`; a
    sampler's cached grid is reused when it spans the interval at the
    requested resolution.
    """
    crv = as_curve(curve)
    a, b = crv.domain if interval is None else (float(interval[0]), float(interval[1]))
    if not b > a:
        raise ValueError("interval must have positive length")
    L = sample.lattice
    lam = L.lam

    need = grid_factor * lam
    if (
        isinstance(curve, CurveSampler)
        and curve.t[0] == a
        and curve.t[-1] == b
        and curve.resolution >= need * (1 - 1e-12)
    ):
        t, pos, vel = curve.t, curve.pos, curve.vel
    else:
        n = max(int(math.ceil(need * (b - a))), 16)
        t = np.linspace(a, b, n + 1)
        pos, vel, _, _ = crv.jet(t)
    g, dg = sample.values_derivs_at(pos, vel)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(dg))):
        raise InvalidSample("wave evaluation produced non-finite values")

    mu = sample.mu
    amp = sample.amplitudes
    sqrt_m = math.sqrt(L.m)
    kmax = crv.accel_bound
    curv_term = 2.0 * math.pi * sqrt_m * kmax
    norm = sample.norm

    node_roots = [t[:-1][g[:-1] == 0]]
    brackets = []
    lo_t, hi_t = t[:-1], t[1:]
    glo, ghi, dlo, dhi, vlo = g[:-1], g[1:], dg[:-1], dg[1:], vel[:-1]
    h = (b - a) / (len(t) - 1)
    level = 0
    unresolved = 0

    while lo_t.size:
        B = norm * _kernels.second_deriv_bound(mu, amp, vlo, sqrt_m * kmax * h, curv_term)
        sc = glo * ghi < 0
        touch = ((glo == 0) | (ghi == 0)) & ~sc
        mono = (np.sign(dlo) == np.sign(dhi)) & (np.abs(dlo) > 0.5 * B * h) & (np.abs(dhi) > 0.5 * B * h)
        s = np.sign(glo)
        q = 0.125 * B * h * h
        clear = (~sc) & (~touch) & (s * (glo + 0.5 * dlo * h) - q > 0) & (s * (ghi - 0.5 * dhi * h) - q > 0)
        ok = np.where(sc | touch, mono, clear)

        good_sc = sc & ok
        if np.any(good_sc):
            brackets.append((lo_t[good_sc], hi_t[good_sc], glo[good_sc]))
        bad = ~ok
        if not np.any(bad):
            break
        if level >= max_escalations:
            unresolved = int(np.count_nonzero(bad))
            left_sc = sc & bad
            if np.any(left_sc):
                brackets.append((lo_t[left_sc], hi_t[left_sc], glo[left_sc]))
            break

        # split each open cell into four
        level += 1
        h /= 4.0
        lo_b, hi_b = lo_t[bad], hi_t[bad]
        k = lo_b.size
        frac = np.array([0.25, 0.5, 0.75])
        inner = (lo_b[:, None] + (hi_b - lo_b)[:, None] * frac[None, :]).ravel()
        p_in, v_in, _, _ = crv.jet(inner)
        g_in, d_in = sample.values_derivs_at(p_in, v_in)
        node_roots.append(inner[g_in == 0])
        tt = np.column_stack([lo_b, inner.reshape(k, 3), hi_b])
        gg = np.column_stack([glo[bad], g_in.reshape(k, 3), ghi[bad]])
        dd = np.column_stack([dlo[bad], d_in.reshape(k, 3), dhi[bad]])
        vv = np.concatenate([vlo[bad][:, None, :], v_in.reshape(k, 3, -1)], axis=1)
        lo_t, hi_t = tt[:, :-1].ravel(), tt[:, 1:].ravel()
        glo, ghi = gg[:, :-1].ravel(), gg[:, 1:].ravel()
        dlo, dhi = dd[:, :-1].ravel(), dd[:, 1:].ravel()
        vlo = vv.reshape(4 * k, -1)

    parts = [np.concatenate(node_roots)]
    if brackets:
        blo = np.concatenate([x[0] for x in brackets])
        bhi = np.concatenate([x[1] for x in brackets])
        bg = np.concatenate([x[2] for x in brackets])
        parts.append(_bisect(sample, crv, blo, bhi, bg, xtol))
    roots = np.sort(np.concatenate(parts))
    roots = roots[(roots >= a) & (roots < b)]
    gaps = np.diff(roots)
    return ZeroCount(
        count=int(roots.size),
        roots=roots,
        certified=unresolved == 0,
        min_gap=float(gaps.min()) if gaps.size else math.inf,
        grid_resolution=(len(t) - 1) / (b - a),
        escalations=level,
        unresolved=unresolved,
    )


def scaling_invariance_check(sample: WaveSample, curve, c: float, **kwargs) -> bool:
    """Zero counts are unchanged when every coefficient is multiplied by c != 0."""
    if c == 0:
        raise ValueError("scale must be nonzero")
    base = count_zeros(sample, curve, **kwargs)
    scaled = count_zeros(sample.scaled(c), curve, **kwargs)
    return base.count == scaled.count


# bad set near lattice difference directions --------------------------------

def _line_angle_distance(theta, dirs):
    """Distance mod pi from each theta to the nearest entry of sorted ``dirs``."""
    n = dirs.size
    idx = np.searchsorted(dirs, theta)
    a = dirs[idx % n]
    b = dirs[(idx - 1) % n]
    da = np.abs(theta - a)
    db = np.abs(theta - b)
    da = np.minimum(da, np.pi - da)
    db = np.minimum(db, np.pi - db)
    return np.minimum(da, db)


def bad_components(curve, L: LatticeSet, kappa: float | None = None, chunk: int = 1 << 20):
    """Parameter intervals where the tangent is within angle ``kappa`` of a
    difference direction of ``L`` (default kappa = N^-3).

    Scans a grid of step kappa / (8 max(1, sup|gamma''|)) and refines every
    boundary by bisection.  Returns a sorted list of (lo, hi).
    """
    crv = as_curve(curve)
    if crv.d != 2:
        raise ValueError("the bad set is defined for planar curves only")
    if kappa is None:
        kappa = float(L.N) ** -3
    dirs = direction_set(L)
    if kappa <= 0 or dirs.size == 0:
        return []
    s0, s1 = crv.domain
    step = kappa / (8.0 * max(1.0, crv.accel_bound))
    n = int(math.ceil((s1 - s0) / step)) + 1

    def dist(t):
        v = crv.velocity(t)
        th = np.mod(np.arctan2(v[:, 1], v[:, 0]), np.pi)
        return _line_angle_distance(th, dirs)

    def edge(t_good, t_bad):
        g, bd = np.array([t_good]), np.array([t_bad])
        for _ in range(60):
            mid = 0.5 * (g + bd)
            inside = dist(mid) < kappa
            bd = np.where(inside, mid, bd)
            g = np.where(inside, g, mid)
        return float(0.5 * (g + bd)[0])

    t = np.linspace(s0, s1, n)
    bad = np.concatenate([dist(t[i : i + chunk]) < kappa for i in range(0, n, chunk)])
    flips = np.flatnonzero(np.diff(bad.astype(np.int8)))
    comps = []
    lo = s0 if bad[0] else None
    for i in flips:
        if bad[i + 1]:
            lo = edge(t[i], t[i + 1])
        else:
            comps.append((lo, edge(t[i + 1], t[i])))
            lo = None
    if lo is not None:
        comps.append((lo, s1))
    return comps


def restrict_to_good_set(curve, L: LatticeSet, intervals, kappa: float | None = None):
    """Remove the bad set from each (lo, hi) in ``intervals``."""
    intervals = [(float(lo), float(hi)) for lo, hi in intervals]
    if kappa is not None and kappa <= 0:
        return intervals
    bad = bad_components(curve, L, kappa)
    out = []
    for lo, hi in intervals:
        cur = lo
        for blo, bhi in bad:
            if bhi <= cur or blo >= hi:
                continue
            if blo > cur:
                out.append((cur, blo))
            cur = max(cur, bhi)
        if cur < hi:
            out.append((cur, hi))
    return out
