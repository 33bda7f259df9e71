"""Independent oracles shared by the test modules.

Nothing here imports the package's numerical kernels: the oracles use plain
numpy formulas so agreement is a real cross-check.
"""

import itertools
import math
from collections import defaultdict

import numpy as np
import pytest

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


# lattice ----------------------------------------------------------------------

def box_scan(d: int, max_m: int) -> dict[int, set]:
    """All integer points with |p|^2 <= max_m, bucketed by squared norm."""
    r = math.isqrt(max_m)
    ax = np.arange(-r, r + 1)
    grids = np.meshgrid(*([ax] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    norms = (pts * pts).sum(axis=1)
    keep = (norms >= 1) & (norms <= max_m)
    out = defaultdict(set)
    for p, n in zip(pts[keep].tolist(), norms[keep].tolist()):
        out[n].add(tuple(p))
    return out


# covers -----------------------------------------------------------------------

def brute_min_cover(values, length: float) -> int:
    """Smallest k such that some k intervals [x_i, x_i + length] cover all values.

    Left endpoints may be taken at data points without loss of generality.
    """
    x = sorted(set(float(v) for v in values))
    if not x:
        return 0
    for k in range(1, len(x) + 1):
        for starts in itertools.combinations(x, k):
            if all(any(s <= v <= s + length for s in starts) for v in x):
                return k
    raise AssertionError("unreachable")


# curves and waves -------------------------------------------------------------

def curve_position(spec: dict, t):
    """Closed-form positions for the circle and helix families."""
    t = np.asarray(t, dtype=float)
    p = spec["params"]
    if spec["family"] == "circle":
        r = p["radius"]
        return np.stack([r * np.cos(t / r), r * np.sin(t / r)], axis=-1)
    if spec["family"] == "helix":
        a, al, b = p["a"], p["alpha"], p["b"]
        return np.stack([a * np.cos(al * t), a * np.sin(al * t), b * t], axis=-1)
    raise ValueError(spec["family"])


def complex_wave(points, c1, c2):
    """F = N^-1/2 sum over all mu of eps_mu e(<mu, x>) with eps_{-mu} = conj eps_mu.

    The free coefficient pair (c1, c2) of representative mu maps to
    eps_mu = (c1 - i c2) / sqrt 2.
    """
    pts = np.asarray(points, dtype=float)
    N = len(pts)
    eps = (np.asarray(c1) - 1j * np.asarray(c2)) / math.sqrt(2.0)
    eps_full = np.concatenate([eps, np.conj(eps)])

    def F(x):
        ph = np.exp(2j * np.pi * (np.atleast_2d(x) @ pts.T))
        val = ph @ eps_full / math.sqrt(N)
        return val.real

    return F


def dense_grid_zero_count(F, pos_fn, a: float, b: float, nodes: int = 1 << 14, xtol: float = 1e-13) -> tuple[int, np.ndarray]:
    """Zeros of F(pos(t)) on [a, b) by sign changes on a uniform grid plus bisection."""
    t = np.linspace(a, b, nodes + 1)
    g = F(pos_fn(t))
    roots = list(t[:-1][g[:-1] == 0])
    idx = np.flatnonzero(g[:-1] * g[1:] < 0)
    lo, hi = t[idx], t[idx + 1]
    glo = g[idx]
    while lo.size and np.max(hi - lo) > xtol:
        mid = 0.5 * (lo + hi)
        gm = F(pos_fn(mid))
        same = np.sign(gm) == np.sign(glo)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    roots.extend(0.5 * (lo + hi))
    return len(roots), np.sort(np.array(roots))


def central_diff(f, t, h=1e-5):
    """Central difference with one Richardson step."""
    d1 = (f(t + h) - f(t - h)) / (2 * h)
    d2 = (f(t + h / 2) - f(t - h / 2)) / h
    return (4 * d2 - d1) / 3


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
