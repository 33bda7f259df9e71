"""Arithmetic-structure measurements of lattice sets: interval covers of
projections, angular discrepancy, basis ratio checks, bad-set measure, and a
brute-force probe of GAP elements near the unit circle."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import EmptyLattice, VolumeCapExceeded
from .geometry import as_curve
from .lattice import (
    LatticeSet,
    angles,
    arc_concentration,
    check_level,
    direction_set,
    enumerate_lattice,
    fourth_fourier,
    min_separation,
)
from .zeros import bad_components

GAP_VOLUME_CAP = 10**7


def min_cover_count(values, length: float) -> int:
    """Fewest closed intervals of the given length covering ``values``.

    Greedy left-to-right sweep, which is optimal on the line.
    """
    if length <= 0:
        raise ValueError("interval length must be positive")
    x = np.sort(np.asarray(values, dtype=float).ravel())
    count = 0
    i = 0
    n = x.size
    while i < n:
        end = x[i] + length
        count += 1
        i = int(np.searchsorted(x, end, side="right"))
    return count


@dataclass
class EquiReport:
    N: int
    directions: int
    eps0: float
    threshold: float
    interval_length: float
    counts: list[int] = field(repr=False)
    min_count: int = 0
    median_count: float = 0.0
    spread: float = 0.0
    passes: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def check_assumption_equi(L: LatticeSet, directions: int = 360, eps0: float = 0.1) -> EquiReport:
    """Cover counts of {<r, mu>} by intervals of length 1/N for |r| = 1/(2 pi lambda).

    ``spread`` records the largest range of projected values; when it is
    below 1/N every count is 1.
    """
    if L.d != 2:
        raise ValueError("check_assumption_equi is defined for d = 2")
    if L.N == 0:
        raise EmptyLattice("need a nonempty set")
    th = 2.0 * np.pi * np.arange(directions) / directions
    r = np.stack([np.cos(th), np.sin(th)], axis=1) / (2.0 * np.pi * L.lam)
    proj = r @ L.points.T.astype(float)
    counts = [min_cover_count(row, 1.0 / L.N) for row in proj]
    thr = L.N**eps0
    return EquiReport(
        N=L.N,
        directions=directions,
        eps0=eps0,
        threshold=thr,
        interval_length=1.0 / L.N,
        counts=counts,
        min_count=int(min(counts)),
        median_count=float(np.median(counts)),
        spread=float((proj.max(axis=1) - proj.min(axis=1)).max()),
        passes=bool(min(counts) >= thr),
    )


def discrepancy(theta) -> float:
    """sup over closed arcs I of |#{theta in I} - N |I||, angles taken mod 1.

    Scans arcs whose endpoints are data angles, both closed (upper
    deviations) and open (lower deviations); this attains the supremum for
    a counting measure.  Equivalent to the sup over intervals
    [a1, a2] within [0, 1], because a wrapping arc has the same deviation as
    its complement.
    """
    a = np.mod(np.asarray(theta, dtype=float).ravel(), 1.0)
    N = a.size
    if N == 0:
        raise EmptyLattice("discrepancy needs at least one angle")
    u, w = np.unique(a, return_counts=True)
    U = u.size
    best = float(w.max())  # point arcs; also the full-circle open arcs
    cw = np.concatenate([[0], np.cumsum(np.concatenate([w, w]))])
    uu = np.concatenate([u, u + 1.0])
    for k in range(1, U):
        i = np.arange(U)
        j = i + k
        length = uu[j] - uu[i]
        closed = cw[j + 1] - cw[i]
        opened = closed - w[i] - w[j % U]
        best = max(best, float(np.max(closed - N * length)), float(np.max(N * length - opened)))
    return best


@dataclass
class Assumption21Ratios:
    deloc: float
    dgrow1: float
    dgrow2: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def assumption21_ratios(L: LatticeSet, curve, grid: int = 256, ring: int = 16) -> Assumption21Ratios:
    """Delocalisation and derivative-growth ratios for the scaled basis.

    The basis is g_mu(x) = cos(2 pi <mu, gamma(x/lambda)>) and h_mu (sine)
    over one representative per +/- pair, x in [0, lambda].  ``dgrow2``
    uses the analytic continuation of the curve and samples the boundary of
    the unit disc around each grid point (maximum modulus); it is ``None``
    for curves without a complex extension.
    """
    if grid < 64:
        raise ValueError("grid must be at least 64")
    crv = as_curve(curve)
    lam = L.lam
    t = np.linspace(*crv.domain, grid)
    mu = L.half.astype(float)
    p, v, a, _ = crv.jet(t)
    ph = 2.0 * np.pi * (p @ mu.T)
    g, h = np.cos(ph), np.sin(ph)
    denom = (g * g + h * h).sum(axis=1)
    deloc = float((np.maximum(np.abs(g), np.abs(h)).max(axis=1) / np.sqrt(denom)).max())

    dp = (2.0 * np.pi / lam) * (v @ mu.T)
    num1 = (dp * dp).sum(axis=1)
    dgrow1 = float((num1 / denom).max())

    dgrow2 = None
    if crv.family in ("circle", "helix", "product", "segment"):
        w = np.exp(2j * np.pi * np.arange(ring) / ring)
        z = (t[:, None] + w[None, :] / lam).ravel()
        pc, vc, ac, _ = crv.jet(z)
        phc = 2.0 * np.pi * (pc @ mu.T)
        d1 = (2.0 * np.pi / lam) * (vc @ mu.T)
        d2 = (2.0 * np.pi / lam**2) * (ac @ mu.T)
        g2 = -(d1 * d1) * np.cos(phc) - d2 * np.sin(phc)
        h2 = -(d1 * d1) * np.sin(phc) + d2 * np.cos(phc)
        sup = np.maximum(np.abs(g2), np.abs(h2)).reshape(grid, ring, -1).max(axis=(1, 2)) ** 2
        dgrow2 = float((sup / denom).max())
    return Assumption21Ratios(deloc=deloc, dgrow1=dgrow1, dgrow2=dgrow2)


@dataclass(frozen=True)
class GapSpec:
    """{g0 + sum a_i g_i : |a_i| <= N_i} in the complex plane."""

    generators: tuple  # (g0, g1, ..., gr)
    dims: tuple

    def __post_init__(self):
        gens = tuple(complex(g) for g in self.generators)
        dims = tuple(int(n) for n in self.dims)
        if len(gens) != len(dims) + 1:
            raise ValueError("need one more generator (g0) than dimension length")
        if len(dims) > 3:
            raise ValueError("rank must be at most 3")
        if any(n < 1 for n in dims):
            raise ValueError("dimension lengths must be positive")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dims", dims)

    @property
    def rank(self) -> int:
        return len(self.dims)

    @property
    def volume(self) -> int:
        return math.prod(2 * n + 1 for n in self.dims)

    def elements(self) -> np.ndarray:
        if self.volume > GAP_VOLUME_CAP:
            raise VolumeCapExceeded(f"volume {self.volume} exceeds the cap {GAP_VOLUME_CAP}")
        z = np.array([self.generators[0]], dtype=complex)
        for g, n in zip(self.generators[1:], self.dims):
            z = (z[:, None] + g * np.arange(-n, n + 1)[None, :]).ravel()
        return z


def _separated_size(z: np.ndarray, delta: float) -> int:
    """Largest greedy delta-separated subset over all starting points in arg order."""
    if z.size == 0:
        return 0
    z = z[np.argsort(np.angle(z), kind="stable")]
    best = 0
    starts = range(z.size) if z.size <= 512 else [0]
    for s in starts:
        order = np.roll(z, -s)
        kept = [order[0]]
        for q in order[1:]:
            if np.all(np.abs(np.asarray(kept) - q) >= delta):
                kept.append(q)
        best = max(best, len(kept))
    return best


def gap_circle_probe(Q: GapSpec, delta: float, eps: float) -> int:
    """Size of a delta-separated set of GAP elements within eps of |z| = 1."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    z = Q.elements()
    near = z[np.abs(np.abs(z) - 1.0) <= eps]
    return _separated_size(near, delta)


def bad_set_measure(curve, L: LatticeSet, kappa: float | None = None) -> float:
    """Measure of the parameters whose tangent lies within kappa (default N^-3)
    of a lattice difference direction."""
    return float(sum(hi - lo for lo, hi in bad_components(curve, L, kappa)))


@dataclass
class DiagnosticsReport:
    m: int
    d: int
    N: int
    min_sep: float | None = None
    B_arc: int | None = None
    tau4: float | None = None
    discrepancy: float | None = None
    cover_counts: list[int] | None = None
    delocalization_ratio: float | None = None
    derivative_growth_ratio: float | None = None
    derivative_growth_ratio2: float | None = None
    bad_set_measure: float | None = None
    direction_count: int | None = None
    gap_probe: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def diagnose(
    d: int,
    m: int,
    curve=None,
    full: bool = False,
    directions: int = 360,
    eps0: float = 0.1,
) -> DiagnosticsReport:
    """Lattice statistics for (d, m); ``full`` adds the curve-dependent checks."""
    L = enumerate_lattice(d, m)
    rep = DiagnosticsReport(m=m, d=d, N=L.N)
    if L.N == 0:
        return rep
    rep.min_sep = min_separation(L)
    if d == 2:
        rep.B_arc = arc_concentration(L)
        rep.tau4 = fourth_fourier(L)
        rep.discrepancy = discrepancy(angles(L))
        rep.direction_count = int(direction_set(L).size)
    if full and curve is not None:
        if d == 2:
            rep.cover_counts = check_assumption_equi(L, directions, eps0).counts
            rep.bad_set_measure = bad_set_measure(curve, L)
        ratios = assumption21_ratios(L, curve)
        rep.delocalization_ratio = ratios.deloc
        rep.derivative_growth_ratio = ratios.dgrow1
        rep.derivative_growth_ratio2 = ratios.dgrow2
    return rep


def scan(max_m: int, d: int = 2):
    """One row per representable m <= max_m: arithmetic statistics including
    the normalised separation min_sep * log(m)^{3/2} / sqrt(m)."""
    rows = []
    for m in range(1, max_m + 1):
        try:
            check_level(d, m)
        except ValueError:
            continue
        L = enumerate_lattice(d, m)
        if L.N < 2:
            continue
        sep = min_separation(L)
        row = {
            "m": m,
            "N": L.N,
            "min_sep": sep,
            "sep_normalized": sep * math.log(m) ** 1.5 / math.sqrt(m) if m > 1 else float("nan"),
        }
        if d == 2:
            row["B_arc"] = arc_concentration(L)
            row["tau4"] = fourth_fourier(L)
            delta = discrepancy(angles(L))
            row["discrepancy"] = delta
            row["discrepancy_rel"] = delta / L.N
        rows.append(row)
    return rows

