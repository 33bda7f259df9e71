"""Frequency sets {mu in Z^d : |mu|^2 = m} and their arithmetic statistics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import Degenerate, EmptyLattice, InvalidLevel, IOFailure


def _is_representative(p) -> bool:
    # first nonzero coordinate positive: one member of each {mu, -mu}
    for c in p:
        if c != 0:
            return c > 0
    return False


@dataclass(frozen=True, eq=False)
class LatticeSet:
    """Lattice points on the sphere of squared radius ``m`` in ``Z^d``.

    ``points`` is an ``(N, d)`` int64 array ordered so that
    ``points[N//2 + i] == -points[i]``; ``pairs`` lists ``(i, N//2 + i)``.
    """

    d: int
    m: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1, self.d)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return int(self.points.shape[0])

    @property
    def empty(self) -> bool:
        return self.N == 0

    @property
    def half(self) -> np.ndarray:
        """One representative per +/- pair (the free frequencies)."""
        return self.points[: self.N // 2]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        h = self.N // 2
        return [(i, h + i) for i in range(h)]

    @property
    def lam(self) -> float:
        """Eigenvalue root: lambda = 2 pi sqrt(m)."""
        return 2.0 * math.pi * math.sqrt(self.m)

    def __eq__(self, other):
        if not isinstance(other, LatticeSet):
            return NotImplemented
        return (self.d, self.m) == (other.d, other.m) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.d, self.m, self.points.tobytes()))

    @classmethod
    def from_points(cls, points, m: int | None = None) -> "LatticeSet":
        """Build a (possibly synthetic) set from integer points.

        Points must share the same squared norm and be closed under
        negation; they are reordered into the paired layout.
        """
        pts = np.asarray(points, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise EmptyLattice("need a nonempty (N, d) array of points")
        norms = (pts * pts).sum(axis=1)
        if m is None:
            m = int(norms[0])
        if np.any(norms != m):
            raise ValueError("all points must satisfy |mu|^2 = m")
        keys = {tuple(p) for p in pts.tolist()}
        if len(keys) != len(pts):
            raise ValueError("points must be distinct")
        reps = sorted(p for p in keys if _is_representative(p))
        if any(tuple(-c for c in p) not in keys for p in reps) or 2 * len(reps) != len(pts):
            raise ValueError("point set must be closed under negation")
        reps_arr = np.array(reps, dtype=np.int64).reshape(-1, pts.shape[1])
        return cls(pts.shape[1], int(m), np.vstack([reps_arr, -reps_arr]))

    def to_dict(self) -> dict:
        return {"d": self.d, "m": self.m, "N": self.N, "points": self.points.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeSet":
        pts = data["points"]
        if not pts:
            return cls(int(data["d"]), int(data["m"]), np.zeros((0, int(data["d"])), np.int64))
        out = cls.from_points(pts, int(data["m"]))
        if "N" in data and int(data["N"]) != out.N:
            raise ValueError("cached N does not match the point list")
        return out


def check_level(d: int, m: int) -> None:
    if d not in (2, 3):
        raise InvalidLevel(f"dimension must be 2 or 3, got {d}")
    if m < 1:
        raise InvalidLevel(f"level must be a positive integer, got {m}")
    if d == 3 and m % 8 in (0, 4, 7):
        raise InvalidLevel(f"m = {m} is excluded for d = 3 (m mod 8 in {{0, 4, 7}})")


def enumerate_lattice(d: int, m: int) -> LatticeSet:
    """All ``mu`` in ``Z^d`` with ``mu . mu == m``.

    Runs over the first ``d - 1`` coordinates and recovers the last one with
    an integer square root.  An empty result is returned (not raised);
    check :attr:`LatticeSet.empty`.
    """
    check_level(d, m)
    pts = []
    r = math.isqrt(m)
    if d == 2:
        for x in range(-r, r + 1):
            rest = m - x * x
            y = math.isqrt(rest)
            if y * y == rest:
                pts.append((x, y))
                if y:
                    pts.append((x, -y))
    else:
        for x in range(-r, r + 1):
            rx = m - x * x
            ry = math.isqrt(rx)
            for y in range(-ry, ry + 1):
                rest = rx - y * y
                z = math.isqrt(rest)
                if z * z == rest:
                    pts.append((x, y, z))
                    if z:
                        pts.append((x, y, -z))
    if not pts:
        return LatticeSet(d, m, np.zeros((0, d), dtype=np.int64))
    return LatticeSet.from_points(pts, m)


def angles(L: LatticeSet) -> np.ndarray:
    """Normalised angles theta in [0, 1) with mu = sqrt(m) e^{2 pi i theta} (d = 2)."""
    if L.d != 2:
        raise ValueError("angles are defined for d = 2 only")
    p = L.points.astype(float)
    th = np.arctan2(p[:, 1], p[:, 0]) / (2.0 * np.pi)
    return np.mod(th, 1.0)


def min_separation(L: LatticeSet) -> float:
    """Smallest Euclidean distance between two distinct points (all-pairs scan)."""
    if L.N < 2:
        raise Degenerate("min_separation needs at least two points")
    p = L.points.astype(float)
    diff = p[:, None, :] - p[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=-1))
    np.fill_diagonal(dist, np.inf)
    return float(dist.min())


def arc_concentration(L: LatticeSet, arc_length: float | None = None) -> int:
    """Largest number of points on one arc of the given length.

    Points are scaled by 2 pi so they sit on the circle of radius
    lambda = 2 pi sqrt(m); ``arc_length`` is measured on that circle and
    defaults to sqrt(lambda).
    """
    if L.d != 2:
        raise ValueError("arc_concentration is defined for d = 2 only")
    if L.N < 1:
        raise EmptyLattice("arc_concentration needs a nonempty set")
    lam = L.lam
    if arc_length is None:
        arc_length = math.sqrt(lam)
    width = arc_length / lam
    if width >= 2.0 * math.pi:
        return L.N
    th = np.sort(2.0 * math.pi * angles(L))
    ext = np.concatenate([th, th + 2.0 * math.pi])
    hi = np.searchsorted(ext, th + width * (1.0 + 1e-12), side="right")
    lo = np.arange(L.N)
    return int(min((hi - lo).max(), L.N))


def fourth_fourier(L: LatticeSet) -> float:
    """(1/N) sum_mu exp(8 pi i theta_mu), computed exactly.

    Uses (mu1 + i mu2)^4 = m^2 e^{8 pi i theta} in integer arithmetic; the
    imaginary part cancels by negation symmetry and is checked.
    """
    if L.d != 2:
        raise ValueError("fourth_fourier is defined for d = 2 only")
    if L.N == 0:
        raise EmptyLattice("fourth_fourier needs a nonempty set")
    re = im = 0
    for a, b in L.points.tolist():
        a2, b2 = a * a, b * b
        re += a2 * a2 - 6 * a2 * b2 + b2 * b2
        im += 4 * a * b * (a2 - b2)
    total = L.N * L.m * L.m
    if abs(im) / total >= 1e-12:
        raise AssertionError("imaginary part of the fourth Fourier coefficient does not vanish")
    return re / total


def gauss_circle_count(x: int) -> int:
    """Number of integer points p with |p|^2 <= x."""
    if x < 0:
        return 0
    r = math.isqrt(x)
    return sum(2 * math.isqrt(x - a * a) + 1 for a in range(-r, r + 1))


def direction_set(L: LatticeSet) -> np.ndarray:
    """Normalised differences (mu1 - mu2)/|mu1 - mu2| as line angles in [0, pi).

    Antipodal and repeated directions collapse to a single sorted entry.
    """
    if L.d != 2:
        raise ValueError("direction_set is defined for d = 2 only")
    p = L.points
    diff = (p[:, None, :] - p[None, :, :]).reshape(-1, 2)
    diff = diff[np.any(diff != 0, axis=1)]
    if diff.size == 0:
        return np.zeros(0)
    g = np.gcd(diff[:, 0], diff[:, 1])
    prim = diff // g[:, None]
    flip = (prim[:, 0] < 0) | ((prim[:, 0] == 0) & (prim[:, 1] < 0))
    prim[flip] *= -1
    prim = np.unique(prim, axis=0)
    return np.sort(np.mod(np.arctan2(prim[:, 1], prim[:, 0]), np.pi))


def save_lattice(L: LatticeSet, path) -> None:
    Path(path).write_text(json.dumps(L.to_dict()))


def load_lattice(path) -> LatticeSet:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise IOFailure(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    except OSError as exc:
        raise IOFailure(str(exc)) from exc
    return LatticeSet.from_dict(data)
