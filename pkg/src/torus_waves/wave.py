"""Coefficient distributions, conjugate-symmetric sampling, and evaluation of
F(t) = sqrt(2/N) sum_{free pairs} [e1 cos(2 pi <mu, gamma(t)>) + e2 sin(...)].

Only one representative of each +/- pair is drawn; the sqrt(2/N) factor
gives Var F(t) = 1 when both components have unit variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EmptyLattice, InvalidSample
from .geometry import as_curve
from .lattice import LatticeSet

KINDS = ("gaussian", "bernoulli", "uniform", "mixed")

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class CoefficientModel:
    """Mean-zero, unit-variance law for the real coefficient components.

    ``mixed`` draws +/-1 with total probability ``p_atom`` and otherwise a
    uniform variable on [-sqrt 3, sqrt 3]; both parts have variance 1.
    """

    kind: str = "gaussian"
    p_atom: float = 0.9

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown coefficient model {self.kind!r}; choose from {KINDS}")
        if not 0.0 <= self.p_atom <= 1.0:
            raise ValueError("p_atom must lie in [0, 1]")

    @property
    def K(self) -> float:
        """Density bound (continuous kinds) or 1/K floor on |eps| (bernoulli)."""
        if self.kind == "gaussian":
            return 1.0 / math.sqrt(2.0 * math.pi)
        if self.kind == "uniform":
            return 1.0 / (2.0 * SQRT3)
        if self.kind == "bernoulli":
            return 2.0
        return (1.0 - self.p_atom) / (2.0 * SQRT3)

    @property
    def continuous(self) -> bool:
        return self.kind in ("gaussian", "uniform")

    def draw(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        if self.kind == "bernoulli":
            return rng.choice(np.array([-1.0, 1.0]), size=size)
        if self.kind == "uniform":
            return rng.uniform(-SQRT3, SQRT3, size=size)
        atom = rng.random(size) < self.p_atom
        signs = rng.choice(np.array([-1.0, 1.0]), size=size)
        cont = rng.uniform(-SQRT3, SQRT3, size=size)
        return np.where(atom, signs, cont)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "params": {}, "K": self.K}
        if self.kind == "mixed":
            out["params"]["p_atom"] = self.p_atom
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CoefficientModel":
        return cls(data["kind"], **data.get("params", {}))


@dataclass(frozen=True, eq=False)
class WaveSample:
    """One drawn coefficient vector over the free pairs of ``lattice``."""

    lattice: LatticeSet
    c1: np.ndarray = field(repr=False)
    c2: np.ndarray = field(repr=False)
    seed: int | None = None
    model: str = "custom"

    def __post_init__(self):
        h = self.lattice.N // 2
        c1 = np.array(self.c1, dtype=float).reshape(-1)
        c2 = np.array(self.c2, dtype=float).reshape(-1)
        if c1.shape != (h,) or c2.shape != (h,):
            raise InvalidSample(f"coefficient arrays must have length N/2 = {h}")
        if not (np.all(np.isfinite(c1)) and np.all(np.isfinite(c2))):
            raise InvalidSample("coefficients must be finite")
        c1.setflags(write=False)
        c2.setflags(write=False)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)

    def __eq__(self, other):
        return (
            isinstance(other, WaveSample)
            and self.lattice == other.lattice
            and np.array_equal(self.c1, other.c1)
            and np.array_equal(self.c2, other.c2)
        )

    @property
    def norm(self) -> float:
        return math.sqrt(2.0 / self.lattice.N)

    @property
    def mu(self) -> np.ndarray:
        return self.lattice.half.astype(float)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.hypot(self.c1, self.c2)

    def scaled(self, c: float) -> "WaveSample":
        return WaveSample(self.lattice, c * self.c1, c * self.c2, self.seed, self.model)

    def combine(self, other: "WaveSample", a: float, b: float) -> "WaveSample":
        return WaveSample(self.lattice, a * self.c1 + b * other.c1, a * self.c2 + b * other.c2)

    # evaluation on explicit curve jets -----------------------------------
    def values_at(self, pos) -> np.ndarray:
        return self.norm * _kernels.wave_values(self.mu, self.c1, self.c2, np.atleast_2d(pos))

    def values_derivs_at(self, pos, vel):
        g, dg = _kernels.wave_values_derivs(self.mu, self.c1, self.c2, np.atleast_2d(pos), np.atleast_2d(vel))
        return self.norm * g, self.norm * dg


def trial_seed(master: int, index: int) -> int:
    """Order-independent per-trial seed derived from (master, index)."""
    ss = np.random.SeedSequence([int(master) & (2**64 - 1), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def sample_coefficients(model: CoefficientModel, L: LatticeSet, seed: int) -> WaveSample:
    """Draw (eps1, eps2) for each free pair; deterministic in (model, L, seed)."""
    if L.N < 2 or L.N % 2:
        raise EmptyLattice(f"need an even lattice with N >= 2, got N = {L.N}")
    rng = np.random.default_rng(seed)
    h = L.N // 2
    draws = model.draw(rng, 2 * h)
    return WaveSample(L, draws[:h], draws[h:], seed=seed, model=model.kind)


def evaluate_F(sample: WaveSample, curve, t):
    """F(gamma(t)); scalar in, scalar out."""
    pos = as_curve(curve).position(np.atleast_1d(np.asarray(t, dtype=float)))
    out = sample.values_at(pos)
    return float(out[0]) if np.ndim(t) == 0 else out


def evaluate_F_prime(sample: WaveSample, curve, t):
    """d/dt F(gamma(t)), the exact derivative along the curve."""
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    p, v, _, _ = as_curve(curve).jet(tt)
    out = sample.values_derivs_at(p, v)[1]
    return float(out[0]) if np.ndim(t) == 0 else out


def batch_values(model: CoefficientModel, L: LatticeSet, curve, t0: float, trials: int, seed: int):
    """F(t0) and F'(t0) over many independent draws at once.

    Returns two arrays of length ``trials``.  Uses a single generator
    seeded by ``seed``; intended for moment checks rather than per-trial
    reproducibility.
    """
    p, v, _, _ = as_curve(curve).jet(np.array([float(t0)]))
    mu = L.half.astype(float)
    ph = 2.0 * np.pi * (mu @ p[0])
    dp = 2.0 * np.pi * (mu @ v[0])
    rng = np.random.default_rng(seed)
    h = L.N // 2
    c = model.draw(rng, (trials, 2 * h))
    c1, c2 = c[:, :h], c[:, h:]
    s = math.sqrt(2.0 / L.N)
    F = s * (c1 @ np.cos(ph) + c2 @ np.sin(ph))
    dF = s * ((c2 * np.cos(ph) - c1 * np.sin(ph)) @ dp)
    return F, dF


@dataclass
class Condition2Report:
    kind: str
    draws: int
    c1: float
    c2: float
    prob: float
    prob_ci: tuple[float, float]
    mean: float
    mean_z: float
    variance: float
    density_max: float | None
    density_bound: float | None
    min_abs: float

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["prob_ci"] = list(self.prob_ci)
        return d


def validate_condition2(
    model: CoefficientModel,
    draws: int = 100_000,
    c1: float = 0.5,
    c2: float = 3.0,
    seed: int = 0,
    bins: int = 60,
) -> Condition2Report:
    """Empirical checks of the coefficient law.

    Estimates P(c1 <= |eps - eps'| <= c2) with a 95% Wilson interval, the
    sample mean (with its z-score) and variance, and for continuous kinds
    the largest histogram density next to the declared bound.
    """
    if draws < 10_000:
        raise ValueError("validate_condition2 needs at least 10^4 draws")
    rng = np.random.default_rng(seed)
    x = model.draw(rng, draws)
    y = model.draw(rng, draws)
    diff = np.abs(x - y)
    hits = int(np.count_nonzero((diff >= c1) & (diff <= c2)))
    p = hits / draws
    z = 1.959963984540054
    den = 1 + z * z / draws
    centre = (p + z * z / (2 * draws)) / den
    half = z * math.sqrt(p * (1 - p) / draws + z * z / (4 * draws * draws)) / den
    mean = float(x.mean())
    var = float(x.var(ddof=1))
    dens = bound = None
    if model.continuous:
        hist, _ = np.histogram(x, bins=bins, density=True)
        dens = float(hist.max())
        bound = model.K
    return Condition2Report(
        kind=model.kind,
        draws=draws,
        c1=c1,
        c2=c2,
        prob=p,
        prob_ci=(max(0.0, centre - half), min(1.0, centre + half)),
        mean=mean,
        mean_z=mean / math.sqrt(var / draws),
        variance=var,
        density_max=dens,
        density_bound=bound,
        min_abs=float(np.abs(x).min()),
    )
