"""Monte Carlo engine for nodal intersection counts.

Trial ``i`` draws its coefficients from ``trial_seed(master, i)``, so the
per-trial counts do not depend on how trials are scheduled across worker
threads.  Aggregation is a fold in trial-index order.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigMismatch, IOFailure, SchemaMismatch
from .geometry import CurveSampler, curve_from_dict, default_curve
from .kacrice import KacRicePrediction
from .lattice import enumerate_lattice
from .wave import CoefficientModel, batch_values, sample_coefficients, trial_seed
from .zeros import count_zeros

log = logging.getLogger(__name__)

SCHEMA = "torus_waves.manifest"
SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    d: int
    m: int
    curve: dict | None = None
    model: dict = field(default_factory=lambda: {"kind": "gaussian"})
    trials: int = 100
    seed: int = 0
    grid_factor: float = 32.0
    k_max: int = 4

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 1 <= self.k_max <= 4:
            raise ValueError("k_max must lie in 1..4")
        if self.curve is None:
            self.curve = default_curve(self.d).to_dict()
        self.model = CoefficientModel.from_dict(self.model).to_dict()

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "m": self.m,
            "curve": self.curve,
            "model": self.model,
            "trials": self.trials,
            "seed": self.seed,
            "grid_factor": self.grid_factor,
            "k_max": self.k_max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)


@dataclass
class MCReport:
    counts: list[int]
    certified: list[bool]
    mean: float
    variance: float
    raw_moments: list[float]
    raw_moment_se: list[float]
    central_moments: list[float]
    se_mean: float
    uncertified: int
    retried: int
    wall_time: float | None = None

    @property
    def trials(self) -> int:
        return len(self.counts)

    @classmethod
    def from_counts(cls, counts, certified, k_max: int = 4, retried: int = 0, wall_time=None) -> "MCReport":
        z = np.asarray(counts, dtype=float)
        n = z.size
        mean = float(z.mean())
        var = float(z.var(ddof=1)) if n > 1 else 0.0
        raw, raw_se = [], []
        for k in range(1, k_max + 1):
            zk = z**k
            raw.append(float(zk.mean()))
            raw_se.append(float(math.sqrt(zk.var(ddof=1) / n)) if n > 1 else 0.0)
        central = [float(((z - mean) ** k).mean()) for k in range(2, k_max + 1)]
        return cls(
            counts=[int(c) for c in counts],
            certified=[bool(c) for c in certified],
            mean=mean,
            variance=var,
            raw_moments=raw,
            raw_moment_se=raw_se,
            central_moments=central,
            se_mean=math.sqrt(var / n),
            uncertified=int(n - sum(bool(c) for c in certified)),
            retried=retried,
            wall_time=wall_time,
        )

    def moment(self, k: int) -> tuple[float, float]:
        """Sample mean of Z^k and its standard error, from the raw counts."""
        z = np.asarray(self.counts, dtype=float) ** k
        se = math.sqrt(z.var(ddof=1) / z.size) if z.size > 1 else 0.0
        return float(z.mean()), se

    def to_dict(self, timing: bool = False) -> dict:
        out = {
            "trials": self.trials,
            "counts": self.counts,
            "certified": self.certified,
            "mean": self.mean,
            "variance": self.variance,
            "se_mean": self.se_mean,
            "raw_moments": self.raw_moments,
            "raw_moment_se": self.raw_moment_se,
            "central_moments": self.central_moments,
            "uncertified": self.uncertified,
            "retried": self.retried,
        }
        if timing:
            out["wall_time"] = self.wall_time
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "MCReport":
        keys = (
            "counts certified mean variance raw_moments raw_moment_se central_moments "
            "se_mean uncertified retried"
        ).split()
        return cls(**{k: data[k] for k in keys}, wall_time=data.get("wall_time"))


def default_workers() -> int:
    cap = os.environ.get("TORUS_WAVES_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = min(n, max(1, int(cap)))
    return n


class _Experiment:
    """Immutable per-run inputs shared by all trials."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.lattice = enumerate_lattice(cfg.d, cfg.m)
        self.curve = curve_from_dict(cfg.curve)
        if self.curve.d != cfg.d:
            raise ConfigMismatch(f"curve dimension {self.curve.d} does not match d = {cfg.d}")
        self.model = CoefficientModel.from_dict(cfg.model)
        self.sampler = CurveSampler.for_level(self.curve, cfg.m, cfg.grid_factor)

    def trial(self, i: int):
        s = sample_coefficients(self.model, self.lattice, trial_seed(self.cfg.seed, i))
        zc = count_zeros(s, self.sampler, grid_factor=self.cfg.grid_factor)
        retried = False
        if not zc.certified:
            retried = True
            zc = count_zeros(s, self.curve, grid_factor=2 * self.cfg.grid_factor)
        return zc.count, zc.certified, retried


def run_trials(cfg: RunConfig, workers: int | None = None) -> MCReport:
    """Run ``cfg.trials`` independent trials and aggregate their counts."""
    exp = _Experiment(cfg)
    workers = default_workers() if workers is None else max(1, int(workers))
    t0 = time.perf_counter()
    idx = range(cfg.trials)
    if workers == 1:
        results = [exp.trial(i) for i in idx]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(exp.trial, idx, chunksize=max(1, cfg.trials // (8 * workers))))
    wall = time.perf_counter() - t0
    counts = [r[0] for r in results]
    cert = [r[1] for r in results]
    retried = sum(r[2] for r in results)
    rep = MCReport.from_counts(counts, cert, cfg.k_max, retried=retried, wall_time=wall)
    log.info("d=%d m=%d %s: %d trials in %.2fs, mean %.4f", cfg.d, cfg.m, cfg.model["kind"], cfg.trials, wall, rep.mean)
    return rep


def _same_setting(a: RunConfig, b: RunConfig) -> bool:
    return (a.d, a.m, a.curve) == (b.d, b.m, b.curve)


def universality_gap(a: MCReport, b: MCReport, k: int = 1, cfg_a: RunConfig | None = None, cfg_b: RunConfig | None = None):
    """|E_a Z^k - E_b Z^k| and the combined standard error sqrt(SE_a^2 + SE_b^2)."""
    if cfg_a is not None and cfg_b is not None and not _same_setting(cfg_a, cfg_b):
        raise ConfigMismatch("reports come from different (d, m, curve) settings")
    ma, sa = a.moment(k)
    mb, sb = b.moment(k)
    return abs(ma - mb), math.sqrt(sa * sa + sb * sb)


def variance_vs_prediction(report: MCReport, pred: KacRicePrediction, N: int, C: float = 10.0) -> dict:
    """Sample variance next to m/N and the literal variance integral."""
    scale = pred.m / N
    return {
        "sample_variance": report.variance,
        "m_over_N": scale,
        "ratio": report.variance / scale,
        "bound_C": C,
        "within_bound": bool(report.variance <= C * scale),
        "variance_integral": pred.variance_leading,
        "integral_ratio": None if pred.variance_leading is None else report.variance / pred.variance_leading,
    }


def conservation_check(cfg: RunConfig, t0: float = 0.3, trials: int = 100_000) -> dict:
    """Moments of F(t0) and F'(t0) over independent draws.

    Targets: E F^2 = 1 and Var F' = 4 pi^2 m / d.
    """
    L = enumerate_lattice(cfg.d, cfg.m)
    curve = curve_from_dict(cfg.curve)
    F, dF = batch_values(CoefficientModel.from_dict(cfg.model), L, curve, t0, trials, cfg.seed)
    f2 = F * F
    alpha = 4.0 * math.pi**2 * cfg.m / cfg.d
    var_d = float(dF.var(ddof=1))
    return {
        "t0": t0,
        "trials": trials,
        "mean_F2": float(f2.mean()),
        "se_F2": float(f2.std(ddof=1) / math.sqrt(trials)),
        "var_dF": var_d,
        "alpha": alpha,
        "rel_err_dF": abs(var_d - alpha) / alpha,
    }


# manifests -------------------------------------------------------------------

def manifest_dict(cfg: RunConfig, report: MCReport, timing: bool = False) -> dict:
    return {"schema": SCHEMA, "version": SCHEMA_VERSION, "config": cfg.to_dict(), "report": report.to_dict(timing)}


def dumps_manifest(cfg: RunConfig, report: MCReport, timing: bool = False) -> str:
    return json.dumps(manifest_dict(cfg, report, timing), sort_keys=True, indent=2)


def save_manifest(path, cfg: RunConfig, report: MCReport, timing: bool = False) -> None:
    """Write config + report as schema-versioned JSON.

    Wall time is omitted unless ``timing`` is set, so equal seeds give
    byte-identical files.
    """
    try:
        Path(path).write_text(dumps_manifest(cfg, report, timing) + "\n")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc


def load_manifest(path) -> tuple[RunConfig, MCReport]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IOFailure(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno} (char {exc.pos})") from exc
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise SchemaMismatch(f"{path}: not a {SCHEMA} file")
    if data.get("version") != SCHEMA_VERSION:
        raise SchemaMismatch(f"{path}: schema version {data.get('version')!r}, reader expects {SCHEMA_VERSION}")
    try:
        return RunConfig.from_dict(data["config"]), MCReport.from_dict(data["report"])
    except (KeyError, TypeError) as exc:
        raise IOFailure(f"{path}: missing or malformed field ({exc})") from exc


def write_counts_csv(path, report: MCReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial", "count", "certified"])
        for i, (c, ok) in enumerate(zip(report.counts, report.certified)):
            w.writerow([i, c, int(ok)])
