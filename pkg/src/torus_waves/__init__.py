"""Random Laplace eigenfunctions on flat tori and their nodal intersections with curves."""

__version__ = "0.1.0"

from .lattice import LatticeSet, enumerate_lattice
from .geometry import CurveSpec, CurveSampler, make_circle_curve, make_helix_curve
from .wave import CoefficientModel, WaveSample, sample_coefficients, evaluate_F, evaluate_F_prime
from .zeros import ZeroCount, count_zeros
from .kacrice import predict_mean, first_intensity
from .harness import RunConfig, MCReport, run_trials

__all__ = [
    "LatticeSet",
    "enumerate_lattice",
    "CurveSpec",
    "CurveSampler",
    "make_circle_curve",
    "make_helix_curve",
    "CoefficientModel",
    "WaveSample",
    "sample_coefficients",
    "evaluate_F",
    "evaluate_F_prime",
    "ZeroCount",
    "count_zeros",
    "predict_mean",
    "first_intensity",
    "RunConfig",
    "MCReport",
    "run_trials",
]
