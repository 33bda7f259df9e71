"""Compare the numba and numpy wave kernels.

    python3 benchmarks/bench_kernels.py [--m 325] [--nodes 20000] [--repeat 20]

Also times a full Monte Carlo run with each backend (the backend is picked
at import, so that part runs in a subprocess).
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from torus_waves import _kernels as K
from torus_waves.geometry import make_circle_curve
from torus_waves.lattice import enumerate_lattice


def best_of(fn, repeat):
    fn()  # warm up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


RUN = """
import time
from torus_waves import _kernels
from torus_waves.harness import RunConfig, run_trials
cfg = RunConfig(d=2, m={m}, trials={trials}, seed=0)
run_trials(RunConfig(d=2, m={m}, trials=2, seed=0), workers=1)
t0 = time.perf_counter()
run_trials(cfg, workers=1)
print(_kernels.backend(), time.perf_counter() - t0)
"""


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--m", type=int, default=325)
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()

    L = enumerate_lattice(2, args.m)
    pos, vel, _, _ = make_circle_curve().jet(np.linspace(0, 1, args.nodes))
    mu = L.half.astype(float)
    rng = np.random.default_rng(0)
    c1, c2 = rng.standard_normal((2, mu.shape[0]))
    amp = np.hypot(c1, c2)

    print(f"m={args.m} N={L.N} nodes={args.nodes}")
    if not K._HAVE_NUMBA:
        print("numba not installed; only the numpy path is available")
    cases = [
        ("wave_values", lambda f: f(mu, c1, c2, pos), K.wave_values_np, getattr(K, "wave_values_nb", None)),
        ("wave_values_derivs", lambda f: f(mu, c1, c2, pos, vel), K.wave_values_derivs_np, getattr(K, "wave_values_derivs_nb", None)),
        ("second_deriv_bound", lambda f: f(mu, amp, vel, 1e-3, 1.0), K.second_deriv_bound_np, getattr(K, "second_deriv_bound_nb", None)),
    ]
    for name, call, f_np, f_nb in cases:
        t_np = best_of(lambda: call(f_np), args.repeat)
        line = f"{name:20s} numpy {t_np * 1e3:8.3f} ms"
        if K._HAVE_NUMBA:
            t_nb = best_of(lambda: call(f_nb), args.repeat)
            line += f"   numba {t_nb * 1e3:8.3f} ms   speedup {t_np / t_nb:5.2f}x"
        print(line)

    print(f"\nrun_trials, m={args.m}, {args.trials} trials, 1 worker")
    for flag in ("0", "1"):
        env = dict(os.environ, TORUS_WAVES_DISABLE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", RUN.format(m=args.m, trials=args.trials)],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        backend, secs = out.stdout.split()
        print(f"  {backend:6s} {float(secs):7.2f} s")


if __name__ == "__main__":
    main()
