"""Time the compiled and numpy backends on the two hot loops.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from ptfriction import kernels
from ptfriction.classical import damping_rate, diffusion_constant, run_generators
from ptfriction.params import DimensionlessConfig
from ptfriction.quantum import run_quantum


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def bench_quantum(backend, repeat, n_steps=2000):
    cfg = DimensionlessConfig(eta=2.5, lambda_bar=1.0, n_steps=n_steps)
    return best_of(lambda: run_quantum(cfg, backend=backend, record_stride=n_steps), repeat) / n_steps


def bench_langevin(backend, repeat, runs=20, n_steps=20000):
    cfg = DimensionlessConfig(eta=2.5, lambda_bar=1.0, theta=0.1)
    args = (0.0, 0.0, cfg.omega_t, cfg.eta, damping_rate(cfg), diffusion_constant(cfg),
            n_steps, n_steps, 100)

    def go():
        kernels.langevin_ensemble(*args, run_generators(0, runs), backend=backend)

    return best_of(go, repeat) / (runs * n_steps)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    backends = kernels.available_backends()
    rows = []
    for name, fn, unit in (("quantum RK4 step (n_max=25)", bench_quantum, "ms"),
                           ("Langevin step", bench_langevin, "us")):
        scale = 1e3 if unit == "ms" else 1e6
        t = {b: fn(b, args.repeat) * scale for b in backends}
        rows.append((name, unit, t))
    for name, unit, t in rows:
        parts = "  ".join(f"{b}: {v:9.3f} {unit}" for b, v in t.items())
        speedup = t["python"] / t["compiled"] if "compiled" in t else np.nan
        print(f"{name:30s} {parts}  speedup x{speedup:.1f}")


if __name__ == "__main__":
    main()
