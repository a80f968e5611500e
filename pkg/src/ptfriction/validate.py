"""Fast built-in invariant checks, run by ``ptfriction validate``."""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from . import operators as ops
from .asymptotics import lz_threshold, two_level_bound, two_level_force
from .bath import BathModel, rate_real
from .classical import run_ensemble
from .params import DimensionlessConfig
from .quantum import run_quantum
from .special import solve_u_eta


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def hermite_functions(n, s):
    """Normalized oscillator eigenfunctions times exp(s^2/2), by recurrence."""
    h = np.empty((n, s.size))
    h[0] = math.pi**-0.25
    if n > 1:
        h[1] = math.sqrt(2.0) * s * h[0]
    for k in range(1, n - 1):
        h[k + 1] = math.sqrt(2.0 / (k + 1)) * s * h[k] - math.sqrt(k / (k + 1)) * h[k - 1]
    return h


def quadrature_phase_matrices(t_over_T, n_max, lambda_bar, nodes=200):
    """cos and sin of 2 pi x/a in the trap basis by Gauss-Hermite quadrature."""
    s, w = np.polynomial.hermite.hermgauss(nodes)
    h = hermite_functions(n_max, s)
    ph = 2.0 * math.pi * t_over_T + s / lambda_bar
    return (h * w * np.cos(ph)) @ h.T, (h * w * np.sin(ph)) @ h.T


def check_matrix_elements(n_max=25):
    err = 0.0
    for lb in (0.2, 1.0, 5.0):
        for t in (0.0, 0.25, 0.5):
            c, s = quadrature_phase_matrices(t, n_max, lb)
            err = max(err, np.abs(c - ops.cos_matrix(t, n_max, lb)).max(),
                      np.abs(s - ops.sin_matrix(t, n_max, lb)).max())
    return Check("matrix elements vs quadrature", err < 1e-8, f"max error {err:.2e}")


def check_detailed_balance():
    worst = 0.0
    for theta in (0.1, 1.0):
        b = BathModel(0.01, 10.0, theta)
        for e in (0.1, 1.0, 5.0):
            ratio = rate_real(e, b) / rate_real(-e, b)
            worst = max(worst, abs(ratio / math.exp(e / theta) - 1.0))
    return Check("detailed balance", worst < 1e-10, f"max relative error {worst:.2e}")


def check_thresholds():
    u = solve_u_eta(6.4)
    lc = lz_threshold(6.4)
    ok = abs(u - 2.705) < 1e-3 and abs(lc - 0.342) < 0.01
    return Check("double-well root and LZ threshold", ok, f"u_eta(6.4)={u:.6f}, threshold={lc:.4f}")


def check_two_level_bound():
    t = np.linspace(0.0, 1.0, 20001)
    f = two_level_force(t, 0.1, 1.0, 100.0).max()
    bound = two_level_bound(0.1, 1.0, 100.0)
    return Check("two-level force bound", f <= bound + 1e-9, f"max {f:.5f} <= {bound:.5f}")


def check_unitary_purity():
    cfg = DimensionlessConfig(eta=0.1, lambda_bar=1.0, alpha=0.0, n_max=12, n_steps=4000)
    tr = run_quantum(cfg, record_stride=100)
    dev = float(np.max(np.abs(tr.column("purity") - 1.0)))
    return Check("unitary purity", dev < 1e-6, f"max |purity - 1| {dev:.2e}")


def check_noise_free_ensemble():
    cfg = DimensionlessConfig(eta=2.5, lambda_bar=1.0, theta=0.0, n_ran=3,
                              n_steps_classical=20000)
    ens = run_ensemble(cfg, compare_conventions=False)
    spread = float(np.ptp(ens.per_run_max_force))
    return Check("noise-free ensemble identical runs", spread == 0.0, f"spread {spread:.1e}")


def check_backends():
    if "compiled" not in kernels.available_backends():
        return Check("backend agreement", True, "compiled kernels not built; skipped")
    cfg = DimensionlessConfig(eta=2.5, lambda_bar=1.0, n_max=10, n_steps=1000)
    a = run_quantum(cfg, backend="python").samples
    b = run_quantum(cfg, backend="compiled").samples
    diff = float(np.max(np.abs(a - b)))
    return Check("backend agreement", diff < 1e-9, f"max sample difference {diff:.1e}")


CHECKS = (
    check_matrix_elements,
    check_detailed_balance,
    check_thresholds,
    check_two_level_bound,
    check_unitary_purity,
    check_noise_free_ensemble,
    check_backends,
)


def run_all():
    return [check() for check in CHECKS]
