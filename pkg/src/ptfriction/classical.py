"""Stochastic Newton equation for an ensemble of classical trajectories.

Positions are in units of a and times in units of T. The scaled equation is::

    x'' = -(Omega T)^2 [x - t + (eta/2 pi) sin(2 pi x)]
          - (2 pi alpha Omega T / Lambda^2) cos^2(2 pi x) x' + xi(t)

with <xi(t) xi(t')> = D cos^2(2 pi x) delta(t - t') and
D = alpha (Omega T)^3 theta / (2 pi Lambda^4).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class EnsembleError(RuntimeError):
    pass


@dataclass
class ClassicalState:
    x_over_a: float
    v_scaled: float
    t_over_T: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x_over_a, self.v_scaled, self.t_over_T)):
            raise ValueError("classical state must be finite")


@dataclass
class EnsembleResult:
    t_over_T: np.ndarray
    mean_trajectory: np.ndarray
    force_series: np.ndarray
    per_run_max_force: np.ndarray
    per_run_slip_time: np.ndarray
    cfg: object
    seed_record: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def max_force(self):
        """Mean over runs of each run's own first-period maximum."""
        return float(np.mean(self.per_run_max_force))

    @property
    def slip_time(self):
        return float(np.mean(self.per_run_slip_time))


def damping_rate(cfg):
    return 2.0 * math.pi * cfg.alpha * cfg.omega_t / cfg.lambda_bar**2


def diffusion_constant(cfg):
    return cfg.alpha * cfg.omega_t**3 * cfg.theta / (2.0 * math.pi * cfg.lambda_bar**4)


def drift_acceleration(s, cfg):
    ph = 2.0 * math.pi * s.x_over_a
    c = math.cos(ph)
    spring = s.x_over_a - s.t_over_T + cfg.eta / (2.0 * math.pi) * math.sin(ph)
    return -cfg.omega_t**2 * spring - damping_rate(cfg) * c * c * s.v_scaled


def noise_sigma(s, cfg, dt_over_T):
    """Standard deviation of the random acceleration averaged over one step."""
    if not dt_over_T > 0:
        raise ValueError("dt_over_T must be positive")
    c = math.cos(2.0 * math.pi * s.x_over_a)
    return math.sqrt(diffusion_constant(cfg) * c * c / dt_over_T)


def step(s, cfg, rng, dt_over_T=None):
    """One semi-implicit Euler-Maruyama step with the noise at the pre-step position."""
    dt = 1.0 / cfg.n_steps_classical if dt_over_T is None else dt_over_T
    normal = rng.standard_normal() if hasattr(rng, "standard_normal") else float(rng)
    acc = drift_acceleration(s, cfg) + noise_sigma(s, cfg, dt) * normal
    v = s.v_scaled + acc * dt
    x = s.x_over_a + v * dt
    if not (math.isfinite(x) and math.isfinite(v)):
        raise EnsembleError(f"non-finite classical state at t/T={s.t_over_T + dt:.6f}")
    return ClassicalState(x, v, s.t_over_T + dt)


def initial_position(eta):
    """Quasi-static minimum at t = 0: the root of x + (eta/2 pi) sin(2 pi x) nearest 0.

    The origin is always a root, and the curvature 1 + eta cos(0) is positive,
    so it is a minimum for every eta.
    """
    if not eta > 0:
        raise ValueError("eta must be positive")
    return 0.0


def run_generators(seed, n_ran):
    """Independent Philox streams keyed by (seed, run index)."""
    return [np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, r])))
            for r in range(n_ran)]


def _integrate(cfg, seed, heun, backend):
    n = cfg.n_steps_classical
    total = n * cfg.n_periods
    stride = cfg.record_stride_classical
    x0 = initial_position(cfg.eta)
    return kernels.langevin_ensemble(
        x0, 0.0, cfg.omega_t, cfg.eta, damping_rate(cfg), diffusion_constant(cfg),
        n, total, stride, run_generators(seed, cfg.n_ran), heun=heun, backend=backend,
    ), x0


def run_ensemble(cfg, seed=None, compare_conventions=True, backend=None):
    """Run ``cfg.n_ran`` trajectories and reduce them run by run.

    The headline force is the mean over runs of each run's first-period
    maximum of (2 pi/eta)(t/T - x/a). The maximum of the ensemble-mean force
    and the shift under the other stochastic convention are diagnostics.
    """
    seed = cfg.seed if seed is None else seed
    if cfg.n_steps_classical % cfg.record_stride_classical:
        raise ValueError("record_stride_classical must divide n_steps_classical")
    heun = cfg.convention == "stratonovich"
    (x_rec, f_max, t_max, status), x0 = _integrate(cfg, seed, heun, backend)
    ok = status == kernels.STATUS_OK
    n_fail = int(np.count_nonzero(~ok))
    if n_fail > 0.01 * cfg.n_ran:
        raise EnsembleError(f"{n_fail} of {cfg.n_ran} runs aborted")
    x_ok = x_rec[ok]
    t = np.arange(x_rec.shape[1]) * cfg.record_stride_classical / cfg.n_steps_classical
    mean_x = x_ok.mean(axis=0)
    force = 2.0 * math.pi / cfg.eta * (t - mean_x)
    first = t <= 1.0 + 1e-12
    diagnostics = {
        "failed_runs": n_fail,
        "x0": x0,
        "max_of_mean_force": float(np.max(force[first])),
        "per_run_force_std": float(np.std(f_max[ok])),
        "convention": cfg.convention,
    }
    if compare_conventions and cfg.theta > 0 and cfg.alpha > 0:
        (_, f_alt, _, st_alt), _ = _integrate(cfg, seed, not heun, backend)
        alt = f_alt[st_alt == kernels.STATUS_OK]
        diagnostics["convention_delta"] = float(np.mean(alt) - np.mean(f_max[ok]))
    return EnsembleResult(
        t_over_T=t,
        mean_trajectory=mean_x,
        force_series=force,
        per_run_max_force=f_max[ok],
        per_run_slip_time=t_max[ok],
        cfg=cfg,
        seed_record={"seed": seed, "streams": "philox(seed, run)", "n_ran": cfg.n_ran},
        diagnostics=diagnostics,
    )
