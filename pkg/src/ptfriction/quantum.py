"""Born-Markov density-matrix dynamics of the dragged particle.

Time is measured in 1/Omega inside the integrator and reported as t/T.
The coefficient equation in the co-moving basis reads::

    d rho/dt = -i [H_ren - v p, rho] - ([A, S rho] + h.c.)

where ``H_ren = H_S + 2 alpha (omega_c/Omega) A^2`` and ``v p`` accounts for
the basis translating with the trap. The particle starts at rest in the lab
in the ground state of ``H_ren(0)``.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from . import operators as ops
from .bath import BathModel, build_S, transition_rate
from .spectrum import ContractError, diagonalize

log = logging.getLogger(__name__)

TRACE_ABORT = 1e-4
# Redfield dynamics is not completely positive: at alpha = 0.01 eigenvalues
# of order -1e-3 appear after Landau-Zener passages. Abort only on gross
# violations; the tighter level is reported.
POSITIVITY_ABORT = -0.05
POSITIVITY_MONITOR = -1e-5

SAMPLE_FIELDS = ("t_over_T", "x_over_a", "force", "P0", "S_L", "purity", "trace_error")


class PropagationError(RuntimeError):
    """Integration left its health envelope; ``reason`` is a short tag."""

    def __init__(self, reason, message):
        super().__init__(message)
        self.reason = reason


@dataclass
class DensityMatrix:
    data: np.ndarray
    t_over_T: float = 0.0

    @property
    def purity(self):
        return float(np.real(np.vdot(self.data, self.data)))

    def trace(self):
        return complex(np.trace(self.data))


@dataclass
class QuantumTrajectory:
    samples: np.ndarray
    cfg: object
    diagnostics: dict = field(default_factory=dict)
    final_state: DensityMatrix = None

    def column(self, name):
        return self.samples[:, SAMPLE_FIELDS.index(name)]


class Dynamics:
    """Operators and generator for one configuration.

    Time-independent pieces are built once; per-time operators come from
    the phase tables.
    """

    def __init__(self, cfg, bath=None):
        self.cfg = cfg
        self.bath = bath if bath is not None else BathModel.from_config(cfg)
        n = cfg.n_max
        self.k_even, self.k_odd = ops.phase_tables(n, cfg.lambda_bar)
        self.scale = cfg.eta * cfg.lambda_bar**2
        self.diag = np.arange(n) + 0.5 + self.scale
        self.renorm = ops.renormalization_strength(cfg) if self.bath.alpha > 0 else 0.0
        self.frame = ops.build_frame_momentum(0.0, cfg).data
        self.displacement = ops.build_displacement(0.0, cfg).data

    def operators(self, t_over_T):
        """Return ``(A, H_ren)`` at ``t_over_T``."""
        ph = 2.0 * math.pi * t_over_T
        c, s = math.cos(ph), math.sin(ph)
        a = self.k_even * s + self.k_odd * c
        h = -self.scale * (self.k_even * c - self.k_odd * s)
        h[np.diag_indices_from(h)] += self.diag
        if self.renorm:
            h += self.renorm * (a @ a)
        return a, h

    def stage(self, t_over_T):
        """Everything the generator needs at one time: ``(H_gen, A, S, spectrum)``."""
        a, h = self.operators(t_over_T)
        spec = diagonalize(ops.OperatorMatrix(h, t_over_T, "H_ren"))
        s = build_S(spec, a, self.bath) if self.bath.alpha > 0 else None
        return h - self.frame, a, s, spec

    @staticmethod
    def apply(stage, rho):
        h, a, s, _ = stage
        hr = h @ rho
        out = -1j * (hr - hr.conj().T)
        if s is not None:
            sr = s @ rho
            d = a @ sr - sr @ a
            out -= d + d.conj().T
        return out


def initial_state(cfg, bath=None):
    """Pure projector onto the ground state of ``H_ren(0)``."""
    dyn = Dynamics(cfg, bath)
    _, h = dyn.operators(0.0)
    g = diagonalize(h).states[:, 0].astype(complex)
    return DensityMatrix(np.outer(g, g.conj()), 0.0)


def master_rhs(rho, t_over_T, cfg, bath=None, dynamics=None):
    dyn = dynamics if dynamics is not None else Dynamics(cfg, bath)
    data = rho.data if isinstance(rho, DensityMatrix) else rho
    return Dynamics.apply(dyn.stage(t_over_T), data)


def lateral_force(rho, t_over_T, cfg):
    """(2 pi/eta) Tr[(t/T - x/a) rho] in units of F0 = pi U0 / a."""
    data = rho.data if isinstance(rho, DensityMatrix) else rho
    disp = ops.build_displacement(t_over_T, cfg).data
    return 2.0 * math.pi / cfg.eta * float(np.real(np.trace(disp @ data)))


def linear_entropy(purity, n):
    return n / (n - 1.0) * (1.0 - purity)


def observables(rho, spec, cfg):
    data = rho.data if isinstance(rho, DensityMatrix) else rho
    g = spec.ground_state
    p0 = float(np.real(np.vdot(g, data @ g)))
    purity = float(np.real(np.vdot(data, data)))
    return {"P0": p0, "S_L": linear_entropy(purity, cfg.n_max), "purity": purity}


def propagate(rho0, cfg, bath=None, n_steps=None, record_stride=None,
              positivity_tol=POSITIVITY_ABORT, backend=None):
    """Fixed-step RK4 over ``cfg.n_periods`` drive periods.

    Operators and S are rebuilt at every stage time. The trace is reset to
    one after each step and the pre-reset deviation kept as a health metric.
    Raises :class:`PropagationError` when the trace drifts by more than
    1e-4 in a step or an eigenvalue of rho drops below ``positivity_tol``
    (``None`` disables that abort).
    """
    dyn = Dynamics(cfg, bath)
    b = dyn.bath
    n_steps = cfg.n_steps if n_steps is None else n_steps
    stride = cfg.record_stride if record_stride is None else record_stride
    total = n_steps * cfg.n_periods
    pos_tol = -np.inf if positivity_tol is None else positivity_tol
    args = (
        np.array(dyn.k_even, order="C"),
        np.array(dyn.k_odd, order="C"),
        np.array(dyn.diag, order="C"),
        dyn.scale,
        dyn.renorm,
        ops.drift_velocity_coupling(cfg),
        1.0 / (2.0 * math.sqrt(2.0) * math.pi * cfg.lambda_bar),
        2.0 * math.pi / cfg.eta,
        b.alpha,
        b.omega_c_ratio,
        b.theta,
        cfg.omega_t,
        n_steps,
        total,
        stride,
        np.asarray(rho0.data, dtype=complex),
        pos_tol,
    )
    if b.lamb_shift and b.alpha > 0:
        def rates(e):
            de = e[None, :] - e[:, None]
            return transition_rate(de, b, e_max=float(np.max(np.abs(de))))

        used = "python"
        out = kernels._kernels_py.quantum_rk4(*args, rates=rates)
    else:
        used = backend or kernels.BACKEND
        out = kernels.quantum_rk4(*args, backend=used)
    samples, rho, stats, status, status_step = out
    if status != kernels.STATUS_OK:
        reason = kernels.STATUS_NAMES[status]
        raise PropagationError(
            reason,
            f"propagation aborted ({reason}) at t/T={status_step / n_steps:.5f}; "
            f"max trace error {stats[0]:.3e}, min eigenvalue {stats[2]:.3e}",
        )
    diagnostics = {
        "max_trace_error": float(stats[0]),
        "max_hermiticity_error": float(stats[1]),
        "min_eigenvalue": float(stats[2]),
        "min_gauge_overlap": float(stats[3]),
        "ambiguous_assignments": int(stats[4]),
        "n_steps": n_steps,
        "backend": used,
    }
    if diagnostics["min_eigenvalue"] < POSITIVITY_MONITOR:
        log.debug("rho eigenvalue %.3e below %.0e", diagnostics["min_eigenvalue"], POSITIVITY_MONITOR)
    return QuantumTrajectory(samples, cfg, diagnostics, DensityMatrix(rho, total / n_steps))


def summarize_first_period(traj):
    t = traj.column("t_over_T")
    if t[-1] < 1.0 - 1e-12:
        raise ContractError("trajectory does not cover the first period")
    mask = (t >= 0.0) & (t <= 1.0 + 1e-12)
    return {
        "F_max": float(np.max(traj.column("force")[mask])),
        "P0_min": float(np.min(traj.column("P0")[mask])),
        "SL_max": float(np.max(traj.column("S_L")[mask])),
    }


def run_quantum(cfg, **kwargs):
    bath = BathModel.from_config(cfg)
    return propagate(initial_state(cfg, bath), cfg, bath, **kwargs)
