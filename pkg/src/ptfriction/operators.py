"""Operators of the driven particle in the co-moving oscillator basis.

The basis is ``phi_p(x - v t)``, the eigenfunctions of the harmonic trap
centred on the moving trap. Energies are in units of hbar*Omega, the drive
phase is ``2 pi t/T``. Every position-dependent operator follows from the
matrix of ``exp(2 pi i x / a)``::

    <p| exp(2 pi i x/a) |p'> = exp(i phase) * i**d * R[p, p']
    R[p, p'] = sqrt(m!/(m+d)!) y**(d/2) exp(-y/2) L_m^d(y),   y = lambda_bar**-2 / 2

with ``m = min(p, p')`` and ``d = |p - p'|``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .special import laguerre_table


@dataclass(frozen=True)
class OperatorMatrix:
    data: np.ndarray
    t_over_T: float
    label: str

    @property
    def basis_size(self):
        return self.data.shape[0]

    def hermiticity_error(self):
        return float(np.max(np.abs(self.data - self.data.conj().T)))


@lru_cache(maxsize=64)
def phase_tables(n_max, lambda_bar):
    """Time-independent parts ``(K_even, K_odd)`` of the displaced-phase matrix.

    ``cos(2 pi x/a) = K_even cos(phase) - K_odd sin(phase)`` and
    ``sin(2 pi x/a) = K_even sin(phase) + K_odd cos(phase)``.
    """
    y = 0.5 / lambda_bar**2
    lag = laguerre_table(n_max, y)
    p = np.arange(n_max)
    m = np.minimum.outer(p, p)
    d = np.abs(np.subtract.outer(p, p))
    # sqrt(m!/(m+d)!) and y**(d/2) in log space; L may change sign
    log_mag = 0.5 * (gammaln(m + 1) - gammaln(m + d + 1)) + 0.5 * d * math.log(y) - 0.5 * y
    r = np.exp(log_mag) * lag[m, d]
    # i**d: real part for even d, imaginary part for odd d
    sign = np.where((d // 2) % 2 == 0, 1.0, -1.0)
    k_even = np.where(d % 2 == 0, sign * r, 0.0)
    k_odd = np.where(d % 2 == 1, sign * r, 0.0)
    k_even.setflags(write=False)
    k_odd.setflags(write=False)
    return k_even, k_odd


def _phase(t_over_T):
    return 2.0 * math.pi * t_over_T


def cos_matrix(t_over_T, n_max, lambda_bar):
    k_even, k_odd = phase_tables(n_max, lambda_bar)
    ph = _phase(t_over_T)
    return k_even * math.cos(ph) - k_odd * math.sin(ph)


def sin_matrix(t_over_T, n_max, lambda_bar):
    k_even, k_odd = phase_tables(n_max, lambda_bar)
    ph = _phase(t_over_T)
    return k_even * math.sin(ph) + k_odd * math.cos(ph)


def build_V(t_over_T, cfg):
    """Substrate modulation matrix: ``sin^2(pi x/a) = (1 + V)/2``, i.e. V = -cos(2 pi x/a)."""
    return OperatorMatrix(-cos_matrix(t_over_T, cfg.n_max, cfg.lambda_bar), t_over_T, "V")


def build_HS(t_over_T, cfg):
    n = cfg.n_max
    scale = cfg.eta * cfg.lambda_bar**2
    h = scale * build_V(t_over_T, cfg).data
    h[np.diag_indices(n)] += np.arange(n) + 0.5 + scale
    return OperatorMatrix(h, t_over_T, "H_S")


def build_A(t_over_T, cfg):
    """Bath coupling operator ``sin(2 pi x / a)``."""
    return OperatorMatrix(sin_matrix(t_over_T, cfg.n_max, cfg.lambda_bar), t_over_T, "A")


def renormalization_strength(cfg):
    """Prefactor of A^2 in the renormalized Hamiltonian, in hbar*Omega."""
    return 2.0 * cfg.alpha * cfg.omega_c_ratio


def build_renormalized_H(t_over_T, cfg, A=None):
    h = build_HS(t_over_T, cfg).data
    if cfg.alpha > 0:
        a = build_A(t_over_T, cfg).data if A is None else A.data
        h = h + renormalization_strength(cfg) * (a @ a)
    return OperatorMatrix(h, t_over_T, "H_ren")


@lru_cache(maxsize=64)
def _ladder(n_max):
    """Annihilation operator in the truncated Fock basis."""
    lower = np.diag(np.sqrt(np.arange(1, n_max)), 1)
    lower.setflags(write=False)
    return lower


def build_displacement(t_over_T, cfg):
    """Matrix of ``t/T - x/a``; the moving basis makes it time independent."""
    lower = _ladder(cfg.n_max)
    xi = (lower + lower.T) / (2.0 * math.sqrt(2.0) * math.pi * cfg.lambda_bar)
    return OperatorMatrix(-xi, t_over_T, "displacement")


def drift_velocity_coupling(cfg):
    """``v p / (hbar Omega)`` prefactor: sqrt(2) pi lambda_bar / (Omega T)."""
    return math.sqrt(2.0) * math.pi * cfg.lambda_bar / cfg.omega_t


def build_frame_momentum(t_over_T, cfg):
    """``v p`` in the moving basis, ``i kappa (a^dagger - a)``.

    The basis functions translate with the trap, so the coefficient equation
    of motion carries ``H - v p`` instead of ``H``.
    """
    lower = _ladder(cfg.n_max)
    vp = 1j * drift_velocity_coupling(cfg) * (lower.T - lower)
    return OperatorMatrix(vp, t_over_T, "v*p")
