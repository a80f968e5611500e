"""Ohmic bath: spectral density, transition rates and the convoluted operator S.

Working units are hbar = Omega = 1, so energies and frequencies coincide.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate

from .operators import OperatorMatrix

# exp(-700) is already far below double resolution next to 1
OCCUPATION_CUTOFF = 700.0


@dataclass(frozen=True)
class BathModel:
    alpha: float
    omega_c_ratio: float
    theta: float
    lamb_shift: bool = False

    def __post_init__(self):
        if self.alpha < 0 or self.theta < 0 or not self.omega_c_ratio > 0:
            raise ValueError("need alpha >= 0, theta >= 0, omega_c_ratio > 0")

    @classmethod
    def from_config(cls, cfg):
        return cls(cfg.alpha, cfg.omega_c_ratio, cfg.theta, cfg.lamb_shift)


def spectral_density(w, b):
    w = np.asarray(w, dtype=float)
    out = 2.0 * b.alpha * w * np.exp(-np.abs(w) / b.omega_c_ratio)
    return out if out.ndim else float(out)


def bose_einstein(w, theta):
    """Occupation of a bath mode of frequency w > 0 (0 when theta = 0)."""
    w = np.asarray(w, dtype=float)
    if theta == 0:
        out = np.zeros_like(w)
    else:
        z = w / theta
        out = np.where(z > OCCUPATION_CUTOFF, 0.0, 1.0 / np.expm1(np.minimum(z, OCCUPATION_CUTOFF)))
    return out if out.ndim else float(out)


def rate_real(E, b):
    """Re Gamma(E) = pi f_BE(-E) J(-E), vectorized over E.

    E > 0 hands energy to the bath, E < 0 draws it from the bath. The
    thermal part is written as theta * z / expm1(z) so it stays finite as
    E -> 0.
    """
    E = np.asarray(E, dtype=float)
    mag = np.abs(E)
    envelope = 2.0 * b.alpha * np.exp(-mag / b.omega_c_ratio)
    if b.theta > 0:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            z = mag / b.theta
            thermal = np.where(
                z > OCCUPATION_CUTOFF, 0.0,
                b.theta * np.where(z > 0, z / np.expm1(np.minimum(z, OCCUPATION_CUTOFF)), 1.0),
            )
    else:
        thermal = np.zeros_like(mag)
    out = math.pi * envelope * (thermal + np.where(E > 0, mag, 0.0))
    return out if out.ndim else float(out)


def _weighted_density(w, b):
    """f_BE(w) J(w) for any real w, finite at w = 0."""
    if w == 0:
        return 2.0 * b.alpha * b.theta
    if b.theta == 0:
        return spectral_density(w, b) if w < 0 else 0.0
    z = w / b.theta
    if z > OCCUPATION_CUTOFF:
        return 0.0
    if z < -OCCUPATION_CUTOFF:
        return spectral_density(w, b) * -1.0
    return spectral_density(w, b) / math.expm1(z)


def lamb_shift_rate(E, b):
    """Im Gamma(E) = P int f_BE(w) J(w) / (w + E) dw by Cauchy quadrature."""
    span = 60.0 * b.omega_c_ratio + abs(E)
    val, _ = integrate.quad(
        lambda w: _weighted_density(w, b), -span, span, weight="cauchy", wvar=-E, limit=400
    )
    return val


@lru_cache(maxsize=16)
def _lamb_shift_table(b, e_max):
    grid = np.linspace(-e_max, e_max, 801)
    vals = np.array([lamb_shift_rate(e, b) for e in grid])
    return interpolate.CubicSpline(grid, vals)


def transition_rate(E, b, e_max=None):
    """Complex Gamma(E); the imaginary part only when ``b.lamb_shift`` is set."""
    re = rate_real(E, b)
    if not b.lamb_shift or b.alpha == 0:
        return re
    E = np.asarray(E, dtype=float)
    bound = e_max if e_max is not None else max(1.0, float(np.max(np.abs(E))))
    bound = float(2.0 ** math.ceil(math.log2(bound)))
    im = _lamb_shift_table(b, bound)(E)
    return re + 1j * im


def build_S(spec, A, b):
    """Bath-convoluted operator in the moving basis.

    In the eigenbasis ``S[p, q] = A[p, q] Gamma(E_q - E_p)``.
    """
    a = A.data if isinstance(A, OperatorMatrix) else np.asarray(A)
    u = spec.states
    if a.shape != (u.shape[0], u.shape[0]):
        raise ValueError("operator and spectrum basis sizes differ")
    if b.alpha == 0:
        return np.zeros_like(a)
    a_eig = u.conj().T @ a @ u
    de = spec.energies[None, :] - spec.energies[:, None]
    rates = transition_rate(de, b, e_max=float(np.max(np.abs(de))))
    return u @ (a_eig * rates) @ u.conj().T
