"""Closed-form limits used as oracles for the numerical engines.

Energies are in units of hbar*Omega, times in units of T and positions in
units of a unless stated otherwise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import operators as ops
from .special import NoInteriorRootError, solve_u_eta

SINGLE_WELL = "single-well"
STICK_SLIP = "stick-slip"
DEEP_CORRUGATION = "deep-corrugation"
BOUNDARIES = (1.0, 1.5 * math.pi)


class NoSlipError(ValueError):
    pass


@dataclass(frozen=True)
class RegimeClassification:
    eta: float
    regime: str
    boundaries: tuple = BOUNDARIES


def classify(eta):
    """Left-closed intervals: [0, 1), [1, 3 pi/2), [3 pi/2, inf)."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    lo, hi = BOUNDARIES
    if eta < lo:
        regime = SINGLE_WELL
    elif eta < hi:
        regime = STICK_SLIP
    else:
        regime = DEEP_CORRUGATION
    return RegimeClassification(eta, regime)


def classical_force_asymptote(eta, omega_t):
    if not omega_t > 0:
        raise ValueError("omega_t must be positive")
    regime = classify(eta).regime
    if regime == SINGLE_WELL:
        return 1.0 + 2.0 * math.pi / (eta * omega_t)
    if regime == STICK_SLIP:
        return 1.0
    return math.sin(2.0 * math.pi / eta)


def classical_slip_time(eta):
    """Slip time in units of T; above 1 the slip falls outside the first period."""
    if eta < 1.0:
        raise NoSlipError(f"no stick-slip for eta={eta} < 1")
    return 0.25 + eta / (2.0 * math.pi)


def classical_trajectory_A1(t_over_T, eta, omega_t):
    """Linearized single-well trajectory for a particle starting at rest.

    The substrate term enters with a negative sign, as follows from
    linearizing the equation of motion about the trap center.
    """
    if eta >= 1.0:
        raise ValueError("the single-well trajectory needs eta < 1")
    t = np.asarray(t_over_T, dtype=float)
    x = t - np.sin(omega_t * t) / omega_t - eta / (2.0 * math.pi) * np.sin(2.0 * math.pi * t)
    return float(x) if x.ndim == 0 else x


def _depth_factor(eta):
    try:
        u = solve_u_eta(eta)
    except NoInteriorRootError as exc:
        raise NoInteriorRootError(f"no double well for eta={eta} <= 1") from exc
    return eta + math.sqrt(eta * eta - u * u) - 0.5 * u * u


def well_depth(eta, lambda_bar):
    """Depth of the mid-period double well, in hbar*Omega."""
    return lambda_bar**2 * _depth_factor(eta)


def lz_threshold(eta):
    """Critical Lambda below which the mid-period wells hold no level."""
    return _depth_factor(eta) ** -0.5


def lz_threshold_large_eta(eta):
    if not eta > 1.0:
        raise NoInteriorRootError(f"no double well for eta={eta} <= 1")
    return (eta * (2.0 - math.pi**2 / (2.0 * (1.0 + eta)))) ** -0.5


def _two_level_freq(lambda_bar, omega_t):
    return math.sqrt(1.0 + 2.0 * lambda_bar**2 * (2.0 * math.pi / omega_t) ** 2)


def two_level_force(t_over_T, eta, lambda_bar, omega_t):
    """Lateral force from the lowest two moving-basis levels, no bath."""
    t = np.asarray(t_over_T, dtype=float)
    w = _two_level_freq(lambda_bar, omega_t)
    damp = math.exp(-0.25 / lambda_bar**2)
    wt = w * omega_t * t
    drive = np.sin(2.0 * math.pi * t)
    phi = wt + eta * omega_t / (2.0 * math.pi) * damp / (2.0 * w) * drive
    f = 2.0 * math.pi / (eta * omega_t) * np.sin(-phi) + damp * np.sin(phi + wt) * drive
    return float(f) if f.ndim == 0 else f


def two_level_bound(eta, lambda_bar, omega_t):
    return 2.0 * math.pi / (eta * omega_t) + math.exp(-0.25 / lambda_bar**2)


def lz_probability(gap, slope_diff, v_scaled):
    """Landau-Zener passage probability with hbar = 1.

    ``gap`` is in hbar*Omega, ``slope_diff`` is the difference of diabatic
    slopes dE/d(x_c/a) and ``v_scaled = d(x_c/a)/d(Omega t) = 1/(Omega T)``.
    """
    if slope_diff == 0:
        raise ZeroDivisionError("degenerate diabatic slopes")
    if not v_scaled > 0:
        raise ValueError("v_scaled must be positive")
    return math.exp(-math.pi * gap * gap / (2.0 * abs(slope_diff) * v_scaled))


@dataclass(frozen=True)
class AvoidedCrossing:
    t_over_T: float
    gap: float
    slope_diff: float
    probability: float


def _levels(cfg, t_over_T):
    return np.linalg.eigvalsh(ops.build_HS(t_over_T, cfg).data)


def avoided_crossing(cfg, level=0, t_guess=0.5, window=0.1, h=1e-4):
    """Locate the minimum gap between ``level`` and ``level + 1`` near ``t_guess``.

    Diabatic slopes come from the gap curvature at the crossing: for
    gap(t)^2 = g^2 + s^2 (t - t*)^2 one has s^2 = g * gap''(t*), with gap''
    from a central difference of step ``h`` in t/T (the trap center).
    """
    def gap(t):
        e = _levels(cfg, t)
        return e[level + 1] - e[level]

    res = minimize_scalar(gap, bounds=(t_guess - window, t_guess + window),
                          method="bounded", options={"xatol": 1e-10})
    t0 = float(res.x)
    g0 = gap(t0)
    curv = (gap(t0 + h) - 2.0 * g0 + gap(t0 - h)) / (h * h)
    slope = math.sqrt(max(g0 * curv, 0.0))
    prob = lz_probability(g0, slope, 1.0 / cfg.omega_t) if slope > 0 else 0.0
    return AvoidedCrossing(t0, g0, slope, prob)


def quantum_slip_time(chain, period=1.0):
    """Probability-weighted slip time of a Landau-Zener ladder.

    ``chain`` lists ``(t_slip_p, P_p_p+1)`` pairs, or mappings with keys
    ``t_slip`` and ``P``, in ascending slip time.
    """
    if not chain:
        raise ValueError("empty LZ chain")
    items = [(c["t_slip"], c["P"]) if isinstance(c, dict) else tuple(c) for c in chain]
    times = [t for t, _ in items]
    if any(b < a for a, b in zip(times, times[1:])):
        raise ValueError("slip times must be ascending")
    total = times[0]
    weight = 1.0
    for (t_p, p), t_next in zip(items, times[1:]):
        if t_next > period:
            break
        weight *= p
        total += weight * (t_next - t_p)
    return total


def lz_force_estimate(t_qm, eta):
    """Force ratio estimated from the quantum and classical slip times."""
    return t_qm / classical_slip_time(eta)


@dataclass(frozen=True)
class ForceAsymptote:
    value: float
    is_bound: bool
    branch: str

    def __str__(self):
        return f"< {self.value:.4f}" if self.is_bound else f"{self.value:.6g}"


def quantum_force_asymptote(eta, lambda_bar, omega_t):
    """Point value below the LZ threshold, otherwise an upper bound.

    Near the threshold the point value is outside its range of validity.
    """
    if not (eta > 0 and lambda_bar > 0 and omega_t > 0):
        raise ValueError("eta, lambda_bar and omega_t must be positive")
    regime = classify(eta).regime
    if regime == SINGLE_WELL or lambda_bar < lz_threshold(eta):
        return ForceAsymptote(two_level_bound(eta, lambda_bar, omega_t), False, "no-lz")
    if regime == STICK_SLIP:
        return ForceAsymptote(1.0, True, STICK_SLIP)
    return ForceAsymptote(math.sin(2.0 * math.pi / eta), True, DEEP_CORRUGATION)


def oracle_table(eta, lambda_bar, omega_t):
    """All closed-form values for one point, as a flat mapping."""
    out = {
        "eta": eta,
        "lambda_bar": lambda_bar,
        "omega_t": omega_t,
        "regime": classify(eta).regime,
        "classical_force": classical_force_asymptote(eta, omega_t),
        "quantum_force": str(quantum_force_asymptote(eta, lambda_bar, omega_t)),
        "two_level_bound": two_level_bound(eta, lambda_bar, omega_t),
    }
    if eta >= 1.0:
        out["classical_slip_time"] = classical_slip_time(eta)
    if eta > 1.0:
        out["u_eta"] = solve_u_eta(eta)
        out["well_depth"] = well_depth(eta, lambda_bar)
        out["lz_threshold"] = lz_threshold(eta)
    return out
