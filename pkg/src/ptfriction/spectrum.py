"""Instantaneous eigendecomposition with overlap-based state tracking."""

from dataclasses import dataclass, field

import numpy as np

from .operators import OperatorMatrix

HERMITICITY_TOL = 1e-12
TIE_TOL = 1e-6


class ContractError(ValueError):
    pass


@dataclass(frozen=True)
class InstantSpectrum:
    energies: np.ndarray
    states: np.ndarray
    t_over_T: float
    gauge_ref: object = None
    ambiguous: bool = False
    min_overlap: float = 1.0

    @property
    def ground_state(self):
        return self.states[:, int(np.argmin(self.energies))]


def diagonalize(H):
    """Full dense eigendecomposition; eigenvalues ascending."""
    data = H.data if isinstance(H, OperatorMatrix) else np.asarray(H)
    t = H.t_over_T if isinstance(H, OperatorMatrix) else float("nan")
    scale = max(1.0, float(np.max(np.abs(data))))
    if np.max(np.abs(data - data.conj().T)) > HERMITICITY_TOL * scale:
        raise ContractError("diagonalize needs a Hermitian matrix")
    if np.isrealobj(data) or not np.any(data.imag):
        energies, states = np.linalg.eigh(data.real)
    else:
        energies, states = np.linalg.eigh(data)
    return InstantSpectrum(energies, states, t)


def track_gauge(prev, nxt):
    """Reorder ``nxt`` columns to follow ``prev`` and fix their phases.

    Each previous column is matched to the unused next column of largest
    overlap magnitude (greedy, strongest overlaps first); the matched column
    is rotated so ``<prev_p|next_p>`` is real and non-negative. Near-ties
    are settled by energy order and flagged with ``ambiguous``.
    """
    if prev.states.shape != nxt.states.shape:
        raise ContractError("basis size mismatch between spectra")
    overlap = prev.states.conj().T @ nxt.states
    mag = np.abs(overlap)
    n = mag.shape[0]
    perm = np.full(n, -1)
    used = np.zeros(n, dtype=bool)
    ambiguous = False
    for i in np.argsort(-mag.max(axis=1), kind="stable"):
        row = np.where(used, -1.0, mag[i])
        best = int(np.argmax(row))
        rivals = np.flatnonzero((row > row[best] - TIE_TOL) & ~used)
        if rivals.size > 1:
            ambiguous = True
            best = int(rivals[np.argmin(nxt.energies[rivals])])
        perm[i] = best
        used[best] = True
    states = nxt.states[:, perm]
    diag = overlap[np.arange(n), perm]
    phases = np.ones(n, dtype=complex)
    nz = np.abs(diag) > 0
    phases[nz] = np.conj(diag[nz]) / np.abs(diag[nz])
    if np.isrealobj(states) and np.all(np.abs(phases.imag) < 1e-14):
        states = states * phases.real
    else:
        states = states * phases
    return InstantSpectrum(
        nxt.energies[perm],
        states,
        nxt.t_over_T,
        gauge_ref=prev.t_over_T,
        ambiguous=ambiguous,
        min_overlap=float(np.min(np.abs(diag))),
    )
