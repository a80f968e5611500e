"""Pure numpy versions of the hot loops; the compiled module mirrors them."""

import math

import numpy as np

STATUS_OK = 0
STATUS_TRACE = 1
STATUS_POSITIVITY = 2
STATUS_NONFINITE = 3

TRACE_ABORT = 1e-4


def rate_matrix(energies, alpha, wc, theta):
    """Re Gamma(E_q - E_p) for all pairs of levels."""
    de = energies[None, :] - energies[:, None]
    mag = np.abs(de)
    j = 2.0 * alpha * mag * np.exp(-mag / wc)
    if theta > 0:
        z = mag / theta
        with np.errstate(divide="ignore", over="ignore"):
            n = np.where(z > 700.0, 0.0, 1.0 / np.expm1(z))
    else:
        n = np.zeros_like(mag)
    with np.errstate(invalid="ignore"):
        out = math.pi * j * np.where(de > 0, n + 1.0, n)
    out[de == 0] = 2.0 * math.pi * alpha * theta
    return out


def quantum_rk4(k_even, k_odd, diag, scale, renorm, kappa, disp_coeff, force_scale, alpha, wc,
                theta, omega_t, n_steps, total, stride, rho0, pos_tol, rates=None):
    """RK4 integration of the moving-basis Redfield equation.

    ``rates(energies)`` may replace the real-rate matrix, e.g. to add the
    principal-value part.

    Returns ``(samples, rho, stats, status, status_step)`` where ``stats`` is
    ``[max_trace_err, max_herm_err, min_eig, min_overlap, n_ambiguous]``.
    """
    n = diag.size
    h = omega_t / n_steps
    lower = np.diag(np.sqrt(np.arange(1, n)), 1)
    frame = 1j * kappa * (lower.T - lower)
    disp = -disp_coeff * (lower + lower.T)
    dissipative = alpha > 0
    idx = np.diag_indices(n)
    if rates is None:
        def rates(e):
            return rate_matrix(e, alpha, wc, theta)

    def stage(t):
        ph = 2.0 * math.pi * t
        c, s = math.cos(ph), math.sin(ph)
        a = k_even * s + k_odd * c
        hr = -scale * (k_even * c - k_odd * s)
        hr[idx] += diag
        if renorm:
            hr += renorm * (a @ a)
        e, u = np.linalg.eigh(hr)
        if dissipative:
            a_eig = u.T @ a @ u
            smat = u @ (a_eig * rates(e)) @ u.T
        else:
            smat = None
        return hr - frame, a, smat, u

    def apply(st, rho):
        hg, a, smat, _ = st
        x = hg @ rho
        out = -1j * (x - x.conj().T)
        if smat is not None:
            y = smat @ rho
            w = a @ (y - y.conj().T)
            out -= w + w.conj().T
        return out

    rho = np.array(rho0, dtype=complex)
    samples = []
    stats = [0.0, 0.0, 1.0, 1.0, 0.0]
    status, status_step = STATUS_OK, -1

    def record(k, u, trace_err):
        t = k / n_steps
        g = u[:, 0]
        p0 = float(np.real(np.vdot(g, rho @ g)))
        purity = float(np.real(np.vdot(rho, rho)))
        d = float(np.real(np.sum(disp * rho.T)))
        samples.append((t, t - d, force_scale * d, p0, n / (n - 1.0) * (1.0 - purity), purity, trace_err))
        lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        stats[2] = min(stats[2], lo)
        return lo

    st0 = stage(0.0)
    lo = record(0, st0[3], 0.0)
    if lo < pos_tol:
        return np.array(samples), rho, np.array(stats), STATUS_POSITIVITY, 0
    for k in range(total):
        mid = stage((k + 0.5) / n_steps)
        end = stage((k + 1) / n_steps)
        k1 = apply(st0, rho)
        k2 = apply(mid, rho + (0.5 * h) * k1)
        k3 = apply(mid, rho + (0.5 * h) * k2)
        k4 = apply(end, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        tr = np.trace(rho)
        trace_err = abs(tr - 1.0)
        if not np.isfinite(trace_err) or not np.all(np.isfinite(rho)):
            status, status_step = STATUS_NONFINITE, k + 1
            break
        stats[0] = max(stats[0], trace_err)
        if trace_err > TRACE_ABORT:
            status, status_step = STATUS_TRACE, k + 1
            break
        rho /= tr

        ov = np.abs(st0[3].T @ end[3])
        best = ov.max(axis=1)
        stats[3] = min(stats[3], float(best.min()))
        if np.unique(ov.argmax(axis=1)).size != n:
            stats[4] += 1
        st0 = end
        if (k + 1) % stride == 0 or k + 1 == total:
            stats[1] = max(stats[1], float(np.max(np.abs(rho - rho.conj().T))))
            lo = record(k + 1, end[3], trace_err)
            if lo < pos_tol:
                status, status_step = STATUS_POSITIVITY, k + 1
                break
    return np.array(samples), rho, np.array(stats), status, status_step


def langevin_ensemble(x0, v0, omega_t, eta, gamma0, diff, n_steps, total, stride,
                      generators, heun=False, chunk=4096):
    """Integrate every run of the ensemble, vectorized across runs.

    Per step, with dt = 1/n_steps and N ~ N(0, 1) drawn from the run's own
    generator::

        v' = v + acc(x, v, t) dt + sqrt(diff dt) |cos(2 pi x)| N
        x' = x + v' dt

    Returns ``(x_rec, f_max, t_max, status)``; ``x_rec`` holds every
    ``stride``-th position including t = 0.
    """
    runs = len(generators)
    dt = 1.0 / n_steps
    w2 = omega_t * omega_t
    k_sin = eta / (2.0 * math.pi)
    twopi = 2.0 * math.pi
    f_scale = twopi / eta
    x = np.full(runs, float(x0))
    v = np.full(runs, float(v0))
    n_rec = total // stride + 1
    x_rec = np.empty((runs, n_rec))
    x_rec[:, 0] = x
    sd = math.sqrt(diff * dt)
    f_max = f_scale * (0.0 - x)
    t_max = np.zeros(runs)
    alive = np.ones(runs, dtype=bool)
    first_period = min(total, n_steps)

    def accel(x, v, t):
        c = np.cos(twopi * x)
        return -w2 * (x - t + k_sin * np.sin(twopi * x)) - gamma0 * c * c * v, c

    k = 0
    while k < total:
        m = min(chunk, total - k)
        normals = np.stack([g.standard_normal(m) for g in generators])
        for j in range(m):
            t = k * dt
            acc, c = accel(x, v, t)
            kick = sd * np.abs(c) * normals[:, j]
            if heun:
                v_p = v + acc * dt + kick
                x_p = x + v * dt
                acc_p, c_p = accel(x_p, v_p, t + dt)
                kick_p = sd * np.abs(c_p) * normals[:, j]
                x_new = x + 0.5 * (v + v_p) * dt
                v = v + 0.5 * (acc + acc_p) * dt + 0.5 * (kick + kick_p)
                x = x_new
            else:
                v = v + acc * dt + kick
                x = x + v * dt
            k += 1
            if k <= first_period:
                f = f_scale * (k * dt - x)
                better = f > f_max
                f_max = np.where(better, f, f_max)
                t_max = np.where(better, k * dt, t_max)
            if k % stride == 0:
                x_rec[:, k // stride] = x
        bad = ~(np.isfinite(x) & np.isfinite(v))
        if bad.any():
            alive &= ~bad
            x = np.where(bad, 0.0, x)
            v = np.where(bad, 0.0, v)
    status = np.where(alive, STATUS_OK, STATUS_NONFINITE)
    return x_rec, f_max, t_max, status
