# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Same contracts as ``_kernels_py``."""

import numpy as np

from libc.math cimport sin, cos, exp, expm1, fabs, sqrt, isfinite, M_PI
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemm, zgemm
from scipy.linalg.cython_lapack cimport dsyevd, zheevd

cdef enum:
    STATUS_OK = 0
    STATUS_TRACE = 1
    STATUS_POSITIVITY = 2
    STATUS_NONFINITE = 3

cdef double TRACE_ABORT = 1e-4


cdef inline void dmm(char ta, char tb, int n, double* a, double* b, double* c) noexcept nogil:
    # row-major c = op(a) op(b)
    cdef double one = 1.0, zero = 0.0
    dgemm(&tb, &ta, &n, &n, &n, &one, b, &n, a, &n, &zero, c, &n)


cdef inline void zmm(int n, double complex* a, double complex* b, double complex* c) noexcept nogil:
    cdef double complex one = 1.0, zero = 0.0
    cdef char nt = b'N'
    zgemm(&nt, &nt, &n, &n, &n, &one, b, &n, a, &n, &zero, c, &n)


cdef inline double rate(double de, double alpha, double wc, double theta) noexcept nogil:
    cdef double mag, j, occ, z
    if de == 0.0:
        return 2.0 * M_PI * alpha * theta
    mag = fabs(de)
    j = 2.0 * alpha * mag * exp(-mag / wc)
    occ = 0.0
    if theta > 0.0:
        z = mag / theta
        if z <= 700.0:
            occ = 1.0 / expm1(z)
    if de > 0.0:
        return M_PI * j * (occ + 1.0)
    return M_PI * j * occ


cdef struct Work:
    int n
    double* ke
    double* ko
    double* diag
    double scale
    double renorm
    double complex* frame
    double alpha
    double wc
    double theta
    bint dissipative
    double* tmp
    double* tmp2
    double* w
    double* dwork
    int* iwork
    int lwork
    int liwork


cdef struct Stage:
    double complex* hg
    double complex* a
    double complex* s
    double* ut      # rows are eigenvectors, ascending energy
    double* e


cdef int build_stage(Work* wk, double t, Stage* st, double* areal) noexcept nogil:
    cdef int n = wk.n, nn = n * n, i, p, q, info
    cdef double ph = 2.0 * M_PI * t
    cdef double c = cos(ph), s = sin(ph)
    cdef double* hr = wk.tmp
    cdef char jobz = b'V', uplo = b'U'
    for i in range(nn):
        areal[i] = wk.ke[i] * s + wk.ko[i] * c
        hr[i] = -wk.scale * (wk.ke[i] * c - wk.ko[i] * s)
    for i in range(n):
        hr[i * n + i] += wk.diag[i]
    if wk.renorm != 0.0:
        dmm(b'N', b'N', n, areal, areal, wk.tmp2)
        for i in range(nn):
            hr[i] += wk.renorm * wk.tmp2[i]
    for i in range(nn):
        st.hg[i] = hr[i] - wk.frame[i]
        st.a[i] = areal[i]
    # symmetric input, so row/column order is immaterial; eigenvectors come
    # back as Fortran columns, i.e. rows of this buffer
    memcpy(st.ut, hr, nn * sizeof(double))
    dsyevd(&jobz, &uplo, &n, st.ut, &n, st.e, wk.dwork, &wk.lwork, wk.iwork, &wk.liwork, &info)
    if info != 0:
        return -1
    if wk.dissipative:
        # a_eig = ut a ut^T
        dmm(b'N', b'N', n, st.ut, areal, wk.tmp)
        dmm(b'N', b'T', n, wk.tmp, st.ut, wk.tmp2)
        for p in range(n):
            for q in range(n):
                wk.tmp2[p * n + q] *= rate(st.e[q] - st.e[p], wk.alpha, wk.wc, wk.theta)
        # s = ut^T m ut
        dmm(b'T', b'N', n, st.ut, wk.tmp2, wk.tmp)
        dmm(b'N', b'N', n, wk.tmp, st.ut, wk.tmp2)
        for i in range(nn):
            st.s[i] = wk.tmp2[i]
    return 0


cdef void apply(Work* wk, Stage* st, double complex* rho, double complex* out,
                double complex* x, double complex* y) noexcept nogil:
    cdef int n = wk.n, i, j
    cdef double complex d
    zmm(n, st.hg, rho, x)
    for i in range(n):
        for j in range(n):
            d = x[i * n + j] - x[j * n + i].conjugate()
            out[i * n + j] = -1j * d
    if wk.dissipative:
        zmm(n, st.s, rho, x)
        for i in range(n):
            for j in range(n):
                y[i * n + j] = x[i * n + j] - x[j * n + i].conjugate()
        zmm(n, st.a, y, x)
        for i in range(n):
            for j in range(n):
                out[i * n + j] -= x[i * n + j] + x[j * n + i].conjugate()


cdef double min_eigenvalue(int n, double complex* rho, double complex* buf, double* w,
                           double complex* zwork, int lzwork, double* rwork, int lrwork,
                           int* iwork, int liwork) noexcept nogil:
    cdef int i, j, info
    cdef char jobz = b'N', uplo = b'U'
    for i in range(n):
        for j in range(n):
            buf[i * n + j] = 0.5 * (rho[i * n + j] + rho[j * n + i].conjugate())
    zheevd(&jobz, &uplo, &n, buf, &n, w, zwork, &lzwork, rwork, &lrwork, iwork, &liwork, &info)
    if info != 0:
        return -1e300
    return w[0]


def quantum_rk4(double[:, ::1] k_even, double[:, ::1] k_odd, double[::1] diag, double scale,
                double renorm, double kappa, double disp_coeff, double force_scale, double alpha,
                double wc, double theta, double omega_t, long n_steps, long total, long stride,
                rho0, double pos_tol):
    cdef int n = diag.shape[0], nn = n * n, i, j, p
    cdef long k, n_rec = total // stride + 1 + (1 if total % stride else 0)
    cdef double h = omega_t / n_steps, t, tr_err = 0.0, lo, best, v, purity, p0, d
    cdef double complex tr
    cdef int status = STATUS_OK
    cdef long status_step = -1, rec = 0

    samples_arr = np.zeros((n_rec, 7))
    cdef double[:, ::1] samples = samples_arr
    rho_arr = np.array(rho0, dtype=np.complex128, order="C")
    cdef double complex[:, ::1] rho_mv = rho_arr
    cdef double complex* rho = &rho_mv[0, 0]
    stats_arr = np.array([0.0, 0.0, 1.0, 1.0, 0.0])
    cdef double[::1] stats = stats_arr

    frame_arr = np.zeros((n, n), dtype=np.complex128)
    for p in range(n - 1):
        frame_arr[p + 1, p] = 1j * kappa * sqrt(p + 1.0)
        frame_arr[p, p + 1] = -1j * kappa * sqrt(p + 1.0)
    cdef double complex[:, ::1] frame_mv = frame_arr
    ke_arr = np.ascontiguousarray(k_even)
    ko_arr = np.ascontiguousarray(k_odd)
    diag_arr = np.ascontiguousarray(diag)
    cdef double[:, ::1] ke_mv = ke_arr
    cdef double[:, ::1] ko_mv = ko_arr
    cdef double[::1] diag_mv = diag_arr

    cdef Work wk
    wk.n = n
    wk.ke = &ke_mv[0, 0]
    wk.ko = &ko_mv[0, 0]
    wk.diag = &diag_mv[0]
    wk.scale = scale
    wk.renorm = renorm
    wk.frame = &frame_mv[0, 0]
    wk.alpha = alpha
    wk.wc = wc
    wk.theta = theta
    wk.dissipative = alpha > 0.0
    wk.lwork = 1 + 6 * n + 2 * nn
    wk.liwork = 3 + 5 * n

    cdef int lzwork = 2 * n + nn + 1, lrwork = 2 * n + 2 * nn + 1, liwork_z = 5 * n + 3
    cdef double* dpool = <double*> malloc((4 * nn + n + wk.lwork + 3 * n + lrwork) * sizeof(double))
    cdef double complex* zpool = <double complex*> malloc((20 * nn + lzwork) * sizeof(double complex))
    cdef int* ipool = <int*> malloc((wk.liwork + liwork_z) * sizeof(int))
    cdef double* ut_pool = <double*> malloc((3 * nn + 3 * n) * sizeof(double))
    if dpool == NULL or zpool == NULL or ipool == NULL or ut_pool == NULL:
        free(dpool); free(zpool); free(ipool); free(ut_pool)
        raise MemoryError()

    wk.tmp = dpool
    wk.tmp2 = dpool + nn
    cdef double* areal = dpool + 2 * nn
    cdef double* ov = dpool + 3 * nn
    wk.w = dpool + 4 * nn
    wk.dwork = dpool + 4 * nn + n
    cdef double* wz = dpool + 4 * nn + n + wk.lwork
    cdef double* rwork = wz + 3 * n
    wk.iwork = ipool
    cdef int* iwork_z = ipool + wk.liwork

    cdef Stage s0, sm, se
    cdef Stage* st0 = &s0
    cdef Stage* stm = &sm
    cdef Stage* ste = &se
    cdef Stage* swap
    s0.hg = zpool; s0.a = zpool + nn; s0.s = zpool + 2 * nn
    sm.hg = zpool + 3 * nn; sm.a = zpool + 4 * nn; sm.s = zpool + 5 * nn
    se.hg = zpool + 6 * nn; se.a = zpool + 7 * nn; se.s = zpool + 8 * nn
    cdef double complex* k1 = zpool + 9 * nn
    cdef double complex* k2 = zpool + 10 * nn
    cdef double complex* k3 = zpool + 11 * nn
    cdef double complex* k4 = zpool + 12 * nn
    cdef double complex* tmpz = zpool + 13 * nn
    cdef double complex* xz = zpool + 14 * nn
    cdef double complex* yz = zpool + 15 * nn
    cdef double complex* bufz = zpool + 16 * nn
    cdef double complex* zwork = zpool + 20 * nn
    s0.ut = ut_pool; sm.ut = ut_pool + nn; se.ut = ut_pool + 2 * nn
    s0.e = ut_pool + 3 * nn; sm.e = ut_pool + 3 * nn + n; se.e = ut_pool + 3 * nn + 2 * n
    for i in range(nn):
        s0.s[i] = 0.0; sm.s[i] = 0.0; se.s[i] = 0.0

    cdef double fs = force_scale, dc = disp_coeff
    cdef int ambiguous
    cdef int* hits = iwork_z  # reused scratch for the permutation check

    try:
        with nogil:
            if build_stage(&wk, 0.0, st0, areal) != 0:
                status = STATUS_NONFINITE
                status_step = 0
            k = 0
            while status == STATUS_OK:
                # ---- record at step k (t = k / n_steps) when due
                if k == 0 or k % stride == 0 or k == total:
                    t = <double> k / n_steps
                    p0 = 0.0
                    purity = 0.0
                    for i in range(n):
                        for j in range(n):
                            p0 += st0.ut[i] * st0.ut[j] * rho[i * n + j].real
                            purity += rho[i * n + j].real * rho[i * n + j].real + rho[i * n + j].imag * rho[i * n + j].imag
                    d = 0.0
                    for p in range(n - 1):
                        d += -dc * sqrt(p + 1.0) * (rho[p * n + p + 1].real + rho[(p + 1) * n + p].real)
                    samples[rec, 0] = t
                    samples[rec, 1] = t - d
                    samples[rec, 2] = fs * d
                    samples[rec, 3] = p0
                    samples[rec, 4] = n / (n - 1.0) * (1.0 - purity)
                    samples[rec, 5] = purity
                    samples[rec, 6] = tr_err if k > 0 else 0.0
                    rec += 1
                    if k > 0:
                        best = 0.0
                        for i in range(n):
                            for j in range(n):
                                v = (rho[i * n + j] - rho[j * n + i].conjugate()).real
                                lo = (rho[i * n + j] - rho[j * n + i].conjugate()).imag
                                v = sqrt(v * v + lo * lo)
                                if v > best:
                                    best = v
                        if best > stats[1]:
                            stats[1] = best
                    lo = min_eigenvalue(n, rho, bufz, wz, zwork, lzwork, rwork, lrwork, iwork_z, liwork_z)
                    if lo < stats[2]:
                        stats[2] = lo
                    if lo < pos_tol:
                        status = STATUS_POSITIVITY
                        status_step = k
                        break
                if k == total:
                    break
                # ---- one RK4 step
                if build_stage(&wk, (k + 0.5) / n_steps, stm, areal) != 0 or \
                        build_stage(&wk, (k + 1.0) / n_steps, ste, areal) != 0:
                    status = STATUS_NONFINITE
                    status_step = k + 1
                    break
                apply(&wk, st0, rho, k1, xz, yz)
                for i in range(nn):
                    tmpz[i] = rho[i] + (0.5 * h) * k1[i]
                apply(&wk, stm, tmpz, k2, xz, yz)
                for i in range(nn):
                    tmpz[i] = rho[i] + (0.5 * h) * k2[i]
                apply(&wk, stm, tmpz, k3, xz, yz)
                for i in range(nn):
                    tmpz[i] = rho[i] + h * k3[i]
                apply(&wk, ste, tmpz, k4, xz, yz)
                tr = 0.0
                for i in range(nn):
                    rho[i] = rho[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                for i in range(n):
                    tr = tr + rho[i * n + i]
                tr_err = sqrt((tr.real - 1.0) * (tr.real - 1.0) + tr.imag * tr.imag)
                if not isfinite(tr_err):
                    status = STATUS_NONFINITE
                    status_step = k + 1
                    break
                if tr_err > stats[0]:
                    stats[0] = tr_err
                if tr_err > TRACE_ABORT:
                    status = STATUS_TRACE
                    status_step = k + 1
                    break
                for i in range(nn):
                    rho[i] = rho[i] / tr
                # ---- eigenvector continuity diagnostic
                dmm(b'N', b'T', n, st0.ut, ste.ut, ov)
                ambiguous = 0
                for i in range(n):
                    hits[i] = 0
                for i in range(n):
                    best = -1.0
                    p = 0
                    for j in range(n):
                        v = fabs(ov[i * n + j])
                        if v > best:
                            best = v
                            p = j
                    hits[p] += 1
                    if best < stats[3]:
                        stats[3] = best
                for i in range(n):
                    if hits[i] != 1:
                        ambiguous = 1
                stats[4] += ambiguous
                swap = st0
                st0 = ste
                ste = swap
                k += 1
    finally:
        free(dpool)
        free(zpool)
        free(ipool)
        free(ut_pool)
    return samples_arr[:rec], rho_arr, stats_arr, status, status_step


cdef inline double accel(double x, double v, double t, double w2, double k_sin, double gamma0,
                         double* c_out) noexcept nogil:
    cdef double c = cos(2.0 * M_PI * x)
    c_out[0] = c
    return -w2 * (x - t + k_sin * sin(2.0 * M_PI * x)) - gamma0 * c * c * v


def langevin_run(double x0, double v0, double omega_t, double eta, double gamma0, double diff,
                 long n_steps, long total, long stride, double[::1] normals, bint heun,
                 double[::1] x_rec):
    """One run; fills ``x_rec`` and returns ``(f_max, t_max, status)``."""
    cdef double dt = 1.0 / n_steps
    cdef double w2 = omega_t * omega_t, k_sin = eta / (2.0 * M_PI)
    cdef double f_scale = 2.0 * M_PI / eta, sd = sqrt(diff * dt)
    cdef double x = x0, v = v0, t, acc, acc_p, c, c_p, kick, kick_p, x_p, v_p, x_new, f
    cdef double f_max = f_scale * (0.0 - x0), t_max = 0.0
    cdef long k, first = total if total < n_steps else n_steps
    cdef int status = STATUS_OK
    x_rec[0] = x
    with nogil:
        for k in range(total):
            t = k * dt
            acc = accel(x, v, t, w2, k_sin, gamma0, &c)
            kick = sd * fabs(c) * normals[k]
            if heun:
                v_p = v + acc * dt + kick
                x_p = x + v * dt
                acc_p = accel(x_p, v_p, t + dt, w2, k_sin, gamma0, &c_p)
                kick_p = sd * fabs(c_p) * normals[k]
                x_new = x + 0.5 * (v + v_p) * dt
                v = v + 0.5 * (acc + acc_p) * dt + 0.5 * (kick + kick_p)
                x = x_new
            else:
                v = v + acc * dt + kick
                x = x + v * dt
            if not (isfinite(x) and isfinite(v)):
                status = STATUS_NONFINITE
                break
            if k + 1 <= first:
                f = f_scale * ((k + 1) * dt - x)
                if f > f_max:
                    f_max = f
                    t_max = (k + 1) * dt
            if (k + 1) % stride == 0:
                x_rec[(k + 1) // stride] = x
    return f_max, t_max, status
