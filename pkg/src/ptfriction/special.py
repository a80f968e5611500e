"""Associated Laguerre polynomials and the interior root of ``u = eta sin u``."""

import math

import numpy as np


def assoc_laguerre(n, k, x):
    """Evaluate L_n^k(x) with the three-term recurrence in ``n``.

    ``x`` may be a scalar or an array; the return type follows it.
    """
    if n < 0 or k < 0:
        raise ValueError(f"assoc_laguerre needs n >= 0 and k >= 0, got n={n}, k={k}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 + k - x) * cur - (m + k) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def laguerre_table(n_max, x):
    """Return ``T[m, d] = L_m^d(x)`` for ``0 <= m, d < n_max`` at a single x."""
    table = np.empty((n_max, n_max))
    for d in range(n_max):
        prev = 1.0
        table[0, d] = prev
        if n_max == 1:
            continue
        cur = 1.0 + d - x
        table[1, d] = cur
        for m in range(1, n_max - 1):
            prev, cur = cur, ((2 * m + 1 + d - x) * cur - (m + d) * prev) / (m + 1)
            table[m + 1, d] = cur
    return table


class NoInteriorRootError(ValueError):
    pass


def solve_u_eta(eta, tol=1e-12):
    """Root of ``u - eta*sin(u)`` inside (0, pi); exists only for eta > 1.

    Bisection until the bracket is narrow, then Newton polish kept inside
    the bracket.
    """
    if not eta > 1.0:
        raise NoInteriorRootError(f"u = eta sin u has no root in (0, pi) for eta={eta} <= 1")

    def f(u):
        return u - eta * math.sin(u)

    # f < 0 just above 0 (slope 1 - eta < 0) and f(pi) = pi > 0
    lo, hi = 1e-300, math.pi
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    for _ in range(50):
        fu = f(u)
        if abs(fu) < tol:
            break
        step = fu / (1.0 - eta * math.cos(u))
        u_new = u - step
        if not lo <= u_new <= hi:
            u_new = 0.5 * (lo + hi)
        if f(u_new) < 0.0:
            lo = u_new
        else:
            hi = u_new
        u = u_new
    return u
