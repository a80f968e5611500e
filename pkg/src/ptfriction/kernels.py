"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``PT_FRICTION_BACKEND=python``
to force the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_compiled = None
if os.environ.get("PT_FRICTION_BACKEND", "").lower() != "python":
    try:
        from . import _kernels as _compiled

        BACKEND = "compiled"
    except ImportError:
        _compiled = None

STATUS_OK = _kernels_py.STATUS_OK
STATUS_TRACE = _kernels_py.STATUS_TRACE
STATUS_POSITIVITY = _kernels_py.STATUS_POSITIVITY
STATUS_NONFINITE = _kernels_py.STATUS_NONFINITE
STATUS_NAMES = {
    STATUS_OK: "ok",
    STATUS_TRACE: "trace",
    STATUS_POSITIVITY: "positivity",
    STATUS_NONFINITE: "nonfinite",
}


def available_backends():
    return ("python", "compiled") if _compiled is not None else ("python",)


def quantum_rk4(*args, backend=None):
    use = backend or BACKEND
    if use == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        return _compiled.quantum_rk4(*args)
    return _kernels_py.quantum_rk4(*args)


def langevin_ensemble(x0, v0, omega_t, eta, gamma0, diff, n_steps, total, stride, generators,
                      heun=False, backend=None):
    use = backend or BACKEND
    if use != "compiled":
        return _kernels_py.langevin_ensemble(
            x0, v0, omega_t, eta, gamma0, diff, n_steps, total, stride, generators, heun
        )
    if _compiled is None:
        raise RuntimeError("compiled kernels are not built")
    import numpy as np

    runs = len(generators)
    x_rec = np.empty((runs, total // stride + 1))
    f_max = np.empty(runs)
    t_max = np.empty(runs)
    status = np.empty(runs, dtype=int)
    for r, gen in enumerate(generators):
        normals = gen.standard_normal(total)
        f_max[r], t_max[r], status[r] = _compiled.langevin_run(
            x0, v0, omega_t, eta, gamma0, diff, n_steps, total, stride, normals, heun, x_rec[r]
        )
    return x_rec, f_max, t_max, status
