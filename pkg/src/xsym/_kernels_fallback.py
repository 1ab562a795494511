"""Pure numpy/scipy implementation of the discord-minimisation kernels.

Same objective and parameterisation as the compiled ``_kernels`` module; the
optimiser is scipy's Nelder-Mead, which the compiled version mirrors.
"""
import numpy as np
from scipy.optimize import minimize

NPAR = 10


def cq_state(t) -> np.ndarray:
    """Classical-quantum state encoded by 10 reals.

    ``t[0:2]`` fix the qubit-U basis ``{|a0>, |a1>}``; ``t[2:6]`` and
    ``t[6:10]`` are Cholesky factors of the unnormalised L-blocks attached to
    ``|a0><a0|`` and ``|a1><a1|``.
    """
    t = np.asarray(t, dtype=float)
    a0 = np.cos(0.5 * t[0])
    a1 = np.exp(1j * t[1]) * np.sin(0.5 * t[0])
    p0 = np.array([[a0 * a0, a0 * np.conj(a1)], [a0 * a1, abs(a1) ** 2]])
    la = np.array([[t[2], 0.0], [t[3] + 1j * t[4], t[5]]])
    lb = np.array([[t[6], 0.0], [t[7] + 1j * t[8], t[9]]])
    a = la @ la.conj().T
    b = lb @ lb.conj().T
    sigma = np.kron(p0, a) + np.kron(np.eye(2) - p0, b)
    return sigma / (np.trace(a).real + np.trace(b).real)


def cq_trace_distance(t, rho) -> float:
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=complex)
    if t.shape != (NPAR,) or rho.shape != (4, 4):
        raise ValueError("expected 10 parameters and a 4x4 state")
    if np.sum(t[2:6] ** 2) + np.sum(t[6:] ** 2) <= 1e-300:
        return 2.0
    return float(0.5 * np.abs(np.linalg.eigvalsh(rho - cq_state(t))).sum())


def minimize_cq_distance(rho, starts, xatol=1e-6, fatol=1e-6, maxiter=4000, polish=1):
    rho = np.asarray(rho, dtype=complex)
    starts = np.array(starts, dtype=float)
    if starts.ndim != 2 or starts.shape[1] != NPAR or rho.shape != (4, 4):
        raise ValueError("expected starts of shape (n, 10) and a 4x4 state")
    values = np.empty(len(starts))
    total = 0
    opts = dict(xatol=xatol, fatol=fatol, maxiter=maxiter, maxfev=2 * maxiter)
    for s, x0 in enumerate(starts):
        for _ in range(1 + polish):
            res = minimize(cq_trace_distance, x0, args=(rho,), method="Nelder-Mead",
                           options=opts)
            x0 = res.x
            total += res.nfev
        starts[s] = x0
        values[s] = res.fun
    return values, starts, total
