# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the numerical discord minimisation.

The objective is the trace distance between a two-qubit state and a
classical-quantum state parameterised by 10 reals (see ``_kernels_fallback``
for the same parameterisation in numpy).  The optimiser is a plain
Nelder-Mead with the coefficients and stopping rule of
``scipy.optimize.minimize(method="Nelder-Mead")``.
"""
from libc.math cimport cos, sin, fabs
from libc.stdlib cimport malloc, free
from scipy.linalg.cython_lapack cimport zheev

import numpy as np

DEF NPAR = 10
DEF LWORK = 64


cdef double cq_distance(const double* t, const double complex* rho) noexcept nogil:
    cdef double complex a[16]
    cdef double complex work[LWORK]
    cdef double rwork[10]
    cdef double w[4]
    cdef double complex P0[2][2]
    cdef double complex A[2][2]
    cdef double complex B[2][2]
    cdef double complex a1, off
    cdef double a0, tr, total
    cdef int i, j, k, l, n = 4, lda = 4, lwork = LWORK, info = 0
    cdef char jobz = b'N'
    cdef char uplo = b'L'

    a0 = cos(0.5 * t[0])
    a1 = (cos(t[1]) + 1j * sin(t[1])) * sin(0.5 * t[0])
    P0[0][0] = a0 * a0
    P0[0][1] = a0 * a1.conjugate()
    P0[1][0] = a0 * a1
    P0[1][1] = a1.real * a1.real + a1.imag * a1.imag

    off = t[3] + 1j * t[4]
    A[0][0] = t[2] * t[2]
    A[0][1] = t[2] * off.conjugate()
    A[1][0] = t[2] * off
    A[1][1] = t[3] * t[3] + t[4] * t[4] + t[5] * t[5]
    off = t[7] + 1j * t[8]
    B[0][0] = t[6] * t[6]
    B[0][1] = t[6] * off.conjugate()
    B[1][0] = t[6] * off
    B[1][1] = t[7] * t[7] + t[8] * t[8] + t[9] * t[9]

    tr = A[0][0].real + A[1][1].real + B[0][0].real + B[1][1].real
    if tr <= 1e-300:
        return 2.0

    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    # column-major fill of rho - sigma
                    a[(2 * i + k) + 4 * (2 * j + l)] = rho[4 * (2 * i + k) + (2 * j + l)] - (
                        P0[i][j] * A[k][l]
                        + ((1.0 if i == j else 0.0) - P0[i][j]) * B[k][l]) / tr

    zheev(&jobz, &uplo, &n, a, &lda, w, work, &lwork, rwork, &info)
    if info != 0:
        return 2.0
    total = 0.0
    for i in range(4):
        total += fabs(w[i])
    return 0.5 * total


cdef int nelder_mead(const double complex* rho, double* x0, int npar,
                     double xatol, double fatol, int maxiter, int maxfev,
                     double* fbest) noexcept nogil:
    """Minimise in place from ``x0``; returns the number of evaluations."""
    cdef double rho_c = 1.0, chi = 2.0, psi = 0.5, sigma = 0.5
    cdef double nonzdelt = 0.05, zdelt = 0.00025
    cdef int N = npar, i, j, it = 0, fcalls = 0, doshrink
    cdef double* sim = <double*> malloc((N + 1) * N * sizeof(double))
    cdef double* fsim = <double*> malloc((N + 1) * sizeof(double))
    cdef double* xbar = <double*> malloc(N * sizeof(double))
    cdef double* xr = <double*> malloc(N * sizeof(double))
    cdef double* xe = <double*> malloc(N * sizeof(double))
    cdef double* xc = <double*> malloc(N * sizeof(double))
    cdef double* tmp = <double*> malloc(N * sizeof(double))
    cdef double fxr, fxe, fxc, fxcc, ftmp, dmax
    cdef bint stop

    for j in range(N):
        sim[j] = x0[j]
    for i in range(N):
        for j in range(N):
            sim[(i + 1) * N + j] = x0[j]
        if x0[i] != 0:
            sim[(i + 1) * N + i] = (1 + nonzdelt) * x0[i]
        else:
            sim[(i + 1) * N + i] = zdelt
    for i in range(N + 1):
        fsim[i] = cq_distance(&sim[i * N], rho)
    fcalls = N + 1
    _sort_simplex(sim, fsim, N, tmp)

    while fcalls < maxfev and it < maxiter:
        stop = True
        dmax = 0.0
        for i in range(1, N + 1):
            for j in range(N):
                if fabs(sim[i * N + j] - sim[j]) > dmax:
                    dmax = fabs(sim[i * N + j] - sim[j])
        if dmax > xatol:
            stop = False
        if stop:
            for i in range(1, N + 1):
                if fabs(fsim[0] - fsim[i]) > fatol:
                    stop = False
                    break
        if stop:
            break

        for j in range(N):
            xbar[j] = 0.0
            for i in range(N):
                xbar[j] += sim[i * N + j]
            xbar[j] /= N
        for j in range(N):
            xr[j] = (1 + rho_c) * xbar[j] - rho_c * sim[N * N + j]
        fxr = cq_distance(xr, rho)
        fcalls += 1
        doshrink = 0

        if fxr < fsim[0]:
            for j in range(N):
                xe[j] = (1 + rho_c * chi) * xbar[j] - rho_c * chi * sim[N * N + j]
            fxe = cq_distance(xe, rho)
            fcalls += 1
            if fxe < fxr:
                for j in range(N):
                    sim[N * N + j] = xe[j]
                fsim[N] = fxe
            else:
                for j in range(N):
                    sim[N * N + j] = xr[j]
                fsim[N] = fxr
        else:
            if fxr < fsim[N - 1]:
                for j in range(N):
                    sim[N * N + j] = xr[j]
                fsim[N] = fxr
            else:
                if fxr < fsim[N]:
                    for j in range(N):
                        xc[j] = (1 + psi * rho_c) * xbar[j] - psi * rho_c * sim[N * N + j]
                    fxc = cq_distance(xc, rho)
                    fcalls += 1
                    if fxc <= fxr:
                        for j in range(N):
                            sim[N * N + j] = xc[j]
                        fsim[N] = fxc
                    else:
                        doshrink = 1
                else:
                    for j in range(N):
                        xc[j] = (1 - psi) * xbar[j] + psi * sim[N * N + j]
                    fxcc = cq_distance(xc, rho)
                    fcalls += 1
                    if fxcc < fsim[N]:
                        for j in range(N):
                            sim[N * N + j] = xc[j]
                        fsim[N] = fxcc
                    else:
                        doshrink = 1
                if doshrink:
                    for i in range(1, N + 1):
                        for j in range(N):
                            sim[i * N + j] = sim[j] + sigma * (sim[i * N + j] - sim[j])
                        fsim[i] = cq_distance(&sim[i * N], rho)
                    fcalls += N
        _sort_simplex(sim, fsim, N, tmp)
        it += 1

    for j in range(N):
        x0[j] = sim[j]
    fbest[0] = fsim[0]
    free(sim); free(fsim); free(xbar); free(xr); free(xe); free(xc); free(tmp)
    return fcalls


cdef void _sort_simplex(double* sim, double* fsim, int N, double* tmp) noexcept nogil:
    # stable insertion sort of the N+1 vertices by objective value
    cdef int i, j, k
    cdef double f
    for i in range(1, N + 1):
        f = fsim[i]
        for k in range(N):
            tmp[k] = sim[i * N + k]
        j = i - 1
        while j >= 0 and fsim[j] > f:
            fsim[j + 1] = fsim[j]
            for k in range(N):
                sim[(j + 1) * N + k] = sim[j * N + k]
            j -= 1
        fsim[j + 1] = f
        for k in range(N):
            sim[(j + 1) * N + k] = tmp[k]


def cq_trace_distance(double[::1] t, double complex[:, ::1] rho):
    """Trace distance between ``rho`` and the CQ state encoded by ``t``."""
    if t.shape[0] != NPAR or rho.shape[0] != 4 or rho.shape[1] != 4:
        raise ValueError("expected 10 parameters and a 4x4 state")
    return cq_distance(&t[0], &rho[0, 0])


def minimize_cq_distance(rho, starts, double xatol=1e-6, double fatol=1e-6,
                         int maxiter=4000, int polish=1):
    """Run Nelder-Mead from every row of ``starts``.

    Returns ``(values, params, nfev)``: the per-start minima, the minimisers and
    the total number of objective evaluations.
    """
    cdef double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef double[:, ::1] x = np.array(starts, dtype=np.float64, order="C", copy=True)
    if x.shape[1] != NPAR or r.shape[0] != 4 or r.shape[1] != 4:
        raise ValueError("expected starts of shape (n, 10) and a 4x4 state")
    cdef Py_ssize_t n = x.shape[0], s
    cdef int rep, total = 0
    cdef int maxfev = maxiter * 2
    values = np.empty(n)
    cdef double[::1] v = values
    cdef double f
    with nogil:
        for s in range(n):
            for rep in range(1 + polish):
                total += nelder_mead(&r[0, 0], &x[s, 0], NPAR, xatol, fatol,
                                     maxiter, maxfev, &f)
            v[s] = f
    return values, np.asarray(x), total
