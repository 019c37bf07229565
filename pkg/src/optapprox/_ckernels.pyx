# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Mirrors :mod:`optapprox._pykernels` function by function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, isfinite
from libc.float cimport DBL_EPSILON

cnp.import_array()

ctypedef double complex cplx


cdef inline double abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double cabs_(cplx z) nogil:
    return sqrt(abs2(z))


def gram_matrix(const cplx[::1] f, const double[::1] w, Py_ssize_t n):
    """m[i, j] = sum_k w_k f_{k-j} conj(f_{k-i}) for 0 <= i, j <= n."""
    cdef Py_ssize_t d = f.shape[0] - 1
    if w.shape[0] < n + d + 1:
        raise ValueError("need n + deg(f) + 1 weights")
    out = np.zeros((n + 1, n + 1), dtype=np.complex128)
    cdef cplx[:, ::1] m = out
    cdef Py_ssize_t i, j, s, l, smax
    cdef cplx acc
    with nogil:
        for j in range(n + 1):
            smax = d if d < j else j
            for s in range(smax + 1):
                acc = 0
                for l in range(d - s + 1):
                    acc = acc + w[l + j] * f[l] * f[l + s].conjugate()
                i = j - s
                m[i, j] = acc
                m[j, i] = acc.conjugate()
            m[j, j] = m[j, j].real
    return out


cdef inline cplx row_dot_conj(const double* x, const double* y, Py_ssize_t k) noexcept nogil:
    """sum_{t<k} x_t conj(y_t) over interleaved (re, im) rows, two partial sums."""
    cdef double r0 = 0.0, i0 = 0.0, r1 = 0.0, i1 = 0.0
    cdef Py_ssize_t t = 0
    while t + 1 < k:
        r0 += x[2 * t] * y[2 * t] + x[2 * t + 1] * y[2 * t + 1]
        i0 += x[2 * t + 1] * y[2 * t] - x[2 * t] * y[2 * t + 1]
        r1 += x[2 * t + 2] * y[2 * t + 2] + x[2 * t + 3] * y[2 * t + 3]
        i1 += x[2 * t + 3] * y[2 * t + 2] - x[2 * t + 2] * y[2 * t + 3]
        t += 2
    if t < k:
        r0 += x[2 * t] * y[2 * t] + x[2 * t + 1] * y[2 * t + 1]
        i0 += x[2 * t + 1] * y[2 * t] - x[2 * t] * y[2 * t + 1]
    return (r0 + r1) + 1j * (i0 + i1)


cdef Py_ssize_t factor_block(const cplx[:, ::1] a, cplx[:, ::1] L) noexcept nogil:
    """Left-looking factorisation of a square block into L; returns failed index or -1."""
    cdef Py_ssize_t n = a.shape[0], ld = L.shape[1]
    cdef Py_ssize_t i, j
    cdef double d
    cdef const double* base
    if n == 0:
        return -1
    base = <const double*> &L[0, 0]
    for j in range(n):
        # rows of L are contiguous, so every inner product streams two rows
        d = a[j, j].real - row_dot_conj(base + 2 * j * ld, base + 2 * j * ld, j).real
        if not (d > 0.0) or not isfinite(d):
            return j
        d = sqrt(d)
        L[j, j] = d
        for i in range(j + 1, n):
            L[i, j] = (a[i, j] - row_dot_conj(base + 2 * i * ld, base + 2 * j * ld, j)) / d
    return -1


cdef void panel_solve(const cplx[:, ::1] Lkk, cplx[:, ::1] X) noexcept nogil:
    """Overwrite each row x of X with the solution of x Lkk^H = x."""
    cdef Py_ssize_t rows = X.shape[0], nb = Lkk.shape[0]
    cdef Py_ssize_t r, m
    cdef const double* lb = <const double*> &Lkk[0, 0]
    cdef double* xr
    for r in range(rows):
        xr = <double*> &X[r, 0]
        for m in range(nb):
            X[r, m] = (X[r, m] - row_dot_conj(xr, lb + 2 * m * nb, m)) / Lkk[m, m].real


BLOCK = 64


def cholesky(const cplx[:, ::1] a):
    """Lower factor L with a = L L^H.  Returns (L, failed_index or -1).

    Small matrices are factored directly.  Larger ones go block by block:
    diagonal blocks and panel solves run here, while the trailing update is a
    single matrix product handed to numpy.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t failed
    out = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, ::1] Lv = out
    if n <= 2 * BLOCK:
        with nogil:
            failed = factor_block(a, Lv)
        return out, failed
    work = np.array(a, dtype=np.complex128)
    for j0 in range(0, n, BLOCK):
        j1 = min(j0 + BLOCK, n)
        Lkk = np.zeros((j1 - j0, j1 - j0), dtype=np.complex128)
        failed = factor_block(np.ascontiguousarray(work[j0:j1, j0:j1]), Lkk)
        out[j0:j1, j0:j1] = Lkk
        if failed >= 0:
            return out, j0 + failed
        if j1 < n:
            panel = np.ascontiguousarray(work[j1:, j0:j1])
            panel_solve(Lkk, panel)
            out[j1:, j0:j1] = panel
            work[j1:, j1:] -= panel @ panel.conj().T
    return out, -1


def forward_solve(const cplx[:, ::1] L, const cplx[::1] b, Py_ssize_t m):
    """Solve L[:m, :m] y = b[:m]."""
    out = np.empty(m, dtype=np.complex128)
    cdef cplx[::1] y = out
    cdef Py_ssize_t i, k
    cdef cplx s
    with nogil:
        for i in range(m):
            s = b[i]
            for k in range(i):
                s = s - L[i, k] * y[k]
            y[i] = s / L[i, i].real
    return out


def backward_solve(const cplx[:, ::1] L, const cplx[::1] y, Py_ssize_t m):
    """Solve L[:m, :m]^H x = y[:m]."""
    out = np.empty(m, dtype=np.complex128)
    cdef cplx[::1] x = out
    cdef Py_ssize_t i, k
    cdef cplx s
    with nogil:
        for i in range(m - 1, -1, -1):
            s = y[i]
            for k in range(i + 1, m):
                s = s - L[k, i].conjugate() * x[k]
            x[i] = s / L[i, i].real
    return out


def aberth(const cplx[::1] a, cplx[::1] z, int max_sweeps):
    """Aberth-Ehrlich iteration, Gauss-Seidel ordering, in place on ``z``.

    ``a`` holds ascending coefficients with a nonzero leading term.  A root
    stops moving once |p(z)| is at the rounding level of the Horner sum.
    Returns (sweeps, converged).
    """
    cdef Py_ssize_t deg = a.shape[0] - 1
    cdef Py_ssize_t i, j, k
    cdef int sweep
    cdef cplx p, dp, den, s, corr, zi
    cdef double scale, az
    cdef bint all_done
    cdef bint converged = False
    frozen_arr = np.zeros(deg, dtype=np.uint8)
    cdef unsigned char[::1] frozen = frozen_arr
    abs_a_arr = np.abs(np.asarray(a))
    cdef double[::1] abs_a = abs_a_arr
    sweep = 0
    with nogil:
        while sweep < max_sweeps:
            sweep += 1
            all_done = True
            for i in range(deg):
                if frozen[i]:
                    continue
                zi = z[i]
                az = cabs_(zi)
                p = a[deg]
                dp = 0
                scale = abs_a[deg]
                for k in range(deg - 1, -1, -1):
                    dp = dp * zi + p
                    p = p * zi + a[k]
                    scale = scale * az + abs_a[k]
                if cabs_(p) <= 4.0 * DBL_EPSILON * scale:
                    frozen[i] = 1
                    continue
                all_done = False
                s = 0
                for j in range(deg):
                    if j != i:
                        s = s + 1.0 / (zi - z[j])
                den = dp - p * s
                if abs2(den) == 0.0:
                    # stationary point: nudge off it and retry next sweep
                    z[i] = zi + 1e-3 * (1.0 + az)
                    continue
                corr = p / den
                z[i] = zi - corr
                if cabs_(corr) <= 2.0 * DBL_EPSILON * cabs_(z[i]):
                    frozen[i] = 1
            if all_done:
                converged = True
                break
        if not converged:
            converged = True
            for i in range(deg):
                if not frozen[i]:
                    converged = False
    return sweep, bool(converged)
