"""Pure-Python/numpy versions of the compiled kernels.

Same signatures and algorithms as :mod:`optapprox._ckernels`; used when the
extension is unavailable or ``OPTAPPROX_BACKEND=python`` is set.
"""

import numpy as np

_EPS = np.finfo(float).eps


def gram_matrix(f, w, n):
    f = np.asarray(f, dtype=np.complex128)
    w = np.asarray(w, dtype=float)
    d = f.size - 1
    if w.size < n + d + 1:
        raise ValueError("need n + deg(f) + 1 weights")
    m = np.zeros((n + 1, n + 1), dtype=np.complex128)
    j = np.arange(n + 1)
    for s in range(min(d, n) + 1):
        cols = j[s:]
        acc = np.zeros(cols.size, dtype=np.complex128)
        for l in range(d - s + 1):
            acc += w[l + cols] * (f[l] * np.conj(f[l + s]))
        m[cols - s, cols] = acc
        m[cols, cols - s] = np.conj(acc)
    m[j, j] = m[j, j].real
    return m


def cholesky(a):
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        row = L[j, :j]
        d = a[j, j].real - float(np.sum(row.real**2 + row.imag**2))
        if not (d > 0.0) or not np.isfinite(d):
            return L, j
        d = np.sqrt(d)
        L[j, j] = d
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ np.conj(row)) / d
    return L, -1


def forward_solve(L, b, m):
    y = np.empty(m, dtype=np.complex128)
    for i in range(m):
        y[i] = (b[i] - L[i, :i] @ y[:i]) / L[i, i].real
    return y


def backward_solve(L, y, m):
    x = np.empty(m, dtype=np.complex128)
    for i in range(m - 1, -1, -1):
        x[i] = (y[i] - np.conj(L[i + 1 : m, i]) @ x[i + 1 : m]) / L[i, i].real
    return x


def aberth(a, z, max_sweeps):
    a = [complex(c) for c in a]
    abs_a = [abs(c) for c in a]
    deg = len(a) - 1
    frozen = [False] * deg
    zs = [complex(v) for v in z]
    sweep = 0
    converged = False
    while sweep < max_sweeps:
        sweep += 1
        all_done = True
        for i in range(deg):
            if frozen[i]:
                continue
            zi = zs[i]
            az = abs(zi)
            p = a[deg]
            dp = 0j
            scale = abs_a[deg]
            for k in range(deg - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + a[k]
                scale = scale * az + abs_a[k]
            if abs(p) <= 4.0 * _EPS * scale:
                frozen[i] = True
                continue
            all_done = False
            s = 0j
            for j in range(deg):
                if j != i:
                    s += 1.0 / (zi - zs[j])
            den = dp - p * s
            if den == 0:
                # stationary point: nudge off it and retry next sweep
                zs[i] = zi + 1e-3 * (1.0 + az)
                continue
            corr = p / den
            zs[i] = zi - corr
            if abs(corr) <= 2.0 * _EPS * abs(zs[i]):
                frozen[i] = True
        if all_done:
            converged = True
            break
    else:
        converged = all(frozen)
    z[:] = zs
    return sweep, converged
