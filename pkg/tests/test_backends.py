import os
import subprocess
import sys

import numpy as np
import pytest

from optapprox import _pykernels

ck = pytest.importorskip("optapprox._ckernels", reason="compiled kernels not built")


def random_f(rng, d):
    return rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)


@pytest.mark.parametrize("seed", range(5))
def test_gram_matrix_agrees(seed):
    rng = np.random.default_rng(seed)
    f = random_f(rng, int(rng.integers(0, 9)))
    n = int(rng.integers(0, 30))
    w = (np.arange(n + f.size) + 1.0) ** rng.uniform(-1, 2)
    np.testing.assert_allclose(ck.gram_matrix(f, w, n), _pykernels.gram_matrix(f, w, n), rtol=1e-14, atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_cholesky_and_solves_agree(seed):
    rng = np.random.default_rng(seed)
    k = 25
    b = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    a = b @ b.conj().T + k * np.eye(k)
    L1, f1 = ck.cholesky(a)
    L2, f2 = _pykernels.cholesky(a)
    assert f1 == f2 == -1
    np.testing.assert_allclose(L1, L2, rtol=1e-12, atol=1e-13)
    rhs = rng.normal(size=k) + 0j
    for m in (1, 7, k):
        y1, y2 = ck.forward_solve(L1, rhs, m), _pykernels.forward_solve(L2, rhs, m)
        np.testing.assert_allclose(y1, y2, rtol=1e-12)
        np.testing.assert_allclose(ck.backward_solve(L1, y1, m), _pykernels.backward_solve(L2, y2, m), rtol=1e-11)


def test_cholesky_failure_index_agrees():
    a = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=complex)
    assert ck.cholesky(a)[1] == _pykernels.cholesky(a)[1] == 1


@pytest.mark.parametrize("seed", range(5))
def test_aberth_agrees(seed):
    rng = np.random.default_rng(seed)
    a = random_f(rng, 10)
    z0 = 0.9 * np.exp(2j * np.pi * (np.arange(10) + 0.4) / 10)
    z1, z2 = z0.copy(), z0.copy()
    s1, c1 = ck.aberth(a, z1, 500)
    s2, c2 = _pykernels.aberth(a, z2, 500)
    assert c1 and c2
    np.testing.assert_allclose(np.sort_complex(z1), np.sort_complex(z2), atol=1e-10)


def test_backend_env_selection():
    code = "import optapprox; print(optapprox.BACKEND)"
    for choice, expected in (("python", "python"), ("cython", "cython"), ("auto", "cython")):
        r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                           env=dict(os.environ, OPTAPPROX_BACKEND=choice))
        assert r.stdout.strip() == expected
    r = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                       env=dict(os.environ, OPTAPPROX_BACKEND="fortran"))
    assert r.returncode != 0
