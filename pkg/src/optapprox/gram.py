"""Gram systems for optimal approximants.

For a nonzero ``f`` and degree bound ``n`` the optimal approximant
``p = sum a_j z^j`` solves ``M a = b`` with

    m_ij = <z^j f, z^i f>,    b_i = <1, z^i f> = w_0 conj(f(0)) [i == 0]

in an orthonormal weighted space.  ``M`` does not depend on ``n`` beyond its
size, so the system for every smaller degree is a leading principal block and
one Cholesky factorisation serves a whole sweep ``n = 0 .. n_max``.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Callable, Iterator, Union

import numpy as np

from . import space as sp
from ._backend import kernels
from .errors import (
    IllConditionedWarning,
    NotPositiveDefinite,
    TailNotConvergent,
    ZeroFunction,
)
from .series import CoeffSeries

ILL_CONDITIONED = 1e12
RESIDUAL_RTOL = 1e-9
MAX_REFINEMENT_STEPS = 4

# A non-polynomial function is given by a callable returning its first
# ``count`` Taylor coefficients.
TaylorCoefficients = Callable[[int], np.ndarray]
FunctionLike = Union[CoeffSeries, TaylorCoefficients]


def truncate_function(space: sp.SpaceModel, coefficients: TaylorCoefficients) -> CoeffSeries:
    """Cut a Taylor series where the weighted tail drops below ``tail_tol**2``.

    Coefficients are requested in doubling blocks; the computed tail must
    itself be negligible before the cut is trusted.
    """
    pol = space.truncation
    tol2 = pol.tail_tol**2
    count = 32
    while True:
        count = min(count, pol.max_index + 1)
        c = np.asarray(coefficients(count), dtype=np.complex128)[:count]
        terms = space.weights.values(count) * np.abs(c) ** 2
        suffix = np.cumsum(terms[::-1])[::-1]  # suffix[k] = sum_{j >= k}
        if suffix[count // 2] < 1e-3 * tol2:
            beyond = np.append(suffix[1:], 0.0)  # sum_{j > k}
            n_f = int(np.flatnonzero(beyond < tol2)[0])
            return CoeffSeries(c[: n_f + 1])
        if count > pol.max_index:
            raise TailNotConvergent(
                f"Taylor tail not below {pol.tail_tol:g} within max_index={pol.max_index}"
            )
        count *= 2


def as_series(space: sp.SpaceModel, f: FunctionLike) -> CoeffSeries:
    if isinstance(f, CoeffSeries):
        return f
    if callable(f):
        return truncate_function(space, f)
    return CoeffSeries(f)


@dataclass(frozen=True, eq=False)
class GramSystem:
    """Matrix, right-hand side and Cholesky factor for one degree bound.

    ``factor`` may be larger than the system (systems produced by
    :meth:`leading` share their parent's factor); only its leading
    ``(n+1) x (n+1)`` block is meaningful.
    """

    n: int
    matrix: np.ndarray
    rhs: np.ndarray
    cond_estimate: float
    factor: np.ndarray
    failed_pivot: int
    f: CoeffSeries
    truncation_degree: int

    @property
    def positive_definite(self) -> bool:
        return self.failed_pivot < 0

    def leading(self, m: int) -> "GramSystem":
        """The system for degree bound ``m <= n`` (a leading principal block)."""
        if not 0 <= m <= self.n:
            raise ValueError(f"degree {m} outside 0..{self.n}")
        k = m + 1
        failed = self.failed_pivot if 0 <= self.failed_pivot < k else -1
        return GramSystem(
            n=m,
            matrix=self.matrix[:k, :k],
            rhs=self.rhs[:k],
            cond_estimate=_pivot_ratio(self.factor, k) if failed < 0 else np.inf,
            factor=self.factor,
            failed_pivot=failed,
            f=self.f,
            truncation_degree=self.truncation_degree,
        )


def _pivot_ratio(L: np.ndarray, k: int) -> float:
    d = np.abs(np.diag(L)[:k])
    return float((d.max() / d.min()) ** 2)


def assemble(space: sp.SpaceModel, f: FunctionLike, n: int) -> GramSystem:
    space.require_orthonormal()
    if n < 0:
        raise ValueError("degree bound must be nonnegative")
    f = as_series(space, f)
    if f.is_zero():
        raise ZeroFunction("the Gram system of f = 0 is singular")
    d = f.degree
    w = space.weights.values(n + d + 1)
    m = kernels.gram_matrix(np.ascontiguousarray(f.coeffs), w, n)
    b = np.zeros(n + 1, dtype=np.complex128)
    b[0] = w[0] * np.conj(f.coeffs[0])
    L, failed = kernels.cholesky(m)
    cond = _pivot_ratio(L, n + 1) if failed < 0 else np.inf
    return GramSystem(n, m, b, cond, L, int(failed), f, d)


def from_matrix(matrix, rhs, f: CoeffSeries | None = None) -> GramSystem:
    """Wrap an explicit Hermitian matrix and right-hand side as a system."""
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    b = np.ascontiguousarray(rhs, dtype=np.complex128).reshape(-1)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != b.size or b.size == 0:
        raise ValueError("matrix must be square and match the right-hand side")
    L, failed = kernels.cholesky(m)
    cond = _pivot_ratio(L, b.size) if failed < 0 else np.inf
    f = f if f is not None else CoeffSeries()
    return GramSystem(b.size - 1, m, b, cond, L, int(failed), f, f.degree)


def _numerical_rank(m: np.ndarray, rtol: float = 1e-13) -> int:
    """Rank from a diagonally pivoted (semidefinite) Cholesky."""
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    diag = a.diagonal().real.copy()
    scale = max(diag.max(initial=0.0), np.finfo(float).tiny)
    perm = np.arange(n)
    L = np.zeros_like(a)
    for k in range(n):
        j = k + int(np.argmax(diag[perm[k:]]))
        perm[[k, j]] = perm[[j, k]]
        p = perm[k]
        if diag[p] <= rtol * scale:
            return k
        L[p, k] = np.sqrt(diag[p])
        rest = perm[k + 1 :]
        L[rest, k] = (a[rest, p] - L[rest, :k] @ np.conj(L[p, :k])) / L[p, k]
        diag[rest] -= np.abs(L[rest, k]) ** 2
    return n


def _check_factor(system: GramSystem):
    if system.failed_pivot >= 0:
        rank = _numerical_rank(system.matrix)
        raise NotPositiveDefinite(
            f"Cholesky pivot {system.failed_pivot} is not positive "
            f"(numerical rank {rank} of {system.n + 1}); f may vanish or be badly truncated",
            pivot_index=system.failed_pivot,
            numerical_rank=rank,
        )
    if system.cond_estimate > ILL_CONDITIONED:
        warnings.warn(
            f"Gram system of size {system.n + 1} is ill-conditioned "
            f"(pivot-ratio estimate {system.cond_estimate:.3g})",
            IllConditionedWarning,
            stacklevel=3,
        )


def _refine(system: GramSystem, x: np.ndarray) -> tuple[np.ndarray, float, int]:
    k = system.n + 1
    L, m, b = system.factor, system.matrix, system.rhs
    bnorm = float(np.max(np.abs(b)))
    steps = 0
    while True:
        r = b - m @ x
        res = float(np.max(np.abs(r)))
        if steps >= 1 and (res <= RESIDUAL_RTOL * bnorm or steps >= MAX_REFINEMENT_STEPS):
            return x, res, steps
        x = x + kernels.backward_solve(L, kernels.forward_solve(L, r, k), k)
        steps += 1


@dataclass(frozen=True)
class Solution:
    a: np.ndarray
    residual: float
    refinement_steps: int
    cond_estimate: float

    @property
    def ill_conditioned(self) -> bool:
        return self.cond_estimate > ILL_CONDITIONED


def solve_detailed(system: GramSystem) -> Solution:
    _check_factor(system)
    k = system.n + 1
    L = system.factor
    x = kernels.backward_solve(L, kernels.forward_solve(L, system.rhs, k), k)
    x, res, steps = _refine(system, x)
    return Solution(x, res, steps, system.cond_estimate)


def solve(system: GramSystem) -> np.ndarray:
    """Coefficients of the optimal approximant, after iterative refinement."""
    return solve_detailed(system).a


def solve_sweep(system: GramSystem) -> Iterator[tuple[int, Solution]]:
    """Solutions for every degree bound 0..n from the one factorisation."""
    L = system.factor
    # forward substitution is prefix-consistent, so one pass covers all blocks
    good = system.n + 1 if system.positive_definite else system.failed_pivot
    y = kernels.forward_solve(L, system.rhs, good)
    for m in range(system.n + 1):
        sub = system.leading(m)
        _check_factor(sub)
        x = kernels.backward_solve(L, y, m + 1)
        x, res, steps = _refine(sub, x)
        yield m, Solution(x, res, steps, sub.cond_estimate)


def orthogonality_residuals(space: sp.SpaceModel, f: CoeffSeries, a) -> np.ndarray:
    """<p f - 1, z^i f> for i = 0..len(a)-1, computed from the product directly."""
    p = CoeffSeries(a)
    e = p * f - 1
    k = len(a)
    size = max(len(e), len(f) + k)
    w = space.weights.values(size)
    ec = e.padded(size)
    fc = f.coeffs
    out = np.empty(k, dtype=np.complex128)
    for i in range(k):
        seg = slice(i, i + len(fc))
        out[i] = np.sum(w[seg] * ec[seg] * np.conj(fc))
    return out


def dump_json(system: GramSystem, a=None) -> str:
    """Debug dump of M, b, a and the residual M a - b (row-major [re, im] pairs)."""

    def pairs(v):
        return [[float(z.real), float(z.imag)] for z in np.ravel(v)]

    out = {
        "n": system.n,
        "size": system.n + 1,
        "matrix": pairs(system.matrix),
        "rhs": pairs(system.rhs),
        "cond_estimate": system.cond_estimate,
    }
    if a is not None:
        a = np.asarray(a, dtype=np.complex128)
        out["a"] = pairs(a)
        out["residual"] = pairs(system.matrix @ a - system.rhs)
    return json.dumps(out)
