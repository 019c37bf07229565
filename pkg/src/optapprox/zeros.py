"""Polynomial roots and annulus bounds for zeros of approximants."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import space as sp
from ._backend import kernels
from .approximants import closed_form_one_minus_z, ONE_MINUS_Z
from .errors import (
    DegreeZero,
    NoConvergence,
    NotPositiveCoefficients,
    RootInOpenDisc,
    ValidationError,
)
from .series import CoeffSeries, evaluate, multiply

DEFAULT_SEED = 20140612
MAX_SWEEPS = 500
CLUSTER_TOL = 1e-7
MEMBERSHIP_TOL = 1e-8
UNIMODULAR_BAND = 1e-8


@dataclass(frozen=True)
class Annulus:
    inner: float
    outer: float

    @property
    def degenerate(self) -> bool:
        return math.isclose(self.inner, self.outer, rel_tol=1e-12, abs_tol=0.0)

    @property
    def empty(self) -> bool:
        return self.inner > self.outer

    def contains(self, z, tol: float = MEMBERSHIP_TOL):
        r = np.abs(np.asarray(z))
        inside = (r >= self.inner - tol) & (r <= self.outer + tol)
        return bool(inside) if inside.ndim == 0 else inside

    def to_dict(self) -> dict:
        return {"inner": self.inner, "outer": self.outer, "degenerate": self.degenerate}


@dataclass(frozen=True)
class RootSet:
    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residual_max: float
    scaled_residual_max: float
    sweeps: int
    converged: bool

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def with_multiplicity(self) -> list[complex]:
        return [r for r, m in zip(self.roots, self.multiplicities) for _ in range(m)]

    def to_list(self) -> list[dict]:
        return [
            {"re": float(r.real), "im": float(r.imag), "multiplicity": int(m)}
            for r, m in zip(self.roots, self.multiplicities)
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_list())


def _initial_guesses(a: np.ndarray, seed: int) -> np.ndarray:
    d = a.size - 1
    radius = (abs(a[0]) / abs(a[-1])) ** (1.0 / d)
    rng = np.random.default_rng(seed)
    jitter = 0.4 + 0.05 * rng.random(d)
    angles = 2.0 * np.pi * (np.arange(d) + jitter) / d
    return radius * np.exp(1j * angles)


def _polish(a: np.ndarray, z: complex, steps: int = 3) -> complex:
    """A few Newton steps, kept only while |p| decreases."""
    dcoef = a[1:] * np.arange(1, a.size)
    best, best_val = z, abs(np.polyval(a[::-1], z))
    for _ in range(steps):
        dp = np.polyval(dcoef[::-1], best)
        if dp == 0 or best_val == 0:
            break
        cand = best - np.polyval(a[::-1], best) / dp
        val = abs(np.polyval(a[::-1], cand))
        if not val < best_val:
            break
        best, best_val = cand, val
    return complex(best)


def _cluster(z: list[complex], tol: float) -> tuple[list[complex], list[int]]:
    """Single-linkage grouping of points closer than ``tol``."""
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(z[i])
    roots = [complex(np.mean(g)) for g in groups.values()]
    mult = [len(g) for g in groups.values()]
    order = sorted(range(len(roots)), key=lambda k: (abs(roots[k]), np.angle(roots[k])))
    return [roots[k] for k in order], [mult[k] for k in order]


def find_roots(p: CoeffSeries, seed: int = DEFAULT_SEED, max_sweeps: int = MAX_SWEEPS,
               strict: bool = False) -> RootSet:
    """All complex roots by Aberth-Ehrlich iteration plus Newton polishing.

    Roots closer than 1e-7 are merged and reported with their multiplicity.
    Without ``strict`` a run that exhausts ``max_sweeps`` returns the best
    iterate with ``converged=False``; with it, :class:`NoConvergence` is raised.
    """
    if p.degree < 1:
        raise DegreeZero("a constant polynomial has no roots to find")
    a = p.coeffs
    low = int(np.flatnonzero(a)[0])
    a = np.ascontiguousarray(a[low:])
    found: list[complex] = [0j] * low
    sweeps, converged = 0, True
    d = a.size - 1
    if d == 1:
        found.append(complex(-a[0] / a[1]))
    elif d > 1:
        z = _initial_guesses(a, seed)
        sweeps, converged = kernels.aberth(a, z, max_sweeps)
        found.extend(_polish(a, complex(r)) for r in z)
    if strict and not converged:
        raise NoConvergence(f"Aberth iteration did not converge in {max_sweeps} sweeps")
    roots, mult = _cluster(found, CLUSTER_TOL)
    r = np.array(roots)
    vals = np.abs(evaluate(p, r))
    scale = np.abs(evaluate(CoeffSeries(np.abs(p.coeffs)), np.abs(r))).real
    scale = np.maximum(scale, np.finfo(float).tiny)
    return RootSet(
        roots=tuple(roots),
        multiplicities=tuple(mult),
        residual_max=float(vals.max()),
        scaled_residual_max=float((vals / scale).max()),
        sweeps=int(sweeps),
        converged=bool(converged),
    )


def enestrom_annulus(p: CoeffSeries) -> Annulus:
    """[min a_k/a_{k+1}, max a_k/a_{k+1}] for a polynomial with positive coefficients."""
    if p.degree < 1:
        raise DegreeZero("the annulus bound needs degree >= 1")
    c = p.coeffs
    if np.any(np.abs(c.imag) >= 1e-14) or np.any(c.real <= 0):
        raise NotPositiveCoefficients("all coefficients must be strictly positive reals")
    r = c.real[:-1] / c.real[1:]
    return Annulus(float(r.min()), float(r.max()))


def pstar_region(space: sp.SpaceModel, n: int) -> Annulus:
    """Annulus containing the zeros of the optimal approximant to 1/(1-z).

    With t_k = w_{k+1} sum_{j=k+2}^{n+1} 1/w_j (0 <= k < n) the zeros satisfy
    min t <= 1/(|z| - 1) <= max t.
    """
    if n < 1:
        raise ValidationError("the approximant has zeros only for n >= 1")
    space.require_orthonormal()
    w = space.weights.values(n + 2)
    inv = 1.0 / w
    suffix = np.cumsum(inv[::-1])[::-1]  # suffix[j] = sum_{i >= j} 1/w_i
    k = np.arange(n)
    t = w[k + 1] * suffix[k + 2]
    return Annulus(1.0 + 1.0 / float(t.max()), 1.0 + 1.0 / float(t.min()))


def residual_zero_region(space: sp.SpaceModel, n: int) -> Annulus:
    """Annulus containing the zeros of p_n* (1 - z) - 1.

    That polynomial has degree n+1 with coefficients proportional to
    -1/w_k, so the consecutive ratios w_{k+1}/w_k run over 0 <= k <= n.
    """
    if n < 0:
        raise ValidationError("n must be nonnegative")
    space.require_orthonormal()
    w = space.weights.values(n + 2)
    r = w[1:] / w[:-1]
    return Annulus(float(r.min()), float(r.max()))


def residual_polynomial(space: sp.SpaceModel, n: int) -> CoeffSeries:
    """p_n* (1 - z) - 1 for the closed-form approximant."""
    p = closed_form_one_minus_z(space, n).p_star
    return multiply(p, ONE_MINUS_Z) - 1


def factor_boundary_zeros(f: CoeffSeries, seed: int = DEFAULT_SEED) -> tuple[CoeffSeries, list[complex]]:
    """Split f = g * prod (1 - conj(lam_k) z) with |lam_k| = 1 and g zero-free on the closed disc.

    Raises :class:`RootInOpenDisc` if f vanishes inside the disc.
    """
    if f.degree < 1:
        return f, []
    rs = find_roots(f, seed=seed)
    boundary: list[complex] = []
    for r, m in zip(rs.roots, rs.multiplicities):
        mod = abs(r)
        if mod < 1.0 - UNIMODULAR_BAND:
            raise RootInOpenDisc(f"f has a zero at {r!r} inside the unit disc")
        if abs(mod - 1.0) <= UNIMODULAR_BAND:
            lam = np.conj(1.0 / r)
            lam = lam / abs(lam)
            # the factor 1 - conj(lam) z vanishes at z = 1/conj(lam) = lam
            boundary.extend([complex(lam)] * m)
    g = f.coeffs.copy()
    for lam in boundary:
        g = _deflate(g, np.conj(lam))
    return CoeffSeries(g), boundary


def _deflate(c: np.ndarray, a: complex) -> np.ndarray:
    """Divide by (1 - a z): g_0 = c_0, g_k = c_k + a g_{k-1}."""
    d = c.size - 1
    g = np.empty(d, dtype=np.complex128)
    acc = 0j
    for k in range(d):
        acc = c[k] + a * acc
        g[k] = acc
    return g
