"""Weighted Hardy spaces on the unit disc.

A space is determined by a sequence of positive weights ``w_n = ||z^n||^2``
together with Riesz constants ``c1 <= c2``.  When ``c1 == c2 == 1`` the
normalised monomials are orthonormal and

    ||f||^2 = sum_n w_n |f_n|^2,    <f, g> = sum_n w_n f_n conj(g_n).

Otherwise only the two-sided bounds ``c1 * S <= ||f||^2 <= c2 * S`` are
available and the exact operations raise :class:`NotOrthonormal`.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    InvalidWeights,
    NotOrthonormal,
    OutsideDisc,
    ParseError,
    TailForbidden,
    TailNotConvergent,
)
from .series import CoeffSeries

DEFAULT_MAX_INDEX = 100_000
DEFAULT_TAIL_TOL = 1e-12
DEFAULT_MAX_RATIO = 4.0
TAIL_FIT_POINTS = 10


# -- weight sequences ------------------------------------------------------


def _power_ratio_sup(alpha: float, m: np.ndarray) -> np.ndarray:
    """sup_{k >= m} w_k / w_{k+1} for w_k proportional to (k+1)**alpha."""
    m = np.asarray(m, dtype=float)
    if alpha >= 0:
        return np.ones_like(m)
    # ((k+1)/(k+2))**alpha decreases towards 1, so the sup sits at k = m
    return ((m + 1.0) / (m + 2.0)) ** alpha


@dataclass(frozen=True)
class DirichletAlpha:
    """Dirichlet-type weights ``w_n = (n+1)**alpha``."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise InvalidWeights("alpha must be finite")

    @property
    def limit(self) -> int | None:
        return None

    def values(self, count: int) -> np.ndarray:
        return (np.arange(count, dtype=float) + 1.0) ** self.alpha

    def ratio_sup_from(self, m) -> np.ndarray:
        return _power_ratio_sup(self.alpha, m)


@dataclass(frozen=True)
class PowerExtrapolate:
    """Tail rule ``w_n = scale * (n+1)**alpha`` beyond the end of a table."""

    alpha: float
    scale: float = 1.0


@dataclass(frozen=True)
class Forbidden:
    """Tail rule that makes every access beyond the table an error."""


TailRule = Union[PowerExtrapolate, Forbidden]


@dataclass(frozen=True)
class Table:
    entries: tuple
    tail: TailRule = Forbidden()

    def __post_init__(self):
        v = np.asarray(self.entries, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidWeights("weight table must be a non-empty list")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise InvalidWeights("weights must be positive and finite")

    @classmethod
    def from_values(cls, values, tail: str | TailRule = "forbidden") -> "Table":
        """Build a table; ``tail="power"`` fits a power law to the last entries.

        The exponent is the log-log least-squares slope through the last
        ten entries (fewer if the table is shorter, at least two).
        """
        vals = tuple(float(x) for x in values)
        if isinstance(tail, str):
            if tail == "forbidden":
                tail = Forbidden()
            elif tail == "power":
                tail = fit_power_tail(vals)
            else:
                raise InvalidWeights(f"unknown tail rule {tail!r}")
        return cls(vals, tail)

    @property
    def limit(self) -> int | None:
        return len(self.entries) if isinstance(self.tail, Forbidden) else None

    def values(self, count: int) -> np.ndarray:
        table = np.asarray(self.entries, dtype=float)
        if count <= table.size:
            return table[:count].copy()
        if isinstance(self.tail, Forbidden):
            raise TailForbidden(
                f"weight index {count - 1} is beyond the table of {table.size} entries"
            )
        n = np.arange(table.size, count, dtype=float)
        ext = self.tail.scale * (n + 1.0) ** self.tail.alpha
        return np.concatenate([table, ext])

    def ratio_sup_from(self, m) -> np.ndarray:
        if isinstance(self.tail, Forbidden):
            raise TailForbidden("ratio supremum over an infinite range needs a tail rule")
        m = np.asarray(m, dtype=np.int64)
        size = len(self.entries)
        w = self.values(size + 1)
        r = w[:-1] / w[1:]  # ratios for k = 0 .. size-1 (last one is the junction)
        suffix = np.maximum.accumulate(r[::-1])[::-1]
        tail = _power_ratio_sup(self.tail.alpha, np.maximum(m, size))
        inside = np.where(m < size, suffix[np.minimum(m, size - 1)], 0.0)
        return np.maximum(inside, tail)


WeightSequence = Union[DirichletAlpha, Table]


def fit_power_tail(values, points: int = TAIL_FIT_POINTS) -> PowerExtrapolate:
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise InvalidWeights("a power-law tail needs at least two table entries")
    k = min(points, v.size)
    n = np.arange(v.size - k, v.size, dtype=float)
    slope, intercept = np.polyfit(np.log(n + 1.0), np.log(v[-k:]), 1)
    return PowerExtrapolate(alpha=float(slope), scale=float(math.exp(intercept)))


def check_ratios(weights: WeightSequence, count: int, max_ratio: float = DEFAULT_MAX_RATIO):
    """Check ``1/R <= w_{n+1}/w_n <= R`` over the first ``count`` weights.

    Returns the array of consecutive ratios; raises :class:`InvalidWeights`
    if any falls outside the band.
    """
    w = weights.values(count)
    r = w[1:] / w[:-1]
    bad = np.flatnonzero((r > max_ratio) | (r < 1.0 / max_ratio))
    if bad.size:
        k = int(bad[0])
        raise InvalidWeights(
            f"weight ratio w[{k + 1}]/w[{k}] = {r[k]:g} is outside [1/{max_ratio:g}, {max_ratio:g}]"
        )
    return r


def load_table_csv(path, tail: str = "forbidden", max_ratio: float = DEFAULT_MAX_RATIO) -> Table:
    """Load weights from a file holding one positive decimal per line."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidWeights(f"{path}: {exc.strerror}") from None
    values = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        try:
            x = float(s)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: not a number: {s!r}") from None
        if not math.isfinite(x) or x <= 0:
            raise InvalidWeights(f"{path}:{lineno}: weight must be positive and finite, got {s}")
        values.append(x)
    if not values:
        raise InvalidWeights(f"{path}: empty weight table")
    table = Table.from_values(values, tail)
    check_ratios(table, len(values), max_ratio)
    return table


# -- space model -----------------------------------------------------------


def _default_max_index() -> int:
    env = os.environ.get("OPTAPPROX_MAX_INDEX")
    if env is None:
        return DEFAULT_MAX_INDEX
    try:
        value = int(env)
    except ValueError:
        raise InvalidWeights(f"OPTAPPROX_MAX_INDEX must be an integer, got {env!r}") from None
    if value < 1:
        raise InvalidWeights("OPTAPPROX_MAX_INDEX must be positive")
    return value


@dataclass(frozen=True)
class TruncationPolicy:
    max_index: int = field(default_factory=_default_max_index)
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        if self.max_index < 1 or not self.tail_tol > 0:
            raise InvalidWeights("truncation policy needs max_index >= 1 and tail_tol > 0")


@dataclass(frozen=True)
class SpaceModel:
    weights: WeightSequence
    c1: float = 1.0
    c2: float = 1.0
    truncation: TruncationPolicy = field(default_factory=TruncationPolicy)

    def __post_init__(self):
        if not (0 < self.c1 <= self.c2 < math.inf):
            raise InvalidWeights(f"Riesz constants must satisfy 0 < c1 <= c2, got {self.c1}, {self.c2}")

    @classmethod
    def dirichlet(cls, alpha: float, **kw) -> "SpaceModel":
        return cls(DirichletAlpha(float(alpha)), **kw)

    @classmethod
    def hardy(cls) -> "SpaceModel":
        return cls.dirichlet(0.0)

    @classmethod
    def bergman(cls) -> "SpaceModel":
        return cls.dirichlet(-1.0)

    @property
    def orthonormal(self) -> bool:
        return self.c1 == 1.0 and self.c2 == 1.0

    def require_orthonormal(self):
        if not self.orthonormal:
            raise NotOrthonormal(
                f"exact inner products need c1 = c2 = 1 (have {self.c1}, {self.c2}); use norm_bounds"
            )


def weight(space: SpaceModel, n: int) -> float:
    if n < 0:
        raise IndexError("weight index must be nonnegative")
    return float(space.weights.values(n + 1)[n])


def weights(space: SpaceModel, count: int) -> np.ndarray:
    """w_0, ..., w_{count-1}."""
    return space.weights.values(count)


def _weighted_square_sum(space: SpaceModel, f: CoeffSeries) -> float:
    if f.is_zero():
        return 0.0
    w = space.weights.values(len(f))
    c = f.coeffs
    return float(np.dot(w, c.real**2 + c.imag**2))


def norm_squared(space: SpaceModel, f: CoeffSeries) -> float:
    space.require_orthonormal()
    return _weighted_square_sum(space, f)


def norm_bounds(space: SpaceModel, f: CoeffSeries) -> tuple[float, float]:
    """Two-sided bounds on ||f||^2 valid for any Riesz constants."""
    s = _weighted_square_sum(space, f)
    return space.c1 * s, space.c2 * s


def inner_product(space: SpaceModel, f: CoeffSeries, g: CoeffSeries) -> complex:
    space.require_orthonormal()
    if f == g:
        # same value as norm_squared, and exactly real
        return complex(_weighted_square_sum(space, f))
    m = min(len(f), len(g))
    if m == 0:
        return 0j
    w = space.weights.values(m)
    return complex(np.sum(w * f.coeffs[:m] * np.conj(g.coeffs[:m])))


def kernel_series(space: SpaceModel, lam: complex, n_terms: int) -> CoeffSeries:
    """Truncated reproducing kernel at ``lam``: coefficients conj(lam)^k / w_k."""
    w = space.weights.values(n_terms)
    return CoeffSeries(np.conj(complex(lam)) ** np.arange(n_terms) / w)


def kernel_truncation_index(space: SpaceModel, t: float) -> tuple[int, float]:
    """Smallest N whose geometric tail bound for sum_{k>N} t^k / w_k is below tail_tol.

    The bound is term_{N+1} / (1 - rho) with rho = t * sup_{k>N} w_k / w_{k+1}.
    Returns ``(N, bound)``.
    """
    pol = space.truncation
    if t == 0.0:
        return 0, 0.0
    try:
        size = 64
        while True:
            size = min(size, pol.max_index + 1)
            ks = np.arange(size - 1)
            w = space.weights.values(size)
            logt = math.log(t)
            terms = np.exp(np.arange(size) * logt) / w
            rho = t * space.weights.ratio_sup_from(ks + 1)
            with np.errstate(divide="ignore"):
                bound = np.where(rho < 1.0, terms[1:] / (1.0 - rho), np.inf)
            ok = np.flatnonzero(bound < pol.tail_tol)
            if ok.size:
                n = int(ok[0])
                return n, float(bound[n])
            if size > pol.max_index:
                break
            size *= 2
    except TailForbidden as exc:
        raise TailNotConvergent(f"kernel tail cannot be bounded: {exc}") from None
    raise TailNotConvergent(
        f"kernel tail bound not below {pol.tail_tol:g} within max_index={pol.max_index}"
    )


def kernel_value(space: SpaceModel, lam: complex, z: complex) -> complex:
    """k_lam(z) = sum_k conj(lam)^k z^k / w_k, truncated once the tail is below tail_tol."""
    lam, z = complex(lam), complex(z)
    if abs(lam) >= 1 or abs(z) >= 1:
        raise OutsideDisc(f"kernel needs |lambda| < 1 and |z| < 1 (got {abs(lam)!r}, {abs(z)!r})")
    n, _ = kernel_truncation_index(space, abs(lam) * abs(z))
    w = space.weights.values(n + 1)
    q = np.conj(lam) * z
    return complex(np.sum(q ** np.arange(n + 1) / w))


def shift_norm_bounds(space: SpaceModel, k: int, horizon: int) -> tuple[float, float]:
    """Bounds on ||S^k||^2 from sup_{n <= horizon} w_{n+k} / w_n."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if horizon < k:
        raise ValueError("horizon must be at least k")
    w = space.weights.values(horizon + k + 1)
    s = float(np.max(w[k:] / w[: horizon + 1]))
    return space.c1 / space.c2 * s, space.c2 / space.c1 * s


def spectral_radius_estimate(space: SpaceModel, k: int, horizon: int) -> tuple[float, float]:
    """k-th roots of the shift-norm bounds, i.e. bounds on ||S^k||^(1/k)."""
    lo, hi = shift_norm_bounds(space, k, horizon)
    return lo ** (0.5 / k), hi ** (0.5 / k)


def shift(f: CoeffSeries) -> CoeffSeries:
    """Forward shift f -> z f."""
    if f.is_zero():
        return f
    return CoeffSeries(np.concatenate([[0.0], f.coeffs]))


def backward_shift(space: SpaceModel, f: CoeffSeries) -> CoeffSeries:
    """Adjoint of the shift in the weighted norm: coefficient k is (w_{k+1}/w_k) f_{k+1}."""
    if len(f) <= 1:
        return CoeffSeries()
    w = space.weights.values(len(f))
    return CoeffSeries(w[1:] / w[:-1] * f.coeffs[1:])
