"""Complex polynomials and truncated power series.

A :class:`CoeffSeries` stores Taylor coefficients in ascending order, so that
``coeffs[k]`` is the coefficient of ``z**k``.  Values are immutable; every
operation returns a new series.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import NotUnimodular, ParseError, ZeroAtOrigin

# Only true zeros are stripped by canonicalisation.
CANONICAL_ZERO = 1e-300
UNIMODULAR_TOL = 1e-12


class CoeffSeries:
    """Finite complex coefficient vector representing a polynomial."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray = ()):
        c = np.array(coeffs, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(np.abs(c) >= CANONICAL_ZERO)
        c = c[: nz[-1] + 1].copy() if nz.size else np.zeros(0, np.complex128)
        c.setflags(write=False)
        self._c = c

    @classmethod
    def monomial(cls, k: int, scale: complex = 1.0) -> "CoeffSeries":
        c = np.zeros(k + 1, np.complex128)
        c[k] = scale
        return cls(c)

    @classmethod
    def one(cls) -> "CoeffSeries":
        return cls([1.0])

    @classmethod
    def zero(cls) -> "CoeffSeries":
        return cls()

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient; -1 for the zero series."""
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    def padded(self, size: int) -> np.ndarray:
        """Coefficients zero-padded (or cut) to exactly ``size`` entries."""
        out = np.zeros(size, np.complex128)
        m = min(size, self._c.size)
        out[:m] = self._c[:m]
        return out

    def __getitem__(self, k: int) -> complex:
        if k < 0:
            raise IndexError(k)
        return complex(self._c[k]) if k < self._c.size else 0j

    def __len__(self) -> int:
        return self._c.size

    def __iter__(self):
        return iter(self._c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoeffSeries):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self) -> str:
        return f"CoeffSeries({self._c.tolist()!r})"

    def __add__(self, other: "CoeffSeries | complex") -> "CoeffSeries":
        other = _as_series(other)
        n = max(len(self), len(other))
        return CoeffSeries(self.padded(n) + other.padded(n))

    __radd__ = __add__

    def __neg__(self) -> "CoeffSeries":
        return CoeffSeries(-self._c)

    def __sub__(self, other: "CoeffSeries | complex") -> "CoeffSeries":
        return self + (-_as_series(other))

    def __rsub__(self, other: "CoeffSeries | complex") -> "CoeffSeries":
        return _as_series(other) - self

    def __mul__(self, other: "CoeffSeries | complex") -> "CoeffSeries":
        if isinstance(other, CoeffSeries):
            return multiply(self, other)
        return CoeffSeries(self._c * complex(other))

    __rmul__ = __mul__

    def __call__(self, z):
        return evaluate(self, z)


def _as_series(x) -> CoeffSeries:
    if isinstance(x, CoeffSeries):
        return x
    return CoeffSeries([x])


def trim(f: CoeffSeries, tol: float) -> CoeffSeries:
    """Drop trailing coefficients with modulus below ``tol``.

    Kept apart from canonicalisation so degree changes are always explicit.
    """
    c = f.coeffs
    keep = np.flatnonzero(np.abs(c) >= tol)
    return CoeffSeries(c[: keep[-1] + 1] if keep.size else ())


def multiply(f: CoeffSeries, g: CoeffSeries) -> CoeffSeries:
    if f.is_zero() or g.is_zero():
        return CoeffSeries()
    return CoeffSeries(np.convolve(f.coeffs, g.coeffs))


def reciprocal_taylor(f: CoeffSeries, n_terms: int) -> CoeffSeries:
    """First ``n_terms`` Taylor coefficients of ``1/f``.

    Uses the triangular recursion ``h_k = -(sum_{j=1}^k f_j h_{k-j}) / f_0``.
    The result keeps exactly ``n_terms`` slots before canonicalisation, so
    callers that need a fixed length should use :meth:`CoeffSeries.padded`.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be positive")
    f0 = f[0]
    if f0 == 0:
        raise ZeroAtOrigin("f(0) = 0, so 1/f has no Taylor expansion at the origin")
    a = f.padded(n_terms)
    h = np.zeros(n_terms, np.complex128)
    h[0] = 1.0 / f0
    d = min(f.degree, n_terms - 1)
    for k in range(1, n_terms):
        m = min(k, d)
        h[k] = -np.dot(a[1 : m + 1], h[k - m : k][::-1]) / f0
    return CoeffSeries(h)


def rotate(f: CoeffSeries, lam: complex) -> CoeffSeries:
    """Return ``z -> f(lam z)`` for unimodular ``lam``."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > UNIMODULAR_TOL:
        raise NotUnimodular(f"|lambda| = {abs(lam)!r} is not 1")
    if f.is_zero():
        return f
    powers = lam ** np.arange(len(f))
    return CoeffSeries(f.coeffs * powers)


def wiener_norm(f: CoeffSeries) -> float:
    """Norm of the analytic Wiener algebra: the sum of coefficient moduli."""
    return float(np.sum(np.abs(f.coeffs)))


def evaluate(f: CoeffSeries, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z, dtype=np.complex128)
    acc = np.zeros_like(z)
    for c in f.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def from_roots(roots: Sequence[complex], lead: complex = 1.0) -> CoeffSeries:
    """Expand ``lead * prod (z - r)`` into ascending coefficients."""
    c = np.array([lead], np.complex128)
    for r in roots:
        c = np.convolve(c, [-r, 1.0])
    return CoeffSeries(c)


# -- serialisation ---------------------------------------------------------


def to_pairs(f: CoeffSeries) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in f.coeffs]


def to_json(f: CoeffSeries) -> str:
    # float repr is the shortest string that round-trips exactly
    return json.dumps(to_pairs(f))


def from_pairs(pairs) -> CoeffSeries:
    try:
        vals = [complex(float(re), float(im)) for re, im in pairs]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"expected a list of [re, im] pairs: {exc}") from None
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
        raise ParseError("non-finite coefficient")
    return CoeffSeries(vals)


def from_json(text: str) -> CoeffSeries:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos) from None
    return from_pairs(data)


def to_csv(f: CoeffSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im"])
    for re, im in to_pairs(f):
        w.writerow([repr(re), repr(im)])
    return buf.getvalue()


def from_csv(text: str) -> CoeffSeries:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if rows and rows[0] and rows[0][0].strip().lower() == "re":
        rows = rows[1:]
    if any(len(r) != 2 for r in rows):
        raise ParseError("CSV series rows must have exactly two columns re,im")
    return from_pairs(rows)
