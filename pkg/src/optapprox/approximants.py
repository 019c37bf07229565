"""Optimal polynomial approximants to 1/f and the diagnostics built on them.

The n-th optimal approximant ``p`` minimises ``||p f - 1||`` over polynomials
of degree at most ``n``; the minimum is the optimal norm ``epsilon_n``.  For
``f = 1 - z`` both have closed forms in terms of the partial sums
``phi(n) = sum_{k<=n} 1/w_k``.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import gram
from . import space as sp
from .series import CoeffSeries, multiply, reciprocal_taylor, rotate, wiener_norm

QUADRATIC_FORM_TOL = 1e-8
CYCLICITY_MARGIN = 0.1
PARTIAL_SUM_INDICES = (10, 100, 1000, 10000)
SCHEMA_VERSION = 1

ONE_MINUS_Z = CoeffSeries([1.0, -1.0])


class Method(str, enum.Enum):
    LINEAR_SYSTEM = "LinearSystem"
    CLOSED_FORM = "ClosedForm"


@dataclass(frozen=True)
class ApproximationResult:
    n: int
    p_star: CoeffSeries
    epsilon_n: float
    cond_estimate: float
    truncation_degree_used: int
    method: Method
    # (lower, upper) on epsilon_n; equal to epsilon_n in orthonormal spaces
    epsilon_bounds: tuple[float, float] = (math.nan, math.nan)
    solver_residual: float = 0.0
    quadratic_form_epsilon: float = math.nan

    @property
    def consistent(self) -> bool:
        """Residual norm and quadratic-form value agree (conditioning check)."""
        if math.isnan(self.quadratic_form_epsilon):
            return True
        return abs(self.epsilon_n**2 - self.quadratic_form_epsilon**2) <= QUADRATIC_FORM_TOL

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p_star": [[float(c.real), float(c.imag)] for c in self.p_star.padded(self.n + 1)],
            "epsilon_n": self.epsilon_n,
            "cond_estimate": self.cond_estimate,
            "truncation_degree_used": self.truncation_degree_used,
            "method": self.method.value,
        }


def residual_norm(space: sp.SpaceModel, p: CoeffSeries, f: CoeffSeries) -> float:
    """||p f - 1|| computed from the coefficients of the product."""
    return math.sqrt(sp.norm_squared(space, p * f - 1))


def _result(space, f, n, sol: gram.Solution) -> ApproximationResult:
    p = CoeffSeries(sol.a)
    eps = residual_norm(space, p, f)
    # ||pf - 1||^2 = w_0 (1 - a_0 f_0) at the optimum
    w0 = sp.weight(space, 0)
    q = w0 * (1.0 - (sol.a[0] * f[0]).real)
    return ApproximationResult(
        n=n,
        p_star=p,
        epsilon_n=eps,
        cond_estimate=sol.cond_estimate,
        truncation_degree_used=f.degree,
        method=Method.LINEAR_SYSTEM,
        epsilon_bounds=(eps, eps),
        solver_residual=sol.residual,
        quadratic_form_epsilon=math.sqrt(max(q, 0.0)),
    )


def optimal_approximant(space: sp.SpaceModel, f: gram.FunctionLike, n: int) -> ApproximationResult:
    system = gram.assemble(space, f, n)
    return _result(space, system.f, n, gram.solve_detailed(system))


def approximant_sweep(space: sp.SpaceModel, f: gram.FunctionLike, n_max: int) -> list[ApproximationResult]:
    """Optimal approximants for n = 0..n_max from a single factorisation."""
    system = gram.assemble(space, f, n_max)
    return [_result(space, system.f, n, sol) for n, sol in gram.solve_sweep(system)]


def optimal_norm_sequence(space: sp.SpaceModel, f: gram.FunctionLike, n_max: int) -> np.ndarray:
    return np.array([r.epsilon_n for r in approximant_sweep(space, f, n_max)])


# -- f = 1 - z -------------------------------------------------------------


def phi(space: sp.SpaceModel, n: int) -> float:
    """phi(n) = sum_{k=0}^n 1 / w_k."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return math.fsum(1.0 / space.weights.values(n + 1))


def phi_sequence(space: sp.SpaceModel, n: int) -> np.ndarray:
    """phi(0), ..., phi(n)."""
    return np.cumsum(1.0 / space.weights.values(n + 1))


def closed_form_one_minus_z(space: sp.SpaceModel, n: int) -> ApproximationResult:
    """Explicit approximant for f = 1 - z: a_k = 1 - phi(k) / phi(n+1).

    Exact (optimal, with epsilon_n = phi(n+1)**-0.5) in orthonormal spaces;
    for general Riesz constants only the bounds
    c1 <= epsilon_n**2 phi(n+1) <= c2 are known and ``epsilon_n`` is NaN.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    inv = 1.0 / space.weights.values(n + 2)
    # a_k = sum_{j=k+1}^{n+1} (1/w_j) / phi(n+1); the suffix form avoids cancellation
    suffix = np.cumsum(inv[::-1])[::-1]
    total = math.fsum(inv)
    a = suffix[1:] / total
    lo, hi = math.sqrt(space.c1 / total), math.sqrt(space.c2 / total)
    eps = hi if space.orthonormal else math.nan
    return ApproximationResult(
        n=n,
        p_star=CoeffSeries(a),
        epsilon_n=eps,
        cond_estimate=math.nan,
        truncation_degree_used=1,
        method=Method.CLOSED_FORM,
        epsilon_bounds=(lo, hi),
    )


# -- decay rates -------------------------------------------------------------


@dataclass
class RateRow:
    n: int
    epsilon_n: float
    phi_n: float
    product_eps2_phi: float
    wiener_norm_pf: float


@dataclass
class RateReport:
    rows: list[RateRow]
    empirical_C: float
    max_wiener_norm: float
    product_bounded: bool
    wiener_bounded: bool
    split_index: int

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "empirical_C": self.empirical_C,
            "max_wiener_norm": self.max_wiener_norm,
            "product_bounded": self.product_bounded,
            "wiener_bounded": self.wiener_bounded,
            "split_index": self.split_index,
            "rows": [asdict(r) for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csv(self) -> str:
        return _rows_csv(["n", "epsilon_n", "phi_n", "product_eps2_phi", "wiener_norm_pf"],
                         [asdict(r) for r in self.rows])


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_number(row[h]) for h in header])
    return buf.getvalue()


def format_number(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    # repr of a float is the shortest decimal that round-trips exactly
    return repr(float(x))


def no_blow_up(values, split: int) -> bool:
    """max over n >= split is at most twice the max over n <= split."""
    v = np.asarray(values, dtype=float)
    return bool(v[split:].max() <= 2.0 * v[: split + 1].max())


def rate_check(space: sp.SpaceModel, f: gram.FunctionLike, n_max: int) -> RateReport:
    """Tabulate epsilon_n^2 phi(n) and the Wiener norm of p_n f for n <= n_max.

    Boundedness is judged by comparing the maximum over the last four fifths
    of the range with twice the maximum over the first fifth.
    """
    f = gram.as_series(space, f)
    results = approximant_sweep(space, f, n_max)
    phis = phi_sequence(space, n_max)
    rows = []
    for r, ph in zip(results, phis):
        rows.append(RateRow(
            n=r.n,
            epsilon_n=r.epsilon_n,
            phi_n=float(ph),
            product_eps2_phi=r.epsilon_n**2 * float(ph),
            wiener_norm_pf=wiener_norm(multiply(r.p_star, f)),
        ))
    prod = [row.product_eps2_phi for row in rows]
    wn = [row.wiener_norm_pf for row in rows]
    split = max(1, n_max // 5) if n_max >= 1 else 0
    return RateReport(
        rows=rows,
        empirical_C=float(max(prod)),
        max_wiener_norm=float(max(wn)),
        product_bounded=no_blow_up(prod, split),
        wiener_bounded=no_blow_up(wn, split),
        split_index=split,
    )


def lemma_sum_check(space: sp.SpaceModel, f: CoeffSeries, n_max: int, n_min: int | None = None) -> np.ndarray:
    """s_n w_n with s_n = |sum_{k=0}^n phi(k) (1/f)^(k) f^(n-k)|, for n = n_min..n_max.

    ``n_min`` defaults to deg(f) + 1.
    """
    if n_min is None:
        n_min = f.degree + 1
    if n_max < n_min:
        return np.zeros(0)
    size = n_max + 1
    h = reciprocal_taylor(f, size).padded(size)
    g = phi_sequence(space, n_max) * h
    conv = np.convolve(g, f.coeffs)[:size]
    w = space.weights.values(size)
    return (np.abs(conv) * w)[n_min:]


# -- cyclicity ---------------------------------------------------------------


def power_sum_tail(alpha: float, start: int = 1) -> float:
    """sum_{m >= start} m**-alpha for alpha > 1.

    Direct summation up to N, then the integral-test remainder sharpened with
    Euler-Maclaurin terms; the truncation error is far below 1e-12.
    """
    if not alpha > 1:
        raise ValueError("the power sum diverges for alpha <= 1")
    start = max(int(start), 1)
    big_n = max(start, 2000)
    head = math.fsum(np.arange(start, big_n, dtype=float) ** -alpha) if big_n > start else 0.0
    n = float(big_n)
    tail = (n ** (1 - alpha) / (alpha - 1) + 0.5 * n**-alpha
            + alpha * n ** (-alpha - 1) / 12
            - alpha * (alpha + 1) * (alpha + 2) * n ** (-alpha - 3) / 720)
    return head + tail


def zeta(alpha: float) -> float:
    return power_sum_tail(alpha, 1)


class Status(str, enum.Enum):
    CYCLIC = "Cyclic"
    NOT_CYCLIC = "NotCyclic"
    UNDETERMINED = "Undetermined"


@dataclass
class CyclicityVerdict:
    status: Status
    partial_sums: list[float]
    partial_sum_indices: list[int]
    epsilon_limit_bounds: tuple[float, float]
    exponent: float | None = None
    note: str = ""

    @property
    def epsilon(self) -> float | None:
        lo, hi = self.epsilon_limit_bounds
        return lo if lo == hi else None

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "status": self.status.value,
            "epsilon": self.epsilon,
            "epsilon_limit_bounds": list(self.epsilon_limit_bounds),
            "partial_sum_indices": list(self.partial_sum_indices),
            "partial_sums": list(self.partial_sums),
            "exponent": self.exponent,
            "note": self.note,
        }


def _partial_sums(space: sp.SpaceModel):
    limit = space.weights.limit
    idx = [n for n in PARTIAL_SUM_INDICES if limit is None or n < limit]
    if limit is not None and (not idx or idx[-1] != limit - 1):
        idx.append(limit - 1)
    ph = phi_sequence(space, max(idx))
    return idx, [float(ph[n]) for n in idx]


def _limit_bounds(space: sp.SpaceModel, total: float) -> tuple[float, float]:
    return math.sqrt(space.c1 / total), math.sqrt(space.c2 / total)


def cyclicity_verdict(space: sp.SpaceModel) -> CyclicityVerdict:
    """Classify whether functions with boundary zeros are cyclic in ``space``.

    The test is divergence of sum 1/w_k; when it converges the optimal norm
    of 1 - z tends to (sum 1/w_k)**-0.5 (scaled by c1, c2 for Riesz bases).
    """
    idx, sums = _partial_sums(space)
    w = space.weights
    if isinstance(w, sp.DirichletAlpha):
        if w.alpha <= 1:
            return CyclicityVerdict(Status.CYCLIC, sums, idx, (0.0, 0.0), w.alpha,
                                    "sum (k+1)^-alpha diverges for alpha <= 1")
        return CyclicityVerdict(Status.NOT_CYCLIC, sums, idx,
                                _limit_bounds(space, zeta(w.alpha)), w.alpha,
                                "sum (k+1)^-alpha = zeta(alpha)")

    size = len(w.entries)
    seen = phi(space, size - 1)
    upper_only = (0.0, math.sqrt(space.c2 / seen))
    if isinstance(w.tail, sp.Forbidden):
        return CyclicityVerdict(Status.UNDETERMINED, sums, idx, upper_only, None,
                                "divergence cannot be decided from a finite table")
    a = w.tail.alpha
    if a <= 1 - CYCLICITY_MARGIN:
        return CyclicityVerdict(Status.CYCLIC, sums, idx, (0.0, 0.0), a,
                                f"fitted tail exponent {a:.4g} <= {1 - CYCLICITY_MARGIN:g}")
    if a >= 1 + CYCLICITY_MARGIN:
        total = seen + power_sum_tail(a, size + 1) / w.tail.scale
        return CyclicityVerdict(Status.NOT_CYCLIC, sums, idx, _limit_bounds(space, total), a,
                                f"fitted tail exponent {a:.4g} >= {1 + CYCLICITY_MARGIN:g}")
    return CyclicityVerdict(Status.UNDETERMINED, sums, idx, upper_only, a,
                            f"fitted tail exponent {a:.4g} within {CYCLICITY_MARGIN:g} of 1")


# -- experiments -------------------------------------------------------------


@dataclass
class ProductReport:
    """Optimal errors for f g next to those of the composite polynomials p_n q_n.

    ``p_n q_n`` has degree ``2n``, so the guaranteed comparison is against
    ``epsilon_composite_degree`` (the optimum at degree 2n).  The same-index
    comparison with ``epsilon_n`` is reported separately; it typically holds
    in cyclic situations but is not a theorem.
    """

    n: list[int]
    epsilon_n: list[float]
    composite_error: list[float]
    epsilon_composite_degree: list[float]
    optimal_le_composite: bool
    same_index_le_composite: bool
    pairing: str = "m(n) = n"

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "pairing": self.pairing,
            "optimal_le_composite": self.optimal_le_composite,
            "same_index_le_composite": self.same_index_le_composite,
            "rows": [
                {"n": n, "epsilon_n": e, "composite_error": c, "epsilon_composite_degree": d}
                for n, e, c, d in zip(self.n, self.epsilon_n, self.composite_error,
                                      self.epsilon_composite_degree)
            ],
        }

    def to_csv(self) -> str:
        return _rows_csv(PRODUCT_COLUMNS, self.to_dict()["rows"])


PRODUCT_COLUMNS = ["n", "epsilon_n", "composite_error", "epsilon_composite_degree"]


def product_experiment(space: sp.SpaceModel, f: CoeffSeries, g: CoeffSeries, n_max: int,
                       slack: float = 1e-12) -> ProductReport:
    """Optimal norms of f g against the composite polynomials p_n q_n.

    The degrees are paired as m(n) = n; any pairing with m(n) -> infinity
    would serve for cyclicity.
    """
    fg = multiply(f, g)
    best = approximant_sweep(space, fg, 2 * n_max)
    ps = approximant_sweep(space, f, n_max)
    qs = approximant_sweep(space, g, n_max)
    comp = [residual_norm(space, multiply(p.p_star, q.p_star), fg) for p, q in zip(ps, qs)]
    eps = [best[n].epsilon_n for n in range(n_max + 1)]
    eps2 = [best[2 * n].epsilon_n for n in range(n_max + 1)]
    return ProductReport(
        n=list(range(n_max + 1)),
        epsilon_n=eps,
        composite_error=comp,
        epsilon_composite_degree=eps2,
        optimal_le_composite=all(e <= c + slack for e, c in zip(eps2, comp)),
        same_index_le_composite=all(e <= c + slack for e, c in zip(eps, comp)),
    )


@dataclass
class RotationReport:
    n: list[int]
    epsilon_f: list[float]
    epsilon_rotated: list[float]

    @property
    def max_difference(self) -> float:
        return float(np.max(np.abs(np.subtract(self.epsilon_f, self.epsilon_rotated))))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "max_difference": self.max_difference,
            "rows": [
                {"n": n, "epsilon_f": a, "epsilon_rotated": b}
                for n, a, b in zip(self.n, self.epsilon_f, self.epsilon_rotated)
            ],
        }

    def to_csv(self) -> str:
        return _rows_csv(["n", "epsilon_f", "epsilon_rotated"], self.to_dict()["rows"])


def rotation_experiment(space: sp.SpaceModel, f: CoeffSeries, lam: complex, n_max: int) -> RotationReport:
    g = rotate(f, lam)
    a = optimal_norm_sequence(space, f, n_max)
    b = optimal_norm_sequence(space, g, n_max)
    return RotationReport(list(range(n_max + 1)), a.tolist(), b.tolist())
