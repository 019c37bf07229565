"""Property-based checks of the algebraic invariants."""

import cmath
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

import pytest

from optapprox import approximants as ap
from optapprox import gram
from optapprox import space as sp
from optapprox import zeros as zr
from optapprox.series import CoeffSeries, from_csv, from_json, multiply, reciprocal_taylor, to_csv, to_json

# magnitudes far below 1e-4 only probe underflow, which has its own test
finite = st.one_of(st.just(0.0), st.floats(1e-4, 1e3), st.floats(-1e3, -1e-4))
cplx = st.builds(complex, finite, finite)
series = st.lists(cplx, min_size=0, max_size=8).map(CoeffSeries)
nonzero_series = st.lists(cplx, min_size=1, max_size=8).map(CoeffSeries).filter(lambda f: not f.is_zero())
alphas = st.sampled_from([-1.0, 0.0, 0.5, 1.0, 2.0])
unimodular = st.floats(0, 2 * math.pi).map(lambda t: cmath.exp(1j * t))
disc = st.builds(lambda r, t: r * cmath.exp(1j * t), st.floats(0, 0.9), st.floats(0, 2 * math.pi))


@given(series, series)
def test_multiply_commutes_and_degrees_add(f, g):
    assert np.allclose(multiply(f, g).coeffs, multiply(g, f).coeffs)
    if not f.is_zero() and not g.is_zero():
        assert multiply(f, g).degree == f.degree + g.degree


@given(series)
def test_serialisation_round_trips(f):
    assert from_json(to_json(f)) == f
    assert from_csv(to_csv(f)) == f


@given(nonzero_series, st.integers(1, 20))
def test_reciprocal_times_f_is_one(f, n):
    assume(abs(f[0]) > 1e-2 * max(abs(c) for c in f.coeffs))
    h = reciprocal_taylor(f, n)
    prod = multiply(f, h).padded(n)
    expected = np.zeros(n, complex)
    expected[0] = 1
    scale = max(1.0, float(np.abs(h.coeffs).max()) * float(np.abs(f.coeffs).max()))
    assert np.allclose(prod, expected, atol=1e-9 * scale)


@settings(max_examples=50)
@given(alphas, disc, series)
def test_reproducing_property(alpha, lam, f):
    space = sp.SpaceModel.dirichlet(alpha)
    n, _ = sp.kernel_truncation_index(space, abs(lam))
    k = sp.kernel_series(space, lam, n + 1)
    lhs = sp.inner_product(space, f, k)
    assert abs(lhs - f(lam)) <= 1e-10 * max(1.0, float(np.abs(f.coeffs).sum()))


@settings(max_examples=40)
@given(alphas, disc, disc)
def test_kernel_hermitian_symmetry(alpha, lam, z):
    space = sp.SpaceModel.dirichlet(alpha)
    assert abs(sp.kernel_value(space, lam, z) - np.conj(sp.kernel_value(space, z, lam))) < 1e-12


@settings(max_examples=40, deadline=None)
@given(alphas, nonzero_series, st.integers(0, 12))
def test_optimal_norm_nonincreasing_and_below_one(alpha, f, n):
    assume(abs(f[0]) > 1e-3)
    space = sp.SpaceModel.dirichlet(alpha)
    eps = ap.optimal_norm_sequence(space, f, n)
    assert np.all(np.diff(eps) <= 1e-9)
    # the zero polynomial is admissible, so epsilon_n <= ||1||
    assert eps[0] <= math.sqrt(sp.weight(space, 0)) + 1e-9


@settings(max_examples=40, deadline=None)
@given(alphas, nonzero_series, st.integers(0, 10))
def test_gram_solution_is_orthogonal(alpha, f, n):
    assume(abs(f[0]) > 1e-2 * float(np.abs(f.coeffs).max()))
    space = sp.SpaceModel.dirichlet(alpha)
    system = gram.assemble(space, f, n)
    assume(system.cond_estimate < 1e8)
    a = gram.solve(system)
    res = gram.orthogonality_residuals(space, f, a)
    assert np.abs(res).max() <= 1e-9 * max(1.0, sp.norm_squared(space, f))


@settings(max_examples=30, deadline=None)
@given(alphas, st.integers(0, 40))
def test_sandwich_identity_one_minus_z(alpha, n):
    space = sp.SpaceModel.dirichlet(alpha)
    eps = ap.closed_form_one_minus_z(space, n).epsilon_n
    assert abs(eps**2 * ap.phi(space, n + 1) - 1) < 1e-12


@settings(max_examples=30, deadline=None)
@given(nonzero_series, unimodular, st.integers(0, 8))
def test_rotation_preserves_optimal_norm(f, lam, n):
    assume(abs(f[0]) > 1e-2 * float(np.abs(f.coeffs).max()))
    rep = ap.rotation_experiment(sp.SpaceModel.dirichlet(1), f, lam, n)
    assert rep.max_difference <= 1e-9


positive = st.floats(0.01, 100.0)


@settings(max_examples=200)
@given(st.lists(positive, min_size=2, max_size=16))
def test_enestrom_annulus_contains_roots(c):
    p = CoeffSeries(c)
    ann = zr.enestrom_annulus(p)
    rs = zr.find_roots(p)
    assert rs.converged
    assert np.all(ann.contains(np.array(rs.roots)))


@settings(max_examples=60)
@given(st.lists(cplx, min_size=2, max_size=12))
def test_roots_reconstruct_polynomial(c):
    p = CoeffSeries(c)
    assume(p.degree >= 1 and abs(p.coeffs[-1]) > 1e-3 * float(np.abs(p.coeffs).max()))
    ref = np.roots(p.coeffs[::-1])
    gaps = np.abs(ref[:, None] - ref[None, :]) + np.eye(ref.size)
    # clustering merges roots closer than 1e-7, so keep them well apart
    assume(ref.size < 2 or gaps.min() > 1e-4)
    rs = zr.find_roots(p)
    assert rs.degree == p.degree
    assert rs.scaled_residual_max < 1e-8


def test_underflowing_function_fails_cleanly():
    from optapprox.errors import NotPositiveDefinite

    with pytest.raises(NotPositiveDefinite):
        ap.optimal_approximant(sp.SpaceModel.hardy(), CoeffSeries([1e-200j]), 0)


unit = st.floats(-1.0, 1.0)
unit_cplx = st.builds(complex, unit, unit)
unit_series = st.lists(unit_cplx, min_size=1, max_size=31).map(CoeffSeries)


@given(unit_series, unit_series, unit_series)
def test_multiply_associative(f, g, h):
    lhs = multiply(multiply(f, g), h).coeffs
    rhs = multiply(f, multiply(g, h)).coeffs
    assert lhs.shape == rhs.shape
    scale = max(1.0, float(np.abs(lhs).max(initial=0.0)))
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-13 * scale * 30)


@given(unit_series, unit_series)
def test_wiener_norm_submultiplicative(f, g):
    from optapprox.series import wiener_norm

    assert wiener_norm(multiply(f, g)) <= wiener_norm(f) * wiener_norm(g) + 1e-12


@given(alphas, series, unimodular)
def test_rotation_preserves_norm_and_inverts(alpha, f, lam):
    from optapprox.series import rotate

    space = sp.SpaceModel.dirichlet(alpha)
    g = rotate(f, lam)
    assert math.isclose(sp.norm_squared(space, g), sp.norm_squared(space, f), rel_tol=1e-12, abs_tol=1e-300)
    back = rotate(g, lam.conjugate())
    assert np.allclose(back.padded(len(f)), f.coeffs, rtol=1e-12, atol=1e-12 * max(1.0, float(np.abs(f.coeffs).max(initial=0))))


@given(alphas, series, series)
def test_inner_product_conjugate_symmetric(alpha, f, g):
    space = sp.SpaceModel.dirichlet(alpha)
    assert np.isclose(sp.inner_product(space, f, g), np.conj(sp.inner_product(space, g, f)), rtol=1e-14, atol=0)
    ff = sp.inner_product(space, f, f)
    assert ff.imag == 0 and ff.real >= 0
    assert ff.real == sp.norm_squared(space, f)


@given(st.one_of(st.just(0.0), st.floats(0.01, 3), st.floats(-3, -0.01)))
def test_dirichlet_weight_ratios(alpha):
    w = sp.DirichletAlpha(alpha).values(200)
    r = w[1:] / w[:-1]
    dist = np.abs(r - 1)
    assert np.all(np.diff(dist) <= 1e-15)
    assert np.all(r >= 1) == (alpha >= 0)


@settings(max_examples=40)
@given(st.lists(st.builds(lambda m, t: m * cmath.exp(1j * t), st.floats(0.3, 2.0), st.floats(0, 2 * math.pi)),
                min_size=1, max_size=30))
def test_reconstruction_from_separated_roots(roots):
    r = np.array(roots)
    gaps = np.abs(r[:, None] - r[None, :]) + 10 * np.eye(r.size)
    assume(gaps.min() >= 1e-2)
    from optapprox.series import from_roots

    p = from_roots(r)
    found = zr.find_roots(p).with_multiplicity()
    rebuilt = from_roots(found).padded(len(p))
    scale = float(np.abs(p.coeffs).max())
    assert np.max(np.abs(rebuilt - p.coeffs)) <= 1e-7 * scale


@settings(max_examples=40)
@given(st.lists(st.floats(0, 2 * math.pi), min_size=0, max_size=3),
       st.lists(st.builds(lambda m, t: m * cmath.exp(1j * t), st.floats(1.2, 3.0), st.floats(0, 2 * math.pi)),
                min_size=0, max_size=4))
def test_boundary_factorisation_round_trip(angles, outer_roots):
    lams = [cmath.exp(1j * t) for t in angles]
    pts = np.array(lams + outer_roots, dtype=complex)
    assume(pts.size > 0)
    gaps = np.abs(pts[:, None] - pts[None, :]) + 10 * np.eye(pts.size)
    assume(gaps.min() >= 1e-2)
    f = CoeffSeries([1.0])
    for lam in lams:
        f = f * CoeffSeries([1, -np.conj(lam)])
    for r in outer_roots:
        f = f * CoeffSeries([1, -1 / r])
    g, found = zr.factor_boundary_zeros(f)
    assert len(found) == len(lams)
    rebuilt = g
    for lam in found:
        rebuilt = rebuilt * CoeffSeries([1, -np.conj(lam)])
    assert np.max(np.abs(rebuilt.padded(len(f)) - f.coeffs)) <= 1e-9 * max(1.0, float(np.abs(f.coeffs).max()))


def test_double_zero_rate_data_is_emitted_without_claim():
    # (1 - z)^2: whether eps_n^2 phi(n) stays bounded is open, so only the data is checked
    rep = ap.rate_check(sp.SpaceModel.hardy(), CoeffSeries([1, -2, 1]), 100)
    assert len(rep.rows) == 101
    assert all(np.isfinite(r.product_eps2_phi) for r in rep.rows)
