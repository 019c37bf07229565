import math

import numpy as np
import pytest

from optapprox import space as sp
from optapprox.errors import (
    InvalidWeights,
    NotOrthonormal,
    OutsideDisc,
    ParseError,
    TailForbidden,
    TailNotConvergent,
)
from optapprox.series import CoeffSeries

HARDY = sp.SpaceModel.hardy()
D1 = sp.SpaceModel.dirichlet(1)
BERGMAN = sp.SpaceModel.bergman()
ONE_MINUS_Z = CoeffSeries([1, -1])


@pytest.mark.parametrize("alpha,n,expected", [(1, 3, 4.0), (0, 17, 1.0), (-1, 4, 0.2)])
def test_weight_examples(alpha, n, expected):
    assert sp.weight(sp.SpaceModel.dirichlet(alpha), n) == pytest.approx(expected, rel=1e-15)


def test_norm_squared_examples():
    assert sp.norm_squared(HARDY, ONE_MINUS_Z) == 2
    assert sp.norm_squared(D1, ONE_MINUS_Z) == 3
    assert sp.norm_squared(D1, CoeffSeries()) == 0


def test_inner_product_examples():
    f = CoeffSeries([0, 1, -1])
    assert sp.inner_product(HARDY, f, ONE_MINUS_Z) == -1
    assert sp.inner_product(HARDY, f, CoeffSeries()) == 0
    assert sp.inner_product(D1, ONE_MINUS_Z, ONE_MINUS_Z) == 3


def test_inner_product_is_conjugate_linear_in_second_slot():
    f, g = CoeffSeries([1, 2j]), CoeffSeries([1j, 1])
    assert sp.inner_product(D1, f, 1j * g) == pytest.approx(-1j * sp.inner_product(D1, f, g))


def test_kernel_examples():
    assert sp.kernel_value(HARDY, 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-12)
    assert sp.kernel_value(D1, 0, 0.9j) == pytest.approx(1.0)
    assert sp.kernel_value(BERGMAN, 0.5, 0.5) == pytest.approx(16 / 9, rel=1e-12)


def test_kernel_rejects_points_outside_disc():
    with pytest.raises(OutsideDisc):
        sp.kernel_value(HARDY, 1.0, 0.1)
    with pytest.raises(OutsideDisc):
        sp.kernel_value(HARDY, 0.1, -1.2)


def test_kernel_truncation_respects_max_index():
    tiny = sp.SpaceModel(sp.DirichletAlpha(0), truncation=sp.TruncationPolicy(max_index=5))
    with pytest.raises(TailNotConvergent):
        sp.kernel_value(tiny, 0.99, 0.99)


def test_env_var_sets_max_index(monkeypatch):
    monkeypatch.setenv("OPTAPPROX_MAX_INDEX", "123")
    assert sp.TruncationPolicy().max_index == 123
    monkeypatch.setenv("OPTAPPROX_MAX_INDEX", "lots")
    with pytest.raises(InvalidWeights):
        sp.TruncationPolicy()


def test_shift_norm_examples():
    assert sp.shift_norm_bounds(HARDY, 5, 100) == (1.0, 1.0)
    assert sp.shift_norm_bounds(D1, 1, 100) == (2.0, 2.0)
    lo, hi = sp.spectral_radius_estimate(D1, 10, 100)
    assert lo == hi == pytest.approx(11 ** (1 / 20), rel=1e-12)
    ests = [sp.spectral_radius_estimate(D1, k, 200)[1] for k in (1, 5, 10, 50, 100)]
    assert all(a > b for a, b in zip(ests, ests[1:]))


def test_backward_shift_is_adjoint_of_shift():
    rng = np.random.default_rng(3)
    for alpha in (-1, 0, 1, 2.5):
        space = sp.SpaceModel.dirichlet(alpha)
        f = CoeffSeries(rng.normal(size=6) + 1j * rng.normal(size=6))
        g = CoeffSeries(rng.normal(size=7) + 1j * rng.normal(size=7))
        lhs = sp.inner_product(space, sp.shift(f), g)
        rhs = sp.inner_product(space, f, sp.backward_shift(space, g))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_riesz_constants():
    space = sp.SpaceModel(sp.DirichletAlpha(0), c1=0.5, c2=2.0)
    assert not space.orthonormal
    with pytest.raises(NotOrthonormal):
        sp.norm_squared(space, ONE_MINUS_Z)
    assert sp.norm_bounds(space, ONE_MINUS_Z) == (1.0, 4.0)
    with pytest.raises(InvalidWeights):
        sp.SpaceModel(sp.DirichletAlpha(0), c1=2.0, c2=1.0)


def test_table_forbidden_tail():
    t = sp.Table.from_values([1, 2, 3])
    np.testing.assert_array_equal(t.values(3), [1, 2, 3])
    with pytest.raises(TailForbidden):
        t.values(4)


def test_table_power_tail_recovers_exponent():
    vals = (np.arange(30) + 1.0) ** 1.5
    t = sp.Table.from_values(vals, "power")
    assert t.tail.alpha == pytest.approx(1.5, rel=1e-10)
    np.testing.assert_allclose(t.values(60), (np.arange(60) + 1.0) ** 1.5, rtol=1e-9)


def test_table_rejects_bad_entries():
    with pytest.raises(InvalidWeights):
        sp.Table.from_values([1, 0, 2])
    with pytest.raises(InvalidWeights):
        sp.Table.from_values([1, math.inf])


def test_load_table_csv(tmp_path):
    p = tmp_path / "w.csv"
    p.write_text("1\n2\n3\n4\n")
    t = sp.load_table_csv(p, "power")
    assert isinstance(t.tail, sp.PowerExtrapolate)
    p.write_text("1\n-2\n")
    with pytest.raises(InvalidWeights, match="w.csv:2"):
        sp.load_table_csv(p)
    p.write_text("1\nabc\n")
    with pytest.raises(ParseError):
        sp.load_table_csv(p)
    p.write_text("1\n100\n")
    with pytest.raises(InvalidWeights, match="ratio"):
        sp.load_table_csv(p)
    with pytest.raises(InvalidWeights, match="missing.csv"):
        sp.load_table_csv(tmp_path / "missing.csv")


def test_kernel_with_table_needs_a_tail():
    table = sp.SpaceModel(sp.Table.from_values(np.ones(50)))
    with pytest.raises(TailNotConvergent):
        sp.kernel_value(table, 0.5, 0.5)
    powered = sp.SpaceModel(sp.Table.from_values(np.ones(50), "power"))
    assert sp.kernel_value(powered, 0.5, 0.5) == pytest.approx(4 / 3, rel=1e-11)
