import pytest

from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st

from ma_singular.series import (
    Backend,
    Series1,
    Series2,
    coerce,
    compose_shift,
    path_integrate,
)
from util import compare_series, rationals, series1, series2


def u(order, backend=Backend.RATIONAL):
    return Series2.variable("u", order, backend)


def v(order, backend=Backend.RATIONAL):
    return Series2.variable("v", order, backend)


@st.composite
def bivariate(draw, order=4):
    size = (order + 1) * (order + 2) // 2
    values = draw(st.lists(rationals, min_size=size, max_size=size))
    keys = [(i, j) for i in range(order + 1) for j in range(order + 1 - i)]
    return Series2.from_dict(dict(zip(keys, values)), order)


def test_ring_ops():
    compare_series((1 + u(2)) * (1 - u(2)), series2({(0, 0): 1, (2, 0): -1}, 2))
    compare_series((u(2) + v(2)) ** 2, series2({(2, 0): 1, (1, 1): 2, (0, 2): 1}, 2))
    assert ((u(2) + v(2)) ** 3).is_zero()


def test_mixed_orders_truncate_to_the_smaller():
    a = u(5) + v(5) ** 4
    b = 1 + u(3)
    assert (a * b).order == 3
    assert (a + b).order == 3


def test_backend_mismatch():
    with pytest.raises(TypeError):
        u(2) + u(2, Backend.FLOAT)
    with pytest.raises(TypeError):
        coerce(Backend.RATIONAL, 0.5)


def test_derivative():
    compare_series(series2({(1, 1): 2}, 3).derivative("v"), series2({(1, 0): 2}, 2))
    z = series2({(3, 0): "1/3", (1, 2): 1}, 4)
    compare_series(z.derivative("u"), series2({(2, 0): 1, (0, 2): 1}, 3))
    compare_series(
        series2({(0, 3): 1, (1, 1): 1}, 4).derivative("v"), series2({(0, 2): 3, (1, 0): 1}, 3)
    )
    with pytest.raises(ValueError):
        Series2.constant(1, 0).derivative("u")


def test_times_monomial():
    s = (1 + u(2)).times_monomial(1, 1)
    assert s.order == 4
    compare_series(s, series2({(1, 1): 1, (2, 1): 1}, 4))


def test_compose_shift():
    compare_series(compose_shift(v(2) ** 2, 0, 1), series2({(0, 0): 1, (0, 1): 2, (0, 2): 1}, 2))
    u0, v0 = Fraction(2, 3), Fraction(-5, 7)
    compare_series(compose_shift(u(2), u0, v0), series2({(0, 0): u0, (1, 0): 1}, 2))


@pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 3), Fraction(-2), Fraction(7, 5)])
def test_compose_shift_stays_on_swallowtail_locus(t):
    delta = 3 * v(2) ** 2 + u(2)
    assert compose_shift(delta, -3 * t ** 2, t).coefficient(0, 0) == 0


@settings(max_examples=50, deadline=None)
@given(bivariate(), rationals, rationals, rationals, rationals)
def test_compose_shift_is_additive(a, u1, v1, u2, v2):
    assert compose_shift(a, 0, 0) == a
    assert compose_shift(compose_shift(a, u1, v1), u2, v2) == compose_shift(a, u1 + u2, v1 + v2)


@settings(max_examples=50, deadline=None)
@given(bivariate(), bivariate(), bivariate())
def test_ring_identities(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * (b * c) == (a * b) * c
    assert a * b == b * a


def test_path_integrate():
    P = series2({(2, 0): 1, (0, 2): 1}, 2)
    Q = series2({(1, 1): 2}, 2)
    compare_series(path_integrate(P, Q), series2({(3, 0): "1/3", (1, 2): 1}, 3))
    assert path_integrate(Series2.zeros(3), Series2.zeros(3)).is_zero()


def test_path_integrate_rejects_non_closed_forms():
    with pytest.raises(ValueError, match="closedness"):
        path_integrate(v(3), Series2.zeros(3))


@settings(max_examples=50, deadline=None)
@given(bivariate(order=5))
def test_path_integrate_inverts_the_gradient(Z):
    P, Q = Z.derivative("u"), Z.derivative("v")
    W = path_integrate(P, Q)
    compare_series(W, Z - Z.coefficient(0, 0))
    assert W.derivative("u") == P
    assert W.derivative("v") == Q


def test_series1_compose_and_substitute():
    f = series1([1, 1, 1], 2)
    assert f.compose(series1([0, 2], 2)).coeffs == (1, 2, 4)
    phi = series1([0, 0, 1], 3)
    compare_series(phi.substitute(u(3) + v(3)), series2({(2, 0): 1, (1, 1): 2, (0, 2): 1}, 3))
    with pytest.raises(ValueError):
        phi.substitute(1 + u(3))


def test_along():
    delta = 3 * v(4) ** 2 + u(4)
    gu = series1([0, 0, -3], 4)
    t = Series1.variable(4)
    assert delta.along(gu, t).is_zero()


def test_inv_sqrt():
    w = 1 + v(4) ** 2
    compare_series(w.inv_sqrt(), series2({(0, 0): 1, (0, 2): "-1/2", (0, 4): "3/8"}, 4))
    with pytest.raises(ValueError):
        (2 + v(4)).inv_sqrt()
    w = 4 + v(4, Backend.FLOAT) ** 2
    assert w.inv_sqrt().coefficient(0, 0) == pytest.approx(0.5)
    assert w.inv_sqrt().coefficient(0, 2) == pytest.approx(-1 / 16)


def test_evaluate():
    s = (u(2, Backend.FLOAT) + v(2, Backend.FLOAT)) ** 2
    assert s.evaluate(0.5, 0.25) == pytest.approx(0.5625)
    assert series1([1, 2, 3], 2).evaluate(2.0) == pytest.approx(17.0)


def test_json():
    s = (u(2) + v(2) * Fraction(1, 2)) ** 2
    obj = s.to_json()
    assert obj == {
        "order": 2,
        "backend": "rational",
        "coeffs": [[0, 2, "1/4"], [1, 1, "1"], [2, 0, "1"]],
    }
    assert Series2.from_json(obj) == s
    t = Series1.from_json([0, 1, "1/2"])
    assert t.order == 2
    assert t[2] == Fraction(1, 2)
    assert Series1.from_json(t.to_json()) == t
