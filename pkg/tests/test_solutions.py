import pytest

from fractions import Fraction
from hypothesis import given, settings

from ma_singular.legendrian import contact_residual, ma_residual
from ma_singular.series import Backend, Series2
from ma_singular.solutions import (
    Cauchy,
    Family,
    Holomorphic,
    LegendrianMapJet,
    MongeAmpereSystem,
    adapt_chart,
    build_developable,
    build_hess_negative,
    build_hess_positive,
    build_hess_split,
    build_jet,
    cauchy_data,
    differential_rank,
    gauss_chart_to_sphere,
    gauss_coefficients,
    gauss_equation_residual,
    initial_data_from_json,
    lift_gauss,
    open_umbrella,
    partial_legendre,
    partial_legendre_inverse,
    recenter,
    rescale_hess,
    solve_gauss_ck,
    swap_xy,
)
from util import (
    compare_series,
    example_jet,
    holomorphic,
    nonzero,
    rationals,
    series1,
    series2,
    trivial_jet,
)


def check_components(f, expected):
    for actual, terms in zip(f.components(), expected):
        compare_series(actual, series2(terms, f.order))


def test_hess_positive():
    f = build_hess_positive(holomorphic([0, 0, 1], [], 4), 4)
    check_components(
        f,
        [
            {(1, 0): 1},
            {(1, 1): 2},
            {(3, 0): "1/3", (1, 2): 1},
            {(2, 0): 1, (0, 2): -1},
            {(0, 1): 1},
        ],
    )
    assert f.chart == "adapted"

    f = build_hess_positive(holomorphic([], [0, 0, 1], 4), 4)
    check_components(
        f,
        [
            {(1, 0): 1},
            {(2, 0): 1, (0, 2): -1},
            {(0, 3): "-2/3"},
            {(1, 1): -2},
            {(0, 1): 1},
        ],
    )


def test_example_jet():
    f = example_jet(4)
    compare_series(f.y, series2({(1, 1): 2, (2, 1): 3, (0, 3): -1}, 4))
    compare_series(
        f.z,
        series2({(3, 0): "1/3", (1, 2): 1, (4, 0): "1/4", (2, 2): "3/2", (0, 4): "-3/4"}, 4),
    )
    compare_series(f.p, series2({(2, 0): 1, (0, 2): -1, (3, 0): 1, (1, 2): -3}, 4))


def test_hess_positive_rejects_constant_terms():
    with pytest.raises(ValueError, match="h: constant term"):
        build_hess_positive(holomorphic([1, 1], [], 3), 3)


def test_hess_negative():
    f = build_hess_negative(series1([0, 1], 4), series1([0], 4), 4)
    compare_series(f.y, series2({(1, 0): 1, (0, 1): 1}, 4))
    compare_series(f.p, series2({(1, 0): -1, (0, 1): -1}, 4))
    compare_series(f.z, series2({(2, 0): "-1/2", (0, 2): "1/2"}, 4))

    f = build_hess_negative(series1([0, 0, 1], 4), series1([0], 4), 4)
    compare_series(f.z, series2({(3, 0): "-1/3", (1, 2): 1, (0, 3): "2/3"}, 4))

    f = build_hess_negative(series1([0], 4), series1([0], 4), 4)
    assert f == trivial_jet(4)
    assert contact_residual(f).exact_zero


def test_hess_split():
    f = build_hess_split(series1([0, 1], 3), series1([0], 3), 3)
    compare_series(f.y, series2({(0, 1): -1}, 3))
    compare_series(f.p, series2({(1, 0): 1}, 3))
    assert ma_residual(f, MongeAmpereSystem.create("hess", -1)).exact_zero


def test_developable():
    f = build_developable(series1([0], 4), series1([0, 1], 4), 4)
    check_components(f, [{(1, 0): 1}, {(0, 1): 1}, {(0, 2): "1/2"}, {}, {(0, 1): 1}])
    assert build_developable(series1([0], 4), series1([0], 4), 4) == trivial_jet(4)


def test_solve_gauss_ck():
    Z0, Z1 = cauchy_data(0, 1, 0, 0, 0, 0, order=4)
    Z = solve_gauss_ck(1, Z0, Z1, 4)
    compare_series(Z, series2({(2, 0): "-1/2", (0, 2): "1/2", (2, 2): -1}, 4))
    assert gauss_equation_residual(Z, 1).is_zero()

    assert solve_gauss_ck(3, series1([0], 5), series1([0], 5), 5).is_zero()

    Z0, Z1 = cauchy_data(1, 0, 0, 0, 0, 0, order=5)
    compare_series(solve_gauss_ck(1, Z0, Z1, 5), series2({(1, 1): 1}, 5))


def test_solve_gauss_ck_preconditions():
    with pytest.raises(ValueError, match="c: the Gauss chart requires c != 0"):
        solve_gauss_ck(0, series1([0], 4), series1([0], 4), 4)
    with pytest.raises(ValueError, match="Z0: linear term"):
        solve_gauss_ck(1, series1([0, 1], 4), series1([0], 4), 4)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals, rationals, rationals, rationals, nonzero)
def test_cauchy_kovalevskaya_relations(B, C, F, G, K, L, c):
    Z0, Z1 = cauchy_data(B, C, F, G, K, L, order=4)
    Z = solve_gauss_ck(c, Z0, Z1, 4)
    assert gauss_coefficients(Z) == dict(B=B, C=C, F=F, G=G, K=K, L=L)
    A, D, E = 2 * Z.coefficient(2, 0), 6 * Z.coefficient(3, 0), 2 * Z.coefficient(2, 1)
    H, I_, J = 24 * Z.coefficient(4, 0), 6 * Z.coefficient(3, 1), 4 * Z.coefficient(2, 2)
    assert A == -c * C
    assert D == -c * F
    assert E == -c * G
    assert I_ == 4 * c ** 2 * B * C ** 2 - c * K
    assert J == -4 * c * (B ** 2 + 1) * C - c * L
    assert H == -4 * c ** 3 * C ** 3 + 4 * c ** 2 * (B ** 2 + 1) * C + c ** 2 * L


def test_lift_gauss():
    assert lift_gauss(Series2.zeros(4)) == trivial_jet(3)

    Z0, Z1 = cauchy_data(0, 1, 0, 0, 0, 0, order=4)
    f = lift_gauss(solve_gauss_ck(1, Z0, Z1, 4))
    assert f.order == 3
    compare_series(f.y, series2({(0, 1): -1, (2, 1): 2}, 3))
    compare_series(f.p, series2({(1, 0): -1, (1, 2): -2}, 3))
    compare_series(f.z, series2({(2, 0): "-1/2", (0, 2): "-1/2"}, 3))
    assert contact_residual(f).exact_zero


def test_partial_legendre():
    f = build_hess_positive(holomorphic([0, 0, 1], [], 4), 4)
    g = partial_legendre(f)
    check_components(
        g,
        [
            {(1, 0): 1},
            {(0, 1): 1},
            {(3, 0): "1/3", (1, 2): -1},
            {(2, 0): 1, (0, 2): -1},
            {(1, 1): -2},
        ],
    )
    assert partial_legendre_inverse(g) == f
    assert partial_legendre(trivial_jet(4)) == LegendrianMapJet(
        *[Series2.variable("u", 4), Series2.variable("v", 4)] + [Series2.zeros(4)] * 3
    )


def test_open_umbrella():
    f = open_umbrella(6)
    check_components(
        f,
        [{(1, 0): 1}, {(0, 2): 1}, {(1, 3): 1}, {(0, 3): 1}, {(1, 1): "3/2"}],
    )
    assert differential_rank(f) == 1
    with pytest.raises(ValueError, match="order"):
        open_umbrella(3)


def test_recenter():
    f = recenter(example_jet(4), (Fraction(1, 2), Fraction(-1, 3)))
    assert all(s.coefficient(0, 0) == 0 for s in f.components())
    assert contact_residual(f).exact_zero
    assert f.chart == "adapted"


def test_adapt_chart():
    f = example_jet(4)
    g = adapt_chart(swap_xy(f))
    assert g.chart == "adapted"
    assert g == f

    scaled = rescale_hess(f, 16)
    assert scaled.chart == "general"
    g = adapt_chart(scaled)
    assert g.chart == "adapted"
    assert contact_residual(g).exact_zero
    assert ma_residual(g, MongeAmpereSystem.create("hess", 16)).exact_zero


def test_rescale_hess():
    f = rescale_hess(example_jet(4), Fraction(1, 16))
    compare_series(f.x, series2({(1, 0): 2}, 4))
    assert ma_residual(f, MongeAmpereSystem.create("hess", "1/16")).exact_zero

    with pytest.raises(ValueError, match="fourth power"):
        rescale_hess(example_jet(4), 2)

    f = rescale_hess(example_jet(4).to_float(), 2.0)
    assert ma_residual(f, MongeAmpereSystem.create("hess", 2.0)).passed(1e-9)


def test_differential_rank():
    f = example_jet(4)
    assert differential_rank(f) == 2
    assert differential_rank(f, (Fraction(1, 3), Fraction(1, 5))) == 2
    assert differential_rank(f.to_float()) == 2
    assert differential_rank(open_umbrella(4).to_float()) == 1


def test_gauss_chart_to_sphere():
    x1, x2, x3, y1, y2, y3 = gauss_chart_to_sphere(trivial_jet(4))
    compare_series(y1, series2({(0, 0): 1, (0, 2): "-1/2", (0, 4): "3/8"}, 4))
    compare_series(y2, Series2.zeros(4))
    compare_series(y3, series2({(0, 1): -1, (0, 3): "1/2"}, 4))
    assert (y1.coefficient(0, 0), y2.coefficient(0, 0), y3.coefficient(0, 0)) == (1, 0, 0)


def test_build_jet():
    system = MongeAmpereSystem.create("hess", 1)
    data = Holomorphic(holomorphic([0, 0, 1, 1], [], 4))
    assert build_jet(system, data, 4) == example_jet(4)

    with pytest.raises(ValueError, match="initial_data.variant"):
        build_jet(MongeAmpereSystem.create("hess", -1), data, 4)

    Z0, Z1 = cauchy_data(0, 1, 0, 0, 0, 0, order=4)
    with pytest.raises(ValueError, match="initial_data.c"):
        build_jet(MongeAmpereSystem.create("gauss", 1), Cauchy(Z0, Z1, Fraction(-1)), 4)
    f = build_jet(MongeAmpereSystem.create("gauss", 1), Cauchy(Z0, Z1, Fraction(1)), 3)
    assert f.order == 3


def test_initial_data_from_json():
    data = initial_data_from_json(
        {"variant": "cauchy", "c": "-1", "coefficients": {"C": 1, "L": "1/2"}}, order=5
    )
    assert isinstance(data, Cauchy)
    assert data.c == -1
    assert data.Z0[2] == Fraction(1, 2)
    assert data.Z0[4] == Fraction(1, 48)

    data = initial_data_from_json(
        {"variant": "holomorphic", "series": {"h": {"re": [0, 0, 1, 1]}}}, order=4
    )
    assert data.h.order == 4

    with pytest.raises(ValueError, match="initial_data.variant"):
        initial_data_from_json({"variant": "bogus"})
    with pytest.raises(ValueError, match="initial_data.series.phi"):
        initial_data_from_json({"variant": "dalembert", "series": {"psi": [0, 1]}})


def test_jet_json():
    f = example_jet(4)
    obj = f.to_json()
    assert obj["chart"] == "adapted"
    assert LegendrianMapJet.from_json(obj) == f
    with pytest.raises(ValueError, match="missing"):
        LegendrianMapJet.from_json({"x": obj["x"]})
    with pytest.raises(ValueError, match="share one order"):
        LegendrianMapJet(f.x, f.y, f.z, f.p, Series2.variable("v", 3))
    with pytest.raises(TypeError):
        LegendrianMapJet(f.x, f.y, f.z, f.p, Series2.variable("v", 4, Backend.FLOAT))


def test_system():
    system = MongeAmpereSystem.create("HESS", "1/2")
    assert system.family is Family.HESS
    assert system.c == Fraction(1, 2)
    assert system.to_json() == {"equation": "hess", "c": "1/2"}
    with pytest.raises(ValueError, match="equation"):
        MongeAmpereSystem.create("wave", 1)
