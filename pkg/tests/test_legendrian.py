import pytest

from fractions import Fraction
from hypothesis import given, settings
from hypothesis import strategies as st

from ma_singular.legendrian import (
    contact_residual,
    factorization_residual,
    fullness_check,
    fullness_profile,
    is_geometric_solution,
    ma_residual,
    normalization_residual,
    project_pi1,
    project_pi2,
    pullback_2form,
)
from ma_singular.series import Series2
from ma_singular.solutions import (
    MongeAmpereSystem,
    build_developable,
    build_gauss,
    build_hess_negative,
    build_hess_positive,
    cauchy_data,
    gauss_chart_to_sphere,
    open_umbrella,
)
from util import (
    compare_series,
    example_jet,
    holomorphic,
    jet,
    nonzero,
    rationals,
    series1,
    series2,
    signs,
    trivial_jet,
)

HESS1 = MongeAmpereSystem.create("hess", 1)

germs = st.lists(rationals, min_size=4, max_size=4).map(lambda xs: [0] + xs)


def test_contact_residual():
    assert contact_residual(example_jet(4)).exact_zero
    assert contact_residual(open_umbrella(6)).exact_zero

    f = jet({(1, 0): 1}, {(0, 1): 1}, {}, {(0, 0): 1}, {}, 4)
    report = contact_residual(f)
    assert not report.passed()
    assert report.residual[0].coefficient(0, 0) == -1
    assert report.residual[1].is_zero()
    assert report.to_json()["form"] == "theta"


def test_ma_residual():
    assert ma_residual(example_jet(4), HESS1).exact_zero
    f = build_developable(series1([0, 0, 1], 5), series1([0, 2, 0, 1], 5), 5)
    assert ma_residual(f, MongeAmpereSystem.create("hess", 0)).exact_zero


@pytest.mark.parametrize("c", [Fraction(1), Fraction(-1), Fraction(3, 7), Fraction(0)])
def test_open_umbrella_is_not_a_solution(c):
    report = ma_residual(open_umbrella(6), MongeAmpereSystem.create("hess", c))
    compare_series(report.residual[0], series2({(0, 1): 2 * c, (0, 3): "9/2"}, 5))
    assert not report.passed()


def test_pullback_2form():
    u, v = Series2.variable("u", 3), Series2.variable("v", 3)
    compare_series(pullback_2form(u, v ** 2), series2({(0, 1): 2}, 2))
    compare_series(pullback_2form(v ** 2, u), series2({(0, 1): -2}, 2))


def test_projections():
    f = example_jet(4)
    assert project_pi1(f) == (f.x, f.y, f.z)
    p, q, height = project_pi2(f, HESS1)
    assert (p, q) == (f.p, f.q)
    compare_series(
        height, series2({(3, 0): "2/3", (4, 0): "3/4", (2, 2): "-3/2", (0, 4): "-1/4"}, 4)
    )
    g = trivial_jet(4)
    compare_series(project_pi1(g)[0], Series2.variable("u", 4))
    assert project_pi1(g)[1].is_zero() and project_pi1(g)[2].is_zero()

    gauss = MongeAmpereSystem.create("gauss", 1)
    height, p, q = project_pi2(f, gauss)
    assert (p, q) == (f.p, f.q)


@settings(max_examples=100, deadline=None)
@given(germs, germs)
def test_developable_pi2_collapses(phi, psi):
    f = build_developable(series1(phi, 5), series1(psi, 5), 5)
    assert contact_residual(f).exact_zero
    assert ma_residual(f, MongeAmpereSystem.create("hess", 0)).exact_zero
    p, q, height = project_pi2(f, MongeAmpereSystem.create("hess", 0))
    for s in (p, q, height):
        assert s.derivative("u").is_zero()
    for a, b in ((p, q), (p, height), (q, height)):
        assert pullback_2form(a, b).is_zero()


@settings(max_examples=100, deadline=None)
@given(germs, germs)
def test_hess_positive_residuals(re, im):
    f = build_hess_positive(holomorphic(re, im, 5), 5)
    assert contact_residual(f).exact_zero
    assert ma_residual(f, HESS1).exact_zero
    assert pullback_2form(f.x, f.y) == pullback_2form(f.p, f.q)
    assert all(r.exact_zero for r in factorization_residual(f, HESS1))


@settings(max_examples=100, deadline=None)
@given(germs, germs)
def test_hess_negative_residuals(phi, psi):
    f = build_hess_negative(series1(phi, 5), series1(psi, 5), 5)
    system = MongeAmpereSystem.create("hess", -1)
    assert contact_residual(f).exact_zero
    assert ma_residual(f, system).exact_zero
    assert all(r.exact_zero for r in factorization_residual(f, system))


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals, rationals, rationals, rationals, signs)
def test_gauss_residuals(B, C, F, G, K, L, c):
    Z0, Z1 = cauchy_data(B, C, F, G, K, L, order=5)
    f = build_gauss(c, Z0, Z1, 4)
    system = MongeAmpereSystem.create("gauss", c)
    assert contact_residual(f).exact_zero
    assert ma_residual(f, system).exact_zero
    assert all(r.exact_zero for r in factorization_residual(f, system))
    assert normalization_residual(gauss_chart_to_sphere(f)).exact_zero


def test_factorization_residual():
    f = build_hess_negative(series1([0, 0, 1], 5), series1([0, 1], 5), 5)
    left, right = factorization_residual(f, MongeAmpereSystem.create("hess", -1))
    assert left.exact_zero and right.exact_zero
    assert (left.form, right.form) == ("factorization-left", "factorization-right")

    f = build_hess_positive(holomorphic([0, 0, 1], [], 5), 5)
    assert all(r.exact_zero for r in factorization_residual(f, HESS1))

    assert not all(r.exact_zero for r in factorization_residual(open_umbrella(6), HESS1))
    with pytest.raises(ValueError, match="c: the factorization needs c != 0"):
        factorization_residual(f, MongeAmpereSystem.create("hess", 0))


def test_normalization_residual():
    assert normalization_residual(gauss_chart_to_sphere(trivial_jet(5))).exact_zero


def test_is_geometric_solution():
    assert is_geometric_solution(example_jet(4), HESS1)
    assert not is_geometric_solution(open_umbrella(6), HESS1)
    assert is_geometric_solution(example_jet(4).to_float(), HESS1)


def test_open_umbrella_is_formally_full():
    for report in fullness_profile(open_umbrella(8), range(3, 9)):
        assert report.is_full, report.degree
        assert report.basis == ((0, 0, 1, 0, 0),)


def test_fullness_of_immersed_surfaces():
    plane = jet({(1, 0): 1}, {(0, 1): 1}, {}, {}, {}, 4)
    report = fullness_check(plane, 4)
    assert report.dimension == 3
    assert not report.is_full

    f = build_hess_positive(holomorphic([0, 1], [], 4), 4)
    report = fullness_check(f, 4)
    assert report.dimension == 3
    assert report.constraints == 2
    assert not report.is_full
    assert report.to_json()["full"] is False


def test_fullness_preconditions():
    with pytest.raises(ValueError, match="deg"):
        fullness_check(open_umbrella(4), 5)
    with pytest.raises(ValueError, match="rational"):
        fullness_check(open_umbrella(4).to_float(), 4)


@given(nonzero)
@settings(max_examples=20, deadline=None)
def test_scaled_umbrella_stays_full(s):
    f = open_umbrella(5)
    g = f.map(lambda c: c * s)
    assert fullness_check(g, 4).is_full
