import os

from fractions import Fraction

from hypothesis import strategies as st

from ma_singular.series import Backend, ComplexSeries1, Series1, Series2
from ma_singular.solutions import LegendrianMapJet, build_hess_positive

RESOURCES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "resources")

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=6)
nonzero = rationals.filter(lambda x: x != 0)
signs = st.sampled_from([Fraction(1), Fraction(-1)])


def resource(name):
    return os.path.join(RESOURCES, name)


def frac(x):
    return Fraction(x)


def series2(terms: dict, order: int, backend=Backend.RATIONAL) -> Series2:
    """terms maps (i, j) to a number or a 'num/den' string."""
    if backend is Backend.RATIONAL:
        terms = {k: Fraction(v) for k, v in terms.items()}
    return Series2.from_dict(terms, order, backend)


def series1(values, order: int, backend=Backend.RATIONAL) -> Series1:
    if backend is Backend.RATIONAL:
        values = [Fraction(v) for v in values]
    return Series1.from_coeffs(values, order=order, backend=backend)


def holomorphic(re, im, order: int, backend=Backend.RATIONAL) -> ComplexSeries1:
    return ComplexSeries1(series1(re, order, backend), series1(im, order, backend))


def jet(x: dict, y: dict, z: dict, p: dict, q: dict, order: int) -> LegendrianMapJet:
    return LegendrianMapJet(*[series2(t, order) for t in (x, y, z, p, q)])


def example_jet(order: int = 4) -> LegendrianMapJet:
    """The Hess = 1 jet of h = w^2 + w^3."""
    return build_hess_positive(holomorphic([0, 0, 1, 1], [], order), order)


def cusp_normal_form(order: int = 6) -> LegendrianMapJet:
    """(u, v^2, 2/3 v^3, 0, v)"""
    return jet({(1, 0): 1}, {(0, 2): 1}, {(0, 3): "2/3"}, {}, {(0, 1): 1}, order)


def swallowtail_normal_form(order: int = 6) -> LegendrianMapJet:
    """(u, v^3 + uv, 3/4 v^4 + 1/2 uv^2, -1/2 v^2, v)"""
    return jet(
        {(1, 0): 1},
        {(0, 3): 1, (1, 1): 1},
        {(0, 4): "3/4", (1, 2): "1/2"},
        {(0, 2): "-1/2"},
        {(0, 1): 1},
        order,
    )


def trivial_jet(order: int = 4, backend=Backend.RATIONAL) -> LegendrianMapJet:
    """(u, 0, 0, 0, v)"""
    u = Series2.variable("u", order, backend)
    v = Series2.variable("v", order, backend)
    o = Series2.zeros(order, backend)
    return LegendrianMapJet(u, o, o, o, v)


def compare_series(actual: Series2, expected: Series2):
    if actual != expected:
        got = {(i, j): x for i, j, x in actual.nonzero()}
        want = {(i, j): x for i, j, x in expected.nonzero()}
        print(
            f"The actual (order {actual.order}) and expected (order {expected.order}) "
            "series differ"
        )
        for key in sorted(set(got) | set(want)):
            if got.get(key, 0) != want.get(key, 0):
                print(f"u^{key[0]} v^{key[1]}: {got.get(key, 0)} != {want.get(key, 0)}")
    assert actual == expected
