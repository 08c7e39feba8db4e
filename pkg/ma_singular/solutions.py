"""Geometric-solution jets for Hess = c and K = c.

Every constructor returns a LegendrianMapJet (x, y, z, p, q) whose pullback of the
contact form dz - p dx - q dy vanishes to the jet's order minus one.
"""
from __future__ import annotations

import logging
import math

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import numpy as np
import sympy

from .series import (
    DEFAULT_ORDER,
    Backend,
    ComplexSeries1,
    Series1,
    Series2,
    coerce,
    compose_shift,
    get_backend,
    path_integrate,
    scalar_to_json,
    zero,
)

LOGGER = logging.getLogger(__name__)

COMPONENTS = ("x", "y", "z", "p", "q")


class Family(Enum):
    HESS = "hess"
    GAUSS = "gauss"


@dataclass(frozen=True)
class MongeAmpereSystem:
    """Hess = c (omega = c dx^dy - dp^dq) or K = c in the Gauss chart."""

    family: Family
    c: Union[int, float, Fraction]

    @classmethod
    def create(cls, family: Union[str, Family], c) -> "MongeAmpereSystem":
        if not isinstance(family, Family):
            try:
                family = Family(str(family).lower())
            except ValueError:
                raise ValueError(f"equation: unknown equation '{family}' (use 'hess' or 'gauss')")
        if isinstance(c, str):
            c = Fraction(c)
        if isinstance(c, float) and not math.isfinite(c):
            raise ValueError("c: must be finite")
        return cls(family, c)

    def to_json(self) -> dict:
        return {"equation": self.family.value, "c": scalar_to_json(self.c)}


@dataclass(frozen=True)
class LegendrianMapJet:
    x: Series2
    y: Series2
    z: Series2
    p: Series2
    q: Series2

    def __post_init__(self):
        orders = {s.order for s in self.components()}
        backends = {s.backend for s in self.components()}
        if len(orders) != 1:
            raise ValueError(f"jet components must share one order, got {sorted(orders)}")
        if len(backends) != 1:
            raise TypeError("jet components must share one backend")

    def components(self) -> Tuple[Series2, ...]:
        return (self.x, self.y, self.z, self.p, self.q)

    @property
    def order(self) -> int:
        return self.x.order

    @property
    def backend(self) -> Backend:
        return self.x.backend

    @property
    def chart(self) -> str:
        """'adapted' when x = u and q = v exactly, else 'general'."""
        u = Series2.variable("u", self.order, self.backend)
        v = Series2.variable("v", self.order, self.backend)
        return "adapted" if self.x == u and self.q == v else "general"

    def map(self, fn) -> "LegendrianMapJet":
        return LegendrianMapJet(*[fn(s) for s in self.components()])

    def truncate(self, order: int) -> "LegendrianMapJet":
        return self.map(lambda s: s.truncate(order))

    def to_float(self) -> "LegendrianMapJet":
        return self.map(lambda s: s.to_float())

    def to_json(self) -> dict:
        obj = {name: s.to_json() for name, s in zip(COMPONENTS, self.components())}
        obj["chart"] = self.chart
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "LegendrianMapJet":
        missing = [name for name in COMPONENTS if name not in obj]
        if missing:
            raise ValueError("jet is missing component(s): " + ", ".join(missing))
        return cls(*[Series2.from_json(obj[name]) for name in COMPONENTS])


# Initial data variants


@dataclass(frozen=True)
class Holomorphic:
    h: ComplexSeries1


@dataclass(frozen=True)
class DAlembert:
    phi: Series1
    psi: Series1


@dataclass(frozen=True)
class Cauchy:
    Z0: Series1
    Z1: Series1
    c: Union[int, float, Fraction]


@dataclass(frozen=True)
class Developable:
    phi: Series1
    psi: Series1


InitialData = Union[Holomorphic, DAlembert, Cauchy, Developable]


def initial_data_from_json(
    obj: dict, order: int = DEFAULT_ORDER, backend: Backend = Backend.RATIONAL
) -> InitialData:
    """Read {"variant": ..., "c": ..., "series": {...}}.

    Cauchy data may give "coefficients": {"B": .., "C": .., ...} instead of Z0 and Z1.
    """
    backend = get_backend(backend)
    variant = str(obj.get("variant", "")).lower()
    series = obj.get("series", {})

    def one(name):
        if name not in series:
            raise ValueError(f"initial_data.series.{name}: missing")
        return Series1.from_json(series[name], backend=backend).extend(order)

    if variant == "holomorphic":
        if "h" not in series:
            raise ValueError("initial_data.series.h: missing")
        h = ComplexSeries1.from_json(series["h"], backend=backend)
        return Holomorphic(ComplexSeries1(h.re.extend(order), h.im.extend(order)))
    if variant == "dalembert":
        return DAlembert(one("phi"), one("psi"))
    if variant == "developable":
        return Developable(one("phi"), one("psi"))
    if variant == "cauchy":
        if "c" not in obj:
            raise ValueError("initial_data.c: cauchy data requires c")
        c = coerce(backend, obj["c"])
        if "coefficients" in obj:
            coeffs = obj["coefficients"]
            values = [coeffs.get(k, 0) for k in ("B", "C", "F", "G", "K", "L")]
            Z0, Z1 = cauchy_data(*values, order=order, backend=backend)
            return Cauchy(Z0, Z1, c)
        return Cauchy(one("Z0"), one("Z1"), c)
    raise ValueError(
        f"initial_data.variant: unknown variant '{variant}' "
        "(use holomorphic, dalembert, cauchy or developable)"
    )


def initial_data_to_json(data: InitialData) -> dict:
    if isinstance(data, Holomorphic):
        return {"variant": "holomorphic", "series": {"h": data.h.to_json()}}
    if isinstance(data, DAlembert):
        return {
            "variant": "dalembert",
            "series": {"phi": data.phi.to_json(), "psi": data.psi.to_json()},
        }
    if isinstance(data, Developable):
        return {
            "variant": "developable",
            "series": {"phi": data.phi.to_json(), "psi": data.psi.to_json()},
        }
    return {
        "variant": "cauchy",
        "c": scalar_to_json(data.c),
        "series": {"Z0": data.Z0.to_json(), "Z1": data.Z1.to_json()},
    }


def _require_germ(s: Series1, name: str):
    if s[0]:
        raise ValueError(f"{name}: constant term must be zero (germ at the origin)")


def _uv(order: int, backend: Backend) -> Tuple[Series2, Series2]:
    return Series2.variable("u", order, backend), Series2.variable("v", order, backend)


def _close_up(x, y, p, q, N: int) -> LegendrianMapJet:
    """Attach z from dz = p dx + q dy, for jets with x = u and q = v."""
    P = p + y.derivative("u").times_monomial(0, 1)
    Q = y.derivative("v").times_monomial(0, 1)
    z = path_integrate(P, Q).truncate(N)
    return LegendrianMapJet(x, y, z, p, q)


def build_hess_positive(h: ComplexSeries1, N: int = DEFAULT_ORDER) -> LegendrianMapJet:
    """Hess = 1 jet from p + sqrt(-1) y = h(u + sqrt(-1) v), x = u, q = v."""
    _require_germ(h.re, "h")
    _require_germ(h.im, "h")
    backend = h.backend
    re_h, im_h = h.re.extend(N), h.im.extend(N)
    u, v = _uv(N, backend)
    p = Series2.zeros(N, backend)
    y = Series2.zeros(N, backend)
    # (wr, wi) runs over the powers of w = u + sqrt(-1) v
    wr, wi = Series2.constant(1, N, backend), Series2.zeros(N, backend)
    for k in range(1, N + 1):
        wr, wi = wr * u - wi * v, wr * v + wi * u
        a, b = re_h[k], im_h[k]
        if a or b:
            p = p + wr * a - wi * b
            y = y + wi * a + wr * b
    return _close_up(u, y, p, v, N)


def build_hess_negative(phi: Series1, psi: Series1, N: int = DEFAULT_ORDER) -> LegendrianMapJet:
    """Hess = -1 jet: y = phi(u+v) + psi(u-v), p = -phi(u+v) + psi(u-v)."""
    _require_germ(phi, "phi")
    _require_germ(psi, "psi")
    backend = phi.backend
    u, v = _uv(N, backend)
    plus = phi.extend(N).substitute(u + v)
    minus = psi.extend(N).substitute(u - v)
    return _close_up(u, plus + minus, minus - plus, v, N)


def build_hess_split(a: Series1, b: Series1, N: int = DEFAULT_ORDER) -> LegendrianMapJet:
    """Hess = -1 jet from p - j y = sum (a_k + j b_k)(u + j v)^k with j^2 = 1."""
    half = coerce(a.backend, Fraction(1, 2))
    a, b = a.extend(N), b.extend(N)
    phi = (a + b) * (-half)
    psi = (a - b) * half
    return build_hess_negative(phi, psi, N)


def build_developable(phi: Series1, psi: Series1, N: int = DEFAULT_ORDER) -> LegendrianMapJet:
    """Hess = 0 jet: x = u, y = psi(v) - u phi'(v), p = phi(v), q = v."""
    _require_germ(phi, "phi")
    _require_germ(psi, "psi")
    backend = phi.backend
    u, v = _uv(N, backend)
    phi, psi = phi.extend(N + 2), psi.extend(N + 2)
    d1 = phi.derivative()
    p = phi.lift("v", N)
    y = psi.lift("v", N) - (d1.lift("v", N) * u)
    return _close_up(u, y, p, v, N)


def _fourth_root(value: Fraction) -> Optional[Fraction]:
    out = []
    for n in (value.numerator, value.denominator):
        r = math.isqrt(math.isqrt(n))
        while r ** 4 < n:
            r += 1
        if r ** 4 != n:
            return None
        out.append(r)
    return Fraction(out[0], out[1])


def rescale_hess(f: LegendrianMapJet, c) -> LegendrianMapJet:
    """Map a solution of Hess = sign(c) to one of Hess = c.

    Uses the contactomorphism (x, y, z, p, q) -> (s x, s y, z, p / s, q / s), s = |c|^(-1/4).
    """
    if not c:
        raise ValueError("c: rescaling needs c != 0")
    if f.backend is Backend.RATIONAL:
        if isinstance(c, float):
            raise TypeError("c: a float constant cannot rescale a rational jet")
        root = _fourth_root(abs(Fraction(c)))
        if root is None:
            raise ValueError(
                f"c: |{c}| is not a rational fourth power; use the float backend for this c"
            )
        s = 1 / root
    else:
        s = abs(float(c)) ** -0.25
    if s == 1:
        return f
    return LegendrianMapJet(f.x * s, f.y * s, f.z, f.p * (1 / s), f.q * (1 / s))


def solve_gauss_ck(c, Z0: Series1, Z1: Series1, N: int = DEFAULT_ORDER) -> Series2:
    """Power series solution of Z_uu + c (1 + Z_u^2 + v^2)^2 Z_vv = 0.

    Z(0, v) = Z0 and Z_u(0, v) = Z1; the row Z_{k+2, .} is read off the u^k part of the
    equation once rows up to k + 1 are known.
    """
    backend = Z0.backend
    c = coerce(backend, c)
    if not c:
        raise ValueError("c: the Gauss chart requires c != 0 (use build_developable for c = 0)")
    _require_germ(Z0, "Z0")
    _require_germ(Z1, "Z1")
    if Z0[1]:
        raise ValueError("Z0: linear term must be zero (Z_v(0, 0) = 0)")
    Z0, Z1 = Z0.extend(N), Z1.extend(N)
    rows = [[zero(backend)] * (N - i + 1) for i in range(N + 1)]
    rows[0] = list(Z0.coeffs)
    if N >= 1:
        rows[1] = list(Z1.coeffs[:N])
    v2 = Series2.from_dict({(0, 2): 1}, N, backend)
    for k in range(N - 1):
        Z = Series2._wrap(rows, backend)
        weight = 1 + Z.derivative("u") ** 2 + v2.truncate(N - 1)
        R = weight * weight * Z.derivative("v").derivative("v") * (-c)
        for j in range(N - k - 1):
            rows[k + 2][j] = R.coefficient(k, j) / ((k + 2) * (k + 1))
    LOGGER.debug("solved Cauchy-Kovalevskaya recursion to order %d", N)
    return Series2._wrap(rows, backend)


def gauss_equation_residual(Z: Series2, c) -> Series2:
    c = coerce(Z.backend, c)
    v2 = Series2.from_dict({(0, 2): 1}, Z.order - 1, Z.backend)
    weight = 1 + Z.derivative("u") ** 2 + v2
    Zvv = Z.derivative("v").derivative("v")
    return Z.derivative("u").derivative("u") + weight * weight * Zvv * c


def lift_gauss(Z: Series2, c=None) -> LegendrianMapJet:
    """Inverse partial Legendre image (u, -Z_v, Z - v Z_v, Z_u, v); order drops by one."""
    N = Z.order - 1
    u, v = _uv(N, Z.backend)
    Zv = Z.derivative("v")
    z = (Z - Zv.times_monomial(0, 1)).truncate(N)
    return LegendrianMapJet(u, -Zv, z, Z.derivative("u"), v)


def build_gauss(c, Z0: Series1, Z1: Series1, order: int = DEFAULT_ORDER) -> LegendrianMapJet:
    return lift_gauss(solve_gauss_ck(c, Z0, Z1, order + 1), c)


def cauchy_data(B, C, F, G, K, L, order: int = DEFAULT_ORDER, backend=Backend.RATIONAL):
    """Z(0,v) = C v^2/2 + G v^3/6 + L v^4/24 and Z_u(0,v) = B v + F v^2/2 + K v^3/6."""
    backend = get_backend(backend)
    B, C, F, G, K, L = [coerce(backend, x) for x in (B, C, F, G, K, L)]
    Z0 = Series1.from_coeffs([0, 0, C / 2, G / 6, L / 24], backend=backend).extend(order)
    Z1 = Series1.from_coeffs([0, B, F / 2, K / 6], backend=backend).extend(order)
    return Z0, Z1


def gauss_coefficients(Z: Series2) -> Dict[str, object]:
    """The stratification coordinates B, C, F, G, K, L of a Cauchy-Kovalevskaya solution."""
    return {
        "B": Z.coefficient(1, 1),
        "C": 2 * Z.coefficient(0, 2),
        "F": 2 * Z.coefficient(1, 2),
        "G": 6 * Z.coefficient(0, 3),
        "K": 6 * Z.coefficient(1, 3),
        "L": 24 * Z.coefficient(0, 4),
    }


def partial_legendre(f: LegendrianMapJet) -> LegendrianMapJet:
    """(x, y, z, p, q) -> (x, q, z - y q, p, -y)."""
    return LegendrianMapJet(f.x, f.q, f.z - f.y * f.q, f.p, -f.y)


def partial_legendre_inverse(f: LegendrianMapJet) -> LegendrianMapJet:
    """(x, y, z, p, q) -> (x, -q, z - y q, p, y)."""
    return LegendrianMapJet(f.x, -f.q, f.z - f.y * f.q, f.p, f.y)


def open_umbrella(order: int = DEFAULT_ORDER, backend=Backend.RATIONAL) -> LegendrianMapJet:
    """(u, v^2, u v^3, v^3, 3/2 u v)."""
    if order < 4:
        raise ValueError("order: the open umbrella needs order >= 4")
    backend = get_backend(backend)

    def mono(i, j, c=1):
        return Series2.from_dict({(i, j): coerce(backend, c)}, order, backend)

    return LegendrianMapJet(
        mono(1, 0), mono(0, 2), mono(1, 3), mono(0, 3), mono(1, 1, Fraction(3, 2))
    )


def recenter(f: LegendrianMapJet, point=(0, 0)) -> LegendrianMapJet:
    """Germ of f at point, moved to the origin by a contactomorphism with f(0) = 0.

    (X, Y, Z, P, Q) = (x - x0, y - y0, z - z0 - p0 X - q0 Y, p - p0, q - q0).
    """
    u0, v0 = point
    if u0 or v0:
        f = f.map(lambda s: compose_shift(s, u0, v0))
    x0, y0, z0, p0, q0 = [s.coefficient(0, 0) for s in f.components()]
    X, Y, P, Q = f.x - x0, f.y - y0, f.p - p0, f.q - q0
    Z = f.z - z0 - X * p0 - Y * q0
    return LegendrianMapJet(X, Y, Z, P, Q)


def swap_xy(f: LegendrianMapJet) -> LegendrianMapJet:
    """(x, y, z, p, q) -> (y, x, z, q, p)."""
    return LegendrianMapJet(f.y, f.x, f.z, f.q, f.p)


def _invert_pair(a: Series2, b: Series2) -> Tuple[Series2, Series2]:
    """Series (U, V) with a(U, V) = u and b(U, V) = v; a, b vanish at the origin."""
    backend = a.backend
    m11, m12 = a.coefficient(1, 0), a.coefficient(0, 1)
    m21, m22 = b.coefficient(1, 0), b.coefficient(0, 1)
    det = m11 * m22 - m12 * m21
    if not det:
        raise ValueError("chart pair is not a local diffeomorphism at the point")
    i11, i12, i21, i22 = m22 / det, -m12 / det, -m21 / det, m11 / det
    u, v = _uv(a.order, backend)
    U, V = u * i11 + v * i12, u * i21 + v * i22
    for _ in range(a.order):
        ea = a.compose(U, V) - u
        eb = b.compose(U, V) - v
        U, V = U - (ea * i11 + eb * i12), V - (ea * i21 + eb * i22)
    return U, V


def adapt_chart(f: LegendrianMapJet, point=(0, 0)) -> LegendrianMapJet:
    """Re-parametrize the germ at point so that x = u and q = v.

    Either (x, q) o f or (y, p) o f is a local diffeomorphism for a Legendrian immersion;
    the pair with the larger Jacobian determinant is inverted, (x, q) on ties. The (y, p)
    case goes through the symmetry (x, y, z, p, q) -> (y, x, z, q, p).
    """
    g = recenter(f, point)

    def jac(a, b):
        return a.coefficient(1, 0) * b.coefficient(0, 1) - a.coefficient(0, 1) * b.coefficient(1, 0)

    if abs(jac(g.y, g.p)) > abs(jac(g.x, g.q)):
        LOGGER.debug("adapting chart through the (y, p) pair")
        g = swap_xy(g)
    U, V = _invert_pair(g.x, g.q)
    u, v = _uv(g.order, g.backend)
    return LegendrianMapJet(u, g.y.compose(U, V), g.z.compose(U, V), g.p.compose(U, V), v)


def jacobian_at(f: LegendrianMapJet, point=(0, 0)) -> np.ndarray:
    """5x2 Jacobian of f at point, as floats."""
    rows = []
    for s in f.components():
        rows.append(
            [float(s.derivative("u").evaluate(*point)), float(s.derivative("v").evaluate(*point))]
        )
    return np.array(rows)


def _rational(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def differential_rank(f: LegendrianMapJet, point=(0, 0), tol: float = 1e-9) -> int:
    """Rank of df at point; exact for rational jets."""
    if f.backend is Backend.RATIONAL:
        g = f.map(lambda s: compose_shift(s, *point)) if any(point) else f
        matrix = sympy.Matrix(
            [
                [_rational(s.coefficient(1, 0)), _rational(s.coefficient(0, 1))]
                for s in g.components()
            ]
        )
        return matrix.rank()
    return int(np.linalg.matrix_rank(jacobian_at(f, point), tol=tol))


def gauss_chart_to_sphere(f: LegendrianMapJet) -> Tuple[Series2, ...]:
    """(x1, x2, x3, y1, y2, y3) with x = (z, x, y) and y1 = (1 + p^2 + q^2)^(-1/2)."""
    y1 = (1 + f.p * f.p + f.q * f.q).inv_sqrt()
    return f.z, f.x, f.y, y1, -(f.p * y1), -(f.q * y1)


def build_jet(system: MongeAmpereSystem, data: InitialData, order: int = DEFAULT_ORDER):
    """Dispatch initial data to the constructor matching the equation."""
    c = system.c
    if system.family is Family.GAUSS:
        if not isinstance(data, Cauchy):
            raise ValueError("initial_data.variant: the gauss equation takes cauchy data")
        if not c:
            raise ValueError("c: the Gauss chart requires c != 0")
        if data.c != c:
            raise ValueError(f"initial_data.c: {data.c} does not match the equation constant {c}")
        return build_gauss(c, data.Z0, data.Z1, order)
    if c > 0:
        if not isinstance(data, Holomorphic):
            raise ValueError("initial_data.variant: hess with c > 0 takes holomorphic data")
        return rescale_hess(build_hess_positive(data.h, order), c)
    if c < 0:
        if not isinstance(data, DAlembert):
            raise ValueError("initial_data.variant: hess with c < 0 takes dalembert data")
        return rescale_hess(build_hess_negative(data.phi, data.psi, order), c)
    if not isinstance(data, Developable):
        raise ValueError("initial_data.variant: hess with c = 0 takes developable data")
    return build_developable(data.phi, data.psi, order)
