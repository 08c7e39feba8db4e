"""Truncated power series in one and two variables.

A series of order N stores the coefficients of every monomial of total degree <= N;
higher terms are unknown and are discarded by every operation. Two coefficient
backends are supported: exact rationals (fractions.Fraction) for verification and
binary floats for evaluation, tracing and sampling.
"""
from __future__ import annotations

import math

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterator, List, Sequence, Tuple, Union

import numpy as np

from numpy.polynomial import polynomial as npoly

DEFAULT_ORDER = 8
ZERO_TOL = 1e-9

Scalar = Union[int, float, Fraction]


class Backend(Enum):
    RATIONAL = "rational"
    FLOAT = "float"


def get_backend(name: Union[str, Backend]) -> Backend:
    if isinstance(name, Backend):
        return name
    try:
        return Backend(str(name).lower())
    except ValueError:
        raise ValueError(f"backend: unknown backend '{name}' (use 'rational' or 'float')")


def coerce(backend: Backend, value) -> Scalar:
    """Convert a scalar (int, Fraction, float or 'num/den' string) to the backend's type."""
    if backend is Backend.RATIONAL:
        if isinstance(value, float):
            raise TypeError(f"float scalar {value!r} cannot enter the rational backend")
        return Fraction(value)
    if isinstance(value, str):
        return float(Fraction(value))
    return float(value)


def zero(backend: Backend) -> Scalar:
    return Fraction(0) if backend is Backend.RATIONAL else 0.0


def scalar_to_json(value: Scalar):
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


def _same_backend(a, b) -> Backend:
    if a.backend is not b.backend:
        raise TypeError(f"backend mismatch: {a.backend.value} vs {b.backend.value}")
    return a.backend


def _binomial_half(k: int) -> Fraction:
    """Coefficient of r^k in (1 + r)^(-1/2)."""
    out = Fraction(1)
    for m in range(k):
        out *= (Fraction(-1, 2) - m) / (m + 1)
    return out


@dataclass(frozen=True)
class Series1:
    """Truncated series sum c_k t^k, k = 0..order."""

    coeffs: Tuple[Scalar, ...]
    backend: Backend = Backend.RATIONAL

    @classmethod
    def from_coeffs(
        cls, values: Sequence, order: int = None, backend: Backend = Backend.RATIONAL
    ) -> "Series1":
        backend = get_backend(backend)
        values = [coerce(backend, x) for x in values]
        if order is None:
            order = max(len(values) - 1, 0)
        values = values[: order + 1] + [zero(backend)] * (order + 1 - len(values))
        return cls(tuple(values), backend)

    @classmethod
    def zeros(cls, order: int, backend: Backend = Backend.RATIONAL) -> "Series1":
        return cls((zero(backend),) * (order + 1), backend)

    @classmethod
    def variable(cls, order: int, backend: Backend = Backend.RATIONAL) -> "Series1":
        return cls.from_coeffs([0, 1], order=order, backend=backend)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Scalar:
        if 0 <= k <= self.order:
            return self.coeffs[k]
        return zero(self.backend)

    def __add__(self, other):
        if not isinstance(other, Series1):
            values = list(self.coeffs)
            values[0] += coerce(self.backend, other)
            return Series1(tuple(values), self.backend)
        backend = _same_backend(self, other)
        n = min(self.order, other.order)
        return Series1(tuple(self.coeffs[k] + other.coeffs[k] for k in range(n + 1)), backend)

    __radd__ = __add__

    def __neg__(self):
        return Series1(tuple(-x for x in self.coeffs), self.backend)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series1):
            c = coerce(self.backend, other)
            return Series1(tuple(c * x for x in self.coeffs), self.backend)
        backend = _same_backend(self, other)
        n = min(self.order, other.order)
        out = [zero(backend)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if not a:
                continue
            for j in range(n + 1 - i):
                b = other.coeffs[j]
                if b:
                    out[i + j] += a * b
        return Series1(tuple(out), backend)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Series1.from_coeffs([1], order=self.order, backend=self.backend)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self) -> "Series1":
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 series")
        return Series1(tuple(k * self.coeffs[k] for k in range(1, self.order + 1)), self.backend)

    def integral(self) -> "Series1":
        """Antiderivative vanishing at 0; the order grows by one."""
        return Series1(
            (zero(self.backend),) + tuple(x / (k + 1) for k, x in enumerate(self.coeffs)),
            self.backend,
        )

    def truncate(self, order: int) -> "Series1":
        if order > self.order:
            raise ValueError(f"cannot truncate order {self.order} to higher order {order}")
        return Series1(self.coeffs[: order + 1], self.backend)

    def extend(self, order: int) -> "Series1":
        """Pad with zeros, treating the stored coefficients as an exact polynomial."""
        if order <= self.order:
            return self.truncate(order)
        return Series1(self.coeffs + (zero(self.backend),) * (order - self.order), self.backend)

    def compose(self, g: "Series1") -> "Series1":
        """Substitute a series g with g(0) = 0."""
        _same_backend(self, g)
        if g[0]:
            raise ValueError("composition needs an argument with zero constant term")
        n = min(self.order, g.order)
        out = Series1.from_coeffs([self.coeffs[n]], order=n, backend=self.backend)
        for k in range(n - 1, -1, -1):
            out = out * g + self.coeffs[k]
        return out

    def substitute(self, arg: "Series2") -> "Series2":
        """Substitute a bivariate series arg with arg(0, 0) = 0."""
        _same_backend(self, arg)
        if arg.coefficient(0, 0):
            raise ValueError("substitution needs an argument with zero constant term")
        n = min(self.order, arg.order)
        out = Series2.constant(self.coeffs[n], n, self.backend)
        for k in range(n - 1, -1, -1):
            out = out * arg + self.coeffs[k]
        return out

    def lift(self, var: str = "v", order: int = None) -> "Series2":
        """View the series as a bivariate series in the variable var."""
        order = self.order if order is None else order
        values = {}
        for k, x in enumerate(self.coeffs[: order + 1]):
            values[(k, 0) if var == "u" else (0, k)] = x
        return Series2.from_dict(values, order, self.backend)

    def evaluate(self, t):
        return npoly.polyval(t, np.array([float(x) for x in self.coeffs]))

    def max_abs(self) -> float:
        return max(abs(float(x)) for x in self.coeffs)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        if self.backend is Backend.RATIONAL:
            return not any(self.coeffs)
        return self.max_abs() <= tol

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "backend": self.backend.value,
            "coeffs": [[k, scalar_to_json(x)] for k, x in enumerate(self.coeffs) if x],
        }

    @classmethod
    def from_json(cls, obj, order: int = None, backend: Backend = None) -> "Series1":
        """Read a series payload. Plain coefficient lists are accepted as shorthand."""
        if isinstance(obj, list):
            obj = {"coeffs": obj}
        backend = get_backend(obj.get("backend") or backend or Backend.RATIONAL)
        coeffs = obj.get("coeffs", [])
        if coeffs and isinstance(coeffs[0], list):
            size = max(k for k, _ in coeffs) + 1
            values = [0] * size
            for k, x in coeffs:
                values[k] = x
        else:
            values = list(coeffs)
        if "order" in obj:
            order = int(obj["order"])
        return cls.from_coeffs(values, order=order, backend=backend)


@dataclass(frozen=True)
class ComplexSeries1:
    """h = re + sqrt(-1) im as a pair of real series."""

    re: Series1
    im: Series1

    def __post_init__(self):
        _same_backend(self.re, self.im)
        if self.re.order != self.im.order:
            raise ValueError("re and im must share the same order")

    @property
    def order(self) -> int:
        return self.re.order

    @property
    def backend(self) -> Backend:
        return self.re.backend

    def to_json(self) -> dict:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, obj, order: int = None, backend: Backend = None) -> "ComplexSeries1":
        re = Series1.from_json(obj["re"], order=order, backend=backend)
        im = Series1.from_json(obj.get("im", []), order=re.order, backend=re.backend)
        return cls(re, im)


@dataclass(frozen=True)
class Series2:
    """Truncated bivariate series sum c_ij u^i v^j over i + j <= order.

    rows[i][j] holds c_ij, so rows[i] has order - i + 1 entries.
    """

    rows: Tuple[Tuple[Scalar, ...], ...]
    backend: Backend = Backend.RATIONAL

    @classmethod
    def zeros(cls, order: int, backend: Backend = Backend.RATIONAL) -> "Series2":
        if order < 0:
            raise ValueError("order must be non-negative")
        z = zero(backend)
        return cls(tuple((z,) * (order - i + 1) for i in range(order + 1)), backend)

    @classmethod
    def from_dict(
        cls, values: Dict[Tuple[int, int], Scalar], order: int, backend=Backend.RATIONAL
    ) -> "Series2":
        backend = get_backend(backend)
        rows = [[zero(backend)] * (order - i + 1) for i in range(order + 1)]
        for (i, j), x in values.items():
            if i + j <= order:
                rows[i][j] += coerce(backend, x)
        return cls._wrap(rows, backend)

    @classmethod
    def constant(cls, value, order: int, backend=Backend.RATIONAL) -> "Series2":
        return cls.from_dict({(0, 0): value}, order, backend)

    @classmethod
    def variable(cls, var: str, order: int, backend=Backend.RATIONAL) -> "Series2":
        if var not in ("u", "v"):
            raise ValueError(f"unknown variable '{var}'")
        return cls.from_dict({(1, 0) if var == "u" else (0, 1): 1}, order, backend)

    @classmethod
    def _wrap(cls, rows: List[List[Scalar]], backend: Backend) -> "Series2":
        return cls(tuple(tuple(r) for r in rows), backend)

    @property
    def order(self) -> int:
        return len(self.rows) - 1

    def coefficient(self, i: int, j: int) -> Scalar:
        """Coefficient of u^i v^j; terms above the order read as zero."""
        if i >= 0 and j >= 0 and i + j <= self.order:
            return self.rows[i][j]
        return zero(self.backend)

    def items(self) -> Iterator[Tuple[int, int, Scalar]]:
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                yield i, j, x

    def _empty(self, order: int) -> List[List[Scalar]]:
        return [[zero(self.backend)] * (order - i + 1) for i in range(order + 1)]

    def __add__(self, other):
        if not isinstance(other, Series2):
            rows = [list(r) for r in self.rows]
            rows[0][0] += coerce(self.backend, other)
            return Series2._wrap(rows, self.backend)
        backend = _same_backend(self, other)
        n = min(self.order, other.order)
        rows = [
            [self.rows[i][j] + other.rows[i][j] for j in range(n - i + 1)] for i in range(n + 1)
        ]
        return Series2._wrap(rows, backend)

    __radd__ = __add__

    def __neg__(self):
        return Series2(tuple(tuple(-x for x in r) for r in self.rows), self.backend)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Series2):
            c = coerce(self.backend, other)
            return Series2(tuple(tuple(c * x for x in r) for r in self.rows), self.backend)
        backend = _same_backend(self, other)
        n = min(self.order, other.order)
        out = self._empty(n)
        right = [(i, j, x) for i, j, x in other.items() if x and i + j <= n]
        for i1, j1, a in self.items():
            if not a or i1 + j1 > n:
                continue
            room = n - i1 - j1
            for i2, j2, b in right:
                if i2 + j2 <= room:
                    out[i1 + i2][j1 + j2] += a * b
        return Series2._wrap(out, backend)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Series2.constant(1, self.order, self.backend)
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, var: str) -> "Series2":
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 series")
        n = self.order - 1
        out = self._empty(n)
        for i in range(n + 1):
            for j in range(n - i + 1):
                if var == "u":
                    out[i][j] = (i + 1) * self.rows[i + 1][j]
                elif var == "v":
                    out[i][j] = (j + 1) * self.rows[i][j + 1]
                else:
                    raise ValueError(f"unknown variable '{var}'")
        return Series2._wrap(out, self.backend)

    def times_monomial(self, i: int, j: int) -> "Series2":
        """Exact product with u^i v^j; the order grows by i + j."""
        n = self.order + i + j
        out = self._empty(n)
        for a, b, x in self.items():
            out[a + i][b + j] = x
        return Series2._wrap(out, self.backend)

    def truncate(self, order: int) -> "Series2":
        if order > self.order:
            raise ValueError(f"cannot truncate order {self.order} to higher order {order}")
        rows = tuple(r[: order - i + 1] for i, r in enumerate(self.rows[: order + 1]))
        return Series2(rows, self.backend)

    def extend(self, order: int) -> "Series2":
        """Pad with zeros, treating the stored coefficients as an exact polynomial."""
        if order <= self.order:
            return self.truncate(order)
        out = self._empty(order)
        for i, j, x in self.items():
            out[i][j] = x
        return Series2._wrap(out, self.backend)

    def compose_shift(self, u0, v0) -> "Series2":
        return compose_shift(self, u0, v0)

    def along(self, gu: Series1, gv: Series1) -> Series1:
        """Restrict to the curve t -> (gu(t), gv(t)); both must vanish at t = 0."""
        _same_backend(self, gu)
        _same_backend(self, gv)
        if gu[0] or gv[0]:
            raise ValueError("curve must pass through the origin")
        n = min(self.order, gu.order, gv.order)
        out = Series1.zeros(n, self.backend)
        for i in range(self.order, -1, -1):
            row = Series1.zeros(n, self.backend)
            for j in range(self.order - i, -1, -1):
                row = row * gv + self.rows[i][j]
            out = out * gu + row
        return out

    def compose(self, U: "Series2", V: "Series2") -> "Series2":
        """Substitute u -> U(u, v), v -> V(u, v); both must vanish at the origin."""
        _same_backend(self, U)
        _same_backend(self, V)
        if U.coefficient(0, 0) or V.coefficient(0, 0):
            raise ValueError("substituted series must vanish at the origin")
        n = min(self.order, U.order, V.order)
        out = Series2.zeros(n, self.backend)
        for i in range(self.order, -1, -1):
            row = Series2.zeros(n, self.backend)
            for j in range(self.order - i, -1, -1):
                row = row * V + self.rows[i][j]
            out = out * U + row
        return out

    def inv_sqrt(self) -> "Series2":
        """Binomial series of self^(-1/2) around the constant term."""
        w0 = self.coefficient(0, 0)
        if self.backend is Backend.RATIONAL:
            if w0 != 1:
                raise ValueError("rational inverse square root needs constant term 1")
            scale = Fraction(1)
        else:
            if w0 <= 0:
                raise ValueError("inverse square root needs a positive constant term")
            scale = 1.0 / math.sqrt(w0)
        r = self * (1 / w0) - 1
        out = Series2.zeros(self.order, self.backend)
        for k in range(self.order, -1, -1):
            c = _binomial_half(k)
            out = out * r + (c if self.backend is Backend.RATIONAL else float(c))
        return out * scale

    def to_numpy(self) -> np.ndarray:
        out = np.zeros((self.order + 1, self.order + 1))
        for i, j, x in self.items():
            out[i, j] = float(x)
        return out

    def evaluate(self, u, v):
        """Horner evaluation; u and v may be numpy arrays of equal shape."""
        return npoly.polyval2d(u, v, self.to_numpy())

    def max_abs(self) -> float:
        return max(abs(float(x)) for _, _, x in self.items())

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        if self.backend is Backend.RATIONAL:
            return not any(x for _, _, x in self.items())
        return self.max_abs() <= tol

    def nonzero(self) -> List[Tuple[int, int, Scalar]]:
        return [(i, j, x) for i, j, x in self.items() if x]

    def to_float(self) -> "Series2":
        return Series2(tuple(tuple(float(x) for x in r) for r in self.rows), Backend.FLOAT)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "backend": self.backend.value,
            "coeffs": [[i, j, scalar_to_json(x)] for i, j, x in self.nonzero()],
        }

    @classmethod
    def from_json(cls, obj: dict, order: int = None, backend: Backend = None) -> "Series2":
        backend = get_backend(obj.get("backend") or backend or Backend.RATIONAL)
        order = int(obj.get("order", order if order is not None else DEFAULT_ORDER))
        values = {}
        for i, j, x in obj.get("coeffs", []):
            values[(int(i), int(j))] = values.get((int(i), int(j)), 0) + coerce(backend, x)
        return cls.from_dict(values, order, backend)


@dataclass(frozen=True)
class SplitSeries2:
    """re + im * s with s^2 = square, where square is a fixed scalar.

    With square = -c this realizes sqrt(-c) exactly: s is real for c < 0 and
    imaginary for c > 0.
    """

    re: Series2
    im: Series2
    square: Scalar

    def __add__(self, other: "SplitSeries2") -> "SplitSeries2":
        return SplitSeries2(self.re + other.re, self.im + other.im, self.square)

    def __sub__(self, other: "SplitSeries2") -> "SplitSeries2":
        return SplitSeries2(self.re - other.re, self.im - other.im, self.square)

    def __mul__(self, other: "SplitSeries2") -> "SplitSeries2":
        re = self.re * other.re + self.im * other.im * self.square
        im = self.re * other.im + self.im * other.re
        return SplitSeries2(re, im, self.square)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return self.re.is_zero(tol) and self.im.is_zero(tol)


def compose_shift(a: Series2, u0, v0) -> Series2:
    """Taylor recentering: the series of a(u + u0, v + v0), same order."""
    u0 = coerce(a.backend, u0)
    v0 = coerce(a.backend, v0)
    n = a.order
    upow = [u0 ** k for k in range(n + 1)]
    vpow = [v0 ** k for k in range(n + 1)]
    out = a._empty(n)
    for i, j, x in a.nonzero():
        for k in range(i + 1):
            cu = math.comb(i, k) * upow[i - k]
            if not cu:
                continue
            for m in range(j + 1):
                out[k][m] += x * cu * math.comb(j, m) * vpow[j - m]
    return Series2._wrap(out, a.backend)


def path_integrate(P: Series2, Q: Series2, tol: float = ZERO_TOL) -> Series2:
    """Return Z with Z(0,0) = 0, Z_u = P and Z_v = Q.

    The closedness P_v = Q_u is checked first; Z is integrated along the axis path
    (0,0) -> (u,0) -> (u,v), so the order of Z is one more than that of P and Q.
    """
    backend = _same_backend(P, Q)
    n = min(P.order, Q.order)
    P = P.truncate(n)
    Q = Q.truncate(n)
    if n >= 1:
        defect = P.derivative("v") - Q.derivative("u")
        scale = max(1.0, P.max_abs(), Q.max_abs())
        if not defect.is_zero(tol * scale):
            raise ValueError(
                "closedness violated: dP/dv != dQ/du (input is not Legendrian), "
                f"max defect {defect.max_abs():.3e}"
            )
    out = P._empty(n + 1)
    for i in range(n + 1):
        out[i + 1][0] += P.rows[i][0] / (i + 1)
    for i, j, x in Q.items():
        out[i][j + 1] += x / (j + 1)
    return Series2._wrap(out, backend)
