"""Residuals of the contact and Monge-Ampere conditions, and the two Legendrian projections."""
from __future__ import annotations

import logging

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Tuple

import sympy

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .series import ZERO_TOL, Backend, Series2, SplitSeries2, coerce, scalar_to_json
from .solutions import Family, LegendrianMapJet, MongeAmpereSystem, differential_rank, recenter

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualReport:
    form: str
    residual: Tuple[Series2, ...]
    max_abs: float
    exact_zero: bool

    @classmethod
    def of(cls, form: str, *residual: Series2) -> "ResidualReport":
        max_abs = max(r.max_abs() for r in residual)
        exact_zero = all(x == 0 for r in residual for _, _, x in r.items())
        return cls(form, tuple(residual), max_abs, exact_zero)

    @property
    def backend(self) -> Backend:
        return self.residual[0].backend

    def passed(self, tol: float = ZERO_TOL) -> bool:
        if self.backend is Backend.RATIONAL:
            return self.exact_zero
        return self.max_abs <= tol

    def to_json(self) -> dict:
        return {
            "form": self.form,
            "max_abs": self.max_abs,
            "exact_zero": self.exact_zero,
            "residual": [r.to_json() for r in self.residual],
        }


def pullback_2form(a: Series2, b: Series2) -> Series2:
    """du^dv coefficient of da^db."""
    return a.derivative("u") * b.derivative("v") - a.derivative("v") * b.derivative("u")


def contact_residual(f: LegendrianMapJet) -> ResidualReport:
    """(z_u - p x_u - q y_u, z_v - p x_v - q y_v)."""
    parts = []
    for var in ("u", "v"):
        parts.append(
            f.z.derivative(var) - f.p * f.x.derivative(var) - f.q * f.y.derivative(var)
        )
    return ResidualReport.of("theta", *parts)


def _gauss_weight(f: LegendrianMapJet) -> Series2:
    return 1 + f.p * f.p + f.q * f.q


def ma_residual(f: LegendrianMapJet, system: MongeAmpereSystem) -> ResidualReport:
    """du^dv coefficient of the pulled-back Monge-Ampere 2-form."""
    c = coerce(f.backend, system.c)
    area = pullback_2form(f.x, f.y)
    if system.family is Family.GAUSS:
        w = _gauss_weight(f)
        area = w * w * area
    return ResidualReport.of("omega", area * c - pullback_2form(f.p, f.q))


def project_pi1(f: LegendrianMapJet) -> Tuple[Series2, Series2, Series2]:
    return f.x, f.y, f.z


def project_pi2(f: LegendrianMapJet, system: MongeAmpereSystem) -> Tuple[Series2, ...]:
    """(p, q, px + qy - z) for Hess, (xp + yq - z, p, q) in the Gauss chart."""
    height = f.p * f.x + f.q * f.y - f.z
    if system.family is Family.GAUSS:
        return height, f.p, f.q
    return f.p, f.q, height


def _split(scaled: Series2, plain: Series2, sign: int, w, c) -> SplitSeries2:
    """sign * sqrt(-c) * w * scaled + plain."""
    im = scaled * sign if w is None else w * scaled * sign
    return SplitSeries2(plain.truncate(im.order), im, -c)


def factorization_residual(
    f: LegendrianMapJet, system: MongeAmpereSystem
) -> Tuple[ResidualReport, ResidualReport]:
    """Pullbacks of (s w dx + dq)^(s w dy - dp) for s = +sqrt(-c) and s = -sqrt(-c).

    w is 1 for Hess and 1 + p^2 + q^2 in the Gauss chart. Each residual is reported as the
    pair (real part, sqrt(-c) part).
    """
    c = coerce(f.backend, system.c)
    if not c:
        raise ValueError("c: the factorization needs c != 0")
    w = _gauss_weight(f) if system.family is Family.GAUSS else None
    reports = []
    for form, sign in (("factorization-left", 1), ("factorization-right", -1)):
        alpha = [
            _split(f.x.derivative(var), f.q.derivative(var), sign, w, c) for var in ("u", "v")
        ]
        beta = [
            _split(f.y.derivative(var), -f.p.derivative(var), sign, w, c) for var in ("u", "v")
        ]
        wedge = alpha[0] * beta[1] - alpha[1] * beta[0]
        reports.append(ResidualReport.of(form, wedge.re, wedge.im))
    return reports[0], reports[1]


def normalization_residual(sphere: Tuple[Series2, ...]) -> ResidualReport:
    """y1^2 + y2^2 + y3^2 - 1 for the output of gauss_chart_to_sphere."""
    _, _, _, y1, y2, y3 = sphere
    return ResidualReport.of("normalization", y1 * y1 + y2 * y2 + y3 * y3 - 1)


def is_geometric_solution(f: LegendrianMapJet, system: MongeAmpereSystem, tol=ZERO_TOL) -> bool:
    """Legendrian, annihilates omega and immersive at the origin."""
    if not contact_residual(f).passed(tol):
        return False
    if not ma_residual(f, system).passed(tol):
        return False
    return differential_rank(f) == 2


@dataclass(frozen=True)
class FullnessReport:
    degree: int
    basis: Tuple[Tuple[Fraction, ...], ...]
    constraints: int

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def is_full(self) -> bool:
        """Every admissible linear part is a multiple of dz."""
        return self.dimension == 1 and not any(
            x for k, x in enumerate(self.basis[0]) if k != 2
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "dimension": self.dimension,
            "full": self.is_full,
            "basis": [[scalar_to_json(x) for x in b] for b in self.basis],
        }


def _monomials(f: LegendrianMapJet, degree: int) -> Dict[Tuple[int, ...], Series2]:
    """Compositions with f of all monomials of degree 2..degree in (x, y, z, p, q)."""
    comps = [s.truncate(degree) for s in f.components()]
    out = {}
    previous = {(k,): comps[k] for k in range(5)}
    for d in range(2, degree + 1):
        current = {}
        for key in combinations_with_replacement(range(5), d):
            current[key] = previous[key[:-1]] * comps[key[-1]]
        out.update(current)
        previous = current
    return out


def _qq(x: Fraction):
    return QQ(x.numerator, x.denominator)


def fullness_check(f: LegendrianMapJet, deg: int) -> FullnessReport:
    """Admissible linear parts (A, B, C, D, E) of functions vanishing on f mod degree deg + 1.

    Unknowns are the linear coefficients plus every coefficient of the degree 2..deg part;
    the reduced row echelon form of the composed system isolates the rows that constrain
    the linear part alone.
    """
    if deg > f.order:
        raise ValueError(f"deg: {deg} exceeds the jet order {f.order}")
    if f.backend is not Backend.RATIONAL:
        raise ValueError("backend: fullness_check needs the rational backend")
    g = recenter(f)
    higher = [s for s in _monomials(g, deg).values() if not s.is_zero()]
    linear = [s.truncate(deg) for s in g.components()]
    columns = higher + linear
    rows = [(i, j) for i in range(deg + 1) for j in range(deg + 1 - i)]
    matrix = DomainMatrix(
        [[_qq(c.coefficient(i, j)) for c in columns] for i, j in rows],
        (len(rows), len(columns)),
        QQ,
    )
    rref, pivots = matrix.rref()
    reduced = rref.to_Matrix()
    split = len(higher)
    constraint_rows = [r for r, col in enumerate(pivots) if col >= split]
    if constraint_rows:
        R = sympy.Matrix([list(reduced[r, split:]) for r in constraint_rows])
        basis = R.nullspace()
    else:
        basis = [sympy.eye(5)[:, k] for k in range(5)]
    vectors = tuple(tuple(Fraction(int(x.p), int(x.q)) for x in b) for b in basis)
    LOGGER.debug(
        "fullness at degree %d: %d constraint(s), dimension %d",
        deg,
        len(constraint_rows),
        len(vectors),
    )
    return FullnessReport(deg, vectors, len(constraint_rows))


def fullness_profile(f: LegendrianMapJet, degrees: Iterable[int]) -> List[FullnessReport]:
    return [fullness_check(f, d) for d in degrees]
