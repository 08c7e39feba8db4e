"""Singularities of the two Legendrian projections.

A singular point of pi o f is classified with the criterion on the singular locus
gamma = {Delta = 0} and a kernel field eta of d(pi o f):

  det(gamma'(0), eta(0)) != 0                     cuspidal edge
  det = 0 and d/dt det(gamma'(t), eta(t)) != 0    swallowtail

Rational jets go through an exact series computation at the point; float jets use a
traced locus and central differences.
"""
from __future__ import annotations

import logging

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from numpy.polynomial import polynomial as npoly

from .legendrian import pullback_2form
from .series import ZERO_TOL, Backend, Series1, Series2, scalar_to_json
from .solutions import LegendrianMapJet, adapt_chart, recenter

LOGGER = logging.getLogger(__name__)

STEP = 1e-2
NEWTON_TOL = 1e-12
MAX_NEWTON = 50
MAX_STEPS = 400
GRID = 20
BOX = (-1.0, 1.0, -1.0, 1.0)
STRATUM_TOL = 1e-6


class Leg(Enum):
    PI1 = "pi1"
    PI2 = "pi2"


class Verdict(Enum):
    IMMERSION = "Immersion"
    CUSPIDAL_EDGE = "CuspidalEdge"
    SWALLOWTAIL = "Swallowtail"
    DEGENERATE = "Degenerate"
    UNRESOLVED = "Unresolved"


def get_leg(leg: Union[str, Leg]) -> Leg:
    if isinstance(leg, Leg):
        return leg
    try:
        return Leg(str(leg).lower())
    except ValueError:
        raise ValueError(f"leg: unknown leg '{leg}' (use 'pi1' or 'pi2')")


@dataclass(frozen=True)
class SingularityReport:
    point: Tuple
    leg: Leg
    verdict: Verdict
    delta: float
    grad: Tuple
    det: Optional[object] = None
    ddet: Optional[object] = None
    method: str = "numeric"

    def to_json(self) -> dict:
        def value(x):
            return None if x is None else scalar_to_json(x)

        return {
            "point": [value(x) for x in self.point],
            "leg": self.leg.value,
            "verdict": self.verdict.value,
            "delta": value(self.delta),
            "grad": [value(x) for x in self.grad],
            "det": value(self.det),
            "ddet": value(self.ddet),
            "method": self.method,
        }


@dataclass(frozen=True)
class Stratum:
    family: str
    label: str
    conditions: Tuple[Tuple[str, str], ...]
    case: Optional[str] = None
    verdicts: Optional[Tuple[Verdict, Optional[Verdict]]] = None

    @property
    def outside(self) -> bool:
        return self.verdicts is None

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "label": self.label,
            "case": self.case,
            "conditions": [list(c) for c in self.conditions],
            "verdicts": None
            if self.verdicts is None
            else [None if v is None else v.value for v in self.verdicts],
        }


# Delta and the Jacobian rows


def _leg_pair(f: LegendrianMapJet, leg: Leg) -> Tuple[Series2, Series2]:
    """The two coordinates whose differentials span d(pi o f) on a Legendrian jet."""
    return (f.x, f.y) if leg is Leg.PI1 else (f.p, f.q)


def delta_series(f: LegendrianMapJet, leg: Union[str, Leg]) -> Series2:
    """Jacobian determinant of the leg's coordinate pair; y_v or p_u in the adapted chart."""
    a, b = _leg_pair(f, get_leg(leg))
    return pullback_2form(a, b)


class _Field:
    """Float evaluation of Delta, its gradient and the Jacobian rows of one leg."""

    def __init__(self, f: LegendrianMapJet, leg: Leg):
        g = f if f.backend is Backend.FLOAT else f.to_float()
        delta = delta_series(g, leg)
        a, b = _leg_pair(g, leg)
        self.delta = delta.to_numpy()
        self.du = delta.derivative("u").to_numpy()
        self.dv = delta.derivative("v").to_numpy()
        self.rows = [
            (s.derivative("u").to_numpy(), s.derivative("v").to_numpy()) for s in (a, b)
        ]

    def value(self, x) -> float:
        return float(npoly.polyval2d(x[0], x[1], self.delta))

    def grad(self, x) -> np.ndarray:
        return np.array(
            [npoly.polyval2d(x[0], x[1], self.du), npoly.polyval2d(x[0], x[1], self.dv)]
        )

    def tangent(self, x) -> np.ndarray:
        g = self.grad(x)
        norm = np.hypot(g[0], g[1])
        if norm == 0:
            raise ValueError(f"degenerate point {tuple(x)}: grad Delta = 0")
        return np.array([-g[1], g[0]]) / norm

    def row(self, x, k: int) -> np.ndarray:
        cu, cv = self.rows[k]
        return np.array([npoly.polyval2d(x[0], x[1], cu), npoly.polyval2d(x[0], x[1], cv)])

    def kernel_row(self, x) -> int:
        norms = [np.hypot(*self.row(x, k)) for k in (0, 1)]
        return 0 if norms[0] >= norms[1] else 1

    def kernel(self, x, k: int) -> np.ndarray:
        a, b = self.row(x, k)
        norm = np.hypot(a, b)
        if norm == 0:
            raise RuntimeError(f"d(pi o f) has rank 0 at {tuple(x)}; no kernel field")
        return np.array([-b, a]) / norm


def _project(fld: _Field, x, tol: float = NEWTON_TOL) -> np.ndarray:
    """Newton projection onto {Delta = 0} along the gradient."""
    x = np.array(x, dtype=float)
    for _ in range(MAX_NEWTON):
        value = fld.value(x)
        g = fld.grad(x)
        norm2 = g @ g
        if norm2 == 0:
            raise ValueError(f"degenerate point {tuple(x)}: grad Delta = 0")
        dx = -value * g / norm2
        x = x + dx
        if np.hypot(*dx) <= tol:
            return x
    raise RuntimeError(f"Newton projection did not converge from {tuple(x)}")


def _correct(fld: _Field, x, t, h: float) -> np.ndarray:
    """One pseudo-arclength step: predict along t, then Newton on [Delta, t.(x - x_pred)]."""
    pred = x + h * t
    y = pred.copy()
    for _ in range(MAX_NEWTON):
        g = fld.grad(y)
        F = np.array([fld.value(y), t @ (y - pred)])
        J = np.array([g, t])
        dx = np.linalg.solve(J, -F)
        y = y + dx
        if np.hypot(*dx) <= NEWTON_TOL * max(1.0, np.hypot(*y)):
            return y
    raise RuntimeError(f"corrector did not converge near {tuple(pred)}")


def _inside(x, box) -> bool:
    return box[0] <= x[0] <= box[1] and box[2] <= x[1] <= box[3]


def _branch(fld: _Field, start, direction: float, step, count, box) -> Tuple[List, bool]:
    points = []
    x = start
    t = fld.tangent(x) * direction
    for k in range(count):
        h = step
        for _ in range(4):
            try:
                y = _correct(fld, x, t, h)
                break
            except (RuntimeError, np.linalg.LinAlgError):
                h /= 2
        else:
            LOGGER.warning("locus trace stopped at %s: corrector failed", tuple(x))
            return points, False
        if not _inside(y, box):
            return points, False
        if k >= 2 and np.hypot(*(y - start)) < step / 2:
            return points, True
        t_new = fld.tangent(y)
        if t_new @ t < 0:
            t_new = -t_new
        points.append(y)
        x, t = y, t_new
    return points, False


def trace_singular_locus(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    seed,
    step: float = STEP,
    count: int = MAX_STEPS,
    tol: float = ZERO_TOL,
    box=BOX,
) -> np.ndarray:
    """Polyline through seed along {Delta = 0}, continued both ways until it leaves box.

    The seed is first Newton-projected onto the locus. Returns an (n, 2) array ordered
    along the curve.
    """
    return _trace(_Field(f, get_leg(leg)), seed, step, count, tol, box)


def _trace(fld: _Field, seed, step, count, tol, box) -> np.ndarray:
    x = np.array(seed, dtype=float)
    if np.hypot(*fld.grad(x)) <= tol:
        raise ValueError(f"seed {tuple(seed)}: degenerate seed (grad Delta = 0)")
    if abs(fld.value(x)) > tol:
        x = _project(fld, x)
    forward, closed = _branch(fld, x, 1.0, step, count, box)
    backward = [] if closed else _branch(fld, x, -1.0, step, count, box)[0]
    return np.array(backward[::-1] + [x] + forward)


def kernel_field(f: LegendrianMapJet, leg: Union[str, Leg], gamma, tol: float = ZERO_TOL):
    """Unit kernel vectors of d(pi o f) along gamma, with a continuous sign."""
    fld = _Field(f, get_leg(leg))
    out = []
    for x in np.asarray(gamma, dtype=float).reshape(-1, 2):
        k = fld.kernel_row(x)
        if np.hypot(*fld.row(x, k)) <= tol:
            raise RuntimeError(f"d(pi o f) has rank 0 at {tuple(x)}")
        if abs(fld.value(x)) > tol * max(1.0, np.hypot(*fld.grad(x))):
            raise RuntimeError(f"d(pi o f) has rank 2 at {tuple(x)}")
        eta = fld.kernel(x, k)
        if out and eta @ out[-1] < 0:
            eta = -eta
        out.append(eta)
    return np.array(out)


# Classification


def classify_point(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    point=(0, 0),
    tol: float = ZERO_TOL,
    step: float = STEP,
    method: str = "auto",
) -> SingularityReport:
    """Immersion, cuspidal edge, swallowtail, or Degenerate / Unresolved at point."""
    leg = get_leg(leg)
    if method == "auto":
        method = "exact" if f.backend is Backend.RATIONAL else "numeric"
    if method == "exact":
        return _classify_exact(f, leg, point)
    if method != "numeric":
        raise ValueError(f"method: unknown method '{method}'")
    return _classify_numeric(f, leg, point, tol, step)


def _solve_locus(delta: Series2, depth: int) -> Tuple[Series1, Series1]:
    """Series parametrization t -> (gu(t), gv(t)) of {delta = 0} through the origin."""
    du, dv = delta.coefficient(1, 0), delta.coefficient(0, 1)
    backend = delta.backend
    t = Series1.variable(depth, backend)
    g = Series1.zeros(depth, backend)
    if du and abs(du) >= abs(dv):
        for _ in range(depth + 1):
            g = g - delta.along(g, t) * (1 / du)
        return g, t
    for _ in range(depth + 1):
        g = g - delta.along(t, g) * (1 / dv)
    return t, g


def _classify_exact(f: LegendrianMapJet, leg: Leg, point) -> SingularityReport:
    point = tuple(Fraction(x) for x in point)
    g = recenter(f, point)
    delta = delta_series(g, leg)
    value = delta.coefficient(0, 0)
    grad = (delta.coefficient(1, 0), delta.coefficient(0, 1))
    if value:
        return SingularityReport(point, leg, Verdict.IMMERSION, value, grad, method="exact")
    if not any(grad):
        return SingularityReport(point, leg, Verdict.DEGENERATE, value, grad, method="exact")
    depth = 3
    gu, gv = _solve_locus(delta.truncate(min(delta.order, depth + 1)), depth)
    a, b = _leg_pair(g, leg)
    rows = [(s.derivative("u"), s.derivative("v")) for s in (a, b)]
    norms = [abs(r[0].coefficient(0, 0)) + abs(r[1].coefficient(0, 0)) for r in rows]
    ru, rv = rows[0] if norms[0] >= norms[1] else rows[1]
    eta_u, eta_v = -rv.along(gu, gv), ru.along(gu, gv)
    det = gu.derivative() * eta_v - gv.derivative() * eta_u
    d0, d1 = det[0], det[1]
    if d0:
        verdict = Verdict.CUSPIDAL_EDGE
    elif d1:
        verdict = Verdict.SWALLOWTAIL
    else:
        verdict = Verdict.UNRESOLVED
    return SingularityReport(point, leg, verdict, value, grad, d0, d1, method="exact")


def _classify_numeric(f, leg: Leg, point, tol: float, step: float) -> SingularityReport:
    fld = _Field(f, leg)
    x = np.array(point, dtype=float)
    value = fld.value(x)
    grad = fld.grad(x)
    report = dict(point=tuple(float(c) for c in x), leg=leg, delta=value, grad=tuple(grad))
    if abs(value) > tol:
        return SingularityReport(verdict=Verdict.IMMERSION, **report)
    if np.hypot(*grad) <= tol:
        return SingularityReport(verdict=Verdict.DEGENERATE, **report)
    k = fld.kernel_row(x)
    t0 = fld.tangent(x)
    det0 = _det(fld, x, k, t0)
    if abs(det0) > tol:
        return SingularityReport(verdict=Verdict.CUSPIDAL_EDGE, det=det0, **report)
    h = step
    for _ in range(4):
        try:
            ahead = _correct(fld, x, t0, h)
            behind = _correct(fld, x, t0, -h)
            break
        except (RuntimeError, np.linalg.LinAlgError):
            h /= 2
    else:
        LOGGER.warning("could not step along the locus at %s", tuple(x))
        return SingularityReport(verdict=Verdict.UNRESOLVED, det=det0, **report)
    span = np.hypot(*(ahead - behind))
    ddet = (_det(fld, ahead, k, t0) - _det(fld, behind, k, t0)) / span
    verdict = Verdict.SWALLOWTAIL if abs(ddet) > tol else Verdict.UNRESOLVED
    return SingularityReport(verdict=verdict, det=det0, ddet=ddet, **report)


def _det(fld: _Field, x, k: int, orient) -> float:
    t = fld.tangent(x)
    if t @ orient < 0:
        t = -t
    eta = fld.kernel(x, k)
    return float(t[0] * eta[1] - t[1] * eta[0])


# Locus seeding and the singular points of a jet


def seed_loci(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    grid: int = GRID,
    box=BOX,
    step: float = STEP,
    tol: float = ZERO_TOL,
) -> List[np.ndarray]:
    """Trace every branch of {Delta = 0} found from sign changes on a grid x grid lattice."""
    leg = get_leg(leg)
    fld = _Field(f, leg)
    us = np.linspace(box[0], box[1], grid)
    vs = np.linspace(box[2], box[3], grid)
    U, V = np.meshgrid(us, vs, indexing="ij")
    D = npoly.polyval2d(U, V, fld.delta)
    seeds = []
    for i in range(grid):
        for j in range(grid):
            if D[i, j] == 0:
                seeds.append((U[i, j], V[i, j]))
            for di, dj in ((1, 0), (0, 1)):
                a, b = i + di, j + dj
                if a < grid and b < grid and D[i, j] * D[a, b] < 0:
                    s = D[i, j] / (D[i, j] - D[a, b])
                    seeds.append(
                        (U[i, j] + s * (U[a, b] - U[i, j]), V[i, j] + s * (V[a, b] - V[i, j]))
                    )
    branches = []
    for seed in seeds:
        if any(np.min(np.hypot(*(b - seed).T)) < 2 * step for b in branches):
            continue
        try:
            branch = _trace(fld, seed, step, MAX_STEPS, tol, box)
        except (ValueError, RuntimeError) as e:
            LOGGER.debug("skipping seed %s: %s", seed, e)
            continue
        branches.append(branch)
    LOGGER.info("%s: %d locus branch(es) from %d seed(s)", leg.value, len(branches), len(seeds))
    return branches


def _branch_dets(fld: _Field, branch: np.ndarray) -> np.ndarray:
    """det(gamma', eta) along a branch with tangent and kernel signs kept continuous."""
    out = []
    t_prev = eta_prev = None
    for x in branch:
        t = fld.tangent(x)
        eta = fld.kernel(x, fld.kernel_row(x))
        if t_prev is not None:
            if t @ t_prev < 0:
                t = -t
            if eta @ eta_prev < 0:
                eta = -eta
        out.append(t[0] * eta[1] - t[1] * eta[0])
        t_prev, eta_prev = t, eta
    return np.array(out)


def _bisect(fld: _Field, a, b, t_ref, eta_ref, iterations: int = 60):
    sa = t_ref[0] * eta_ref[1] - t_ref[1] * eta_ref[0]
    for _ in range(iterations):
        m = _project(fld, (a + b) / 2)
        t = fld.tangent(m)
        if t @ t_ref < 0:
            t = -t
        eta = fld.kernel(m, fld.kernel_row(m))
        if eta @ eta_ref < 0:
            eta = -eta
        sm = t[0] * eta[1] - t[1] * eta[0]
        if sm == 0 or np.hypot(*(b - a)) < NEWTON_TOL:
            return m
        if (sm > 0) == (sa > 0):
            a, sa = m, sm
        else:
            b = m
    return m


def singular_points(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    grid: int = GRID,
    box=BOX,
    step: float = STEP,
    tol: float = ZERO_TOL,
) -> List[np.ndarray]:
    """One representative per traced branch plus every zero of det(gamma', eta) on it."""
    leg = get_leg(leg)
    fld = _Field(f, leg)
    points = []
    for branch in seed_loci(f, leg, grid=grid, box=box, step=step, tol=tol):
        try:
            dets = _branch_dets(fld, branch)
        except (ValueError, RuntimeError) as e:
            LOGGER.debug("skipping branch: %s", e)
            continue
        points.append(branch[int(np.argmax(np.abs(dets)))])
        for k in range(len(branch) - 1):
            if dets[k] == 0:
                points.append(branch[k])
            elif dets[k] * dets[k + 1] < 0:
                t_ref = fld.tangent(branch[k])
                eta_ref = fld.kernel(branch[k], fld.kernel_row(branch[k]))
                try:
                    points.append(_bisect(fld, branch[k], branch[k + 1], t_ref, eta_ref))
                except (ValueError, RuntimeError) as e:
                    LOGGER.debug("bisection failed on branch: %s", e)
    return points


def classify_jet(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    points: Optional[Sequence] = None,
    grid: int = GRID,
    box=BOX,
    step: float = STEP,
    tol: float = ZERO_TOL,
) -> List[SingularityReport]:
    """Classify the given points, or the singular points found on a grid when none given."""
    if points is None:
        points = singular_points(f, leg, grid=grid, box=box, step=step, tol=tol)
        return [classify_point(f, leg, x, tol=tol, step=step, method="numeric") for x in points]
    return [classify_point(f, leg, x, tol=tol, step=step) for x in points]


# Coefficient stratifications


def _nz(value, tol) -> bool:
    return abs(value) > tol


def _conditions(names: Sequence[str], values: Dict[str, object], tol) -> Tuple:
    return tuple((n, "!=0" if _nz(values[n], tol) else "=0") for n in names)


IMM, CUSP, SWALLOW = Verdict.IMMERSION, Verdict.CUSPIDAL_EDGE, Verdict.SWALLOWTAIL


def stratify_hess1(a1, b1, a2, b2, a3, b3, tol: float = 0) -> Stratum:
    """Cases (i)-(iv) for Hess = 1 from the u-coefficients a_k of p and b_k of y."""
    values = dict(a1=a1, b1=b1, a2=a2, b2=b2, a3=a3, b3=b3)

    def stratum(label, names, verdicts=None):
        return Stratum("hess1", label, _conditions(names, values, tol), label, verdicts)

    if _nz(a1, tol):
        return stratum("(i)", ["a1"], (IMM, IMM))
    if _nz(a2, tol) and _nz(b2, tol):
        return stratum("(ii)", ["a1", "a2", "b2"], (CUSP, CUSP))
    if _nz(a2, tol) and _nz(a3, tol):
        return stratum("(iii)", ["a1", "a2", "b2", "a3"], (SWALLOW, CUSP))
    if _nz(b2, tol) and _nz(a3, tol):
        return stratum("(iv)", ["a1", "a2", "b2", "a3"], (CUSP, SWALLOW))
    return Stratum("hess1", "outside", _conditions(["a1", "a2", "b2", "a3"], values, tol))


def stratify_gauss(B, C, F, G, K, L, tol: float = 0) -> Stratum:
    """W-strata of the Cauchy data and the cases (i)-(iv) they carry."""
    values = dict(B=B, C=C, F=F, G=G, K=K, L=L)

    def stratum(label, names, case=None, verdicts=None):
        return Stratum("gauss", label, _conditions(names, values, tol), case, verdicts)

    if _nz(C, tol):
        return stratum("W0", ["C"], "(i)", (IMM, IMM))
    has_f, has_g, has_l = _nz(F, tol), _nz(G, tol), _nz(L, tol)
    if has_f and has_g:
        return stratum("W1", ["C", "F", "G"], "(ii)", (CUSP, CUSP))
    if has_f and has_l:
        return stratum("W2_1", ["C", "F", "G", "L"], "(iii)", (SWALLOW, CUSP))
    if has_g and has_l:
        return stratum("W2_2", ["C", "F", "G", "L"], "(iv)", (CUSP, SWALLOW))
    if has_f:
        return stratum("W3_3", ["C", "F", "G", "L"])
    if has_g:
        return stratum("W3_2", ["C", "F", "G", "L"])
    if has_l:
        return stratum("W3_1", ["C", "F", "G", "L"])
    return stratum("W4", ["C", "F", "G", "L"])


def stratify_developable(Bt, Ct, C, Dt, tol: float = 0) -> Stratum:
    """dev-(i)..(iii) of the pi1 front; pi2 collapses to a curve so its verdict is None."""
    values = {"B~": Bt, "C~": Ct, "C": C, "D~": Dt}

    def stratum(label, names, verdict=None):
        verdicts = None if verdict is None else (verdict, None)
        return Stratum("developable", label, _conditions(names, values, tol), label, verdicts)

    if _nz(Bt, tol):
        return stratum("dev-(i)", ["B~"], IMM)
    if _nz(Ct, tol) and _nz(C, tol):
        return stratum("dev-(ii)", ["B~", "C~", "C"], CUSP)
    if _nz(C, tol) and not _nz(Ct, tol) and _nz(Dt, tol):
        return stratum("dev-(iii)", ["B~", "C~", "C", "D~"], SWALLOW)
    return Stratum("developable", "outside", _conditions(["B~", "C~", "C", "D~"], values, tol))


def _adapted_germ(f: LegendrianMapJet, point) -> LegendrianMapJet:
    g = recenter(f, point)
    return g if g.chart == "adapted" else adapt_chart(g)


def hess1_coefficients(f: LegendrianMapJet, point=(0, 0)) -> Tuple:
    """(a1, b1, a2, b2, a3, b3): u^k coefficients of p and y at point, adapted chart."""
    if f.backend is Backend.FLOAT:
        point = tuple(float(x) for x in point)
    g = _adapted_germ(f, point)
    out = []
    for k in (1, 2, 3):
        out += [g.p.coefficient(k, 0), g.y.coefficient(k, 0)]
    return tuple(out)


def developable_coefficients(f: LegendrianMapJet, point=(0, 0)) -> Tuple:
    """(B~, C~, C, D~) = (Delta, Delta_v, -Delta_u, Delta_vv) of the pi1 leg at point."""
    if f.backend is Backend.FLOAT:
        point = tuple(float(x) for x in point)
    delta = delta_series(_adapted_germ(f, point), Leg.PI1)
    return (
        delta.coefficient(0, 0),
        delta.coefficient(0, 1),
        -delta.coefficient(1, 0),
        2 * delta.coefficient(0, 2),
    )


def predicted(stratum: Stratum, leg: Leg) -> Optional[Verdict]:
    if stratum.verdicts is None:
        return None
    return stratum.verdicts[0 if leg is Leg.PI1 else 1]
