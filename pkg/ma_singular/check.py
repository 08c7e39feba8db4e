import logging
import sys

from argparse import ArgumentParser
from typing import List, Optional

from .helpers import configure_logging, parse_limit, read_json
from .legendrian import (
    ResidualReport,
    contact_residual,
    factorization_residual,
    ma_residual,
    normalization_residual,
)
from .series import ZERO_TOL, scalar_to_json
from .solutions import Family, LegendrianMapJet, MongeAmpereSystem, gauss_chart_to_sphere

"""
Usage: python3 -m ma_singular.check <jet-json> -e <hess|gauss> -c <constant>

Checks that a jet written by `ma-singular build` is a geometric solution: the contact
residual, the Monge-Ampere residual, both factorization residuals (c != 0) and, for the
Gauss chart, the sphere normalization residual must vanish.

Offending coefficients are logged, at most --limit of them (default 10, 'none' for all).
Exits 1 when any residual is nonzero.
"""


def main():
    p = ArgumentParser()
    p.add_argument("jet", help="Jet JSON file written by the build command")
    p.add_argument("-e", "--equation", help="Equation (hess or gauss)", default="hess")
    p.add_argument("-c", "--constant", help="The constant c", default="1")
    p.add_argument(
        "-l", "--limit", help="Max number of messages to log about coefficients", default="10"
    )
    args = p.parse_args()

    logger = configure_logging(logging.WARNING)
    try:
        limit = parse_limit(args.limit)
        system = MongeAmpereSystem.create(args.equation, args.constant)
        f = LegendrianMapJet.from_json(read_json(args.jet))
    except ValueError as e:
        logger.critical(str(e))
        sys.exit(2)

    if not check_jet(f, system, limit=limit):
        sys.exit(1)


def residual_reports(f: LegendrianMapJet, system: MongeAmpereSystem) -> List[ResidualReport]:
    """Every residual that applies to f as a solution of system."""
    reports = [contact_residual(f), ma_residual(f, system)]
    if system.c:
        reports.extend(factorization_residual(f, system))
    if system.family is Family.GAUSS:
        try:
            reports.append(normalization_residual(gauss_chart_to_sphere(f)))
        except ValueError as e:
            logging.getLogger(__name__).warning("skipping normalization residual: %s", e)
    return reports


def check_jet(
    f: LegendrianMapJet,
    system: MongeAmpereSystem,
    limit: Optional[int] = 10,
    tol: float = ZERO_TOL,
    reports: Optional[List[ResidualReport]] = None,
) -> bool:
    """Check every residual of f, logging offending coefficients.

    :param f: jet to check
    :param system: Monge-Ampere system f should solve
    :param limit: max number of messages to log
    :param tol: max absolute coefficient for float jets
    :return: True on success
    """
    logger = logging.getLogger(__name__)
    if reports is None:
        reports = residual_reports(f, system)
    message_count = 0
    ok = True
    for report in reports:
        if report.passed(tol):
            continue
        ok = False
        for part, residual in enumerate(report.residual):
            for i, j, x in residual.nonzero():
                if limit and message_count >= limit:
                    # Do not exceed the limit of messages
                    return False
                if report.backend.value == "float" and abs(x) <= tol:
                    continue
                logger.error(
                    f"{report.form}[{part}]: coefficient of u^{i} v^{j} is "
                    f"{scalar_to_json(x)} (expected 0)"
                )
                message_count += 1
    return ok


def residual_table(reports: List[ResidualReport], tol: float = ZERO_TOL) -> str:
    """Plain-text pass/fail table, one row per residual."""
    lines = [f"{'form':<22}{'order':>6}{'max_abs':>14}  result"]
    for report in reports:
        order = min(r.order for r in report.residual)
        result = "pass" if report.passed(tol) else "FAIL"
        lines.append(f"{report.form:<22}{order:>6}{report.max_abs:>14.3e}  {result}")
    return "\n".join(lines)


if __name__ == "__main__":
    main()
