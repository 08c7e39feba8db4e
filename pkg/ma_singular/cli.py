import logging
import os
import sys

from argparse import ArgumentParser
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .check import check_jet, residual_reports, residual_table
from .classify import BOX, GRID, STEP, classify_jet, get_leg
from .genericity import FAMILIES, SWEEP_GRID, SWEEP_ORDER, SWEEP_STEP, sample_and_tally
from .helpers import ConfigError, configure_logging, get_threads, load_config, parse_limit
from .helpers import write_json
from .mesh import DOMAIN, FORMATS, evaluate_mesh, export
from .series import DEFAULT_ORDER, ZERO_TOL, Backend, coerce, get_backend, scalar_to_json
from .solutions import Family, MongeAmpereSystem, build_jet, initial_data_from_json

"""
Usage: ma-singular [command] --config <job.json|job.ini> [options]

Builds a geometric-solution jet from the initial data in the job configuration, then
runs one pipeline stage on it:

- build: write the jet to jet.json
- verify: check every residual, print a pass/fail table, write residuals.json
- classify: classify singular points of each leg, write singularities.json
- mesh: evaluate each leg on a lattice, write mesh_<leg>.<obj|csv|json>
- sweep: tally verdicts over random perturbations, write tally.json and tally.csv
- pipeline: build and verify, then every stage that has a section in the configuration

When no command is given, the configuration's "command" field is used.
--order, --seed, --out, --backend and --limit override the configuration values.
MA_SINGULAR_THREADS caps the worker threads of the sweep and mesh stages.

Exit status: 0 on success, 1 when verification fails, 2 on configuration errors.
"""

COMMANDS = ("build", "verify", "classify", "mesh", "sweep", "pipeline")

LOGGER = logging.getLogger(__name__)


def main():
    p = ArgumentParser(prog="ma-singular")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="Pipeline stage to run")
    p.add_argument("--config", required=True, help="Job configuration (.json or .ini)")
    p.add_argument("--order", type=int, help="Truncation order of the jet")
    p.add_argument("--seed", type=int, help="Seed for the sweep stage")
    p.add_argument("--out", help="Output directory")
    p.add_argument("--backend", help="Coefficient backend (rational or float)")
    p.add_argument("-l", "--limit", help="Max number of messages to log about residuals")
    p.add_argument("-v", "--verbose", action="store_true", help="Log progress")
    p.add_argument("-q", "--quiet", action="store_true", help="Only log errors")
    args = p.parse_args()

    level = logging.INFO if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logger = configure_logging(level)

    try:
        config = load_config(args.config)
        overrides = {
            "command": args.command,
            "order": args.order,
            "seed": args.seed,
            "out": args.out,
            "backend": args.backend,
            "limit": args.limit,
        }
        config.update({k: v for k, v in overrides.items() if v is not None})
        job = JobConfig.from_dict(config)
    except ConfigError as e:
        logger.critical(str(e))
        sys.exit(2)

    sys.exit(run(job))


@dataclass
class JobConfig:
    command: str
    equation: str
    c: object
    initial_data: dict
    order: int = DEFAULT_ORDER
    backend: Backend = Backend.RATIONAL
    out: str = "."
    seed: int = 0
    limit: Optional[int] = 10
    tolerances: dict = field(default_factory=dict)
    classify: Optional[dict] = None
    mesh: Optional[dict] = None
    sweep: Optional[dict] = None

    @classmethod
    def from_dict(cls, config: dict) -> "JobConfig":
        """Validate a parsed configuration; errors name the offending field."""
        command = config.get("command")
        if command not in COMMANDS:
            raise ConfigError(f"command: expected one of {', '.join(COMMANDS)}, got {command!r}")
        equation = str(config.get("equation", "")).lower()
        if equation not in ("hess", "gauss"):
            raise ConfigError(f"equation: expected 'hess' or 'gauss', got {equation!r}")
        try:
            backend = get_backend(config.get("backend", "rational"))
        except ValueError as e:
            raise ConfigError(str(e))
        if "c" not in config:
            raise ConfigError("c: missing")
        c = _scalar(config["c"], backend, "c")
        if equation == "gauss" and not c:
            raise ConfigError("c: the gauss equation requires c != 0")
        data = config.get("initial_data")
        if not isinstance(data, dict):
            raise ConfigError("initial_data: missing or not an object")
        order = _integer(config.get("order", DEFAULT_ORDER), "order")
        if order < 2:
            raise ConfigError("order: must be at least 2")
        sections = {}
        for name in ("classify", "mesh", "sweep"):
            section = config.get(name)
            if section is not None and not isinstance(section, dict):
                raise ConfigError(f"{name}: must be an object")
            sections[name] = section
        try:
            limit = parse_limit(config.get("limit", 10))
        except ValueError as e:
            raise ConfigError(str(e))
        return cls(
            command=command,
            equation=equation,
            c=c,
            initial_data=data,
            order=order,
            backend=backend,
            out=str(config.get("out", ".")),
            seed=_integer(config.get("seed", 0), "seed"),
            limit=limit,
            tolerances=dict(config.get("tolerances") or {}),
            **sections,
        )

    @property
    def tol(self) -> float:
        return float(self.tolerances.get("zero", ZERO_TOL))

    @property
    def step(self) -> float:
        return float(self.tolerances.get("step", STEP))


def _scalar(value, backend: Backend, name: str):
    try:
        if backend is Backend.RATIONAL and not isinstance(value, int):
            value = Fraction(str(value))
        return coerce(backend, value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ConfigError(f"{name}: expected a number or 'num/den', got {value!r}")


def _integer(value, name: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")


def _legs(section: dict, default=("pi1", "pi2")):
    return [get_leg(x) for x in section.get("legs", default)]


def default_family(system: MongeAmpereSystem) -> str:
    if system.family is Family.GAUSS:
        return "gauss"
    if system.c > 0:
        return "hess1"
    if system.c < 0:
        return "hess-1"
    return "developable"


def run(job: JobConfig) -> int:
    """Run the job's stage(s); returns the exit status."""
    try:
        os.makedirs(job.out, exist_ok=True)
        system = MongeAmpereSystem.create(job.equation, job.c)
        obj = {"c": scalar_to_json(job.c), **job.initial_data}
        data = initial_data_from_json(obj, job.order, job.backend)
        f = build_jet(system, data, job.order)
    except ValueError as e:
        logging.critical(str(e))
        return 2
    LOGGER.info("built %s jet of order %d (%s chart)", job.equation, f.order, f.chart)

    stages = [job.command]
    if job.command == "pipeline":
        stages = ["build", "verify"] + [s for s in ("classify", "mesh", "sweep") if getattr(job, s)]
    status = 0
    try:
        for stage in stages:
            if stage == "build":
                write_json(
                    {**f.to_json(), **system.to_json(), "order": f.order},
                    os.path.join(job.out, "jet.json"),
                )
            elif stage == "verify":
                status = max(status, _verify(job, f, system))
                if status and job.command == "pipeline":
                    return status
            elif stage == "classify":
                _classify(job, f)
            elif stage == "mesh":
                _mesh(job, f, system)
            elif stage == "sweep":
                _sweep(job, data, system)
    except ValueError as e:
        logging.critical(str(e))
        return 2
    return status


def _verify(job: JobConfig, f, system) -> int:
    reports = residual_reports(f, system)
    ok = check_jet(f, system, limit=job.limit, tol=job.tol, reports=reports)
    write_json(
        {"passed": ok, "reports": [r.to_json() for r in reports]},
        os.path.join(job.out, "residuals.json"),
    )
    print(residual_table(reports, tol=job.tol))
    return 0 if ok else 1


def _points(section: dict, backend: Backend):
    if "points" not in section:
        return None
    return [tuple(_scalar(x, backend, "classify.points") for x in pt) for pt in section["points"]]


def _classify(job: JobConfig, f):
    section = job.classify or {}
    points = _points(section, job.backend)
    box = tuple(section.get("box", BOX))
    grid = _integer(section.get("grid", GRID), "classify.grid")
    results = []
    for leg in _legs(section):
        results += classify_jet(f, leg, points, grid=grid, box=box, step=job.step, tol=job.tol)
    write_json([r.to_json() for r in results], os.path.join(job.out, "singularities.json"))
    print(f"{'leg':<5}{'point':<36}verdict")
    for r in results:
        point = ", ".join(f"{float(x):.6g}" for x in r.point)
        print(f"{r.leg.value:<5}{'(' + point + ')':<36}{r.verdict.value}")


def _mesh(job: JobConfig, f, system):
    section = job.mesh or {}
    formats = section.get("formats", list(FORMATS))
    for leg in _legs(section, default=("pi1",)):
        mesh = evaluate_mesh(
            f,
            leg,
            system,
            u_range=tuple(section.get("u_range", DOMAIN)),
            v_range=tuple(section.get("v_range", DOMAIN)),
            grid=_integer(section.get("grid", 50), "mesh.grid"),
            step=job.step,
            tol=job.tol,
            threads=get_threads(),
        )
        for fmt in formats:
            export(mesh, fmt, os.path.join(job.out, f"mesh_{leg.value}.{fmt}"))


def _sweep(job: JobConfig, data, system):
    section = job.sweep or {}
    family = section.get("family", default_family(system))
    if family not in FAMILIES:
        raise ConfigError(f"sweep.family: expected one of {', '.join(FAMILIES)}, got {family!r}")
    tally = sample_and_tally(
        family,
        data,
        magnitude=float(section.get("magnitude", 0.5)),
        samples=_integer(section.get("samples", 200), "sweep.samples"),
        grid=_integer(section.get("grid", SWEEP_GRID), "sweep.grid"),
        seed=job.seed,
        order=_integer(section.get("order", SWEEP_ORDER), "sweep.order"),
        box=tuple(section.get("box", BOX)),
        step=float(section.get("step", SWEEP_STEP)),
        threads=get_threads(),
    )
    write_json(tally.to_json(), os.path.join(job.out, "tally.json"))
    tally.write_csv(os.path.join(job.out, "tally.csv"))
    if tally.unresolved:
        LOGGER.warning("%d unresolved verdict(s) in the sweep", tally.unresolved)


if __name__ == "__main__":
    main()
