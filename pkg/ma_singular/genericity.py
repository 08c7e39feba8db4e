"""Random perturbation sweeps: which singularities occur for perturbed initial data.

Each sample perturbs the low-degree coefficients of the base data uniformly in
[-magnitude, magnitude], rebuilds the jet and classifies the origin plus every singular
point found on a grid-seeded locus search. Sample k draws from PCG64 seeded with the k-th
child of numpy.random.SeedSequence(seed), so tallies do not depend on the thread count.
"""
import csv
import logging

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .classify import (
    BOX,
    STRATUM_TOL,
    Leg,
    Verdict,
    classify_point,
    developable_coefficients,
    hess1_coefficients,
    singular_points,
    stratify_developable,
    stratify_gauss,
    stratify_hess1,
)
from .series import Backend, ComplexSeries1, Series1
from .solutions import (
    Cauchy,
    DAlembert,
    Developable,
    Holomorphic,
    InitialData,
    build_developable,
    build_gauss,
    build_hess_negative,
    build_hess_positive,
    cauchy_data,
    gauss_coefficients,
    solve_gauss_ck,
)

LOGGER = logging.getLogger(__name__)

FAMILIES = ("hess1", "hess-1", "gauss", "developable")
SWEEP_ORDER = 6
SWEEP_GRID = 10
SWEEP_STEP = 5e-2


@dataclass
class StratumTally:
    family: str
    samples: int
    seed: int
    magnitude: float
    counts: Dict[str, int] = field(default_factory=dict)
    unresolved: int = 0
    deep_hits: int = 0

    def merge(self, counts: Counter, deep: int):
        for key, n in counts.items():
            self.counts[key] = self.counts.get(key, 0) + n
        self.unresolved += sum(n for key, n in counts.items() if key.endswith(":Unresolved"))
        self.deep_hits += deep

    def verdicts(self) -> set:
        return {key.split(":", 1)[1] for key in self.counts}

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "samples": self.samples,
            "seed": self.seed,
            "magnitude": self.magnitude,
            "counts": dict(sorted(self.counts.items())),
            "unresolved": self.unresolved,
            "deep_hits": self.deep_hits,
        }

    def write_csv(self, path: str):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["family", "leg", "verdict", "count"])
            for key, n in sorted(self.counts.items()):
                leg, verdict = key.split(":", 1)
                writer.writerow([self.family, leg, verdict, n])
            writer.writerow([self.family, "", "unresolved", self.unresolved])
            writer.writerow([self.family, "", "deep_hits", self.deep_hits])


def _float(s: Series1, order: int) -> np.ndarray:
    return np.array([float(s[k]) for k in range(order + 1)])


def _series(values, order: int) -> Series1:
    return Series1.from_coeffs([float(x) for x in values], order=order, backend=Backend.FLOAT)


def _perturb(values: np.ndarray, degrees, rng, magnitude: float) -> np.ndarray:
    out = values.copy()
    for k in degrees:
        out[k] += rng.uniform(-magnitude, magnitude)
    return out


def _sample_jet(family: str, base: InitialData, rng, magnitude: float, order: int):
    """Perturbed jet plus the stratum of its coefficients at the origin (None if untracked)."""
    if family == "hess1":
        re = _perturb(_float(base.h.re, order), (1, 2, 3), rng, magnitude)
        im = _perturb(_float(base.h.im, order), (1, 2, 3), rng, magnitude)
        h = ComplexSeries1(_series(re, order), _series(im, order))
        f = build_hess_positive(h, order)
        return f, stratify_hess1(*hess1_coefficients(f), tol=STRATUM_TOL)
    if family == "hess-1":
        phi = _perturb(_float(base.phi, order), (1, 2, 3), rng, magnitude)
        psi = _perturb(_float(base.psi, order), (1, 2, 3), rng, magnitude)
        return build_hess_negative(_series(phi, order), _series(psi, order), order), None
    if family == "developable":
        phi = _perturb(_float(base.phi, order), (1, 2, 3, 4), rng, magnitude)
        psi = _perturb(_float(base.psi, order), (1, 2, 3, 4), rng, magnitude)
        f = build_developable(_series(phi, order), _series(psi, order), order)
        return f, stratify_developable(*developable_coefficients(f), tol=STRATUM_TOL)
    Z = solve_gauss_ck(base.c, base.Z0, base.Z1, 5)
    coeffs = gauss_coefficients(Z)
    values = np.array([float(coeffs[k]) for k in ("B", "C", "F", "G", "K", "L")])
    values = values + rng.uniform(-magnitude, magnitude, size=6)
    Z0, Z1 = cauchy_data(*values, order=order + 1, backend=Backend.FLOAT)
    return build_gauss(float(base.c), Z0, Z1, order), stratify_gauss(*values, tol=STRATUM_TOL)


def _check_base(family: str, base: InitialData):
    expected = {
        "hess1": Holomorphic,
        "hess-1": DAlembert,
        "gauss": Cauchy,
        "developable": Developable,
    }
    if family not in expected:
        raise ValueError(f"family: unknown family '{family}' (use one of {', '.join(FAMILIES)})")
    if not isinstance(base, expected[family]):
        raise ValueError(
            f"base: family '{family}' needs {expected[family].__name__.lower()} initial data"
        )


def run_sample(family, base, seed_seq, magnitude, order, grid, box, step):
    """Counter of '<leg>:<verdict>' and the number of deep-stratum hits for one sample."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    f, stratum = _sample_jet(family, base, rng, magnitude, order)
    legs = (Leg.PI1,) if family == "developable" else (Leg.PI1, Leg.PI2)
    counts = Counter()
    deep = 1 if stratum is not None and stratum.outside else 0
    for leg in legs:
        points = [np.zeros(2)]
        for x in singular_points(f, leg, grid=grid, box=box, step=step):
            if np.hypot(*x) >= step:
                points.append(x)
        for x in points:
            report = classify_point(f, leg, x, step=step)
            counts[f"{leg.value}:{report.verdict.value}"] += 1
            if report.verdict is Verdict.DEGENERATE:
                deep += 1
    return counts, deep


def sample_and_tally(
    family: str,
    base: InitialData,
    magnitude: float,
    samples: int,
    grid: int = SWEEP_GRID,
    seed: int = 0,
    order: int = SWEEP_ORDER,
    box=BOX,
    step: float = SWEEP_STEP,
    threads: Optional[int] = 1,
) -> StratumTally:
    """Tally verdicts over perturbed samples of base."""
    _check_base(family, base)
    if magnitude < 0:
        raise ValueError("magnitude: must be non-negative")
    if samples < 1:
        raise ValueError("samples: must be at least 1")
    children = np.random.SeedSequence(seed).spawn(samples)
    tally = StratumTally(family, samples, seed, float(magnitude))

    def work(child):
        return run_sample(family, base, child, magnitude, order, grid, box, step)

    with ThreadPoolExecutor(max_workers=max(1, threads or 1)) as pool:
        for counts, deep in pool.map(work, children):
            tally.merge(counts, deep)
    LOGGER.info(
        "%s sweep: %d sample(s), %d unresolved, %d deep-stratum hit(s)",
        family,
        samples,
        tally.unresolved,
        tally.deep_hits,
    )
    return tally
