"""Evaluate a jet's projections on a parameter lattice and export the surface.

OBJ output lists the lattice vertices, quad faces, then the locus vertices with one
`l` polyline per traced branch. CSV has one lattice vertex per row. JSON mirrors
SurfaceMesh and can be read back with read_mesh.
"""
import csv
import json
import logging

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np

from numpy.polynomial import polynomial as npoly

from .classify import STEP, Leg, delta_series, get_leg, seed_loci
from .legendrian import project_pi1, project_pi2
from .series import ZERO_TOL
from .solutions import LegendrianMapJet, MongeAmpereSystem

LOGGER = logging.getLogger(__name__)

DOMAIN = (-0.5, 0.5)
FORMATS = ("obj", "csv", "json")


@dataclass(eq=False)
class SurfaceMesh:
    leg: Leg
    grid: int
    params: np.ndarray  # (grid * grid, 2) lattice points (u, v)
    vertices: np.ndarray  # (grid * grid, 3)
    faces: List[Tuple[int, int, int, int]]
    singular: np.ndarray  # bool per vertex
    loci: List[np.ndarray] = field(default_factory=list)  # (n, 5) rows of u, v, X, Y, Z

    def to_json(self) -> dict:
        return {
            "leg": self.leg.value,
            "grid": self.grid,
            "params": self.params.tolist(),
            "vertices": self.vertices.tolist(),
            "faces": [list(f) for f in self.faces],
            "singular": [bool(s) for s in self.singular],
            "loci": [branch.tolist() for branch in self.loci],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SurfaceMesh":
        return cls(
            leg=get_leg(obj["leg"]),
            grid=int(obj["grid"]),
            params=np.array(obj["params"], dtype=float).reshape(-1, 2),
            vertices=np.array(obj["vertices"], dtype=float).reshape(-1, 3),
            faces=[tuple(f) for f in obj["faces"]],
            singular=np.array(obj["singular"], dtype=bool),
            loci=[np.array(b, dtype=float).reshape(-1, 5) for b in obj["loci"]],
        )


def _lattice_faces(grid: int) -> List[Tuple[int, int, int, int]]:
    faces = []
    for i in range(grid - 1):
        for j in range(grid - 1):
            k = i * grid + j
            faces.append((k, k + grid, k + grid + 1, k + 1))
    return faces


def _singular_mask(D: np.ndarray, tol: float) -> np.ndarray:
    """Vertices where Delta vanishes or changes sign towards a lattice neighbour."""
    mask = np.abs(D) <= tol
    flip_u = D[:-1, :] * D[1:, :] < 0
    flip_v = D[:, :-1] * D[:, 1:] < 0
    mask[:-1, :] |= flip_u
    mask[1:, :] |= flip_u
    mask[:, :-1] |= flip_v
    mask[:, 1:] |= flip_v
    return mask


def evaluate_mesh(
    f: LegendrianMapJet,
    leg: Union[str, Leg],
    system: MongeAmpereSystem,
    u_range=DOMAIN,
    v_range=DOMAIN,
    grid: int = 50,
    step: float = STEP,
    tol: float = ZERO_TOL,
    threads: Optional[int] = 1,
) -> SurfaceMesh:
    """pi o f on a grid x grid lattice over u_range x v_range, with its singular locus."""
    leg = get_leg(leg)
    if grid < 2:
        raise ValueError("grid: must be at least 2")
    g = f.to_float()
    components = project_pi1(g) if leg is Leg.PI1 else project_pi2(g, system)
    arrays = [s.to_numpy() for s in components]
    us = np.linspace(u_range[0], u_range[1], grid)
    vs = np.linspace(v_range[0], v_range[1], grid)
    U, V = np.meshgrid(us, vs, indexing="ij")

    def evaluate(c):
        return npoly.polyval2d(U, V, c)

    with ThreadPoolExecutor(max_workers=max(1, threads or 1)) as pool:
        X, Y, Z = pool.map(evaluate, arrays)
    D = evaluate(delta_series(g, leg).to_numpy())
    params = np.column_stack([U.ravel(), V.ravel()])
    vertices = np.column_stack([X.ravel(), Y.ravel(), Z.ravel()])
    box = (u_range[0], u_range[1], v_range[0], v_range[1])
    loci = []
    for branch in seed_loci(g, leg, grid=grid, box=box, step=step, tol=tol):
        image = [npoly.polyval2d(branch[:, 0], branch[:, 1], c) for c in arrays]
        loci.append(np.column_stack([branch] + image))
    LOGGER.info("%s mesh: %d vertices, %d locus branch(es)", leg.value, len(vertices), len(loci))
    return SurfaceMesh(
        leg, grid, params, vertices, _lattice_faces(grid), _singular_mask(D, tol).ravel(), loci
    )


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_obj(mesh: SurfaceMesh, path: str):
    with open(path, "w") as f:
        f.write(f"# ma-singular {mesh.leg.value} front, {mesh.grid}x{mesh.grid} lattice\n")
        for x, y, z in mesh.vertices:
            f.write(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
        for face in mesh.faces:
            f.write("f " + " ".join(str(k + 1) for k in face) + "\n")
        offset = len(mesh.vertices)
        for branch in mesh.loci:
            for row in branch:
                f.write(f"v {_fmt(row[2])} {_fmt(row[3])} {_fmt(row[4])}\n")
            if len(branch) > 1:
                indices = range(offset + 1, offset + len(branch) + 1)
                f.write("l " + " ".join(str(k) for k in indices) + "\n")
            offset += len(branch)


def write_csv(mesh: SurfaceMesh, path: str):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["u", "v", "X", "Y", "Z", "is_singular"])
        for (u, v), (x, y, z), s in zip(mesh.params, mesh.vertices, mesh.singular):
            writer.writerow([_fmt(u), _fmt(v), _fmt(x), _fmt(y), _fmt(z), int(bool(s))])


def write_json(mesh: SurfaceMesh, path: str):
    with open(path, "w") as f:
        json.dump(mesh.to_json(), f, indent=1, sort_keys=True)
        f.write("\n")


def export(mesh: SurfaceMesh, fmt: str, path: str):
    """Write mesh as obj, csv or json."""
    fmt = fmt.lower()
    if fmt == "obj":
        write_obj(mesh, path)
    elif fmt == "csv":
        write_csv(mesh, path)
    elif fmt == "json":
        write_json(mesh, path)
    else:
        raise ValueError(f"format: unknown mesh format '{fmt}' (use {', '.join(FORMATS)})")


def read_mesh(path: str) -> SurfaceMesh:
    with open(path) as f:
        return SurfaceMesh.from_json(json.load(f))
