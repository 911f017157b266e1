"""Bundled bodies, composite pairs and finite groupoids.

Plates are 5x5 grids of 2D points at positions (x, y), x, y in 1..5.
Angles inside transplant fields are in degrees of the grid coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable

import numpy as np

from . import groups as mg
from .body import BodyGrid, MaterialPoint, MaterialGroupoid, Numeric, Symbolic
from .constitutive import neo_hookean
from .groupoid import (
    FiniteGroupoid,
    make_action_groupoid,
    make_pair_groupoid,
    make_totally_intransitive,
    matrix_groupoid,
)
from .linalg import rot2

PLANTED_P = np.diag([1.2, 1 / 1.2, 1.0])
TWIST_A = np.diag([1.0, 2.0])


def _deg(a: float) -> float:
    return math.radians(a)


def grid_body(dim: int, shape: tuple, group: mg.MatrixGroup,
              transplant: Callable[..., np.ndarray], metadata: dict | None = None) -> BodyGrid:
    """Row-major grid (first coordinate fastest) with one archetype and a transplant field."""
    pts = []
    ranges = [range(1, s + 1) for s in shape]
    for idx in np.ndindex(*reversed(shape)):
        pos = tuple(r[i] for r, i in zip(ranges, reversed(idx)))
        pts.append(MaterialPoint(len(pts), pos, Symbolic(group, transplant(*pos))))
    return BodyGrid(dim, tuple(pts), metadata or {})


def _plate(group, field, note) -> BodyGrid:
    return grid_body(2, (5, 5), group, field, {"description": note})


SO2 = mg.special_orthogonal(2)
TRIV2 = mg.trivial(2)
SO3 = mg.special_orthogonal(3)


def plate_iso_homog() -> BodyGrid:
    return _plate(SO2, lambda x, y: np.eye(2), "isotropic, homogeneous")


def plate_trivial() -> BodyGrid:
    return _plate(TRIV2, lambda x, y: np.eye(2), "trivial symmetry, homogeneous")


def plate_contorted() -> BodyGrid:
    return _plate(TRIV2, lambda x, y: rot2(_deg(10 * x)), "trivial symmetry, rotation 10x deg")


def plate_contorted_rows() -> BodyGrid:
    return _plate(TRIV2, lambda x, y: rot2(_deg(-25 * y)), "trivial symmetry, rotation -25y deg")


def plate_stretched() -> BodyGrid:
    return _plate(SO2, lambda x, y: np.diag([1.0, 4.0 / 3.0]), "isotropic, stretched diag(1, 4/3)")


def plate_iso_dilated() -> BodyGrid:
    return _plate(SO2, lambda x, y: 1.05 * np.eye(2), "isotropic, uniform dilatation 1.05")


def plate_iso_twisted() -> BodyGrid:
    return _plate(SO2, lambda x, y: TWIST_A @ rot2(_deg(10 * x + 7 * y + 2 * y * y)),
                  "isotropic conjugated by A Q(X), A = diag(1, 2)")


def _slab(p: np.ndarray, note: str) -> BodyGrid:
    return grid_body(3, (3, 3, 1), SO3, lambda x, y, z: p, {"description": note})


def slab_iso() -> BodyGrid:
    return _slab(np.eye(3), "isotropic")


def slab_ortho() -> BodyGrid:
    return _slab(np.diag([1.0, math.sqrt(2.0), math.sqrt(3.0)]), "SO(3) conjugated by diag(1, sqrt2, sqrt3)")


def slab_transverse() -> BodyGrid:
    return _slab(np.diag([2.0, 2.0, 1.0]), "SO(3) conjugated by diag(2, 2, 1)")


def slab_dilated() -> BodyGrid:
    return _slab(3.0 * np.eye(3), "SO(3) conjugated by 3I")


C4 = mg.finite([rot2(k * math.pi / 2) for k in range(4)])
C2 = mg.finite([np.eye(2), -np.eye(2)])


def _small(group, field, note) -> BodyGrid:
    return grid_body(2, (3, 3), group, field, {"description": note})


def finite_c4() -> BodyGrid:
    return _small(C4, lambda x, y: np.eye(2), "C4, homogeneous")


def finite_c4_turned() -> BodyGrid:
    return _small(C4, lambda x, y: rot2(_deg(45 * x)), "C4, rotation 45x deg")


def finite_c2() -> BodyGrid:
    return _small(C2, lambda x, y: np.eye(2), "C2, homogeneous")


def finite_c2_contorted() -> BodyGrid:
    return _small(C2, lambda x, y: rot2(_deg(30 * y)), "C2, rotation 30y deg")


def _numeric(models, note) -> BodyGrid:
    pts = tuple(MaterialPoint(i, (i + 1,), Numeric(m)) for i, m in enumerate(models))
    return BodyGrid(3, pts, {"description": note})


def numeric_planted() -> BodyGrid:
    m = neo_hookean(1.0, 1.0)
    return _numeric([m, m.precomposed(PLANTED_P)], "NeoHookean(1,1) and its transplant by diag(1.2, 1/1.2, 1)")


def numeric_different() -> BodyGrid:
    return _numeric([neo_hookean(1.0, 1.0), neo_hookean(2.0, 1.0)], "NeoHookean(1,1) and NeoHookean(2,1)")


BODIES: dict[str, Callable[[], BodyGrid]] = {
    f.__name__: f for f in (
        plate_iso_homog, plate_trivial, plate_contorted, plate_contorted_rows, plate_stretched,
        plate_iso_dilated, plate_iso_twisted, slab_iso, slab_ortho, slab_transverse, slab_dilated,
        finite_c4, finite_c4_turned, finite_c2, finite_c2_contorted, numeric_planted,
        numeric_different)
}


@dataclass(frozen=True)
class FigureCase:
    """A composite of two bundled bodies and the verdicts it should produce."""

    name: str
    title: str
    a: str
    b: str
    uniform: bool
    homogeneous: str | None = None
    stress_free: str | None = None
    components: int | None = None
    symmetry: str | None = None
    locally_trivial: tuple | None = None


FIGURES = (
    FigureCase("item1", "Two uniform and homogeneous plates", "plate_iso_homog", "plate_trivial",
               True, "homogeneous", "exists", 1, "Trivial"),
    FigureCase("item2", "Two uniform plates", "plate_iso_homog", "plate_contorted",
               True, "inhomogeneous", "exists", 1, "Trivial"),
    FigureCase("item3", "Loss of uniformity from two uniform plates", "plate_contorted_rows",
               "plate_contorted", False, None, None, 25, "Trivial"),
    FigureCase("item4", "Loss of stress-free configurations from two homogeneous plates",
               "plate_stretched", "plate_trivial", True, "homogeneous", "not_exists", 1, "Trivial"),
    FigureCase("locally_trivial", "A locally trivial composite", "plate_iso_homog",
               "plate_iso_dilated", True, "homogeneous", None, 1, "Isotropic", (True, True)),
    FigureCase("laminate", "Partial preservation of uniformity: a laminate", "plate_trivial",
               "plate_contorted", False, None, None, 5, "Trivial"),
    FigureCase("isotropic", "Two isotropic plates with loss of isotropy", "plate_iso_homog",
               "plate_iso_twisted", True, None, None, 1, "DiscreteOther"),
)

# further composites used for the uniformity / core-transitivity cross-check
EXTRA_COMPOSITES = (
    ("finite_c4", "finite_c2"),
    ("finite_c4", "finite_c4_turned"),
    ("finite_c2", "finite_c2_contorted"),
    ("finite_c4_turned", "finite_c2_contorted"),
    ("slab_iso", "slab_ortho"),
    ("slab_iso", "slab_transverse"),
    ("slab_iso", "slab_dilated"),
)


def body(name: str) -> BodyGrid:
    """A bundled body: the JSON file when shipped, else the builder."""
    path = fixture_path(name)
    if path is not None:
        from .io import load
        return load(path)
    return BODIES[name]()


def fixture_path(name: str):
    f = resources.files("matg") / "fixtures" / f"{name}.json"
    return f if f.is_file() else None


# -- finite groupoids -------------------------------------------------------


def _s3():
    perms = [(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)]
    product = {(g, h): tuple(g[h[i]] for i in range(3)) for g in perms for h in perms}
    action = {(g, x): g[x] for g in perms for x in range(3)}
    return perms, product, action


def s3_on_three() -> FiniteGroupoid:
    perms, product, action = _s3()
    return make_action_groupoid(perms, product, action, range(3))


def c2_swap() -> FiniteGroupoid:
    els = ["e", "a"]
    product = {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("a", "a"): "e"}
    action = {("e", 0): 0, ("e", 1): 1, ("e", 2): 2, ("a", 0): 1, ("a", 1): 0, ("a", 2): 2}
    return make_action_groupoid(els, product, action, range(3))


def cyclic_disjoint() -> FiniteGroupoid:
    def cyclic(n):
        return list(range(n)), {(i, j): (i + j) % n for i in range(n) for j in range(n)}
    return make_totally_intransitive([cyclic(2), cyclic(3), cyclic(4)])


def materialize(g: MaterialGroupoid, max_arrows: int = 200) -> FiniteGroupoid:
    """Explicit finite groupoid of a material groupoid with finite vertex groups."""
    arrows = []
    for (x, y), c in g.arrows.items():
        if not c.is_finite:
            raise ValueError("vertex groups are not finite")
        arrows.extend((x, y, m) for m in c.members())
    if len(arrows) > max_arrows:
        raise ValueError(f"{len(arrows)} arrows exceed {max_arrows}")
    return matrix_groupoid(g.objects, arrows, max_arrows=max_arrows)


def finite_groupoids() -> dict[str, FiniteGroupoid]:
    from .body import build_material_groupoid

    out = {
        "pair_5": make_pair_groupoid(5),
        "s3_on_three": s3_on_three(),
        "c2_swap": c2_swap(),
        "cyclic_disjoint": cyclic_disjoint(),
    }
    from .composite import intersect_material_groupoids

    for name in ("finite_c2", "finite_c2_contorted"):
        out[name] = materialize(build_material_groupoid(BODIES[name]()))
    a = build_material_groupoid(BODIES["finite_c4"]())
    b = build_material_groupoid(BODIES["finite_c4_turned"]())
    out["c4_intersection"] = materialize(intersect_material_groupoids(a, b))
    return out
