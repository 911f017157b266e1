"""Binary composites: intersection of material groupoids and the material double groupoid."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import groups as mg
from .body import (
    BodyGrid,
    BodyMismatch,
    CosetArrowSet,
    MaterialGroupoid,
    Numeric,
    Symbolic,
    intersect_cosets,
    is_discretely_homogeneous,
    is_uniform,
)
from .double import COMMUTING, CoreGroupoid, DoubleGroupoidSpec, is_locally_trivial
from .linalg import is_orthogonal, rel_close

STRESS_FREE_TOL = 1e-8


class ConsistencyError(RuntimeError):
    """Uniformity of the intersection disagrees with transitivity of the core."""


@dataclass
class CompositeReport:
    uniform: bool
    components: list
    pointwise_class: dict
    core_transitive: bool
    locally_trivial: tuple
    stress_free_configuration: str
    homogeneous: str
    structure_group: dict | None = None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "uniform": self.uniform,
            "homogeneous": self.homogeneous,
            "stress_free_configuration": self.stress_free_configuration,
            "components": self.components,
            "core_transitive": self.core_transitive,
            "locally_trivial": {"horizontal": self.locally_trivial[0],
                                "vertical": self.locally_trivial[1]},
            "pointwise_class": {str(k): v.to_dict() for k, v in self.pointwise_class.items()},
            "structure_group": self.structure_group,
            "warnings": list(self.warnings),
        }


def intersect_material_groupoids(a: MaterialGroupoid, b: MaterialGroupoid, tol: float = 1e-9,
                                 eig_tol: float = mg.EIG_TOL) -> MaterialGroupoid:
    """Arrows that are material isomorphisms for both constituents."""
    if not a.body.same_grid(b.body):
        raise BodyMismatch("constituents are defined on different grids")
    vertex = {x: mg.intersect(a.vertex[x], b.vertex[x], tol, eig_tol) for x in a.objects}
    arrows = {}
    for key, ca in a.arrows.items():
        cb = b.arrows.get(key)
        if cb is not None:
            c = intersect_cosets(ca, cb, tol, eig_tol, group=vertex[key[0]])
            if c is not None:
                arrows[key] = c
    return MaterialGroupoid(a.body, arrows, vertex)


def effective_transplant(p) -> np.ndarray | None:
    """Transplant with a conjugated archetype's conjugator absorbed."""
    if not isinstance(p.data, Symbolic):
        return None
    g = p.data.group
    t = p.data.transplant
    return t @ g.conjugator if g.kind == "conjugated" else t


def stress_free_configuration(body_a: BodyGrid, body_b: BodyGrid) -> str:
    """exists iff every relative transplant P_a^-1 P_b is orthogonal."""
    for pa, pb in zip(body_a.points, body_b.points):
        ta, tb = effective_transplant(pa), effective_transplant(pb)
        if ta is None or tb is None:
            return "unknown"
        rel = np.linalg.solve(ta, tb)
        if not is_orthogonal(rel, STRESS_FREE_TOL):
            return "not_exists"
    return "exists"


def _normalizer_check(a: MaterialGroupoid, b: MaterialGroupoid, x, cls, eig_tol) -> str | None:
    """Cross-check with the normalizer classifier when both constituents are SO archetypes."""
    ga, gb = a.archetypes.get(x), b.archetypes.get(x)
    if ga is None or gb is None or ga.kind != "SO" or gb.kind != "SO":
        return None
    pa = effective_transplant(a.body.points[x])
    pb = effective_transplant(b.body.points[x])
    other = mg.classify_normalizer(np.linalg.solve(pa, pb), eig_tol)
    if other.label != cls.label:
        return f"point {x}: normalizer class {other.label} differs from {cls.label}"
    return None


def analyze_composite(a: MaterialGroupoid, b: MaterialGroupoid, tol: float = 1e-9,
                      eig_tol: float = mg.EIG_TOL, check: bool = True) -> CompositeReport:
    inter = intersect_material_groupoids(a, b, tol, eig_tol)
    uv = is_uniform(inter)
    spec = DoubleGroupoidSpec(a, b, COMMUTING)
    core = CoreGroupoid(spec)
    core_transitive = core.is_transitive()
    if check and core_transitive != uv.uniform:
        raise ConsistencyError(
            f"intersection uniform={uv.uniform} but core transitive={core_transitive}")
    warnings: list[str] = []
    try:
        lt = is_locally_trivial(spec).as_pair()
    except mg.UnsupportedPair as e:
        lt = (False, False)
        warnings.append(f"local triviality undecided: {e}")
    classes = {}
    for x in inter.objects:
        cls = mg.class_of_group(inter.vertex[x])
        classes[x] = cls
        warnings.extend(f"point {x}: {w}" for w in cls.warnings)
        note = _normalizer_check(a, b, x, cls, eig_tol)
        if note:
            warnings.append(note)
    if uv.uniform:
        hv = is_discretely_homogeneous(inter)
        homogeneous = hv.status
        if hv.status == "inconclusive":
            warnings.append(f"homogeneity inconclusive: {hv.reason}")
        structure = mg.group_to_dict(inter.vertex[inter.objects[0]])
    else:
        homogeneous = "not_applicable"
        structure = None
    return CompositeReport(uv.uniform, uv.components, classes, core_transitive, lt,
                           stress_free_configuration(a.body, b.body), homogeneous,
                           structure, warnings)


def core_matches_intersection(a: MaterialGroupoid, b: MaterialGroupoid,
                              inter: MaterialGroupoid | None = None) -> bool:
    """Core payloads equal the intersection's arrows at every pair (set equality when finite)."""
    inter = intersect_material_groupoids(a, b) if inter is None else inter
    core = CoreGroupoid(DoubleGroupoidSpec(a, b, COMMUTING))
    for x in a.objects:
        for y in a.objects:
            cp = core.payloads(x, y)
            ci = inter.hom(x, y)
            if (cp is None) != (ci is None):
                return False
            if cp is None:
                continue
            if isinstance(cp, list):
                mi = ci.members()
                if len(mi) != len(cp):
                    return False
                if not all(any(rel_close(m, p, 1e-8) for p in cp) for m in mi):
                    return False
            elif not (ci.contains(cp.representative, 1e-8)
                      and mg.same_group(cp.source_group, ci.source_group)):
                return False
    return True


def has_numeric(body: BodyGrid) -> bool:
    return any(isinstance(p.data, Numeric) for p in body.points)
