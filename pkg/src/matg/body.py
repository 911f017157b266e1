"""Discretised bodies and their material groupoids.

A symbolic point carries an archetype symmetry group G and a transplant
P(X) taking the archetype into the point, so the response at X is
psi_X(F) = psi_arch(F P(X)).  Then

    vertex(X)    = P(X) G P(X)^-1
    arrows(X, Y) = P(Y) P(X)^-1 . vertex(X)   (all material isomorphisms X -> Y)

Points only share arrows when they carry the same ``material`` label.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import groups as mg
from .constitutive import ConstitutiveModel
from .groupoid import Arrow, NotComposable, components_from_pairs, payload_arrow
from .linalg import as_matrix, check_invertible, eig_sym, polar_left

PAYLOAD_TOL = 1e-9


class MixedModes(ValueError):
    pass


class BodyMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Symbolic:
    group: mg.MatrixGroup
    transplant: np.ndarray

    def __post_init__(self):
        p = as_matrix(self.transplant)
        check_invertible(p)
        if len(p) != self.group.n:
            raise mg.DimensionMismatch("transplant and group dimensions differ")
        object.__setattr__(self, "transplant", p)


@dataclass(frozen=True, eq=False)
class Numeric:
    model: ConstitutiveModel


@dataclass(frozen=True, eq=False)
class MaterialPoint:
    id: int
    grid_pos: tuple
    data: Symbolic | Numeric
    material: str = "default"


@dataclass(frozen=True, eq=False)
class BodyGrid:
    dim: int
    points: tuple
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        pos = [p.grid_pos for p in self.points]
        if len(set(pos)) != len(pos):
            raise ValueError("grid positions must be unique")
        if [p.id for p in self.points] != list(range(len(self.points))):
            raise ValueError("point ids must be 0..N-1 in order")
        for p in self.points:
            if len(p.grid_pos) > self.dim:
                raise ValueError(f"grid position {p.grid_pos} has more than {self.dim} coordinates")
            if isinstance(p.data, Symbolic) and p.data.group.n != self.dim:
                raise mg.DimensionMismatch(f"point {p.id}: group dimension {p.data.group.n}")
            if isinstance(p.data, Numeric) and p.data.model.dim != self.dim:
                raise mg.DimensionMismatch(f"point {p.id}: model dimension {p.data.model.dim}")

    @property
    def ids(self) -> list[int]:
        return [p.id for p in self.points]

    @property
    def is_symbolic(self) -> bool:
        return all(isinstance(p.data, Symbolic) for p in self.points)

    def position(self, i: int) -> np.ndarray:
        v = np.zeros(self.dim)
        gp = self.points[i].grid_pos
        v[: len(gp)] = gp
        return v

    def edges(self) -> list[tuple[int, int]]:
        """Unit grid edges, each listed once as (lower id, higher id)."""
        where = {p.grid_pos: p.id for p in self.points}
        out = []
        for p in self.points:
            for k in range(len(p.grid_pos)):
                q = list(p.grid_pos)
                q[k] += 1
                j = where.get(tuple(q))
                if j is not None:
                    out.append((p.id, j))
        return out

    def plaquettes(self) -> list[tuple[int, int, int, int]]:
        """Unit squares of the grid as cyclically ordered corner ids."""
        where = {p.grid_pos: p.id for p in self.points}
        out = []
        for p in self.points:
            d = len(p.grid_pos)
            for a, b in itertools.combinations(range(d), 2):
                ea = [0] * d
                eb = [0] * d
                ea[a] = 1
                eb[b] = 1
                corners = [p.grid_pos,
                           tuple(x + y for x, y in zip(p.grid_pos, ea)),
                           tuple(x + y + z for x, y, z in zip(p.grid_pos, ea, eb)),
                           tuple(x + z for x, z in zip(p.grid_pos, eb))]
                ids = [where.get(c) for c in corners]
                if None not in ids:
                    out.append(tuple(ids))
        return out

    def same_grid(self, other: BodyGrid) -> bool:
        return (self.dim == other.dim and len(self.points) == len(other.points)
                and all(p.grid_pos == q.grid_pos for p, q in zip(self.points, other.points)))


@dataclass(frozen=True, eq=False)
class CosetArrowSet:
    """All arrows source -> target, as representative . source_group."""

    source: int
    target: int
    representative: np.ndarray
    source_group: mg.MatrixGroup

    def contains(self, m, tol: float = PAYLOAD_TOL) -> bool:
        r = self.representative
        return mg.contains(self.source_group, np.linalg.solve(r, np.asarray(m, dtype=float)),
                           tol * max(1.0, np.linalg.norm(r)))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.representative @ mg.sample(self.source_group, rng)

    @property
    def is_finite(self) -> bool:
        return self.source_group.is_finite

    def members(self) -> list[np.ndarray]:
        return [self.representative @ g for g in self.source_group.members()]

    def two_sided(self):
        """(L, O, R) with the set equal to {L o R^-1 : o in O}, O plain."""
        g = self.source_group
        if g.kind == "conjugated":
            k = g.conjugator
            return self.representative @ k, g.base, k
        return self.representative, g, np.eye(g.n)

    def arrow(self) -> Arrow:
        return payload_arrow(self.source, self.target, self.representative)


def coset(source: int, target: int, representative, source_group: mg.MatrixGroup) -> CosetArrowSet:
    return CosetArrowSet(source, target, np.asarray(representative, dtype=float), source_group)


def right_translate(c: CosetArrowSet, m: np.ndarray, new_source: int) -> CosetArrowSet:
    """The set {a m : a in c}, an arrow set new_source -> c.target."""
    minv = np.linalg.inv(m)
    return CosetArrowSet(new_source, c.target, c.representative @ m,
                         mg.conjugate(c.source_group, minv))


def _solve_two_sided(c1: CosetArrowSet, c2: CosetArrowSet, tol: float) -> np.ndarray | None:
    l1, o1, r1 = c1.two_sided()
    l2, o2, r2 = c2.two_sided()
    if o1.kind not in ("SO", "O") or o2.kind not in ("SO", "O"):
        raise mg.UnsupportedPair(f"coset intersection of {o1.kind} and {o2.kind} sets")
    # find o in O1 with kl o kr^-1 in O2
    kl = np.linalg.solve(l2, l1)
    kr = np.linalg.solve(r2, r1)
    sl, ul = polar_left(kl)
    sr, ur = polar_left(kr)
    lam_l, vl = eig_sym(sl @ sl)
    lam_r, vr = eig_sym(sr @ sr)
    if np.max(np.abs(lam_l - lam_r)) > 1e-8 * lam_l[-1]:
        return None
    h = vl @ vr.T
    want_h = None
    if o2.kind == "SO":
        want_h = 1.0
    if o1.kind == "SO":
        need = np.sign(np.linalg.det(ul) * np.linalg.det(ur))
        if want_h is not None and need != want_h:
            return None
        want_h = need
    if want_h is not None and np.sign(np.linalg.det(h)) != want_h:
        flip = np.eye(len(h))
        flip[0, 0] = -1.0
        h = vl @ flip @ vr.T
    o = ul.T @ h @ ur
    return l1 @ o @ np.linalg.inv(r1)


def intersect_cosets(c1: CosetArrowSet, c2: CosetArrowSet, tol: float = PAYLOAD_TOL,
                     eig_tol: float = mg.EIG_TOL,
                     group: mg.MatrixGroup | None = None) -> CosetArrowSet | None:
    """The intersection of two arrow sets with equal endpoints, or None when empty.

    ``group`` may pass in a precomputed intersection of the two source groups.
    """
    if (c1.source, c1.target) != (c2.source, c2.target):
        raise BodyMismatch("arrow sets have different endpoints")
    common = None
    if c1.is_finite:
        common = next((m for m in c1.members() if c2.contains(m, tol)), None)
    elif c2.is_finite:
        common = next((m for m in c2.members() if c1.contains(m, tol)), None)
    else:
        common = _solve_two_sided(c1, c2, tol)
        if common is not None and not (c1.contains(common, 1e-7) and c2.contains(common, 1e-7)):
            raise ArithmeticError("two-sided factorisation produced a non-member")
    if common is None:
        return None
    if group is None:
        group = mg.intersect(c1.source_group, c2.source_group, tol, eig_tol)
    return CosetArrowSet(c1.source, c1.target, common, group)


def coset_subset(c1: CosetArrowSet, c2: CosetArrowSet, tol: float = 1e-8) -> bool:
    """c1 contained in c2 (same endpoints)."""
    return c2.contains(c1.representative, tol) and mg.is_subgroup(c1.source_group, c2.source_group, tol)


@dataclass(eq=False)
class MaterialGroupoid:
    body: BodyGrid
    arrows: dict
    vertex: dict
    archetypes: dict = field(default_factory=dict)
    transplants: dict = field(default_factory=dict)

    @property
    def objects(self) -> list[int]:
        return self.body.ids

    @property
    def dim(self) -> int:
        return self.body.dim

    def hom(self, x: int, y: int) -> CosetArrowSet | None:
        return self.arrows.get((x, y))

    def identity(self, x: int) -> Arrow:
        return payload_arrow(x, x, np.eye(self.dim))

    def inverse(self, z: Arrow) -> Arrow:
        return payload_arrow(z.target, z.source, np.linalg.inv(z.payload))

    def compose(self, u: Arrow, v: Arrow) -> Arrow:
        if v.target != u.source:
            raise NotComposable(f"{v.target} != {u.source}")
        return payload_arrow(v.source, u.target, u.payload @ v.payload)

    def contains_arrow(self, z: Arrow, tol: float = PAYLOAD_TOL) -> bool:
        c = self.arrows.get((z.source, z.target))
        return c is not None and z.payload is not None and c.contains(z.payload, tol)

    def components(self) -> list[list[int]]:
        return components_from_pairs(self.objects, self.arrows.keys())


def build_material_groupoid(body: BodyGrid, orientation: str = "SO") -> MaterialGroupoid:
    if not body.is_symbolic:
        raise MixedModes("numeric points must be converted with the isomorphism solver first")
    arche, trans, vertex, pinv = {}, {}, {}, {}
    for p in body.points:
        g = mg.with_orientation(p.data.group, orientation)
        arche[p.id] = g
        trans[p.id] = p.data.transplant
        vertex[p.id] = mg.conjugate(g, p.data.transplant)
        pinv[p.id] = np.linalg.inv(p.data.transplant)
    arrows = {}
    for p in body.points:
        for q in body.points:
            if p.material == q.material:
                arrows[p.id, q.id] = CosetArrowSet(p.id, q.id, trans[q.id] @ pinv[p.id], vertex[p.id])
    return MaterialGroupoid(body, arrows, vertex, arche, trans)


@dataclass(frozen=True)
class UniformityVerdict:
    uniform: bool
    components: list

    def to_dict(self) -> dict:
        return {"uniform": self.uniform, "components": self.components}


def is_uniform(g: MaterialGroupoid) -> UniformityVerdict:
    comps = g.components()
    return UniformityVerdict(len(comps) == 1, comps)


@dataclass(frozen=True)
class HomogeneityVerdict:
    status: str  # homogeneous | inhomogeneous | inconclusive
    selection: dict | None = None
    max_defect: float | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        out = {"status": self.status, "reason": self.reason}
        if self.max_defect is not None:
            out["max_defect"] = self.max_defect
        return out


def circulation(body: BodyGrid, field_: dict, plaquette) -> np.ndarray:
    """Trapezoidal line integral of a matrix field around one plaquette."""
    total = np.zeros(body.dim)
    for a, b in zip(plaquette, plaquette[1:] + plaquette[:1]):
        d = body.position(b) - body.position(a)
        total += 0.5 * (field_[a] + field_[b]) @ d
    return total


def is_discretely_homogeneous(g: MaterialGroupoid, tol: float = 1e-9,
                              max_nodes: int = 2_000_000) -> HomogeneityVerdict:
    """Search for arrows z(X): X0 -> X whose inverses form a discrete gradient.

    A configuration in which translations are material isomorphisms exists
    iff some selection z makes F(X) = z(X)^-1 curl free; on the grid this is
    a vanishing trapezoidal circulation around every plaquette.
    """
    verdict = is_uniform(g)
    if not verdict.uniform:
        return HomogeneityVerdict("inconclusive", reason="body is not uniform")
    body = g.body
    x0 = body.ids[0]
    order = sorted(body.ids, key=lambda i: tuple(reversed(body.points[i].grid_pos)))
    rank = {x: k for k, x in enumerate(order)}
    closing: dict[int, list] = {x: [] for x in order}
    for pl in body.plaquettes():
        closing[max(pl, key=rank.get)].append(list(pl))
    finite = g.vertex[x0].is_finite
    cands = {}
    for x in order:
        c = g.arrows[x0, x]
        mats = c.members() if finite else [c.representative]
        if x == x0:
            mats = [np.eye(body.dim)]
        cands[x] = [np.linalg.inv(m) for m in mats]
    scale = max(np.linalg.norm(m) for ms in cands.values() for m in ms)
    thresh = tol * max(1.0, scale)
    chosen: dict[int, int] = {}
    field_: dict[int, np.ndarray] = {}
    nodes = 0
    worst = [0.0]

    def ok(x) -> bool:
        for pl in closing[x]:
            d = float(np.linalg.norm(circulation(body, field_, pl)))
            if d > thresh:
                worst[0] = max(worst[0], d)
                return False
        return True

    def search(k: int) -> bool:
        nonlocal nodes
        if k == len(order):
            return True
        x = order[k]
        for i, m in enumerate(cands[x]):
            nodes += 1
            if nodes > max_nodes:
                raise _SearchBudget
            chosen[x] = i
            field_[x] = m
            if ok(x) and search(k + 1):
                return True
        del chosen[x], field_[x]
        return False

    try:
        found = search(0)
    except _SearchBudget:
        return HomogeneityVerdict("inconclusive", reason=f"search budget of {max_nodes} nodes exhausted")
    if found:
        defect = max((float(np.linalg.norm(circulation(body, field_, list(pl))))
                      for pl in body.plaquettes()), default=0.0)
        selection = {x: np.linalg.inv(field_[x]) for x in order}
        reason = "finite search" if finite else "representative field is curl free"
        return HomogeneityVerdict("homogeneous", selection, defect, reason)
    if finite:
        return HomogeneityVerdict("inhomogeneous", None, worst[0],
                                  "no symmetry selection makes the transplant field integrable")
    return HomogeneityVerdict("inconclusive", None, worst[0],
                              "continuous vertex group: representative field is not curl free")


class _SearchBudget(Exception):
    pass


def vertex_class(g: MaterialGroupoid, x: int) -> mg.SymmetryClass:
    return mg.class_of_group(g.vertex[x])
