"""Symbolic descriptors for closed subgroups of GL(n), n in {2, 3}.

Continuous groups are never sampled into lists.  The family

    trivial, finite, SO(n), O(n), axis_rot(a), axis_o(a), conjugated(base, K)

is closed under the intersections needed for composites of (conjugated)
orthogonal materials.  ``axis_rot(a)`` is the rotations about the line a;
``axis_o(a)`` is the full orthogonal stabiliser of that line, which is what
the transversely isotropic branch becomes when the archetype is O(3).

Conjugated descriptors are kept canonical: the conjugator is symmetric
positive definite with unit determinant (the orthogonal polar factor is
absorbed into the base), and a conjugator that commutes with the base is
dropped.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    check_invertible,
    complete_frame,
    eig_sym,
    is_orthogonal,
    multiplicity_pattern,
    polar_left,
    random_orthogonal,
    random_rotation,
    rot2,
    rot3,
)

TOL = 1e-9
EIG_TOL = 1e-6

CONTINUOUS = ("SO", "O", "axis_rot", "axis_o")


class DimensionMismatch(ValueError):
    pass


class UnsupportedPair(ValueError):
    pass


class SingularConjugator(ValueError):
    pass


class NotAGroup(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MatrixGroup:
    kind: str
    n: int
    elements: tuple = ()
    axis: np.ndarray | None = None
    base: MatrixGroup | None = None
    conjugator: np.ndarray | None = None

    def __repr__(self) -> str:
        if self.kind == "finite":
            return f"MatrixGroup(finite, n={self.n}, order={len(self.elements)})"
        if self.kind in ("axis_rot", "axis_o"):
            return f"MatrixGroup({self.kind}, axis={np.round(self.axis, 6).tolist()})"
        if self.kind == "conjugated":
            return f"MatrixGroup(conjugated, base={self.base!r})"
        return f"MatrixGroup({self.kind}, n={self.n})"

    @property
    def is_finite(self) -> bool:
        return self.kind in ("trivial", "finite")

    @property
    def order(self) -> int | None:
        if self.kind == "trivial":
            return 1
        if self.kind == "finite":
            return len(self.elements)
        return None

    def members(self) -> list[np.ndarray]:
        if self.kind == "trivial":
            return [np.eye(self.n)]
        if self.kind == "finite":
            return list(self.elements)
        raise ValueError(f"{self.kind} group has no finite member list")


def trivial(n: int) -> MatrixGroup:
    return MatrixGroup("trivial", n)


def special_orthogonal(n: int) -> MatrixGroup:
    return MatrixGroup("SO", n)


def orthogonal(n: int) -> MatrixGroup:
    return MatrixGroup("O", n)


def _unit_axis(axis) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    if a.shape != (3,):
        raise DimensionMismatch("axis groups exist in dimension 3 only")
    return a / np.linalg.norm(a)


def axis_rotations(axis) -> MatrixGroup:
    return MatrixGroup("axis_rot", 3, axis=_unit_axis(axis))


def axis_stabilizer(axis) -> MatrixGroup:
    return MatrixGroup("axis_o", 3, axis=_unit_axis(axis))


def _dedupe(mats, tol=TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for m in mats:
        if not any(np.linalg.norm(m - e) < tol for e in out):
            out.append(m)
    return out


def _index_of(m, mats, tol=TOL) -> int | None:
    for i, e in enumerate(mats):
        if np.linalg.norm(m - e) < tol:
            return i
    return None


def finite(elements, tol: float = TOL) -> MatrixGroup:
    """Finite group from an explicit element list; closure is verified."""
    mats = _dedupe([as_matrix(e) for e in elements], tol)
    if not mats:
        raise NotAGroup("empty element list")
    n = len(mats[0])
    if any(len(m) != n for m in mats):
        raise DimensionMismatch("mixed dimensions in element list")
    if _index_of(np.eye(n), mats, tol) is None:
        raise NotAGroup("identity missing")
    for a in mats:
        if _index_of(np.linalg.inv(a), mats, tol) is None:
            raise NotAGroup("not closed under inverse")
        for b in mats:
            if _index_of(a @ b, mats, tol) is None:
                raise NotAGroup("not closed under product")
    if len(mats) == 1:
        return trivial(n)
    ident = _index_of(np.eye(n), mats, tol)
    mats.insert(0, mats.pop(ident))
    return MatrixGroup("finite", n, elements=tuple(mats))


def generated(generators, tol: float = TOL, max_order: int = 1024) -> MatrixGroup:
    gens = [as_matrix(g) for g in generators]
    n = len(gens[0])
    els = [np.eye(n)]
    frontier = [np.eye(n)]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                c = g @ a
                if _index_of(c, els, tol) is None:
                    els.append(c)
                    nxt.append(c)
                    if len(els) > max_order:
                        raise NotAGroup(f"generated group exceeds order {max_order}")
        frontier = nxt
    return finite(els, tol)


def sign_group(frame: np.ndarray, proper: bool = False) -> MatrixGroup:
    """diag(+-1, ...) expressed in the orthonormal columns of `frame`."""
    n = len(frame)
    mats = []
    for signs in itertools.product((1.0, -1.0), repeat=n):
        if proper and np.prod(signs) < 0:
            continue
        mats.append(frame @ np.diag(signs) @ frame.T)
    return finite(mats)


def _is_conformal(a: np.ndarray, tol=TOL) -> tuple[bool, float]:
    aat = a @ a.T
    c2 = np.trace(aat) / len(a)
    return bool(np.linalg.norm(aat - c2 * np.eye(len(a))) <= tol * max(1.0, c2)), math.sqrt(c2)


def conjugate(g: MatrixGroup, a) -> MatrixGroup:
    """Descriptor for {a h a^-1 : h in g}."""
    a = as_matrix(a)
    if len(a) != g.n:
        raise DimensionMismatch(f"conjugator is {len(a)}x{len(a)}, group has n={g.n}")
    if abs(np.linalg.det(a)) <= 1e-12:
        raise SingularConjugator("conjugator is singular")
    conformal, c = _is_conformal(a)
    if conformal:
        a = a / c
    if g.kind == "trivial":
        return g
    if g.kind == "finite":
        ainv = np.linalg.inv(a)
        return finite([a @ e @ ainv for e in g.elements])
    if g.kind == "conjugated":
        return conjugate(g.base, a @ g.conjugator)
    if is_orthogonal(a):
        if g.kind in ("SO", "O"):
            return g
        return MatrixGroup(g.kind, 3, axis=_unit_axis(a @ g.axis))
    s, u = polar_left(a)
    base = conjugate(g, u)
    s = s / abs(np.linalg.det(s)) ** (1.0 / g.n)
    if all(np.linalg.norm(s @ h - h @ s) < TOL for h in generators(base)):
        return base
    return MatrixGroup("conjugated", g.n, base=base, conjugator=s)


def with_orientation(g: MatrixGroup, orientation: str) -> MatrixGroup:
    """Swap the proper/improper variant of every continuous orthogonal archetype."""
    if orientation not in ("SO", "O"):
        raise ValueError(f"orientation must be SO or O, not {orientation!r}")
    if orientation == "SO":
        return g
    if g.kind == "SO":
        return orthogonal(g.n)
    if g.kind == "axis_rot":
        return axis_stabilizer(g.axis)
    if g.kind == "conjugated":
        return conjugate(with_orientation(g.base, "O"), g.conjugator)
    return g


def contains(g: MatrixGroup, m, tol: float = TOL) -> bool:
    m = np.asarray(m, dtype=float)
    if m.shape != (g.n, g.n):
        raise DimensionMismatch(f"matrix shape {m.shape} vs group dimension {g.n}")
    eye = np.eye(g.n)
    if g.kind == "trivial":
        return bool(np.linalg.norm(m - eye) < tol)
    if g.kind == "finite":
        return min(np.linalg.norm(m - e) for e in g.elements) < tol
    if g.kind == "conjugated":
        k = g.conjugator
        return contains(g.base, np.linalg.solve(k, m @ k), tol)
    orth = np.linalg.norm(m.T @ m - eye) < tol
    if not orth:
        return False
    if g.kind == "O":
        return True
    if g.kind == "SO":
        return bool(np.linalg.det(m) > 0)
    a = g.axis
    if g.kind == "axis_rot":
        return bool(np.linalg.det(m) > 0 and np.linalg.norm(m @ a - a) < tol)
    if g.kind == "axis_o":
        return bool(min(np.linalg.norm(m @ a - a), np.linalg.norm(m @ a + a)) < tol)
    raise ValueError(f"unknown group kind {g.kind!r}")


# rotation angle of 1 rad generates a dense subgroup of the circle
_GENERIC_ANGLE = 1.0


def generators(g: MatrixGroup) -> list[np.ndarray]:
    """Topological generators: a closed group containing these contains g."""
    n = g.n
    if g.kind in ("trivial", "finite"):
        return g.members()
    if g.kind == "conjugated":
        k, kinv = g.conjugator, np.linalg.inv(g.conjugator)
        return [k @ h @ kinv for h in generators(g.base)]
    if n == 2:
        gens = [rot2(_GENERIC_ANGLE)]
        if g.kind == "O":
            gens.append(np.diag([1.0, -1.0]))
        return gens
    if g.kind in ("SO", "O"):
        gens = [rot3([1, 0, 0], _GENERIC_ANGLE), rot3([0, 1, 0], _GENERIC_ANGLE)]
        if g.kind == "O":
            gens.append(-np.eye(3))
        return gens
    gens = [rot3(g.axis, _GENERIC_ANGLE)]
    if g.kind == "axis_o":
        frame = complete_frame(g.axis)
        gens.append(-np.eye(3))
        gens.append(np.eye(3) - 2.0 * np.outer(frame[:, 1], frame[:, 1]))
    return gens


def sample(g: MatrixGroup, rng: np.random.Generator) -> np.ndarray:
    n = g.n
    if g.kind in ("trivial", "finite"):
        mats = g.members()
        return mats[int(rng.integers(len(mats)))]
    if g.kind == "conjugated":
        k = g.conjugator
        return k @ sample(g.base, rng) @ np.linalg.inv(k)
    if g.kind == "SO":
        return random_rotation(n, rng)
    if g.kind == "O":
        return random_orthogonal(n, rng)
    r = rot3(g.axis, rng.uniform(-math.pi, math.pi))
    if g.kind == "axis_o":
        gens = generators(g)
        if rng.random() < 0.5:
            r = gens[1] @ r
        if rng.random() < 0.5:
            r = gens[2] @ r
    return r


def is_subgroup(g1: MatrixGroup, g2: MatrixGroup, tol: float = 1e-8) -> bool:
    _check_dims(g1, g2)
    return all(contains(g2, h, tol) for h in generators(g1))


def same_group(g1: MatrixGroup, g2: MatrixGroup, tol: float = 1e-8) -> bool:
    if g1.order is not None and g2.order is not None and g1.order != g2.order:
        return False
    return is_subgroup(g1, g2, tol) and is_subgroup(g2, g1, tol)


def _check_dims(g1: MatrixGroup, g2: MatrixGroup) -> None:
    if g1.n != g2.n:
        raise DimensionMismatch(f"n={g1.n} vs n={g2.n}")


def orthogonal_centralizer(c: np.ndarray, eig_tol: float = EIG_TOL) -> MatrixGroup:
    """{Q in O(n) : CQ = QC} for symmetric positive definite C."""
    lam, v = eig_sym(c)
    clusters = multiplicity_pattern(lam, eig_tol)
    n = len(c)
    if len(clusters) == 1:
        return orthogonal(n)
    if len(clusters) == n:
        return sign_group(v)
    # n == 3 with one double eigenvalue: stabiliser of the simple eigenline
    simple = next(cl[0] for cl in clusters if len(cl) == 1)
    return axis_stabilizer(v[:, simple])


def _o_part(g: MatrixGroup):
    if g.kind in ("SO", "O"):
        return ("O", None), g.kind == "SO"
    return ("axis", g.axis), g.kind == "axis_rot"


def _plain_meet(a: MatrixGroup, b: MatrixGroup) -> MatrixGroup:
    (ka, axa), sa = _o_part(a)
    (kb, axb), sb = _o_part(b)
    if ka == "O":
        meet = orthogonal(a.n) if kb == "O" else axis_stabilizer(axb)
    elif kb == "O":
        meet = axis_stabilizer(axa)
    elif abs(abs(axa @ axb) - 1.0) < TOL:
        meet = axis_stabilizer(axa)
    else:
        e2 = axb - (axb @ axa) * axa
        e2 /= np.linalg.norm(e2)
        frame = np.column_stack([axa, e2, np.cross(axa, e2)])
        cand = sign_group(frame)
        sa_o, sb_o = axis_stabilizer(axa), axis_stabilizer(axb)
        keep = [m for m in cand.members() if contains(sa_o, m) and contains(sb_o, m)]
        meet = finite(keep)
    if not (sa or sb):
        return meet
    return _proper_part(meet)


def _proper_part(g: MatrixGroup) -> MatrixGroup:
    if g.kind == "O":
        return special_orthogonal(g.n)
    if g.kind == "axis_o":
        return axis_rotations(g.axis)
    if g.kind in ("SO", "axis_rot", "trivial"):
        return g
    if g.kind == "finite":
        return finite([m for m in g.elements if np.linalg.det(m) > 0])
    raise UnsupportedPair(f"proper part of {g.kind}")


def _filter(g: MatrixGroup, other: MatrixGroup, tol: float) -> MatrixGroup:
    return finite([m for m in g.members() if contains(other, m, tol)], tol)


def intersect(g1: MatrixGroup, g2: MatrixGroup, tol: float = TOL,
              eig_tol: float = EIG_TOL) -> MatrixGroup:
    """Descriptor for the intersection of two descriptors."""
    _check_dims(g1, g2)
    if g1.kind == "trivial" or g2.kind == "trivial":
        return trivial(g1.n)
    if g1.kind == "finite":
        return _filter(g1, g2, tol)
    if g2.kind == "finite":
        return _filter(g2, g1, tol)
    if g1.kind == "conjugated":
        k = g1.conjugator
        inner = intersect(g1.base, conjugate(g2, np.linalg.inv(k)), tol, eig_tol)
        return conjugate(inner, k)
    if g2.kind == "conjugated":
        return _meet_conjugated(g1, g2.base, g2.conjugator, tol, eig_tol)
    if g1.kind in CONTINUOUS and g2.kind in CONTINUOUS:
        return _plain_meet(g1, g2)
    raise UnsupportedPair(f"{g1.kind} with {g2.kind}")


def _meet_conjugated(y: MatrixGroup, x: MatrixGroup, k: np.ndarray, tol: float,
                     eig_tol: float) -> MatrixGroup:
    # y and x are orthogonal-type; the part of y that stays orthogonal after
    # conjugation by k^-1 is y intersected with the centraliser of k k^T,
    # and on that centraliser conjugation by k acts as conjugation by the
    # orthogonal polar factor of k.
    centre = orthogonal_centralizer(k @ k.T, eig_tol)
    if centre.kind == "finite":
        y_in = _filter(centre, y, tol)
    else:
        y_in = _plain_meet(y, centre)
    _, u = polar_left(k)
    x_rot = conjugate(x, u)
    if y_in.is_finite:
        return _filter(y_in, x_rot, tol)
    return _plain_meet(y_in, x_rot)


@dataclass(frozen=True)
class SymmetryClass:
    label: str
    axis: tuple | None = None
    frame: tuple | None = None
    warnings: tuple = field(default=())

    def to_dict(self) -> dict:
        out = {"label": self.label}
        if self.axis is not None:
            out["axis"] = [float(x) for x in self.axis]
        if self.frame is not None:
            out["frame"] = [[float(x) for x in row] for row in self.frame]
        return out


LABELS = ("Isotropic", "TransverselyIsotropic", "Orthotropic", "DiscreteOther", "Trivial")


def _near_degenerate(lam: np.ndarray, eig_tol: float) -> list[str]:
    scale = abs(lam[-1])
    gaps = np.diff(lam) / scale
    near = [g for g in gaps if eig_tol < g < 1e3 * eig_tol]
    if near:
        return [f"near-degenerate spectrum: relative gap {min(near):.2e} within 1e3 of eig_tol {eig_tol:.1e}"]
    return []


def classify_normalizer(h, eig_tol: float = EIG_TOL) -> SymmetryClass:
    """Class of SO(n) intersected with h SO(n) h^-1, from the spectrum of h h^T."""
    h = as_matrix(h)
    check_invertible(h)
    c = h @ h.T
    lam, v = eig_sym(c)
    clusters = multiplicity_pattern(lam, eig_tol)
    warn = tuple(_near_degenerate(lam, eig_tol))
    n = len(h)
    if len(clusters) == 1:
        return SymmetryClass("Isotropic", warnings=warn)
    if n == 2:
        return SymmetryClass("DiscreteOther", frame=tuple(map(tuple, v)), warnings=warn)
    if len(clusters) == 3:
        return SymmetryClass("Orthotropic", frame=tuple(map(tuple, v)), warnings=warn)
    simple = next(cl[0] for cl in clusters if len(cl) == 1)
    return SymmetryClass("TransverselyIsotropic", axis=tuple(_canonical_sign(v[:, simple])),
                         warnings=warn)


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    i = int(np.argmax(np.abs(v)))
    return v if v[i] > 0 else -v


def _orthotropic_frame(g: MatrixGroup) -> np.ndarray | None:
    rots = [m for m in g.members() if np.linalg.det(m) > 0
            and np.linalg.norm(m - np.eye(3)) > TOL]
    if len(rots) != 3 or not all(is_orthogonal(m) for m in rots):
        return None
    axes = []
    for m in rots:
        if np.linalg.norm(m @ m - np.eye(3)) > 1e-8:
            return None
        w, vecs = np.linalg.eigh(0.5 * (m + m.T))
        axes.append(vecs[:, int(np.argmax(w))])
    frame = np.column_stack(axes)
    if not is_orthogonal(frame, 1e-8):
        return None
    return frame


def class_of_group(g: MatrixGroup) -> SymmetryClass:
    """Label a descriptor by the symmetry class it represents."""
    if g.kind == "conjugated":
        inner = class_of_group(g.base)
        if inner.axis is None:
            return SymmetryClass(inner.label)
        ax = g.conjugator @ np.asarray(inner.axis)
        return SymmetryClass(inner.label, axis=tuple(_canonical_sign(ax / np.linalg.norm(ax))))
    if g.kind == "trivial":
        return SymmetryClass("Trivial")
    if g.kind in ("SO", "O"):
        return SymmetryClass("Isotropic")
    if g.kind in ("axis_rot", "axis_o"):
        return SymmetryClass("TransverselyIsotropic", axis=tuple(_canonical_sign(g.axis)))
    if g.n == 3:
        frame = _orthotropic_frame(g)
        if frame is not None:
            return SymmetryClass("Orthotropic", frame=tuple(map(tuple, frame)))
    return SymmetryClass("DiscreteOther")


def group_to_dict(g: MatrixGroup) -> dict:
    if g.kind in ("trivial", "SO", "O"):
        return {"type": g.kind, "n": g.n}
    if g.kind == "finite":
        return {"type": "finite", "n": g.n,
                "elements": [m.tolist() for m in g.elements]}
    if g.kind in ("axis_rot", "axis_o"):
        return {"type": g.kind, "n": 3, "axis": g.axis.tolist()}
    return {"type": "conjugated", "n": g.n, "base": group_to_dict(g.base),
            "conjugator": g.conjugator.tolist()}


def group_from_dict(d: dict, n: int | None = None) -> MatrixGroup:
    kind = d["type"]
    n = int(d.get("n", n or 0))
    if kind == "trivial":
        return trivial(n)
    if kind == "SO":
        return special_orthogonal(n)
    if kind == "O":
        return orthogonal(n)
    if kind == "finite":
        return finite(d["elements"])
    if kind == "axis_rot":
        return axis_rotations(d["axis"])
    if kind == "axis_o":
        return axis_stabilizer(d["axis"])
    if kind == "conjugated":
        return conjugate(group_from_dict(d["base"], n), d["conjugator"])
    raise UnsupportedPair(f"unknown group type {kind!r}")
