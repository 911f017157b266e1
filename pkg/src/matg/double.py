"""Double groupoids of squares over two side groupoids with a common base.

A square is drawn as::

    TL <---- t ---- TR
    ^               ^
    t_hat           s_hat
    |               |
    BL <---- s ---- BR

Horizontal arrows (t, s) come from the horizontal side H and vertical
arrows (t_hat, s_hat) from the vertical side V.  The commuting predicate
asks t . s_hat = t_hat . s as matrices.

Sides are duck-typed: they provide ``objects``, ``identity``, ``compose``,
``inverse``, ``contains_arrow`` and ``hom``.  A finite side's ``hom``
returns a list of arrows; a material side's returns a coset arrow set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .body import CosetArrowSet, MaterialGroupoid, coset_subset, intersect_cosets, right_translate
from .groupoid import Arrow, FiniteGroupoid, NotComposable, components_from_pairs, payload_arrow, same_arrow
from .linalg import rel_close

COARSE = "Coarse"
COMMUTING = "Commuting"
SQUARE_TOL = 1e-9


class CornerMismatch(ValueError):
    pass


class NotCommuting(ValueError):
    pass


class NotInSide(ValueError):
    pass


class UnsupportedDescriptor(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Square:
    t: Arrow
    s: Arrow
    t_hat: Arrow
    s_hat: Arrow

    # corner accessors
    @property
    def bottom_right(self):
        return self.s.source

    @property
    def bottom_left(self):
        return self.s.target

    @property
    def top_right(self):
        return self.t.source

    @property
    def top_left(self):
        return self.t.target

    # projections onto the side groupoids
    @property
    def horizontal_source(self) -> Arrow:
        return self.s_hat

    @property
    def horizontal_target(self) -> Arrow:
        return self.t_hat

    @property
    def vertical_source(self) -> Arrow:
        return self.s

    @property
    def vertical_target(self) -> Arrow:
        return self.t


@dataclass(frozen=True, eq=False)
class DoubleGroupoidSpec:
    horizontal: object
    vertical: object
    predicate: str = COMMUTING

    def __post_init__(self):
        if self.predicate not in (COARSE, COMMUTING):
            raise ValueError(f"unknown square predicate {self.predicate!r}")
        if list(self.horizontal.objects) != list(self.vertical.objects):
            raise CornerMismatch("side groupoids have different object sets")

    @property
    def objects(self) -> list:
        return list(self.horizontal.objects)

    def transposed(self) -> DoubleGroupoidSpec:
        return DoubleGroupoidSpec(self.vertical, self.horizontal, self.predicate)


@dataclass(frozen=True, eq=False)
class CoreArrow:
    t: Arrow
    t_hat: Arrow

    @property
    def base_source(self):
        return self.t.source

    @property
    def base_target(self):
        return self.t.target


def _payload(a: Arrow) -> np.ndarray:
    if a.payload is None:
        raise NotCommuting(f"{a} carries no matrix payload")
    return a.payload


def commutes(sq: Square, tol: float = SQUARE_TOL) -> bool:
    lhs = _payload(sq.t) @ _payload(sq.s_hat)
    rhs = _payload(sq.t_hat) @ _payload(sq.s)
    return rel_close(lhs, rhs, tol)


def _check_corners(t, s, t_hat, s_hat) -> None:
    if s.source != s_hat.source:
        raise CornerMismatch("bottom and right sides do not meet")
    if s.target != t_hat.source:
        raise CornerMismatch("bottom and left sides do not meet")
    if s_hat.target != t.source:
        raise CornerMismatch("right and top sides do not meet")
    if t.target != t_hat.target:
        raise CornerMismatch("top and left sides do not meet")


def make_square(spec: DoubleGroupoidSpec, t: Arrow, s: Arrow, t_hat: Arrow, s_hat: Arrow,
                check_sides: bool = True, tol: float = SQUARE_TOL) -> Square:
    _check_corners(t, s, t_hat, s_hat)
    if check_sides:
        for a, side, name in ((t, spec.horizontal, "t"), (s, spec.horizontal, "s"),
                              (t_hat, spec.vertical, "t_hat"), (s_hat, spec.vertical, "s_hat")):
            if not side.contains_arrow(a):
                raise NotInSide(f"{name} is not an arrow of its side groupoid")
    sq = Square(t, s, t_hat, s_hat)
    if spec.predicate == COMMUTING and not commutes(sq, tol):
        raise NotCommuting("t . s_hat != t_hat . s")
    return sq


def double_identity(spec: DoubleGroupoidSpec, x) -> Square:
    h = spec.horizontal.identity(x)
    v = spec.vertical.identity(x)
    return Square(h, h, v, v)


def horizontal_identity(spec: DoubleGroupoidSpec, v: Arrow) -> Square:
    """Unit for compose_h along the vertical arrow v."""
    h = spec.horizontal
    return Square(h.identity(v.target), h.identity(v.source), v, v)


def vertical_identity(spec: DoubleGroupoidSpec, a: Arrow) -> Square:
    """Unit for compose_v along the horizontal arrow a."""
    v = spec.vertical
    return Square(a, a, v.identity(a.target), v.identity(a.source))


def compose_h(spec: DoubleGroupoidSpec, a: Square, b: Square) -> Square:
    """a placed to the left of b; they share the edge a.s_hat = b.t_hat."""
    if not same_arrow(a.s_hat, b.t_hat):
        raise NotComposable("right side of the left square differs from left side of the right square")
    h = spec.horizontal
    return Square(h.compose(a.t, b.t), h.compose(a.s, b.s), a.t_hat, b.s_hat)


def compose_v(spec: DoubleGroupoidSpec, a: Square, b: Square) -> Square:
    """a placed on top of b; they share the edge a.s = b.t."""
    if not same_arrow(a.s, b.t):
        raise NotComposable("bottom of the upper square differs from top of the lower square")
    v = spec.vertical
    return Square(a.t, b.s, v.compose(a.t_hat, b.t_hat), v.compose(a.s_hat, b.s_hat))


def same_square(a: Square, b: Square, tol: float = SQUARE_TOL) -> bool:
    return all(same_arrow(x, y, tol) for x, y in
               ((a.t, b.t), (a.s, b.s), (a.t_hat, b.t_hat), (a.s_hat, b.s_hat)))


def check_interchange(spec: DoubleGroupoidSpec, a: Square, b: Square, c: Square, d: Square,
                      tol: float = 1e-8) -> bool:
    """Block [[a, b], [c, d]]: (a|b) over (c|d) equals (a over c) | (b over d)."""
    lhs = compose_v(spec, compose_h(spec, a, b), compose_h(spec, c, d))
    rhs = compose_h(spec, compose_v(spec, a, c), compose_v(spec, b, d))
    return same_square(lhs, rhs, tol)


# -- arrow-set helpers over either kind of side -----------------------------


def _hom(side, x, y):
    """A list of arrows (finite) or a CosetArrowSet; None when empty."""
    h = side.hom(x, y)
    if h is None or (isinstance(h, list) and not h):
        return None
    return h


def _enumerable(h) -> list[Arrow] | None:
    if isinstance(h, list):
        return h
    if isinstance(h, CosetArrowSet) and h.is_finite:
        return [payload_arrow(h.source, h.target, m) for m in h.members()]
    return None


def _member(side, x, y, m) -> Arrow | None:
    """The side's arrow x -> y with payload m, if there is one."""
    if isinstance(side, FiniteGroupoid):
        return side.find(x, y, m)
    h = side.hom(x, y)
    if h is not None and h.contains(m):
        return payload_arrow(x, y, m)
    return None


def _some_arrow(side, x, y) -> Arrow | None:
    h = _hom(side, x, y)
    if h is None:
        return None
    return h[0] if isinstance(h, list) else h.arrow()


def random_arrow(side, x, y, rng: np.random.Generator) -> Arrow | None:
    h = _hom(side, x, y)
    if h is None:
        return None
    if isinstance(h, list):
        return h[int(rng.integers(len(h)))]
    return payload_arrow(x, y, h.sample(rng))


def fill_corner(spec: DoubleGroupoidSpec, h: Arrow, v: Arrow) -> Square | None:
    """Complete s = h (horizontal) and s_hat = v (vertical) from a shared corner."""
    if h.source != v.source:
        raise CornerMismatch("corner arrows do not share a source")
    bl, tr = h.target, v.target
    hs, vs = spec.horizontal, spec.vertical
    order = sorted(spec.objects, key=lambda o: (o not in (bl, tr), o))
    if spec.predicate == COARSE:
        for tl in order:
            t = _some_arrow(hs, tr, tl)
            th = _some_arrow(vs, bl, tl)
            if t is not None and th is not None:
                return Square(t, h, th, v)
        return None
    m = _payload(h) @ np.linalg.inv(_payload(v))  # TR -> BL
    for tl in order:
        hh, vv = _hom(hs, tr, tl), _hom(vs, bl, tl)
        if hh is None or vv is None:
            continue
        ev, eh = _enumerable(vv), _enumerable(hh)
        if ev is not None:
            for th in ev:
                t = _member(hs, tr, tl, _payload(th) @ m)
                if t is not None:
                    return Square(t, h, th, v)
        elif eh is not None:
            minv = np.linalg.inv(m)
            for t in eh:
                th = _member(vs, bl, tl, _payload(t) @ minv)
                if th is not None:
                    return Square(t, h, th, v)
        else:
            cand = intersect_cosets(vv, right_translate(hh, np.linalg.inv(m), bl))
            if cand is not None:
                th = payload_arrow(bl, tl, cand.representative)
                return Square(payload_arrow(tr, tl, cand.representative @ m), h, th, v)
    return None


# -- local triviality -------------------------------------------------------


@dataclass(frozen=True)
class LocalTriviality:
    horizontal: bool
    vertical: bool
    relation: str

    def as_pair(self) -> tuple[bool, bool]:
        return self.horizontal, self.vertical

    def to_dict(self) -> dict:
        return {"horizontal": self.horizontal, "vertical": self.vertical, "relation": self.relation}


def _reach(side, objs) -> np.ndarray:
    return np.array([[_hom(side, x, y) is not None for y in objs] for x in objs])


def _coarse_closes(a, b, objs) -> bool:
    """Every a-b-a channel can be closed by an arrow of b."""
    ra, rb = _reach(a, objs).astype(int), _reach(b, objs)
    need = (ra.T @ rb.astype(int) @ ra) > 0
    return bool(np.all(rb[need]))


def side_contained(small, big) -> bool:
    """Every arrow of ``small`` is an arrow of ``big`` (payload-wise)."""
    objs = list(small.objects)
    if isinstance(small, MaterialGroupoid) and isinstance(big, MaterialGroupoid):
        # vertex-group inclusion at one root per component plus representatives
        for comp in small.components():
            x0 = comp[0]
            if not coset_subset(small.hom(x0, x0), big.hom(x0, x0)):
                return False
            for y in comp[1:]:
                hb = big.hom(x0, y)
                if hb is None or not hb.contains(small.hom(x0, y).representative, 1e-8):
                    return False
        return True
    for x in objs:
        for y in objs:
            hs = _hom(small, x, y)
            if hs is None:
                continue
            arrows = _enumerable(hs)
            if arrows is None:
                raise UnsupportedDescriptor("continuous arrow set against a finite side")
            if any(_member(big, x, y, _payload(a)) is None for a in arrows):
                return False
    return True


def is_locally_trivial(spec: DoubleGroupoidSpec) -> LocalTriviality:
    """Closing of three-sided channels, per direction.

    Horizontal: every channel (s, t_hat, s_hat) closes with some top t.  For
    commuting squares t = t_hat s s_hat^-1 and this holds iff V is contained
    in H.  Vertical is the mirror statement, H contained in V.
    """
    hs, vs = spec.horizontal, spec.vertical
    objs = spec.objects
    if spec.predicate == COARSE:
        h = _coarse_closes(vs, hs, objs)
        v = _coarse_closes(hs, vs, objs)
        return LocalTriviality(h, v, "coarse reachability")
    h = side_contained(vs, hs)
    v = side_contained(hs, vs)
    rel = {(True, True): "vertex groups equal", (True, False): "vertical vertex groups inside horizontal",
           (False, True): "horizontal vertex groups inside vertical",
           (False, False): "no inclusion"}[h, v]
    return LocalTriviality(h, v, rel)


def probe_local_triviality(spec: DoubleGroupoidSpec, rng: np.random.Generator,
                           trials: int = 200) -> tuple[bool, bool]:
    """Random three-sided channels; False in a slot means a counterexample was found."""
    hs, vs = spec.horizontal, spec.vertical
    objs = spec.objects
    ok = [True, True]
    for _ in range(trials):
        for k, (along, across) in enumerate(((hs, vs), (vs, hs))):
            br = objs[int(rng.integers(len(objs)))]
            bl = objs[int(rng.integers(len(objs)))]
            tr = objs[int(rng.integers(len(objs)))]
            tl = objs[int(rng.integers(len(objs)))]
            a = random_arrow(along, br, bl, rng)
            b = random_arrow(across, br, tr, rng)
            c = random_arrow(across, bl, tl, rng)
            if a is None or b is None or c is None:
                continue
            if spec.predicate == COARSE:
                closes = _hom(along, tr, tl) is not None
            else:
                m = _payload(c) @ _payload(a) @ np.linalg.inv(_payload(b))
                closes = _member(along, tr, tl, m) is not None
            ok[k] = ok[k] and closes
    return ok[0], ok[1]


# -- core groupoid ----------------------------------------------------------


@dataclass(eq=False)
class CoreGroupoid:
    """Squares whose source edges are units; stored as co-terminal pairs (t, t_hat)."""

    spec: DoubleGroupoidSpec

    @property
    def objects(self) -> list:
        return self.spec.objects

    def hom(self, x, y):
        """A list of CoreArrows when enumerable, else the coset of common payloads."""
        hs, vs = self.spec.horizontal, self.spec.vertical
        a, b = _hom(hs, x, y), _hom(vs, x, y)
        if a is None or b is None:
            return None
        ea, eb = _enumerable(a), _enumerable(b)
        if self.spec.predicate == COARSE:
            if ea is None or eb is None:
                raise UnsupportedDescriptor("coarse core over continuous sides is not enumerable")
            return [CoreArrow(t, th) for t in ea for th in eb]
        if ea is not None and eb is not None:
            out = [CoreArrow(t, th) for t in ea for th in eb if rel_close(_payload(t), _payload(th))]
            return out or None
        if isinstance(a, CosetArrowSet) and isinstance(b, CosetArrowSet):
            return intersect_cosets(a, b)
        fin, other, first = (ea, b, True) if ea is not None else (eb, a, False)
        side = vs if first else hs
        out = []
        for z in fin:
            w = _member(side, x, y, _payload(z))
            if w is not None:
                out.append(CoreArrow(z, w) if first else CoreArrow(w, z))
        return out or None

    def identity(self, x) -> CoreArrow:
        return CoreArrow(self.spec.horizontal.identity(x), self.spec.vertical.identity(x))

    def compose(self, k1: CoreArrow, k2: CoreArrow) -> CoreArrow:
        return CoreArrow(self.spec.horizontal.compose(k1.t, k2.t),
                         self.spec.vertical.compose(k1.t_hat, k2.t_hat))

    def inverse(self, k: CoreArrow) -> CoreArrow:
        return CoreArrow(self.spec.horizontal.inverse(k.t), self.spec.vertical.inverse(k.t_hat))

    def square(self, k: CoreArrow) -> Square:
        x = k.base_source
        return Square(k.t, self.spec.horizontal.identity(x), k.t_hat, self.spec.vertical.identity(x))

    @staticmethod
    def partial_h(k: CoreArrow) -> Arrow:
        return k.t

    @staticmethod
    def partial_v(k: CoreArrow) -> Arrow:
        return k.t_hat

    def payloads(self, x, y) -> list[np.ndarray] | CosetArrowSet | None:
        h = self.hom(x, y)
        if h is None or isinstance(h, CosetArrowSet):
            return h
        return [k.t.payload for k in h]

    def components(self) -> list[list]:
        objs = self.objects
        pairs = []
        for i, x in enumerate(objs):
            for y in objs[i + 1:]:
                if self.hom(x, y) is not None:
                    pairs.append((x, y))
        return components_from_pairs(objs, pairs)

    def is_transitive(self) -> bool:
        objs = self.objects
        return all(self.hom(objs[0], y) is not None for y in objs[1:])


def core_groupoid(spec: DoubleGroupoidSpec) -> CoreGroupoid:
    return CoreGroupoid(spec)
