"""Finite groupoids with explicit arrow tables.

Composition follows the maps convention: ``compose(g, u, v)`` is ``uv``,
"first v, then u", defined when ``v.target == u.source``.  Arrows may carry
a matrix payload; payload groupoids compose by matrix product and
deduplicate arrows whose payloads agree within a relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

import numpy as np

from .linalg import rel_close

PAYLOAD_TOL = 1e-9


class NotComposable(ValueError):
    pass


class UnknownArrow(KeyError):
    pass


class UnknownObject(KeyError):
    pass


class InvalidAction(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Arrow:
    id: int
    source: int
    target: int
    payload: np.ndarray | None = None
    label: Hashable = None

    def __repr__(self) -> str:
        tag = f" {self.label!r}" if self.label is not None else ""
        return f"Arrow#{self.id}({self.source}->{self.target}{tag})"

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


def payload_arrow(source: int, target: int, payload) -> Arrow:
    """A free-standing matrix arrow, not registered in any finite table."""
    return Arrow(-1, source, target, np.asarray(payload, dtype=float))


def same_arrow(a: Arrow, b: Arrow, tol: float = PAYLOAD_TOL) -> bool:
    if a.source != b.source or a.target != b.target:
        return False
    if a.payload is not None and b.payload is not None:
        return rel_close(a.payload, b.payload, tol)
    return a is b or (a.id >= 0 and a.id == b.id)


@dataclass(eq=False)
class FiniteGroupoid:
    objects: tuple
    arrows: tuple
    table: dict = field(repr=False)
    inverses: dict = field(repr=False)
    identities: dict = field(repr=False)

    def __post_init__(self):
        self._by_pair: dict = {}
        self._out: dict = {}
        for a in self.arrows:
            self._by_pair.setdefault((a.source, a.target), []).append(a)
            self._out.setdefault(a.source, []).append(a)

    def __len__(self) -> int:
        return len(self.arrows)

    def _own(self, a: Arrow) -> Arrow:
        if a.id < 0 or a.id >= len(self.arrows) or self.arrows[a.id] is not a:
            raise UnknownArrow(a)
        return a

    def identity(self, x) -> Arrow:
        if x not in self.identities:
            raise UnknownObject(x)
        return self.arrows[self.identities[x]]

    def inverse(self, z: Arrow) -> Arrow:
        return self.arrows[self.inverses[self._own(z).id]]

    def compose(self, u: Arrow, v: Arrow) -> Arrow:
        return compose(self, u, v)

    def hom(self, x, y) -> list[Arrow]:
        return list(self._by_pair.get((x, y), []))

    def contains_arrow(self, z: Arrow) -> bool:
        return any(same_arrow(z, a) for a in self._by_pair.get((z.source, z.target), []))

    def find(self, source, target, payload) -> Arrow | None:
        for a in self._by_pair.get((source, target), []):
            if a.payload is not None and rel_close(a.payload, payload, PAYLOAD_TOL):
                return a
        return None

    def outgoing(self, x) -> list[Arrow]:
        return list(self._out.get(x, []))

    def composable_pairs(self):
        for v in self.arrows:
            for u in self._out.get(v.target, []):
                yield u, v


def compose(g: FiniteGroupoid, u: Arrow, v: Arrow) -> Arrow:
    """uv: first v, then u."""
    g._own(u)
    g._own(v)
    if v.target != u.source:
        raise NotComposable(f"target of {v} is {v.target}, source of {u} is {u.source}")
    return g.arrows[g.table[u.id, v.id]]


def vertex_group(g: FiniteGroupoid, x) -> list[Arrow]:
    if x not in g.identities:
        raise UnknownObject(x)
    return g.hom(x, x)


def conjugate_vertex_groups(g: FiniteGroupoid, z: Arrow) -> dict:
    """The isomorphism h -> z h z^-1 from G_source(z) onto G_target(z)."""
    g._own(z)
    zi = g.inverse(z)
    return {h: compose(g, compose(g, z, h), zi) for h in vertex_group(g, z.source)}


def components_from_pairs(objects, pairs) -> list[list]:
    """Connected components of an undirected graph, ordered by smallest member."""
    parent = {x: x for x in objects}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    blocks: dict = {}
    for x in sorted(objects):
        blocks.setdefault(find(x), []).append(x)
    return sorted(blocks.values(), key=lambda b: b[0])


def transitivity_components(g) -> list[list]:
    """Blocks of objects joined by arrows, ordered by smallest member."""
    return components_from_pairs(g.objects, ((a.source, a.target) for a in g.arrows))


def is_transitive(g) -> bool:
    return len(transitivity_components(g)) == 1


# -- constructors -----------------------------------------------------------


def _assemble(objects, arrows, table, inverses, identities) -> FiniteGroupoid:
    return FiniteGroupoid(tuple(objects), tuple(arrows), table, inverses, identities)


def make_pair_groupoid(n: int) -> FiniteGroupoid:
    if n < 1:
        raise ValueError("pair groupoid needs at least one object")
    objs = list(range(n))
    arrows, idx = [], {}
    for x in objs:
        for y in objs:
            idx[x, y] = len(arrows)
            arrows.append(Arrow(len(arrows), x, y, label=(x, y)))
    table = {(idx[y, z], idx[x, y]): idx[x, z] for x in objs for y in objs for z in objs}
    inverses = {idx[x, y]: idx[y, x] for x in objs for y in objs}
    identities = {x: idx[x, x] for x in objs}
    return _assemble(objs, arrows, table, inverses, identities)


def make_action_groupoid(group_elements, product, action, points) -> FiniteGroupoid:
    """Arrows (x, g): x -> g.x, for a left action given by tables.

    ``product[g, h]`` is the label of gh and ``action[g, x]`` the image of x.
    """
    els = list(group_elements)
    pts = list(points)
    ident = [e for e in els if all(product[e, g] == g and product[g, e] == g for g in els)]
    if len(ident) != 1:
        raise InvalidAction("product table has no unique identity")
    e = ident[0]
    inv = {}
    for g in els:
        cands = [h for h in els if product[g, h] == e and product[h, g] == e]
        if not cands:
            raise InvalidAction(f"{g!r} has no inverse")
        inv[g] = cands[0]
    for x in pts:
        if action[e, x] != x:
            raise InvalidAction(f"identity moves {x!r}")
        for g in els:
            for h in els:
                if action[g, action[h, x]] != action[product[g, h], x]:
                    raise InvalidAction(f"g(hx) != (gh)x at g={g!r}, h={h!r}, x={x!r}")
    obj = {x: i for i, x in enumerate(pts)}
    arrows, idx = [], {}
    for x in pts:
        for g in els:
            idx[x, g] = len(arrows)
            arrows.append(Arrow(len(arrows), obj[x], obj[action[g, x]], label=(x, g)))
    table = {}
    for x in pts:
        for g in els:
            y = action[g, x]
            for h in els:
                table[idx[y, h], idx[x, g]] = idx[x, product[h, g]]
    inverses = {idx[x, g]: idx[action[g, x], inv[g]] for x in pts for g in els}
    identities = {obj[x]: idx[x, e] for x in pts}
    return _assemble(range(len(pts)), arrows, table, inverses, identities)


def make_group_groupoid(elements, product) -> FiniteGroupoid:
    """A group as a groupoid over a single object."""
    return make_action_groupoid(elements, product, {(g, 0): 0 for g in elements}, [0])


def make_totally_intransitive(groups) -> FiniteGroupoid:
    """Disjoint union of groups given as (elements, product) pairs; one object each."""
    arrows, table, inverses, identities = [], {}, {}, {}
    for x, (els, prod) in enumerate(groups):
        part = make_group_groupoid(els, prod)
        off = len(arrows)
        for a in part.arrows:
            arrows.append(Arrow(off + a.id, x, x, label=a.label))
        for (i, j), k in part.table.items():
            table[off + i, off + j] = off + k
        for i, k in part.inverses.items():
            inverses[off + i] = off + k
        identities[x] = off + part.identities[0]
    return _assemble(range(len(groups)), arrows, table, inverses, identities)


def matrix_groupoid(objects, arrows, tol: float = PAYLOAD_TOL, max_arrows: int = 5000) -> FiniteGroupoid:
    """Close matrix arrows (source, target, M) under composition and inverse.

    Identities are added at every object.  Arrows with equal endpoints and
    payloads within ``tol`` are merged.
    """
    objs = list(objects)
    n = None
    items: list[tuple] = []
    buckets: dict = {}

    def key_of(s, t, m):
        for i in buckets.get((s, t), ()):
            if rel_close(items[i][2], m, tol):
                return i
        return None

    def add(s, t, m):
        i = key_of(s, t, m)
        if i is None:
            buckets.setdefault((s, t), []).append(len(items))
            items.append((s, t, m))
            if len(items) > max_arrows:
                raise ValueError(f"closure exceeds {max_arrows} arrows")
            return True
        return False

    for s, t, m in arrows:
        m = np.asarray(m, dtype=float)
        n = len(m)
        add(s, t, m)
        add(t, s, np.linalg.inv(m))
    if n is None:
        raise ValueError("need at least one arrow to fix the dimension")
    for x in objs:
        add(x, x, np.eye(n))
    changed = True
    while changed:
        changed = False
        snapshot = list(items)
        out: dict = {}
        for i, (s2, _, _) in enumerate(snapshot):
            out.setdefault(s2, []).append(i)
        for (s1, t1, m1) in snapshot:
            for j in out.get(t1, ()):
                _, t2, m2 = snapshot[j]
                if add(s1, t2, m2 @ m1):
                    changed = True
    arrs = [Arrow(i, s, t, m) for i, (s, t, m) in enumerate(items)]
    table, inverses, identities = {}, {}, {}
    by_source: dict = {}
    for u in arrs:
        by_source.setdefault(u.source, []).append(u)
    for v in arrs:
        inverses[v.id] = key_of(v.target, v.source, np.linalg.inv(v.payload))
        if v.source == v.target and rel_close(v.payload, np.eye(n), tol):
            identities[v.source] = v.id
        for u in by_source.get(v.target, ()):
            table[u.id, v.id] = key_of(v.source, u.target, u.payload @ v.payload)
    return _assemble(objs, arrs, table, inverses, identities)


# -- axiom checks -----------------------------------------------------------


def axiom_violations(g: FiniteGroupoid, limit: int = 20) -> list[str]:
    """Exhaustive check of consistency, associativity, units and inverses."""
    bad: list[str] = []

    def note(msg):
        if len(bad) < limit:
            bad.append(msg)

    for u, v in g.composable_pairs():
        uv = compose(g, u, v)
        if uv.source != v.source or uv.target != u.target:
            note(f"consistency fails for {u}{v}")
        if u.payload is not None and not rel_close(uv.payload, u.payload @ v.payload, PAYLOAD_TOL):
            note(f"payload of {u}{v} is not the matrix product")
    for w in g.arrows:
        for v in g.outgoing(w.target):
            vw = compose(g, v, w)
            for u in g.outgoing(v.target):
                if compose(g, compose(g, u, v), w) is not compose(g, u, vw):
                    note(f"associativity fails for {u},{v},{w}")
    for z in g.arrows:
        if compose(g, z, g.identity(z.source)) is not z:
            note(f"right unit fails at {z}")
        if compose(g, g.identity(z.target), z) is not z:
            note(f"left unit fails at {z}")
        zi = g.inverse(z)
        if compose(g, z, zi) is not g.identity(z.target):
            note(f"z z^-1 is not the unit at the target for {z}")
        if compose(g, zi, z) is not g.identity(z.source):
            note(f"z^-1 z is not the unit at the source for {z}")
    for x in g.objects:
        e = g.identity(x)
        if e.source != x or e.target != x:
            note(f"identity at {x} is not a loop at {x}")
    return bad
