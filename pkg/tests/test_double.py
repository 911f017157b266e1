import itertools
import math

import numpy as np
import pytest

from matg import fixtures as fx
from matg.body import build_material_groupoid
from matg.double import (
    COARSE,
    COMMUTING,
    CornerMismatch,
    DoubleGroupoidSpec,
    NotCommuting,
    NotInSide,
    Square,
    check_interchange,
    commutes,
    compose_h,
    compose_v,
    core_groupoid,
    double_identity,
    fill_corner,
    horizontal_identity,
    is_locally_trivial,
    make_square,
    probe_local_triviality,
    random_arrow,
    same_square,
    vertical_identity,
)
from matg.groupoid import NotComposable, make_pair_groupoid, payload_arrow
from matg.linalg import rel_close, rot2


def mg_of(name):
    return build_material_groupoid(fx.BODIES[name]())


@pytest.fixture(scope="module")
def iso():
    return mg_of("plate_iso_homog")


@pytest.fixture(scope="module")
def triv():
    return mg_of("plate_trivial")


@pytest.fixture(scope="module")
def contorted():
    return mg_of("plate_contorted")


def commuting_square(spec, t, s, t_hat):
    """Fill the right side so that t . s_hat = t_hat . s."""
    m = np.linalg.inv(t.payload) @ t_hat.payload @ s.payload
    return Square(t, s, t_hat, payload_arrow(s.source, t.source, m))


# -- construction ------------------------------------------------------------


def test_double_identity_is_a_square(iso):
    spec = DoubleGroupoidSpec(iso, iso)
    sq = double_identity(spec, 7)
    assert commutes(sq)
    assert make_square(spec, sq.t, sq.s, sq.t_hat, sq.s_hat) is not None
    assert {sq.top_left, sq.top_right, sq.bottom_left, sq.bottom_right} == {7}


def test_non_commuting_square_is_rejected(iso):
    spec = DoubleGroupoidSpec(iso, iso)
    e = iso.identity(0)
    with pytest.raises(NotCommuting):
        make_square(spec, payload_arrow(0, 0, rot2(math.pi / 2)), e,
                    payload_arrow(0, 0, rot2(math.pi / 3)), e)
    # the same four arrows are fine for the coarse predicate
    coarse = DoubleGroupoidSpec(iso, iso, COARSE)
    make_square(coarse, payload_arrow(0, 0, rot2(math.pi / 2)), e,
                payload_arrow(0, 0, rot2(math.pi / 3)), e)


def test_core_shaped_square(iso):
    spec = DoubleGroupoidSpec(iso, iso)
    q = payload_arrow(2, 9, rot2(0.4))
    sq = make_square(spec, q, iso.identity(2), q, iso.identity(2))
    assert sq.bottom_right == 2 and sq.top_left == 9


def test_corner_mismatch(iso):
    spec = DoubleGroupoidSpec(iso, iso)
    with pytest.raises(CornerMismatch):
        make_square(spec, iso.identity(0), iso.identity(1), iso.identity(0), iso.identity(0))


def test_side_membership(triv, iso):
    spec = DoubleGroupoidSpec(triv, iso)
    r = payload_arrow(0, 0, rot2(math.pi / 2))
    with pytest.raises(NotInSide):
        make_square(spec, r, triv.identity(0), r, triv.identity(0))
    shear = payload_arrow(0, 0, np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(NotInSide):
        make_square(spec, triv.identity(0), triv.identity(0), shear, shear)
    e = triv.identity(0)
    make_square(spec, e, e, r, r)


def test_side_object_sets_must_agree(iso):
    with pytest.raises(CornerMismatch):
        DoubleGroupoidSpec(iso, mg_of("finite_c2"))
    with pytest.raises(ValueError):
        DoubleGroupoidSpec(iso, iso, "Loose")


# -- compositions ------------------------------------------------------------


def test_units_for_both_compositions(rng, triv, iso):
    spec = DoubleGroupoidSpec(triv, iso)
    for _ in range(20):
        x, y, z = (int(v) for v in rng.integers(25, size=3))
        t = random_arrow(triv, y, z, rng)
        s = random_arrow(triv, x, y, rng)
        t_hat = random_arrow(iso, y, z, rng)
        sq = commuting_square(spec, t, s, t_hat)
        assert make_square(spec, sq.t, sq.s, sq.t_hat, sq.s_hat)
        assert same_square(compose_h(spec, sq, horizontal_identity(spec, sq.s_hat)), sq)
        assert same_square(compose_h(spec, horizontal_identity(spec, sq.t_hat), sq), sq)
        assert same_square(compose_v(spec, sq, vertical_identity(spec, sq.s)), sq)
        assert same_square(compose_v(spec, vertical_identity(spec, sq.t), sq), sq)


def test_compositions_need_a_shared_edge(iso):
    spec = DoubleGroupoidSpec(iso, iso)
    a = double_identity(spec, 0)
    b = Square(iso.identity(0), iso.identity(0), payload_arrow(0, 0, rot2(0.3)),
               payload_arrow(0, 0, rot2(0.3)))
    with pytest.raises(NotComposable):
        compose_h(spec, a, b)
    c = Square(payload_arrow(0, 0, rot2(0.3)), payload_arrow(0, 0, rot2(0.3)),
               iso.identity(0), iso.identity(0))
    with pytest.raises(NotComposable):
        compose_v(spec, a, c)


def test_compose_h_result_commutes(rng, iso):
    spec = DoubleGroupoidSpec(iso, iso)
    for _ in range(20):
        br, bl, tr, tl, bl2, tl2 = (int(v) for v in rng.integers(25, size=6))
        b = commuting_square(spec, random_arrow(iso, tr, tl, rng),
                             random_arrow(iso, br, bl, rng), random_arrow(iso, bl, tl, rng))
        # a sits to the left of b, so its right side is b's left side
        s = random_arrow(iso, bl, bl2, rng)
        t_hat = random_arrow(iso, bl2, tl2, rng)
        t = payload_arrow(tl, tl2, t_hat.payload @ s.payload @ np.linalg.inv(b.t_hat.payload))
        a = make_square(spec, t, s, t_hat, b.t_hat, tol=1e-9)
        ab = compose_h(spec, a, b)
        make_square(spec, ab.t, ab.s, ab.t_hat, ab.s_hat, tol=1e-9)


def _coarse_squares(spec):
    h, v = spec.horizontal, spec.vertical
    out = []
    for t in h.arrows:
        for s in h.arrows:
            for t_hat in v.hom(s.target, t.target):
                for s_hat in v.hom(s.source, t.source):
                    out.append(Square(t, s, t_hat, s_hat))
    return out


@pytest.mark.parametrize("sides", [("pair", "pair"), ("c2_swap", "pair"), ("s3", "c2_swap")])
def test_coarse_interchange_exhaustive(sides):
    build = {"pair": lambda: make_pair_groupoid(3), "c2_swap": fx.c2_swap, "s3": fx.s3_on_three}
    spec = DoubleGroupoidSpec(build[sides[0]](), build[sides[1]](), COARSE)
    squares = _coarse_squares(spec)
    by_left = {}
    by_top = {}
    for q in squares:
        by_left.setdefault(q.t_hat.id, []).append(q)
        by_top.setdefault(q.t.id, []).append(q)
    checked = 0
    for a in squares:
        for b in by_left[a.s_hat.id]:
            for c in by_top[a.s.id]:
                for d in by_top[b.s.id]:
                    if d.t_hat.id != c.s_hat.id:
                        continue
                    assert check_interchange(spec, a, b, c, d)
                    checked += 1
                    if checked > 20000:
                        return
    assert checked > 0


def test_commuting_interchange_random(rng, triv, iso):
    # H inside V keeps the derived right sides inside V
    spec = DoubleGroupoidSpec(triv, iso)
    for _ in range(200):
        node = rng.integers(25, size=(3, 3))
        hor = {(r, c): random_arrow(triv, int(node[r, c + 1]), int(node[r, c]), rng)
               for r in range(3) for c in range(2)}
        left = {r: random_arrow(iso, int(node[r + 1, 0]), int(node[r, 0]), rng) for r in range(2)}
        sq = {}
        for r in range(2):
            edge = left[r]
            for c in range(2):
                sq[r, c] = commuting_square(spec, hor[r, c], hor[r + 1, c], edge)
                edge = sq[r, c].s_hat
        for q in sq.values():
            make_square(spec, q.t, q.s, q.t_hat, q.s_hat, tol=1e-9)
        assert check_interchange(spec, sq[0, 0], sq[0, 1], sq[1, 0], sq[1, 1])


# -- filling -----------------------------------------------------------------


def _brute_fill(spec, h, v):
    hs, vs = spec.horizontal, spec.vertical
    m = h.payload @ np.linalg.inv(v.payload)
    for tl in spec.objects:
        for th in vs.hom(h.target, tl):
            if hs.find(v.target, tl, th.payload @ m) is not None:
                return True
    return False


@pytest.fixture(scope="module")
def finite_sides():
    g = fx.finite_groupoids()
    return g["finite_c2"], g["finite_c2_contorted"]


def test_fill_corner_matches_brute_force(rng, finite_sides):
    c2, c2c = finite_sides
    for hs, vs in ((c2, c2c), (c2c, c2), (c2, c2)):
        spec = DoubleGroupoidSpec(hs, vs)
        found = missing = 0
        for _ in range(60):
            x, y, z = (int(v) for v in rng.integers(9, size=3))
            h = random_arrow(hs, x, y, rng)
            v = random_arrow(vs, x, z, rng)
            sq = fill_corner(spec, h, v)
            assert (sq is not None) == _brute_fill(spec, h, v)
            if sq is None:
                missing += 1
            else:
                found += 1
                make_square(spec, sq.t, sq.s, sq.t_hat, sq.s_hat)
        assert found > 0


def test_fill_corner_continuous(rng, iso, triv):
    for hs, vs in ((iso, iso), (triv, iso), (iso, triv)):
        spec = DoubleGroupoidSpec(hs, vs)
        for _ in range(10):
            x, y, z = (int(v) for v in rng.integers(25, size=3))
            sq = fill_corner(spec, random_arrow(hs, x, y, rng), random_arrow(vs, x, z, rng))
            assert sq is not None
            make_square(spec, sq.t, sq.s, sq.t_hat, sq.s_hat, tol=1e-8)


def test_fill_corner_coarse():
    p = make_pair_groupoid(3)
    spec = DoubleGroupoidSpec(p, fx.cyclic_disjoint(), COARSE)
    cyc = spec.vertical
    sq = fill_corner(spec, p.hom(0, 1)[0], cyc.hom(0, 0)[1])
    assert sq is not None and sq.top_left == 1
    with pytest.raises(CornerMismatch):
        fill_corner(spec, p.hom(0, 1)[0], cyc.hom(1, 1)[0])


# -- local triviality --------------------------------------------------------


def test_local_triviality_commuting(rng, iso, triv, contorted):
    cases = {
        (iso, iso): (True, True),
        (triv, iso): (False, True),
        (iso, triv): (True, False),
        (triv, contorted): (False, False),
        (triv, triv): (True, True),
    }
    for (hs, vs), expected in cases.items():
        spec = DoubleGroupoidSpec(hs, vs)
        lt = is_locally_trivial(spec)
        assert lt.as_pair() == expected
        assert is_locally_trivial(spec.transposed()).as_pair() == expected[::-1]
        assert probe_local_triviality(spec, rng, 300) == expected


def test_local_triviality_finite_sides(rng, finite_sides):
    c2, c2c = finite_sides
    for hs, vs in itertools.product(finite_sides, repeat=2):
        spec = DoubleGroupoidSpec(hs, vs)
        assert is_locally_trivial(spec).as_pair() == probe_local_triviality(spec, rng, 400)


def test_local_triviality_coarse(rng):
    spec = DoubleGroupoidSpec(fx.cyclic_disjoint(), make_pair_groupoid(3), COARSE)
    assert is_locally_trivial(spec).as_pair() == (False, True)
    assert probe_local_triviality(spec, rng, 300) == (False, True)
    spec = DoubleGroupoidSpec(fx.s3_on_three(), make_pair_groupoid(3), COARSE)
    assert is_locally_trivial(spec).as_pair() == (True, True)


# -- core groupoid -----------------------------------------------------------


def test_core_of_equal_sides_is_transitive(iso):
    core = core_groupoid(DoubleGroupoidSpec(iso, iso))
    assert core.is_transitive()
    c = core.hom(0, 24)
    assert c.source_group.kind == "SO"


def test_core_of_laminate_is_columns(triv, contorted):
    core = core_groupoid(DoubleGroupoidSpec(triv, contorted))
    comps = core.components()
    assert len(comps) == 5
    xs = {tuple(sorted(fx.BODIES["plate_trivial"]().points[i].grid_pos[0] for i in comp)) for comp in comps}
    assert all(len(set(c)) == 1 for c in xs)


def test_core_groupoid_laws(rng, finite_sides):
    c2, c2c = finite_sides
    spec = DoubleGroupoidSpec(c2, c2c)
    core = core_groupoid(spec)
    arrows = [k for x in core.objects for y in core.objects for k in (core.hom(x, y) or [])]
    assert arrows
    for k in arrows:
        sq = core.square(k)
        assert commutes(sq)
        assert rel_close(k.t.payload, k.t_hat.payload)
        inv = core.inverse(k)
        unit = core.compose(inv, k)
        assert rel_close(unit.t.payload, np.eye(2)) and unit.t.source == k.base_source
    for _ in range(100):
        k1, k2 = arrows[int(rng.integers(len(arrows)))], arrows[int(rng.integers(len(arrows)))]
        if k2.base_target != k1.base_source:
            continue
        k = core.compose(k1, k2)
        assert rel_close(k.t.payload, k.t_hat.payload)
        assert c2.contains_arrow(core.partial_h(k)) and c2c.contains_arrow(core.partial_v(k))


def test_core_of_coarse_sides():
    spec = DoubleGroupoidSpec(make_pair_groupoid(3), fx.cyclic_disjoint(), COARSE)
    core = core_groupoid(spec)
    assert len(core.components()) == 3
    assert len(core.hom(2, 2)) == 4
