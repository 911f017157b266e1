import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matg import fixtures as fx
from matg.groupoid import (
    InvalidAction,
    NotComposable,
    axiom_violations,
    compose,
    conjugate_vertex_groups,
    is_transitive,
    make_action_groupoid,
    make_pair_groupoid,
    make_totally_intransitive,
    matrix_groupoid,
    transitivity_components,
    vertex_group,
)
from matg.linalg import rot2


def test_pair_groupoid():
    g = make_pair_groupoid(3)
    assert len(g) == 9
    assert axiom_violations(g) == []
    u = g.hom(1, 2)[0]
    v = g.hom(0, 1)[0]
    assert compose(g, u, v).label == (0, 2)
    with pytest.raises(NotComposable):
        compose(g, v, v)


def test_action_groupoid_c2_swap():
    g = fx.c2_swap()
    assert len(g) == 6
    assert transitivity_components(g) == [[0, 1], [2]]
    assert len(vertex_group(g, 0)) == 1
    assert len(vertex_group(g, 2)) == 2


def test_action_rejects_non_action():
    els = ["e", "a"]
    product = {("e", "e"): "e", ("e", "a"): "a", ("a", "e"): "a", ("a", "a"): "e"}
    bad = {("e", 0): 0, ("e", 1): 1, ("a", 0): 1, ("a", 1): 1}
    with pytest.raises(InvalidAction):
        make_action_groupoid(els, product, bad, [0, 1])


def test_totally_intransitive():
    g = fx.cyclic_disjoint()
    assert transitivity_components(g) == [[0], [1], [2]]
    assert not is_transitive(g)
    assert axiom_violations(g) == []


def test_matrix_groupoid_closure():
    g = matrix_groupoid([0, 1], [(0, 1, rot2(0.3)), (0, 0, -np.eye(2))])
    assert len(g) == 8
    assert axiom_violations(g) == []


@pytest.mark.parametrize("name", ["pair_5", "s3_on_three", "c2_swap", "cyclic_disjoint"])
def test_conjugacy_of_vertex_groups(name):
    g = fx.finite_groupoids()[name] if name != "pair_5" else make_pair_groupoid(5)
    for z in g.arrows:
        image = set(a.id for a in conjugate_vertex_groups(g, z).values())
        assert image == set(a.id for a in vertex_group(g, z.target))


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4))
def test_disjoint_cyclic_groups_obey_axioms(orders):
    groups = [(list(range(n)), {(i, j): (i + j) % n for i in range(n) for j in range(n)}) for n in orders]
    g = make_totally_intransitive(groups)
    assert axiom_violations(g) == []
    assert len(transitivity_components(g)) == len(orders)
