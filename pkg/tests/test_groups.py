import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matg import groups as mg
from matg.linalg import SingularMatrix, random_rotation, rot2, rot3

from conftest import invertible

SO3 = mg.special_orthogonal(3)


def test_intersection_orthotropic_branch():
    g = mg.intersect(SO3, mg.conjugate(SO3, np.diag([1.0, math.sqrt(2), math.sqrt(3)])))
    assert g.is_finite and g.order == 4
    for m in g.members():
        assert np.allclose(np.abs(m), np.diag(np.abs(np.diag(m))))
        assert np.isclose(np.linalg.det(m), 1.0)


def test_intersection_axis_branch():
    g = mg.intersect(SO3, mg.conjugate(SO3, np.diag([2.0, 2.0, 1.0])))
    assert g.kind == "axis_rot"
    assert np.allclose(np.abs(g.axis), [0, 0, 1])


def test_intersection_isotropic_branch():
    g = mg.intersect(SO3, mg.conjugate(SO3, 3.0 * np.eye(3)))
    assert g.kind == "SO"


def test_intersection_2d_discrete():
    g = mg.intersect(mg.special_orthogonal(2), mg.conjugate(mg.special_orthogonal(2), np.diag([1.0, 2.0])))
    assert g.order == 2
    assert any(np.allclose(m, -np.eye(2)) for m in g.members())


def test_orientation_o_gives_eight_elements():
    o3 = mg.orthogonal(3)
    g = mg.intersect(o3, mg.conjugate(o3, np.diag([1.0, 2.0, 3.0])))
    assert g.order == 8


def test_classify_normalizer_examples():
    assert mg.classify_normalizer(np.diag([1.0, 2.0, 3.0])).label == "Orthotropic"
    c = mg.classify_normalizer(np.diag([2.0, 2.0, 1.0]))
    assert c.label == "TransverselyIsotropic" and np.allclose(np.abs(c.axis), [0, 0, 1])
    assert mg.classify_normalizer(3.0 * np.eye(3)).label == "Isotropic"
    assert mg.classify_normalizer(np.diag([1.0, 2.0])).label == "DiscreteOther"
    with pytest.raises(SingularMatrix):
        mg.classify_normalizer(np.zeros((3, 3)))


def test_classify_uses_h_ht(rng):
    # the axis comes from H H^T; H^T H would give a different axis for non-normal H
    q = rot3([1, 1, 0], 0.9)
    h = np.diag([2.0, 2.0, 1.0]) @ q
    c = mg.classify_normalizer(h)
    g = mg.intersect(SO3, mg.conjugate(SO3, h))
    assert np.allclose(np.abs(c.axis), np.abs(g.axis), atol=1e-8)
    assert np.allclose(np.abs(c.axis), [0, 0, 1], atol=1e-8)


def test_near_degenerate_warning():
    c = mg.classify_normalizer(np.diag([1.0, 1.0 + 1e-5, 2.0]), eig_tol=1e-6)
    assert c.warnings


def test_finite_closure_and_errors():
    with pytest.raises(mg.NotAGroup):
        mg.finite([np.eye(2), rot2(math.pi / 2)])
    g = mg.generated([rot2(math.pi / 2)])
    assert g.order == 4
    assert mg.finite([np.eye(2)]).kind == "trivial"


def test_conjugate_is_canonical(rng):
    a = invertible(rng, 3)
    g1 = mg.conjugate(SO3, a)
    g2 = mg.conjugate(SO3, a @ random_rotation(3, rng))
    assert mg.same_group(g1, g2)
    assert mg.conjugate(SO3, 2.5 * np.eye(3)).kind == "SO"
    with pytest.raises(mg.SingularConjugator):
        mg.conjugate(SO3, np.zeros((3, 3)))


def test_dimension_mismatch():
    with pytest.raises(mg.DimensionMismatch):
        mg.intersect(SO3, mg.special_orthogonal(2))


@given(st.integers(0, 2**31 - 1))
def test_intersection_members_lie_in_both(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    h = invertible(rng, n, 0.6)
    so = mg.special_orthogonal(n)
    b = mg.conjugate(so, h)
    g = mg.intersect(so, b)
    for _ in range(5):
        m = mg.sample(g, rng)
        assert mg.contains(so, m, 1e-7) and mg.contains(b, m, 1e-7)


@given(st.integers(0, 2**31 - 1))
def test_intersection_is_symmetric(seed):
    rng = np.random.default_rng(seed)
    h1, h2 = invertible(rng, 3), invertible(rng, 3)
    a, b = mg.conjugate(SO3, h1), mg.conjugate(SO3, h2)
    assert mg.same_group(mg.intersect(a, b), mg.intersect(b, a))


def test_group_dict_roundtrip(rng):
    for g in (SO3, mg.trivial(2), mg.axis_rotations([0, 1, 1]), mg.conjugate(SO3, invertible(rng, 3)),
              mg.generated([rot3([0, 0, 1], math.pi / 2)])):
        assert mg.same_group(mg.group_from_dict(mg.group_to_dict(g)), g)
    with pytest.raises(mg.UnsupportedPair):
        mg.group_from_dict({"type": "lorentz", "n": 3})
