import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from matg.linalg import (
    NotPositiveDefinite,
    NotSymmetric,
    SingularMatrix,
    check_invertible,
    eig_sym,
    multiplicity_pattern,
    polar_left,
    polar_right,
    random_rotation,
    rot2,
    rot3,
)

entries = st.floats(-2.0, 2.0, allow_nan=False)


@given(arrays(float, (3, 3), elements=entries))
def test_eig_sym_reconstructs_spd(a):
    c = a @ a.T + 0.1 * np.eye(3)
    lam, v = eig_sym(c)
    assert np.all(np.diff(lam) >= 0)
    assert np.allclose(v.T @ v, np.eye(3), atol=1e-10)
    assert np.allclose(v @ np.diag(lam) @ v.T, c, atol=1e-9 * max(1.0, lam[-1]))


@given(arrays(float, (2, 2), elements=entries))
def test_eig_sym_2d(a):
    c = a @ a.T + 0.1 * np.eye(2)
    lam, v = eig_sym(c)
    assert np.allclose(v @ np.diag(lam) @ v.T, c, atol=1e-9 * max(1.0, lam[-1]))


def test_eig_sym_degenerate_spectra():
    for c in (np.diag([2.0, 2.0, 1.0]), 3.0 * np.eye(3), np.diag([1.0, 5.0, 5.0])):
        q = rot3([1, 2, 3], 0.7)
        lam, v = eig_sym(q @ c @ q.T)
        assert np.allclose(lam, np.sort(np.diag(c)))
        assert np.allclose(v @ np.diag(lam) @ v.T, q @ c @ q.T)


def test_eig_sym_rejects_bad_input():
    with pytest.raises(NotSymmetric):
        eig_sym(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotPositiveDefinite):
        eig_sym(np.diag([1.0, -1.0, 2.0]))


def test_multiplicity_pattern():
    assert multiplicity_pattern(np.array([1.0, 1.0, 2.0]), 1e-6) == [[0, 1], [2]]
    assert multiplicity_pattern(np.array([1.0, 2.0, 3.0]), 1e-6) == [[0], [1], [2]]
    assert multiplicity_pattern(np.array([3.0, 3.0, 3.0]), 1e-6) == [[0, 1, 2]]


def test_polar_factors(rng):
    m = rng.standard_normal((3, 3))
    s, u = polar_left(m)
    assert np.allclose(s @ u, m) and np.allclose(s, s.T) and np.allclose(u @ u.T, np.eye(3))
    u2, s2 = polar_right(m)
    assert np.allclose(u2 @ s2, m) and np.allclose(s2, s2.T)


def test_rotations(rng):
    assert np.allclose(rot2(math.pi / 2), [[0, -1], [1, 0]])
    r = rot3([0, 0, 1], math.pi / 2)
    assert np.allclose(r @ [1, 0, 0], [0, 1, 0])
    q = random_rotation(3, rng)
    assert np.isclose(np.linalg.det(q), 1.0) and np.allclose(q.T @ q, np.eye(3))


def test_check_invertible():
    with pytest.raises(SingularMatrix):
        check_invertible(np.zeros((2, 2)))
