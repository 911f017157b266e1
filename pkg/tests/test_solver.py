import numpy as np
import pytest

from matg import groups as mg
from matg.constitutive import mooney_rivlin, neo_hookean, st_venant_kirchhoff
from matg.solver import (
    NoConvergence,
    SolverOptions,
    gauge_distance,
    jacobian,
    make_samples,
    residuals,
    rms,
    sample_symmetry_group,
    solve_transplant,
    symbolize_body,
)
from matg import fixtures as fx

P_STAR = np.diag([1.2, 1 / 1.2, 1.0])
SO3 = mg.special_orthogonal(3)


def test_sample_set_design():
    s = make_samples(3)
    assert s.count >= 12
    assert all(np.linalg.det(f) > 0 and np.linalg.cond(f) <= 10 for f in s.train + s.held_out)
    assert make_samples(2).count >= 6
    with pytest.raises(ValueError):
        make_samples(3, 8)


@pytest.mark.parametrize("m", [neo_hookean(1, 1), st_venant_kirchhoff(1, 1), mooney_rivlin(1, 0.5, 1)],
                         ids=lambda m: m.family)
def test_gradient_check(m, rng):
    worst = 0.0
    for _ in range(100):
        p = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        f = np.eye(3) + 0.2 * rng.standard_normal((3, 3))
        if np.linalg.det(f @ p) <= 0.1:
            continue
        j = jacobian(m, p, [f])[0]
        fd = np.zeros(9)
        h = 1e-6
        for k in range(9):
            e = np.zeros(9)
            e[k] = h
            fd[k] = (residuals(m, m, p + e.reshape(3, 3), [f], [0.0])[0]
                     - residuals(m, m, p - e.reshape(3, 3), [f], [0.0])[0]) / (2 * h)
        worst = max(worst, np.linalg.norm(j - fd) / max(np.linalg.norm(fd), 1e-12))
    assert worst < 1e-5


def test_identical_models():
    m = neo_hookean(1, 1)
    sol = solve_transplant(m, m)
    assert sol.converged and sol.residual < 1e-10
    assert gauge_distance(sol.P, np.eye(3), SO3) < 1e-6


@pytest.mark.parametrize("m", [neo_hookean(1, 1), st_venant_kirchhoff(1, 1), mooney_rivlin(1, 0.5, 1)],
                         ids=lambda m: m.family)
def test_planted_transplant(m):
    sol = solve_transplant(m, m.precomposed(P_STAR))
    assert sol.converged and sol.residual < 1e-8
    assert np.linalg.det(sol.P) > 0
    assert gauge_distance(sol.P, P_STAR, SO3) < 1e-6


def test_different_materials_do_not_converge():
    sol = solve_transplant(neo_hookean(1, 1), neo_hookean(2, 1))
    assert not sol.converged
    assert sol.residual > 1e-3
    with pytest.raises(NoConvergence):
        solve_transplant(neo_hookean(1, 1), neo_hookean(2, 1), strict=True)


def test_transplant_composition():
    m1 = neo_hookean(1, 1)
    a = np.diag([1.1, 1.0, 0.95])
    b = np.array([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.05]])
    m2 = m1.precomposed(a)
    m3 = m2.precomposed(b)
    s12 = solve_transplant(m1, m2)
    s23 = solve_transplant(m2, m3)
    assert s12.converged and s23.converged
    samples = make_samples(3, rng=np.random.default_rng(99))
    p13 = s23.P @ s12.P
    assert rms(residuals(m1, m3, p13, list(samples.held_out))) < 10 * 1e-8


def test_gauge_freedom(rng):
    m = neo_hookean(1, 1)
    sol = solve_transplant(m, m.precomposed(P_STAR))
    samples = make_samples(3, rng=np.random.default_rng(7))
    base = rms(residuals(m, m.precomposed(P_STAR), sol.P, list(samples.held_out)))
    for _ in range(10):
        g = mg.sample(SO3, rng)
        r = rms(residuals(m, m.precomposed(P_STAR), sol.P @ g, list(samples.held_out)))
        assert abs(r - base) < 1e-10


def test_energy_scale_leaves_solution_unchanged():
    m = neo_hookean(1, 1)
    s1 = solve_transplant(m, m.precomposed(P_STAR))
    s4 = solve_transplant(m.scaled(4.0), m.precomposed(P_STAR).scaled(4.0))
    assert np.allclose(s1.P, s4.P, atol=1e-8)


def test_thread_count_does_not_change_result():
    m = neo_hookean(1, 1)
    a = solve_transplant(m, m.precomposed(P_STAR), opts=SolverOptions(threads=1))
    b = solve_transplant(m, m.precomposed(P_STAR), opts=SolverOptions(threads=4))
    assert np.array_equal(a.P, b.P)


def test_symmetry_sampling():
    r = sample_symmetry_group(neo_hookean(1, 1))
    assert r.group.kind == "SO" and r.continuous_detected
    r2 = sample_symmetry_group(neo_hookean(1, 1, dim=2))
    assert r2.group.kind == "SO" and r2.group.n == 2
    r3 = sample_symmetry_group(neo_hookean(1, 1).precomposed(np.diag([1.2, 0.9, 1.0])))
    assert r3.group.order == 4 and not r3.continuous_detected
    assert mg.same_group(r3.group, mg.intersect(SO3, mg.conjugate(SO3, np.diag([1.2, 0.9, 1.0]))))


def test_symbolize_numeric_body():
    sym = symbolize_body(fx.numeric_planted())
    b = sym.body
    assert b.is_symbolic
    assert b.points[0].material == b.points[1].material
    assert gauge_distance(b.points[1].data.transplant, P_STAR, SO3) < 1e-6
    sym2 = symbolize_body(fx.numeric_different())
    assert sym2.body.points[0].material != sym2.body.points[1].material
