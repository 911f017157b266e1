"""Numeric detection of material isomorphisms between stored-energy laws.

Arrow convention: P12 is an isomorphism 1 -> 2 when
``energy(m1, F @ P12) == energy(m2, F)`` for every F.  Chaining gives
P13 = P23 @ P12, matching matrix composition in the material groupoid.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import groups as mg
from .constitutive import ConstitutiveModel, NonPositiveDeterminant, energy, stress
from .linalg import random_rotation

PENALTY = 1e3


class NoConvergence(RuntimeError):
    def __init__(self, solution):
        super().__init__(f"no isomorphism found (held-out residual {solution.residual:.3e})")
        self.solution = solution


@dataclass(frozen=True)
class SampleSet:
    train: tuple
    held_out: tuple

    @property
    def count(self) -> int:
        return len(self.train)

    @property
    def dim(self) -> int:
        return len(self.train[0])


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1e-8
    starts: int = 8
    perturbation: float = 0.2
    seed: int = 0
    det_min: float = 0.05
    analytic: bool = True
    max_nfev: int = 400
    method: str = "trf"
    threads: int | None = None


@dataclass(frozen=True)
class TransplantSolution:
    P: np.ndarray
    residual: float
    converged: bool
    train_residual: float = float("nan")
    start_residuals: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {"P": np.round(self.P, 12).tolist(), "residual": float(self.residual),
                "converged": self.converged}


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("MATG_THREADS", "1")))
    except ValueError:
        return 1


def _well_conditioned(f: np.ndarray, det_min: float = 0.2, cond_max: float = 10.0) -> bool:
    return np.linalg.det(f) > det_min and np.linalg.cond(f) <= cond_max


def _random_gradients(n: int, k: int, rng: np.random.Generator) -> list[np.ndarray]:
    out = []
    while len(out) < k:
        f = np.eye(n) + 0.3 * rng.standard_normal((n, n))
        if _well_conditioned(f):
            out.append(f)
    return out


def make_samples(n: int = 3, k: int | None = None, held_out: int = 8,
                 rng: np.random.Generator | None = None) -> SampleSet:
    """Volumetric, uniaxial and shear modes, topped up with random gradients."""
    rng = np.random.default_rng(0) if rng is None else rng
    k = (16 if n == 3 else 10) if k is None else k
    if k < (12 if n == 3 else 6):
        raise ValueError(f"need at least {12 if n == 3 else 6} samples in dimension {n}")
    fixed = [s * np.eye(n) for s in (0.8, 0.9, 1.1, 1.25)]
    modes = []
    if n == 3:
        for i in range(3):
            modes.append(np.diag([1.2 if j == i else 1.0 for j in range(3)]))
        for i, j in ((0, 1), (0, 2), (1, 2)):
            g = np.eye(3)
            g[i, j] = 0.3
            modes.append(g)
    else:
        for s in (1.2, 0.85):
            modes += [np.diag([s, 1.0]), np.diag([1.0, s])]
        modes += [np.array([[1.0, 0.3], [0.0, 1.0]]), np.array([[1.0, 0.0], [-0.3, 1.0]])]
    train = (fixed + modes)[:k]
    train += _random_gradients(n, k - len(train), rng)
    return SampleSet(tuple(train), tuple(_random_gradients(n, held_out, rng)))


def residuals(m1: ConstitutiveModel, m2: ConstitutiveModel, p: np.ndarray, fs,
              targets=None) -> np.ndarray:
    """energy(m1, F P) - energy(m2, F) per sample; a large penalty off the det > 0 domain."""
    if targets is None:
        targets = [energy(m2, f) for f in fs]
    out = np.empty(len(fs))
    for i, (f, e2) in enumerate(zip(fs, targets)):
        try:
            out[i] = energy(m1, f @ p) - e2
        except NonPositiveDeterminant:
            out[i] = PENALTY
    return out


def jacobian(m1: ConstitutiveModel, p: np.ndarray, fs) -> np.ndarray:
    """Row k is vec(F_k^T S(F_k P)) with S the first Piola stress of m1."""
    rows = []
    for f in fs:
        try:
            rows.append((f.T @ stress(m1, f @ p)).ravel())
        except NonPositiveDeterminant:
            rows.append(np.zeros(p.size))
    return np.array(rows)


def objective(m1, m2, p, fs) -> float:
    r = residuals(m1, m2, p, fs)
    return float(r @ r)


def objective_gradient(m1, m2, p, fs) -> np.ndarray:
    r = residuals(m1, m2, p, fs)
    return (2.0 * r @ jacobian(m1, p, fs)).reshape(p.shape)


def rms(r: np.ndarray) -> float:
    return float(np.sqrt(np.mean(r * r)))


def _one_start(m1, m2, p0, samples: SampleSet, t_train, t_held, opts: SolverOptions):
    from scipy.optimize import least_squares  # deferred: keeps CLI start-up light

    n = samples.dim
    train = list(samples.train)

    def fun(x):
        return residuals(m1, m2, x.reshape(n, n), train, t_train)

    kwargs = {}
    if opts.analytic:
        kwargs["jac"] = lambda x: jacobian(m1, x.reshape(n, n), train)
    else:
        kwargs["diff_step"] = 1e-6
    try:
        res = least_squares(fun, p0.ravel(), method=opts.method, max_nfev=opts.max_nfev * n * n,
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, **kwargs)
        p = res.x.reshape(n, n)
    except (ValueError, np.linalg.LinAlgError):
        return p0, np.inf, np.inf
    if not np.all(np.isfinite(p)) or np.linalg.det(p) <= opts.det_min:
        return p, np.inf, np.inf
    return p, rms(fun(res.x)), rms(residuals(m1, m2, p, list(samples.held_out), t_held))


def solve_transplant(m1: ConstitutiveModel, m2: ConstitutiveModel,
                     samples: SampleSet | None = None,
                     opts: SolverOptions = SolverOptions(),
                     strict: bool = False) -> TransplantSolution:
    """Find P with energy(m1, F P) = energy(m2, F), modulo m1's symmetry group."""
    if m1.dim != m2.dim:
        raise mg.DimensionMismatch("models have different dimensions")
    n = m1.dim
    rng = np.random.default_rng(opts.seed)
    samples = make_samples(n, rng=rng) if samples is None else samples
    starts = [np.eye(n)] + [np.eye(n) + opts.perturbation * rng.standard_normal((n, n))
                            for _ in range(opts.starts)]
    t_train = [energy(m2, f) for f in samples.train]
    t_held = [energy(m2, f) for f in samples.held_out]
    workers = opts.threads or thread_cap()
    run = lambda p0: _one_start(m1, m2, p0, samples, t_train, t_held, opts)  # noqa: E731
    # every start runs so the result does not depend on the thread count
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(p0) for p0 in starts]
    best = min(range(len(results)), key=lambda i: (results[i][2], i))
    p, tr, held = results[best]
    sol = TransplantSolution(p, float(held), bool(held < opts.tol), float(tr),
                             tuple(float(r[2]) for r in results))
    if strict and not sol.converged:
        raise NoConvergence(sol)
    return sol


def gauge_distance(p_hat: np.ndarray, p_star: np.ndarray, group: mg.MatrixGroup) -> float:
    """min over g in group of |p_hat - p_star g|_F / |p_star|_F.

    For SO(n) and O(n) this is orthogonal Procrustes; finite groups are enumerated.
    """
    scale = np.linalg.norm(p_star)
    if group.is_finite:
        return min(np.linalg.norm(p_hat - p_star @ g) for g in group.members()) / scale
    if group.kind not in ("SO", "O"):
        raise mg.UnsupportedPair(f"gauge distance over {group.kind}")
    u, _, vt = np.linalg.svd(p_star.T @ p_hat)
    g = u @ vt
    if group.kind == "SO" and np.linalg.det(g) < 0:
        d = np.ones(len(g))
        d[-1] = -1.0
        g = (u * d) @ vt
    return float(np.linalg.norm(p_hat - p_star @ g) / scale)


# -- symmetry sampling ------------------------------------------------------


@dataclass(frozen=True)
class SymmetrySample:
    group: mg.MatrixGroup
    continuous_detected: bool
    directions_passed: int = 0

    def to_dict(self) -> dict:
        return {"group": mg.group_to_dict(self.group),
                "continuous_detected": self.continuous_detected,
                "directions_passed": self.directions_passed}


def _skew(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n, n))
    w = a - a.T
    return w / np.linalg.norm(w)


def symmetry_mismatch(m: ConstitutiveModel, q: np.ndarray, fs, base=None) -> float:
    base = [energy(m, f) for f in fs] if base is None else base
    return rms(residuals(m, m, q, list(fs), base))


def sample_symmetry_group(m: ConstitutiveModel, samples: SampleSet | None = None,
                          tol: float = 1e-8, seed: int = 0, directions: int = 64,
                          probes: int = 1000, orientation: str = "SO") -> SymmetrySample:
    """Orthogonal Q with energy(m, F Q) = energy(m, F) on the samples.

    Continuous symmetry is probed along random geodesics; when every direction
    and every random probe passes, the result is SO(n) (O(n) when reflections
    also pass).  Otherwise the finite subgroup of sign-diagonal matrices that
    pass is returned.
    """
    from scipy.linalg import expm

    n = m.dim
    rng = np.random.default_rng(seed)
    samples = make_samples(n, rng=rng) if samples is None else samples
    fs = list(samples.train) + list(samples.held_out)
    base = [energy(m, f) for f in fs]
    scale = max(1.0, rms(np.array(base)))

    def passes(q):
        return symmetry_mismatch(m, q, fs, base) < tol * scale

    passed = 0
    for _ in range(directions):
        w = _skew(n, rng)
        if all(passes(expm(t * w)) for t in (0.3, 1.0)):
            passed += 1
    continuous = passed > 0
    if passed == directions and all(passes(random_rotation(n, rng)) for _ in range(probes)):
        refl = np.diag([-1.0] + [1.0] * (n - 1))
        if orientation == "O" and passes(refl):
            return SymmetrySample(mg.orthogonal(n), True, passed)
        return SymmetrySample(mg.special_orthogonal(n), True, passed)
    cands = []
    for bits in range(2 ** n):
        d = np.diag([-1.0 if bits >> i & 1 else 1.0 for i in range(n)])
        if orientation == "SO" and np.linalg.det(d) < 0:
            continue
        if passes(d):
            cands.append(d)
    return SymmetrySample(mg.finite(cands), continuous, passed)


# -- numeric bodies ---------------------------------------------------------


@dataclass
class Symbolization:
    body: object
    archetypes: list
    solutions: dict

    def to_dict(self) -> dict:
        return {"archetypes": [m.to_dict() for m in self.archetypes],
                "solutions": {str(k): v.to_dict() for k, v in self.solutions.items()}}


def symbolize_body(body, opts: SolverOptions = SolverOptions(), samples: SampleSet | None = None):
    """Replace numeric points by (sampled symmetry group, solved transplant).

    Points are matched against archetypes in order of appearance; a point
    isomorphic to none of them starts a new archetype with transplant I and
    its own material label.
    """
    from .body import BodyGrid, MaterialPoint, Numeric, Symbolic

    samples = make_samples(body.dim, rng=np.random.default_rng(opts.seed)) if samples is None else samples
    arche: list[tuple[ConstitutiveModel, mg.MatrixGroup]] = []
    sols: dict = {}
    points = []
    for p in body.points:
        if not isinstance(p.data, Numeric):
            points.append(p)
            continue
        model = p.data.model
        hit = None
        for k, (ref, group) in enumerate(arche):
            if ref.to_dict() == model.to_dict():
                hit = (k, np.eye(body.dim))
                break
            sol = solve_transplant(ref, model, samples, opts)
            if sol.converged:
                sols[p.id] = sol
                hit = (k, sol.P)
                break
        if hit is None:
            group = sample_symmetry_group(model, samples, opts.tol, opts.seed).group
            arche.append((model, group))
            hit = (len(arche) - 1, np.eye(body.dim))
        k, transplant = hit
        label = p.material if k == 0 else f"{p.material}#{k}"
        points.append(MaterialPoint(p.id, p.grid_pos, Symbolic(arche[k][1], transplant), label))
    return Symbolization(BodyGrid(body.dim, tuple(points), dict(body.metadata)),
                         [m for m, _ in arche], sols)
