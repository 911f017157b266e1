"""Small dense linear algebra for 2x2 and 3x3 matrices.

The symmetric eigensolver is closed form (trigonometric Cardano for 3x3,
a single Jacobi rotation for 2x2) followed by a Rayleigh-quotient pass, so
the classification code does not depend on LAPACK's choice of eigenbasis
inside degenerate eigenspaces.
"""

from __future__ import annotations

import math

import numpy as np


class NotSymmetric(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class SingularMatrix(ValueError):
    pass


DET_GUARD = 1e-12


def as_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in (2, 3):
        raise ValueError(f"expected a 2x2 or 3x3 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def check_invertible(m: np.ndarray) -> None:
    if abs(np.linalg.det(m)) <= DET_GUARD:
        raise SingularMatrix(f"|det| <= {DET_GUARD}")


def rel_close(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """Frobenius closeness relative to the larger operand (floored at 1)."""
    scale = max(1.0, np.linalg.norm(a), np.linalg.norm(b))
    return bool(np.linalg.norm(a - b) <= tol * scale)


def is_orthogonal(m: np.ndarray, tol: float = 1e-9) -> bool:
    return bool(np.linalg.norm(m.T @ m - np.eye(len(m))) < tol)


def rot2(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rot3(axis, theta: float) -> np.ndarray:
    """Rodrigues rotation by `theta` about the unit vector `axis`."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    k = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return np.eye(3) + math.sin(theta) * k + (1.0 - math.cos(theta)) * (k @ k)


def half_turn(axis) -> np.ndarray:
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    return 2.0 * np.outer(a, a) - np.eye(3)


def random_rotation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of SO(n)."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q = random_rotation(n, rng)
    if rng.random() < 0.5:
        q = q @ np.diag([-1.0] + [1.0] * (n - 1))
    return q


def polar_left(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """m = S @ U with S symmetric positive definite and U orthogonal."""
    u, s, vt = np.linalg.svd(m)
    return (u * s) @ u.T, u @ vt


def polar_right(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """m = U @ S with U orthogonal and S symmetric positive definite."""
    u, s, vt = np.linalg.svd(m)
    return u @ vt, (vt.T * s) @ vt


def complete_frame(v: np.ndarray) -> np.ndarray:
    """Orthonormal 3x3 frame whose first column is the unit vector v."""
    v = v / np.linalg.norm(v)
    trial = np.eye(3)[int(np.argmin(np.abs(v)))]
    u = np.cross(v, trial)
    u /= np.linalg.norm(u)
    w = np.cross(v, u)
    return np.column_stack([v, u, w])


def _eig2(c: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a, b, d = c[0, 0], c[0, 1], c[1, 1]
    theta = 0.5 * math.atan2(2.0 * b, a - d)
    v = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    lam = np.array([v[:, 0] @ c @ v[:, 0], v[:, 1] @ c @ v[:, 1]])
    order = np.argsort(lam)
    return lam[order], v[:, order]


def _cardano(c: np.ndarray) -> np.ndarray:
    q = np.trace(c) / 3.0
    off = c[0, 1] ** 2 + c[0, 2] ** 2 + c[1, 2] ** 2
    p2 = (c[0, 0] - q) ** 2 + (c[1, 1] - q) ** 2 + (c[2, 2] - q) ** 2 + 2.0 * off
    if p2 <= 0.0:
        return np.array([q, q, q])
    p = math.sqrt(p2 / 6.0)
    r = np.linalg.det((c - q * np.eye(3)) / p) / 2.0
    phi = math.acos(min(1.0, max(-1.0, r))) / 3.0
    hi = q + 2.0 * p * math.cos(phi)
    lo = q + 2.0 * p * math.cos(phi + 2.0 * math.pi / 3.0)
    return np.array([lo, 3.0 * q - hi - lo, hi])


def _null_vector(m: np.ndarray) -> np.ndarray:
    # largest cross product of row pairs spans the kernel of a rank-2 matrix
    best = None
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = np.cross(m[i], m[j])
        if best is None or v @ v > best @ best:
            best = v
    return best / np.linalg.norm(best)


def eig_sym(c, sym_tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of an SPD matrix."""
    c = as_matrix(c)
    if np.linalg.norm(c - c.T) >= sym_tol * max(1.0, np.linalg.norm(c)):
        raise NotSymmetric("matrix is not symmetric")
    c = 0.5 * (c + c.T)
    if len(c) == 2:
        lam, v = _eig2(c)
    else:
        lam = _cardano(c)
        scale = max(abs(lam[-1]), 1e-300)
        gaps = (lam[1] - lam[0], lam[2] - lam[1])
        if max(gaps) <= 1e-14 * scale:
            v = np.eye(3)
        else:
            k = 0 if gaps[0] >= gaps[1] else 2
            v0 = _null_vector(c - lam[k] * np.eye(3))
            frame = complete_frame(v0)
            plane = frame[:, 1:]
            mu, w = _eig2(plane.T @ c @ plane)
            rest = plane @ w
            v = np.column_stack([v0, rest]) if k == 0 else np.column_stack([rest, v0])
        lam = np.einsum("ij,ik,kj->j", v, c, v)
        order = np.argsort(lam)
        lam, v = lam[order], v[:, order]
    if lam[0] <= 0.0:
        raise NotPositiveDefinite(f"smallest eigenvalue {lam[0]:.3e} <= 0")
    return lam, v


def multiplicity_pattern(lam: np.ndarray, rel_tol: float) -> list[list[int]]:
    """Group ascending eigenvalues into clusters closer than rel_tol * max."""
    scale = abs(lam[-1])
    clusters = [[0]]
    for i in range(1, len(lam)):
        if lam[i] - lam[clusters[-1][-1]] <= rel_tol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters
