"""Stored-energy functions for isotropic hyperelastic families.

All three families are frame indifferent and isotropic, with a stress-free
reference state at F = I.  A model may be pre-composed with a fixed
matrix A, giving psi(F) = psi_base(F A); this is how anisotropic or
transplanted responses are planted in tests and fixtures.

Compressible Mooney-Rivlin, with I1 = tr C, I2 = (I1^2 - tr C^2) / 2 and
J = det F::

    psi = c1 (I1 - n) + c2 (I2 - n(n-1)/2) - d ln J + (lam/2) (ln J)^2
    d   = 2 c1 + 2 (n-1) c2
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("NeoHookean", "StVenantKirchhoff", "MooneyRivlin")

MOONEY_RIVLIN_FORM = (
    "psi = c1 (I1 - n) + c2 (I2 - n(n-1)/2) - (2 c1 + 2 (n-1) c2) ln J + (lam/2) (ln J)^2"
)


class NonPositiveDeterminant(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ConstitutiveModel:
    family: str
    params: dict
    dim: int = 3
    pre: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.dim not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        p = self.params
        if self.family == "MooneyRivlin":
            if p["c1"] <= 0 or p["c2"] <= 0 or p["lam"] < 0:
                raise ValueError("Mooney-Rivlin needs c1, c2 > 0 and lam >= 0")
        elif p["mu"] <= 0 or p["lam"] < 0:
            raise ValueError(f"{self.family} needs mu > 0 and lam >= 0")
        if self.pre is not None:
            pre = np.asarray(self.pre, dtype=float)
            if pre.shape != (self.dim, self.dim) or np.linalg.det(pre) <= 0:
                raise ValueError("pre-composition must be a square matrix with det > 0")
            object.__setattr__(self, "pre", pre)

    def scaled(self, s: float) -> ConstitutiveModel:
        """The same response with every energy multiplied by s > 0."""
        return ConstitutiveModel(self.family, {k: v * s for k, v in self.params.items()},
                                 self.dim, self.pre)

    def precomposed(self, a) -> ConstitutiveModel:
        """psi'(F) = psi(F a)."""
        a = np.asarray(a, dtype=float)
        pre = a if self.pre is None else a @ self.pre
        return ConstitutiveModel(self.family, dict(self.params), self.dim, pre)

    def to_dict(self) -> dict:
        out = {"family": self.family, "parameters": dict(self.params), "dim": self.dim}
        if self.pre is not None:
            out["pre"] = self.pre.tolist()
        return out

    @classmethod
    def from_dict(cls, d: dict, dim: int | None = None) -> ConstitutiveModel:
        return cls(d["family"], {k: float(v) for k, v in d["parameters"].items()},
                   int(d.get("dim", dim or 3)), d.get("pre"))


def neo_hookean(mu: float, lam: float, dim: int = 3) -> ConstitutiveModel:
    return ConstitutiveModel("NeoHookean", {"mu": mu, "lam": lam}, dim)


def st_venant_kirchhoff(mu: float, lam: float, dim: int = 3) -> ConstitutiveModel:
    return ConstitutiveModel("StVenantKirchhoff", {"mu": mu, "lam": lam}, dim)


def mooney_rivlin(c1: float, c2: float, lam: float, dim: int = 3) -> ConstitutiveModel:
    return ConstitutiveModel("MooneyRivlin", {"c1": c1, "c2": c2, "lam": lam}, dim)


def _base_energy(model: ConstitutiveModel, f: np.ndarray) -> float:
    n = model.dim
    p = model.params
    j = np.linalg.det(f)
    if j <= 0:
        raise NonPositiveDeterminant(f"det F = {j:.3e}")
    c = f.T @ f
    if model.family == "StVenantKirchhoff":
        e = 0.5 * (c - np.eye(n))
        tr = np.trace(e)
        return 0.5 * p["lam"] * tr * tr + p["mu"] * float(np.sum(e * e))
    lnj = math.log(j)
    i1 = np.trace(c)
    if model.family == "NeoHookean":
        return 0.5 * p["mu"] * (i1 - n) - p["mu"] * lnj + 0.5 * p["lam"] * lnj * lnj
    i2 = 0.5 * (i1 * i1 - float(np.sum(c * c)))
    d = 2.0 * p["c1"] + 2.0 * (n - 1) * p["c2"]
    return (p["c1"] * (i1 - n) + p["c2"] * (i2 - 0.5 * n * (n - 1))
            - d * lnj + 0.5 * p["lam"] * lnj * lnj)


def _base_stress(model: ConstitutiveModel, f: np.ndarray) -> np.ndarray:
    """First Piola-Kirchhoff stress d psi / d F."""
    n = model.dim
    p = model.params
    j = np.linalg.det(f)
    if j <= 0:
        raise NonPositiveDeterminant(f"det F = {j:.3e}")
    if model.family == "StVenantKirchhoff":
        e = 0.5 * (f.T @ f - np.eye(n))
        return f @ (p["lam"] * np.trace(e) * np.eye(n) + 2.0 * p["mu"] * e)
    finv_t = np.linalg.inv(f).T
    lnj = math.log(j)
    if model.family == "NeoHookean":
        return p["mu"] * (f - finv_t) + p["lam"] * lnj * finv_t
    c = f.T @ f
    i1 = np.trace(c)
    d = 2.0 * p["c1"] + 2.0 * (n - 1) * p["c2"]
    return (2.0 * p["c1"] * f + 2.0 * p["c2"] * (i1 * f - f @ c)
            + (p["lam"] * lnj - d) * finv_t)


def energy(model: ConstitutiveModel, f) -> float:
    f = np.asarray(f, dtype=float)
    if model.pre is not None:
        f = f @ model.pre
    return _base_energy(model, f)


def stress(model: ConstitutiveModel, f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if model.pre is None:
        return _base_stress(model, f)
    return _base_stress(model, f @ model.pre) @ model.pre.T
