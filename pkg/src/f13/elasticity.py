"""Relativistic elasticity kinematics.

Configuration map machinery: pulled-back material metric, strain, scalar
invariants/particle densities, and the unsheared/rigidity equation-of-state
family.  This module is deliberately decoupled from the conformally flat
solvers; it acts as a consistency layer on solved (mu, p, shear) profiles
rather than as a closure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "DeformationGradient",
    "MaterialMetric",
    "ElasticInvariants",
    "ValueSlope",
    "pulled_back_metric",
    "strain",
    "invariants",
    "eos",
]

_POSITIVE_EIG = 1e-12


@dataclass(frozen=True)
class DeformationGradient:
    """Relativistic deformation gradient y^A_mu (material A = 1..3, spacetime mu = 0..3).

    Must have rank 3; its one-dimensional kernel is spanned by the matter
    velocity.
    """

    y: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.y, dtype=float)
        if arr.shape != (3, 4):
            raise ValueError(f"deformation gradient must be 3x4, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("deformation gradient has non-finite entries")
        if np.linalg.matrix_rank(arr) != 3:
            raise ValueError("deformation gradient must have rank 3")
        object.__setattr__(self, "y", arr)

    def annihilates(self, u, atol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.y @ np.asarray(u, dtype=float))) <= atol)


@dataclass(frozen=True)
class MaterialMetric:
    """Riemannian metric gamma_AB on the material space; positive-definite."""

    gamma: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.gamma, dtype=float)
        if arr.shape != (3, 3):
            raise ValueError(f"material metric must be 3x3, got {arr.shape}")
        if np.max(np.abs(arr - arr.T)) > 1e-12 * max(1.0, np.max(np.abs(arr))):
            raise ValueError("material metric must be symmetric")
        if np.min(np.linalg.eigvalsh(arr)) <= _POSITIVE_EIG:
            raise ValueError("material metric must be positive-definite")
        object.__setattr__(self, "gamma", arr)

    @classmethod
    def identity(cls) -> "MaterialMetric":
        return cls(np.eye(3))


class ElasticInvariants(NamedTuple):
    """Scalar invariants, particle density and linear particle densities."""

    I1: float
    I2: float
    I3: float
    n: float
    n1: float
    n2: float
    n3: float


class ValueSlope(NamedTuple):
    """A function value and its n-derivative at the query point."""

    value: float
    slope: float


def pulled_back_metric(y: DeformationGradient, gamma: MaterialMetric) -> np.ndarray:
    """k_{mu nu} = y^A_mu y^B_nu gamma_AB (symmetric 4x4, annihilates u)."""
    return y.y.T @ gamma.gamma @ y.y


def strain(k, g, u) -> np.ndarray:
    """Relativistic strain s = (h - k)/2 with h = g + u (x) u.

    u must be unit timelike with respect to g; k = h means the material is
    unstrained.
    """
    k = np.asarray(k, dtype=float)
    g = np.asarray(g, dtype=float)
    uv = np.asarray(u, dtype=float)
    norm = uv @ g @ uv
    if abs(norm + 1.0) > 1e-12:
        raise ValueError(f"u is not unit timelike: u.u = {norm!r}")
    u_low = g @ uv
    h = g + np.outer(u_low, u_low)
    return 0.5 * (h - k)


def invariants(k3) -> ElasticInvariants:
    """Invariants of the mixed spatial block k^mu_nu.

    I1 = tr k, I2 = tr k^2, I3 = tr k^3, n = sqrt(det k) = n1 n2 n3; the
    identity n^2 = (I1^3 - 3 I1 I2 + 2 I3)/6 holds by construction.  The
    three eigenvalues must be positive (they are the squared linear particle
    densities), otherwise the material state is degenerate.
    """
    k = np.asarray(k3, dtype=float)
    if k.shape != (3, 3):
        raise ValueError(f"expected 3x3 spatial block, got {k.shape}")
    eig = np.linalg.eigvalsh(0.5 * (k + k.T))
    if np.min(eig) <= _POSITIVE_EIG:
        raise ValueError(f"degenerate material state: eigenvalues {eig}")
    k2 = k @ k
    I1 = float(np.trace(k))
    I2 = float(np.trace(k2))
    I3 = float(np.trace(k2 @ k))
    n1, n2, n3 = (math.sqrt(e) for e in eig)
    return ElasticInvariants(I1, I2, I3, n1 * n2 * n3, n1, n2, n3)


def eos(n: float, shear_sq: float, mu_tilde: float,
        rho_tilde: ValueSlope, eps_tilde: ValueSlope) -> tuple[float, float]:
    """Equation of state mu = mu~ + rho~ sigma^2, p = p~ + (Omega~ - 1) sigma.

    p~ = n^2 d(eps~)/dn and Omega~ = (n/rho~) d(rho~)/dn; the shear scalar
    sigma is taken as sqrt(shear_sq) as supplied by the caller (the text
    leaves open whether it is the kinematic or an elastic shear scalar).
    The derivative evaluators arrive as (value, slope) pairs at the query
    point, so no expression engine is involved.
    """
    if n <= 0.0:
        raise ValueError("particle density must be positive")
    if shear_sq < 0.0:
        raise ValueError("shear_sq must be nonnegative")
    rho = ValueSlope(*rho_tilde)
    eps = ValueSlope(*eps_tilde)
    sigma = math.sqrt(shear_sq)
    mu = mu_tilde + rho.value * shear_sq
    p_tilde = n * n * eps.slope
    if sigma == 0.0:
        return mu, p_tilde
    if rho.value == 0.0:
        raise ValueError("Omega~ undefined: rho~(n) = 0 with nonzero shear")
    omega_tilde = n * rho.slope / rho.value
    return mu, p_tilde + (omega_tilde - 1.0) * sigma
