"""Newman-Penrose bridge: Ricci and Weyl spinor components from 1+3 data.

The null tetrad is adapted to the orthonormal frame by
l = (e_0 - e_3)/sqrt(2), k = (e_0 + e_3)/sqrt(2), m = (e_1 - i e_2)/sqrt(2),
and the curvature maps are purely algebraic in the matter and Weyl
variables.  Complex arithmetic uses paired 64-bit reals; the hermitian
partners Phi_10, Phi_20, Phi_21 are never stored, they are materialised as
conjugates where a null rotation needs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MatterState, WeylState

__all__ = [
    "RicciSpinor",
    "WeylSpinor",
    "NullTetrad",
    "ricci_spinor",
    "weyl_spinor",
    "null_rotate_ricci",
    "diagonalizing_rotation",
    "rotation_admissible",
    "null_tetrad",
]


@dataclass(frozen=True)
class RicciSpinor:
    """Ricci spinor components; the diagonal entries are real by hermiticity.

    lam_np is the NP curvature scalar (mu - 3p)/24, distinct from the
    cosmological constant.
    """

    phi00: float
    phi11: float
    phi22: float
    phi01: complex
    phi02: complex
    phi12: complex
    lam_np: float

    @property
    def phi10(self) -> complex:
        return self.phi01.conjugate()

    @property
    def phi20(self) -> complex:
        return self.phi02.conjugate()

    @property
    def phi21(self) -> complex:
        return self.phi12.conjugate()


@dataclass(frozen=True)
class WeylSpinor:
    psi0: complex
    psi1: complex
    psi2: complex
    psi3: complex
    psi4: complex

    def max_abs(self) -> float:
        return max(abs(self.psi0), abs(self.psi1), abs(self.psi2),
                   abs(self.psi3), abs(self.psi4))


def ricci_spinor(m: MatterState) -> RicciSpinor:
    """Map matter variables to the Ricci spinor components.

    Phi_00 = Phi_22 = (mu + p + pi_33)/4,
    Phi_11 = (mu + p + pi_11 + pi_22 - pi_33)/8,
    Phi_01 = (-pi_13 + i pi_23)/4,  Phi_12 = (pi_13 - i pi_23)/4,
    Phi_02 = (pi_11 - pi_22 - 2 i pi_12)/4,  Lambda_NP = (mu - 3p)/24.
    """
    pi = m.pi
    s = m.mu + m.p
    phi00 = 0.25 * (s + pi.m33)
    phi11 = 0.125 * (s + pi.m11 + pi.m22 - pi.m33)
    phi01 = 0.25 * complex(-pi.m13, pi.m23)
    phi12 = 0.25 * complex(pi.m13, -pi.m23)
    phi02 = 0.25 * complex(pi.m11 - pi.m22, -2.0 * pi.m12)
    lam_np = (m.mu - 3.0 * m.p) / 24.0
    return RicciSpinor(phi00, phi11, phi00, phi01, phi02, phi12, lam_np)


def weyl_spinor(w: WeylState) -> WeylSpinor:
    """Weyl spinor components from Q = E + iH.

    Psi_0 = (Q11 - Q22 - 2i Q12)/2, Psi_1 = (i Q23 - Q13)/2, Psi_2 = Q33/2,
    Psi_3 = (i Q23 + Q13)/2, Psi_4 = (Q11 - Q22 + 2i Q12)/2.
    """
    Q = w.E.as_matrix() + 1j * w.H.as_matrix()
    psi0 = 0.5 * (Q[0, 0] - Q[1, 1] - 2j * Q[0, 1])
    psi1 = 0.5 * (1j * Q[1, 2] - Q[0, 2])
    psi2 = 0.5 * Q[2, 2]
    psi3 = 0.5 * (1j * Q[1, 2] + Q[0, 2])
    psi4 = 0.5 * (Q[0, 0] - Q[1, 1] + 2j * Q[0, 1])
    return WeylSpinor(psi0, psi1, psi2, psi3, psi4)


def null_rotate_ricci(r: RicciSpinor, alpha: complex) -> RicciSpinor:
    """Null rotation about l with complex parameter alpha.

    Applies the transformation table verbatim, with Phi_10 = conj(Phi_01)
    etc. substituted; Phi_00 and Lambda_NP are invariant.  The imaginary
    parts of the transformed diagonal entries cancel exactly in floating
    point, so the hermiticity of the record is preserved bit-for-bit.
    """
    al = complex(alpha)
    ab = al.conjugate()
    a2 = al * al
    ab2 = ab * ab
    phi01 = r.phi01 + al * r.phi00
    phi02 = r.phi02 + 2.0 * al * r.phi01 + a2 * r.phi00
    phi11 = r.phi11 + al * r.phi10 + ab * r.phi01 + (al * ab) * r.phi00
    phi12 = (
        r.phi12
        + 2.0 * al * r.phi11
        + a2 * r.phi10
        + ab * r.phi02
        + 2.0 * (al * ab) * r.phi01
        + (a2 * ab) * r.phi00
    )
    phi22 = (
        r.phi22
        + (2.0 * al) * r.phi21
        + (2.0 * ab) * r.phi12
        + 4.0 * (al * ab) * r.phi11
        + ((2.0 * al) * ab2) * r.phi01
        + ((2.0 * ab) * a2) * r.phi10
        + a2 * r.phi20
        + ab2 * r.phi02
        + (ab2 * a2) * r.phi00
    )
    return RicciSpinor(
        r.phi00, phi11.real, phi22.real, phi01, phi02, phi12, r.lam_np
    )


def diagonalizing_rotation(r: RicciSpinor) -> complex:
    """Rotation parameter alpha = -Phi_01/Phi_00 that kills Phi_01."""
    if r.phi00 == 0.0:
        raise ValueError("diagonalizing rotation undefined for Phi_00 = 0")
    return -r.phi01 / r.phi00


def rotation_admissible(m: MatterState) -> bool:
    """Nonnegativity of the three quadratic right-hand sides that a basis
    with pi_13 = pi_23 = pi_12 = 0 requires.

    The three expressions equated to pi_13^2, pi_23^2 and pi_12^2 must each
    be >= 0; this predicate does not assert that a single rotation realises
    the diagonal basis, it only screens the stated necessary conditions.
    """
    pi = m.pi
    s = m.mu + m.p
    u = s + pi.m33
    v1 = pi.m11 - 2.0 * pi.m22 - s
    v2 = -2.0 * pi.m11 + pi.m22 - s
    rhs13 = u * v1 / 3.0
    rhs23 = u * v2 / 3.0
    rhs12 = v1 * (-pi.m11 + 2.0 * pi.m22 - s) / 9.0
    return rhs13 >= 0.0 and rhs23 >= 0.0 and rhs12 >= 0.0


@dataclass(frozen=True)
class NullTetrad:
    """Null tetrad adapted to the frame e_a = F * (coordinate direction a).

    The matching conformally flat coordinate metric is
    g_{mu nu} = F^{-2} diag(-1, 1, 1, 1); inner products of tetrad legs are
    therefore independent of F.
    """

    F: float
    l: np.ndarray
    k: np.ndarray
    m: np.ndarray
    mbar: np.ndarray

    def metric(self) -> np.ndarray:
        return np.diag([-1.0, 1.0, 1.0, 1.0]) / self.F**2

    def inner(self, v, w) -> complex:
        """Bilinear (not sesquilinear) inner product g(v, w)."""
        g = self.metric()
        return complex(np.asarray(v) @ g @ np.asarray(w))


def null_tetrad(F: float) -> NullTetrad:
    """Build l = (e_0 - e_3)/sqrt2, k = (e_0 + e_3)/sqrt2, m = (e_1 - i e_2)/sqrt2."""
    if not (F > 0.0):
        raise ValueError("frame scale F must be positive")
    e = F * np.eye(4)
    s = 1.0 / math.sqrt(2.0)
    l = s * (e[0] - e[3]) + 0j
    k = s * (e[0] + e[3]) + 0j
    m = s * (e[1] - 1j * e[2])
    return NullTetrad(F, l, k, m, m.conjugate())
