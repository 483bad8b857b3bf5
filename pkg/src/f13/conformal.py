"""Conformally flat elastic specialization: reduced systems and ODE cases.

Covers the specialized Bianchi system (17 entries), the gauge reduction,
the reduced Ricci/Einstein system, the two non-rotating ODE cases with
their algebraic closures and closed-form families, and the future-work
system as residuals only.

Every residual evaluator here accepts scalar fields or equally shaped
arrays, so a whole grid of states is checked in one call.  The frame
derivative along the inhomogeneity direction is e_3 = F(z) d/dz.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .frame_equations import JetArrays
from .numerics import Grid, cumulative_integral_refined, quadrature

__all__ = [
    "ScaleFactor",
    "ScalarProfile",
    "SpecialState",
    "SpecialJet",
    "ResidualVector",
    "CaseA1State",
    "CaseA2State",
    "CaseA1ClosedForm",
    "BranchFields",
    "special_ricci",
    "bianchi_special_residuals",
    "gauge_reduce",
    "is_gauge_reduced",
    "ricci_einstein_residuals",
    "futurework_residuals",
    "case_a1_closure",
    "case_a1_rhs",
    "case_a1_first_integral",
    "case_a1_closed_form",
    "shearless_a3",
    "case_a2_rhs",
    "case_a2_pi11",
    "case_a2_branch_a3",
    "a1_trajectory_jet",
    "a2_trajectory_jet",
    "embed_special",
    "B_NAMES",
    "RE_NAMES",
    "FW_NAMES",
]

POLE_MARGIN = 1e-3  # clip distance ahead of a detected denominator sign change


class ScaleFactor:
    """Positive frame factor F(z); e_3 acts as F d/dz in the diagonal basis."""

    def __init__(self, value: Callable, slope: Callable | None = None, label: str = "F"):
        self._value = value
        self._slope = slope
        self.label = label

    def __call__(self, z):
        return self._value(z)

    def slope(self, z):
        if self._slope is None:
            raise ValueError(f"{self.label}: slope evaluator unavailable")
        return self._slope(z)

    @classmethod
    def constant(cls, c: float) -> "ScaleFactor":
        c = float(c)
        if not (c > 0.0 and math.isfinite(c)):
            raise ValueError("constant frame factor must be positive and finite")
        return cls(lambda z: np.asarray(z, dtype=float) * 0.0 + c,
                   lambda z: np.asarray(z, dtype=float) * 0.0, label=f"F={c}")

    @classmethod
    def from_table(cls, zs, values, label: str = "F(table)") -> "ScaleFactor":
        from scipy.interpolate import CubicSpline

        zs = np.asarray(zs, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0.0):
            raise ValueError("tabulated frame factor must be positive")
        spline = CubicSpline(zs, values)
        return cls(spline, spline.derivative(), label=label)


@dataclass(frozen=True)
class ScalarProfile:
    """A scalar function of z with analytic derivative evaluators."""

    value: Callable
    slope: Callable
    curvature: Callable | None = None
    label: str = ""

    @classmethod
    def exp(cls) -> "ScalarProfile":
        return cls(np.exp, np.exp, np.exp, label="exp(z)")


@dataclass(frozen=True)
class SpecialState:
    """Surviving variables of the conformally flat elastic ansatz.

    The implied full tensors satisfy pi_22 = pi_11 = -pi_33/2 structurally;
    the shear/commutation entries that the ansatz pins (sigma_22, sigma_33,
    n_22, n_33, n_12, sigma_12) default to their constrained values but can
    be overridden so that a violating data set is representable and shows up
    in the (b15)-(b17) residual entries.  Fields may be floats or equally
    shaped arrays.
    """

    p: object = 0.0
    pi11: object = 0.0
    Theta: object = 0.0
    sigma11: object = 0.0
    udot3: object = 0.0
    a1: object = 0.0
    a2: object = 0.0
    a3: object = 0.0
    n11: object = 0.0
    n13: object = 0.0
    n23: object = 0.0
    Omega3: object = 0.0
    omega1: object = 0.0
    omega2: object = 0.0
    omega3: object = 0.0
    sigma13: object = 0.0
    sigma23: object = 0.0
    Omega1: object = 0.0
    Omega2: object = 0.0
    udot1: object = 0.0
    udot2: object = 0.0
    sigma22: object = None
    sigma33: object = None
    sigma12: object = 0.0
    n22: object = None
    n33: object = 0.0
    n12: object = 0.0

    def __post_init__(self):
        if self.sigma22 is None:
            object.__setattr__(self, "sigma22", self.sigma11)
        if self.sigma33 is None:
            object.__setattr__(self, "sigma33", -2.0 * np.asarray(self.sigma11))
        if self.n22 is None:
            object.__setattr__(self, "n22", self.n11)


_ZERO_SPECIAL = SpecialState()


@dataclass(frozen=True)
class SpecialJet:
    """A SpecialState with its four frame-derivative records."""

    z: object
    value: SpecialState
    deriv: tuple[SpecialState, SpecialState, SpecialState, SpecialState]

    @classmethod
    def build(cls, z, value, e0=None, e1=None, e2=None, e3=None) -> "SpecialJet":
        zero = _ZERO_SPECIAL
        return cls(z, value, (e0 or zero, e1 or zero, e2 or zero, e3 or zero))


@dataclass(frozen=True)
class ResidualVector:
    """Named residual entries, each a scalar or a batch array."""

    names: tuple[str, ...]
    values: np.ndarray  # shape (len(names),) + batch

    def __post_init__(self):
        if self.values.shape[0] != len(self.names):
            raise ValueError("names/values length mismatch")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite residual entry")

    def entry_max(self) -> dict[str, float]:
        flat = self.values.reshape(len(self.names), -1)
        return {n: float(np.max(np.abs(flat[i]))) for i, n in enumerate(self.names)}

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def worst(self) -> tuple[str, int, float]:
        """(entry name, batch index, |value|) of the largest residual."""
        flat = np.abs(self.values.reshape(len(self.names), -1))
        i, j = np.unravel_index(np.argmax(flat), flat.shape)
        return self.names[i], int(j), float(flat[i, j])


def _stack(entries) -> np.ndarray:
    arrays = [np.asarray(e, dtype=float) for e in entries]
    return np.stack(np.broadcast_arrays(*arrays))


# ---------------------------------------------------------------------------
# reduced curvature map and the specialized systems
# ---------------------------------------------------------------------------


def special_ricci(p, pi11):
    """Nonzero Ricci spinor entries of the ansatz: (Phi_00, Phi_11).

    Phi_00 = Phi_22 = (2p - pi_11)/2 and Phi_11 = (p + pi_11)/2, matching
    the general matter map at mu = 3p, pi = diag(pi11, pi11, -2 pi11).
    """
    return 0.5 * (2.0 * np.asarray(p) - pi11), 0.5 * (np.asarray(p) + pi11)


B_NAMES = tuple(f"b{i}" for i in range(1, 18))


def bianchi_special_residuals(jet: SpecialJet) -> ResidualVector:
    """Seventeen-entry residual vector of the specialized Bianchi system.

    Entries 1-8 are derivative equations, 9-14 algebraic constraints, and
    15-17 encode the structural conditions (vanishing of omega_3, n_33,
    n_12, sigma_12; sigma_22 = sigma_11 = -sigma_33/2; n_11 = n_22) as
    max-abs of their member variables and differences.
    """
    s = jet.value
    e0, e1, e2, e3 = jet.deriv
    third = 1.0 / 3.0
    entries = [
        np.asarray(e0.p) - (-(4.0 * third) * s.p * s.Theta - 2.0 * s.sigma11 * s.pi11),
        np.asarray(e0.pi11)
        - (-4.0 * s.sigma11 * s.p + (s.sigma11 - third * s.Theta) * s.pi11),
        np.asarray(e1.p) - (-(s.a1 - s.n23) * s.pi11),
        np.asarray(e1.pi11) - (s.a1 - s.n23) * s.pi11,
        np.asarray(e2.p) - (-(s.a2 + s.n13) * s.pi11),
        np.asarray(e2.pi11) - (s.a2 + s.n13) * s.pi11,
        np.asarray(e3.p)
        - (-(4.0 * third) * s.udot3 * s.p + (2.0 * third) * s.udot3 * s.pi11),
        np.asarray(e3.pi11)
        - ((4.0 * third) * s.udot3 * s.p + (3.0 * s.a3 - (2.0 * third) * s.udot3) * s.pi11),
        4.0 * s.udot1 * s.p + (np.asarray(s.udot1) - 3.0 * s.a1 + 3.0 * s.n23) * s.pi11,
        4.0 * s.udot2 * s.p + (np.asarray(s.udot2) - 3.0 * s.a2 - 3.0 * s.n13) * s.pi11,
        -2.0 * s.sigma13 * s.p
        + 0.25 * (3.0 * s.omega2 - 6.0 * s.Omega2 + np.asarray(s.sigma13)) * s.pi11,
        -2.0 * s.sigma23 * s.p
        - 0.25 * (3.0 * s.omega1 - 6.0 * s.Omega1 - np.asarray(s.sigma23)) * s.pi11,
        -4.0 * s.omega1 * s.p + 0.5 * (np.asarray(s.omega1) - 3.0 * s.sigma23) * s.pi11,
        -4.0 * s.omega2 * s.p + 0.5 * (np.asarray(s.omega2) + 3.0 * s.sigma13) * s.pi11,
        np.maximum.reduce(
            np.broadcast_arrays(
                np.abs(np.asarray(s.omega3, dtype=float)),
                np.abs(np.asarray(s.n33, dtype=float)),
                np.abs(np.asarray(s.n12, dtype=float)),
                np.abs(np.asarray(s.sigma12, dtype=float)),
            )
        ),
        np.maximum(
            np.abs(np.asarray(s.sigma22) - s.sigma11),
            np.abs(np.asarray(s.sigma11) + 0.5 * np.asarray(s.sigma33)),
        ),
        np.abs(np.asarray(s.n11) - s.n22),
    ]
    return ResidualVector(B_NAMES, _stack(entries))


_GAUGE_ZEROED = (
    "sigma13", "sigma23", "omega1", "omega2", "omega3",
    "Omega1", "Omega2", "udot1", "udot2",
)


def gauge_reduce(s: SpecialState) -> SpecialState:
    """Fix the residual frame freedom of the ansatz.

    Forces sigma13 = sigma23 = omega_i = Omega_1 = Omega_2 = udot_1 =
    udot_2 = 0 together with n_23 = a_1 and n_13 = -a_2, after which the
    algebraic constraints (entries 9-14) hold identically.
    """
    return dataclasses.replace(
        s,
        n23=s.a1,
        n13=-np.asarray(s.a2),
        **{name: 0.0 for name in _GAUGE_ZEROED},
    )


def is_gauge_reduced(s: SpecialState, atol: float = 0.0) -> bool:
    checks = [np.asarray(getattr(s, name)) for name in _GAUGE_ZEROED]
    checks.append(np.asarray(s.n23) - s.a1)
    checks.append(np.asarray(s.n13) + s.a2)
    return all(np.all(np.abs(c) <= atol) for c in checks)


RE_NAMES = (
    "RE1", "RE2", "RE3", "RE4", "RE5", "RE6", "RE7", "RE8", "RE9", "RE10",
    "RE11a", "RE11b", "RE12a", "RE12b", "RE13a", "RE13b", "RE14a", "RE14b",
)


def ricci_einstein_residuals(jet: SpecialJet, atol: float = 0.0) -> ResidualVector:
    """Residuals of the reduced Ricci/Einstein system.

    Requires a gauge-reduced state; the two-sided zero equations contribute
    paired entries (suffix a for e_1, b for e_2).
    """
    s = jet.value
    if not is_gauge_reduced(s, atol=atol):
        raise ValueError("ricci_einstein_residuals requires a gauge-reduced state")
    e0, e1, e2, e3 = jet.deriv
    third = 1.0 / 3.0
    entries = [
        np.asarray(e0.a3)
        - (-third * s.udot3 * s.Theta - third * s.a3 * s.Theta
           - s.udot3 * s.sigma11 - s.a3 * s.sigma11),
        (np.asarray(e1.a1) + e2.a2 + e3.a3)
        - (1.5 * s.p - np.asarray(s.Theta) ** 2 / 6.0 + 1.5 * np.asarray(s.sigma11) ** 2
           + 2.0 * np.asarray(s.a1) ** 2 + 2.0 * np.asarray(s.a2) ** 2
           + 1.5 * np.asarray(s.a3) ** 2),
        (np.asarray(e3.a3) - e0.sigma11 - third * np.asarray(e3.udot3))
        - (s.Theta * s.sigma11 - np.asarray(s.pi11) + third * np.asarray(s.udot3) ** 2
           + third * s.a3 * s.udot3 + s.p - np.asarray(s.Theta) ** 2 / 9.0
           + np.asarray(s.sigma11) ** 2 + np.asarray(s.a3) ** 2),
        (np.asarray(e3.sigma11) + third * np.asarray(e3.Theta)) - 3.0 * s.a3 * s.sigma11,
        (np.asarray(e3.Omega3) + e0.n11)
        - (-s.udot3 * s.Omega3 + 2.0 * s.sigma11 * s.n11 - third * s.Theta * s.n11),
        (np.asarray(e0.Theta) - e3.udot3)
        - (-np.asarray(s.Theta) ** 2 / 3.0 - 6.0 * np.asarray(s.sigma11) ** 2
           - 3.0 * s.p + np.asarray(s.udot3) ** 2 - 2.0 * s.a3 * s.udot3),
        (np.asarray(e1.n11) - 2.0 * np.asarray(e3.a2))
        - (2.0 * s.a1 * s.n11 - 2.0 * s.a3 * s.a2),
        (2.0 * np.asarray(e3.a1) - e2.n11)
        - (2.0 * s.a2 * s.n11 + 2.0 * s.a3 * s.a1),
        (np.asarray(e0.a1) - 0.5 * np.asarray(e2.Omega3))
        - (-third * s.a1 * s.Theta - s.a1 * s.sigma11 - s.a2 * s.Omega3),
        (np.asarray(e0.a2) + 0.5 * np.asarray(e1.Omega3))
        - (-third * s.a2 * s.Theta - s.a2 * s.sigma11 + s.a1 * s.Omega3),
        np.asarray(e1.udot3),
        np.asarray(e2.udot3),
        np.asarray(e1.a3),
        np.asarray(e2.a3),
        np.asarray(e1.sigma11),
        np.asarray(e2.sigma11),
        np.asarray(e1.Theta),
        np.asarray(e2.Theta),
    ]
    return ResidualVector(RE_NAMES, _stack(entries))


FW_NAMES = (
    "BS1", "BS2", "BS3",
    "BS4_e1p", "BS4_e2p", "BS4_e3p", "BS4_e1pi", "BS4_e2pi",
    "RES1", "RES2", "RES3", "RES4", "RES5",
    "RES6_e1", "RES6_e2", "RES7_e1", "RES7_e2", "RES8_e1", "RES8_e2",
    "RES10_e1", "RES10_e2", "RES10_e3",
)


def futurework_residuals(jet: SpecialJet) -> ResidualVector:
    """Residual-only evaluation of the future-work system.

    Non-rotating, non-accelerated data with n = 0, a = (0, 0, a3) and
    diagonal shear; solving this nonlinear PDE system is out of scope, any
    solve request must be rejected upstream.
    """
    s = jet.value
    e0, e1, e2, e3 = jet.deriv
    th2 = np.asarray(s.Theta) ** 2
    entries = [
        np.asarray(e0.p) + (4.0 / 3.0) * s.p * s.Theta + 2.0 * s.sigma11 * s.pi11,
        np.asarray(e0.pi11) + 4.0 * s.sigma11 * s.p
        - (np.asarray(s.sigma11) - s.Theta / 3.0) * s.pi11,
        np.asarray(e3.pi11) - 3.0 * s.a3 * s.pi11,
        np.asarray(e1.p),
        np.asarray(e2.p),
        np.asarray(e3.p),
        np.asarray(e1.pi11),
        np.asarray(e2.pi11),
        np.asarray(e0.a3) + s.a3 * s.Theta / 3.0 + s.a3 * s.sigma11,
        np.asarray(e3.a3)
        - (1.5 * s.p - th2 / 6.0 + 1.5 * np.asarray(s.sigma11) ** 2
           + 1.5 * np.asarray(s.a3) ** 2),
        np.asarray(e0.sigma11)
        - (0.5 * s.p + np.asarray(s.pi11) + 1.5 * np.asarray(s.sigma11) ** 2
           + 0.5 * np.asarray(s.a3) ** 2 - th2 / 18.0 - s.Theta * s.sigma11),
        np.asarray(e3.sigma11) + np.asarray(e3.Theta) / 3.0 - 3.0 * s.a3 * s.sigma11,
        np.asarray(e0.Theta) + th2 / 3.0 + 6.0 * np.asarray(s.sigma11) ** 2 + 3.0 * s.p,
        np.asarray(e1.a3),
        np.asarray(e2.a3),
        np.asarray(e1.sigma11),
        np.asarray(e2.sigma11),
        np.asarray(e1.Theta),
        np.asarray(e2.Theta),
        np.asarray(e1.Omega3),
        np.asarray(e2.Omega3),
        np.asarray(e3.Omega3),
    ]
    return ResidualVector(FW_NAMES, _stack(entries))


# ---------------------------------------------------------------------------
# case A1
# ---------------------------------------------------------------------------


def case_a1_closure(sigma11, a3):
    """Algebraic closure of case A1: (pi11, p, udot3).

    pi11 = 12 sigma11^2 - (4/3) a3^2, p = -3 sigma11^2 + a3^2/3,
    udot3 = -a3.  The groupings are chosen so that pi11 + 4p = 0 holds
    exactly in floating point.
    """
    s2 = np.asarray(sigma11, dtype=float) * sigma11
    w = np.asarray(a3, dtype=float) * a3
    pi11 = 12.0 * s2 - 4.0 * (w / 3.0)
    p = -3.0 * s2 + w / 3.0
    return pi11, p, -np.asarray(a3, dtype=float)


def case_a1_rhs(z, y, F: ScaleFactor):
    """Right-hand side of the case A1 ODE system in (sigma11, a3, Omega3)."""
    Fv = float(F(z))
    if not (Fv > 0.0):
        raise ValueError(f"frame factor must be positive at z={z!r}, got {Fv!r}")
    s11, a3, Om3 = y
    return np.array(
        [a3 * s11 / Fv, (-9.0 * s11 * s11 + 2.0 * a3 * a3) / Fv, a3 * Om3 / Fv]
    )


def case_a1_first_integral(sigma11, a3):
    """Conserved quantity A = (a3^2 - 9 sigma11^2)/sigma11^4 of case A1.

    Undefined on the shearless branch (sigma11 = 0).
    """
    s = np.asarray(sigma11, dtype=float)
    if np.any(s == 0.0):
        raise ValueError("first integral undefined at sigma11 = 0; use the shearless branch")
    return (np.asarray(a3, dtype=float) ** 2 - 9.0 * s * s) / s**4


@dataclass(frozen=True)
class CaseA1State:
    """Case A1 point: free (sigma11, a3, Omega3) plus the algebraic outputs."""

    sigma11: float
    a3: float
    Omega3: float = 0.0

    def closure(self):
        return case_a1_closure(self.sigma11, self.a3)

    def special_state(self) -> SpecialState:
        pi11, p, udot3 = self.closure()
        return SpecialState(
            p=p, pi11=pi11, Theta=6.0 * np.asarray(self.sigma11),
            sigma11=self.sigma11, udot3=udot3, a3=self.a3, Omega3=self.Omega3,
        )


def _a1_e3_closure(sigma11, a3, Omega3):
    """e_3 of every case A1 field via the ODE system and the chain rule."""
    s11 = np.asarray(sigma11, dtype=float)
    a = np.asarray(a3, dtype=float)
    e3s = a * s11
    e3a = -9.0 * s11 * s11 + 2.0 * a * a
    e3om = a * np.asarray(Omega3, dtype=float)
    e3pi = 24.0 * s11 * e3s - (8.0 / 3.0) * a * e3a
    e3p = -6.0 * s11 * e3s + (2.0 / 3.0) * a * e3a
    return SpecialState(
        p=e3p, pi11=e3pi, Theta=6.0 * e3s, sigma11=e3s,
        udot3=-e3a, a3=e3a, Omega3=e3om,
    )


def a1_trajectory_jet(z, sigma11, a3, Omega3) -> SpecialJet:
    """Jet for case A1 data with e_3 entries supplied by the ODE closure.

    Valid for any (sigma11, a3, Omega3) arrays, e.g. an RK4 trajectory.
    """
    value = CaseA1State(sigma11, a3, Omega3).special_state()
    return SpecialJet.build(z, value, e3=_a1_e3_closure(sigma11, a3, Omega3))


@dataclass(frozen=True)
class CaseA1ClosedForm:
    """The (solA1) family: sigma11 free, a3 = sign sqrt(A sigma11^2 + 9) sigma11,
    F = a3 sigma11 / sigma11', Omega3 = B exp(int a3/F dz)."""

    profile: ScalarProfile
    A: float
    sign: int = 1
    B: float = 0.0

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def radicand(self, z):
        return self.A * np.asarray(self.profile.value(z), dtype=float) ** 2 + 9.0

    def clip_grid(self, grid: Grid) -> tuple[Grid, str | None]:
        """Restrict the grid to the subinterval where the family exists.

        The radicand must stay nonnegative and sigma11' nonzero; following
        the pole-handling rule the clipped interval stops POLE_MARGIN before
        a detected sign change.
        """
        zs = grid.points()
        rad = self.radicand(zs)
        slope = np.asarray(self.profile.slope(zs), dtype=float)
        bad = (rad <= 0.0) | (slope == 0.0)
        if not np.any(bad):
            return grid, None
        j = int(np.argmax(bad))
        if j == 0:
            raise ValueError("closed form undefined at the interval start")
        lo, hi = zs[j - 1], zs[j]
        for _ in range(80):  # bisect the radicand sign change
            mid = 0.5 * (lo + hi)
            if self.radicand(mid) > 0.0 and self.profile.slope(mid) != 0.0:
                lo = mid
            else:
                hi = mid
        z_clip = lo - POLE_MARGIN
        if z_clip <= grid.z0:
            raise ValueError("valid subinterval is empty after clipping")
        note = (
            f"family boundary near z={hi:.6g}; interval clipped to "
            f"[{grid.z0:.6g}, {z_clip:.6g}]"
        )
        return Grid(grid.z0, z_clip, grid.N), note

    def evaluate(self, grid: Grid) -> dict:
        """Closed-form fields and their analytic z-derivatives on the grid.

        Raises on a negative radicand or a vanishing sigma11'; use
        clip_grid first for intervals that cross the family boundary.
        Omega3 integrates a3/F = sigma11'/sigma11 (an identity of the
        family) by refined cumulative Simpson, anchored at the left
        endpoint where Omega3 = B.
        """
        zs = grid.points()
        s11 = np.asarray(self.profile.value(zs), dtype=float)
        ds11 = np.asarray(self.profile.slope(zs), dtype=float)
        rad = self.radicand(zs)
        if np.any(rad < 0.0):
            raise ValueError("negative radicand: A sigma11^2 + 9 < 0 on the grid")
        if np.any(ds11 == 0.0):
            raise ValueError("sigma11 must be nonconstant with nonzero slope")
        root = np.sqrt(rad)
        a3 = self.sign * root * s11
        da3 = self.sign * ds11 * (2.0 * self.A * s11 * s11 + 9.0) / root
        F = a3 * s11 / ds11
        pi11, p, udot3 = case_a1_closure(s11, a3)
        dp = -6.0 * s11 * ds11 + (2.0 / 3.0) * a3 * da3
        dpi = 24.0 * s11 * ds11 - (8.0 / 3.0) * a3 * da3
        if self.B == 0.0:
            Omega3 = np.zeros_like(zs)
        else:
            def integrand(z):
                # a3/F reduces to sigma11'/sigma11 for this family
                return np.asarray(self.profile.slope(z), dtype=float) / np.asarray(
                    self.profile.value(z), dtype=float
                )

            Omega3 = self.B * np.exp(cumulative_integral_refined(integrand, grid))
        dOmega3 = (ds11 / s11) * Omega3
        return {
            "z": zs,
            "sigma11": s11, "d_sigma11": ds11,
            "a3": a3, "d_a3": da3,
            "F": F,
            "Omega3": Omega3, "d_Omega3": dOmega3,
            "p": p, "d_p": dp,
            "pi11": pi11, "d_pi11": dpi,
            "udot3": udot3, "d_udot3": -da3,
            "Theta": 6.0 * s11, "d_Theta": 6.0 * ds11,
            "orientation_flipped": bool(np.any(F < 0.0)),
        }

    def jet(self, grid: Grid, perturb_a3: float = 0.0) -> tuple[SpecialJet, dict]:
        """Analytic jet of the family on the grid (e_3 = F d/dz applied to
        the closed forms).  perturb_a3 shifts the a3 value column only,
        leaving every derivative entry and derived field untouched, which is
        the verification-sensitivity knob."""
        f = self.evaluate(grid)
        a3_val = f["a3"] + perturb_a3
        value = SpecialState(
            p=f["p"], pi11=f["pi11"], Theta=f["Theta"], sigma11=f["sigma11"],
            udot3=f["udot3"], a3=a3_val, Omega3=f["Omega3"],
        )
        F = f["F"]
        e3 = SpecialState(
            p=F * f["d_p"], pi11=F * f["d_pi11"], Theta=F * f["d_Theta"],
            sigma11=F * f["d_sigma11"], udot3=F * f["d_udot3"],
            a3=F * f["d_a3"], Omega3=F * f["d_Omega3"],
        )
        return SpecialJet.build(f["z"], value, e3=e3), f


def case_a1_closed_form(profile: ScalarProfile, A: float, sign: int, B: float,
                        grid: Grid) -> dict:
    """Evaluate the (solA1) family on a grid: (a3, F, Omega3) plus closures."""
    return CaseA1ClosedForm(profile, A, sign, B).evaluate(grid)


# ---------------------------------------------------------------------------
# shearless / case A2 branches
# ---------------------------------------------------------------------------


def _den_on_fine_grid(F: ScaleFactor, coeff: float, const: float, grid: Grid,
                      tol: float = 1e-10):
    """Denominator int_{z0}^{z} (coeff/F) dz' + const on a refined grid.

    Returns (fine_grid, den_fine, stride) with original nodes at ::stride.
    """
    factor = 2 if grid.N % 2 else 1
    g = grid if factor == 1 else grid.refined(2)
    vals = quadrature(coeff / np.asarray(F(g.points()), dtype=float), g)
    for _ in range(12):
        g2 = g.refined(2)
        vals2 = quadrature(coeff / np.asarray(F(g2.points()), dtype=float), g2)
        done = bool(np.max(np.abs(vals2[::2] - vals)) < tol)
        g, vals, factor = g2, vals2, factor * 2
        if done:
            return g, vals + const, factor
    raise RuntimeError("denominator quadrature did not converge")


def _clip_at_sign_change(grid: Grid, fine: Grid, den_fine: np.ndarray):
    """Detect a denominator sign change and clip the grid ahead of it."""
    sign0 = np.sign(den_fine[0])
    if sign0 == 0.0:
        raise ValueError("denominator vanishes at the interval start")
    flip = np.nonzero(np.sign(den_fine) != sign0)[0]
    if flip.size == 0:
        return grid, None
    # locate the zero inside the bracketing cell by linear interpolation
    j = flip[0]
    zl, zr = fine.points()[j - 1], fine.points()[j]
    dl, dr = den_fine[j - 1], den_fine[j]
    z_pole = zl - dl * (zr - zl) / (dr - dl)
    z_clip = z_pole - POLE_MARGIN
    if z_clip <= grid.z0:
        raise ValueError("denominator pole at the interval start")
    note = f"denominator sign change near z={z_pole:.6g}; clipped to [{grid.z0:.6g}, {z_clip:.6g}]"
    return Grid(grid.z0, z_clip, grid.N), note


def shearless_a3(F: ScaleFactor, C: float, z: float) -> float:
    """a3(z) = 1 / (int_0^z (-2/F) dz' + C), the shearless case A1 branch."""
    if z == 0.0:
        den = C
    else:
        span = Grid(min(0.0, z), max(0.0, z), 64)
        _, den_arr, _ = _den_on_fine_grid(F, -2.0, C, span)
        # for z < 0 the integral from 0 down to z is minus the cumulative one
        den = den_arr[-1] if z > 0.0 else C - (den_arr[-1] - C)
    if abs(den) < 1e-13:
        raise ValueError(f"blow-up point: denominator vanishes at z={z!r}")
    return 1.0 / den


@dataclass(frozen=True)
class BranchFields:
    """Closed-form fields of a shearless branch on a grid."""

    grid: Grid
    z: np.ndarray
    a3: np.ndarray
    den: np.ndarray
    udot3: np.ndarray
    p: np.ndarray
    pi11: np.ndarray
    Omega3: np.ndarray
    e3_a3: np.ndarray
    note: str | None


def _branch_fields(F: ScaleFactor, coeff: float, const: float, B: float,
                   grid: Grid, udot3_of_a3, p_of_a3) -> BranchFields:
    fine, den_fine, stride = _den_on_fine_grid(F, coeff, const, grid)
    clipped, note = _clip_at_sign_change(grid, fine, den_fine)
    if note is not None:
        fine, den_fine, stride = _den_on_fine_grid(F, coeff, const, clipped)
    a3_fine = 1.0 / den_fine
    udot3_fine = udot3_of_a3(a3_fine)
    # Omega3 solves e_3(Omega3) = -udot3 Omega3 on every branch
    omega_integrand = -udot3_fine / np.asarray(F(fine.points()), dtype=float)
    Omega3_fine = B * np.exp(quadrature(omega_integrand, fine))
    sl = slice(None, None, stride)
    a3 = a3_fine[sl]
    den = den_fine[sl]
    p = p_of_a3(a3)
    return BranchFields(
        grid=clipped,
        z=fine.points()[sl],
        a3=a3,
        den=den,
        udot3=udot3_of_a3(a3),
        p=p,
        pi11=-4.0 * p,
        Omega3=Omega3_fine[sl],
        e3_a3=-coeff / (den * den),
        note=note,
    )


def case_a2_branch_a3(F: ScaleFactor, branch: int, const: float, z: float) -> float:
    """Case A2 closed-form a3 on branch 1 (udot3 = -a3) or 2 (udot3 = a3/2).

    Branch 1 delegates to the shearless case A1 form with constant C;
    branch 2 gives a3 = 1/(int -3/(2F) dz + D).
    """
    if branch == 1:
        return shearless_a3(F, const, z)
    if branch != 2:
        raise ValueError("branch must be 1 or 2")
    if z == 0.0:
        den = const
    else:
        span = Grid(min(0.0, z), max(0.0, z), 64)
        _, den_arr, _ = _den_on_fine_grid(F, -1.5, const, span)
        den = den_arr[-1] if z > 0.0 else const - (den_arr[-1] - const)
    if abs(den) < 1e-13:
        raise ValueError(f"blow-up point: denominator vanishes at z={z!r}")
    return 1.0 / den


def shearless_branch_fields(F: ScaleFactor, C: float, B: float, grid: Grid) -> BranchFields:
    """Shearless case A1 family (= case A2 branch 1) on a grid."""
    return _branch_fields(
        F, -2.0, C, B, grid,
        udot3_of_a3=lambda a3: -a3,
        p_of_a3=lambda a3: a3 * a3 / 3.0,
    )


def a2_branch2_fields(F: ScaleFactor, D: float, B: float, grid: Grid) -> BranchFields:
    """Case A2 branch udot3 = a3/2 on a grid; p vanishes identically here."""
    return _branch_fields(
        F, -1.5, D, B, grid,
        udot3_of_a3=lambda a3: 0.5 * a3,
        p_of_a3=lambda a3: np.zeros_like(a3),
    )


def branch_jet(fields: BranchFields, branch: int) -> SpecialJet:
    """Analytic jet of a branch family (profile derivatives, not closures)."""
    f = fields
    e3a = f.e3_a3
    if branch == 1:
        value = SpecialState(p=f.p, pi11=f.pi11, sigma11=0.0 * f.a3, Theta=0.0 * f.a3,
                             udot3=f.udot3, a3=f.a3, Omega3=f.Omega3)
        e3 = SpecialState(p=(2.0 / 3.0) * f.a3 * e3a, pi11=-(8.0 / 3.0) * f.a3 * e3a,
                          udot3=-e3a, a3=e3a, Omega3=-f.udot3 * f.Omega3)
    elif branch == 2:
        value = SpecialState(p=f.p, pi11=f.pi11, sigma11=0.0 * f.a3, Theta=0.0 * f.a3,
                             udot3=f.udot3, a3=f.a3, Omega3=f.Omega3)
        e3 = SpecialState(udot3=0.5 * e3a, a3=e3a, Omega3=-f.udot3 * f.Omega3)
    else:
        raise ValueError("branch must be 1 or 2")
    return SpecialJet.build(f.z, value, e3=e3)


# ---------------------------------------------------------------------------
# case A2 general system
# ---------------------------------------------------------------------------


def case_a2_pi11(p, udot3, a3):
    """Anisotropic pressure relation pi11 = p/2 - a3^2/2 + a3 udot3."""
    a = np.asarray(a3, dtype=float)
    return 0.5 * np.asarray(p, dtype=float) - 0.5 * a * a + a * udot3


def case_a2_rhs(z, y, F: ScaleFactor):
    """Case A2 ODE right-hand side in (p, udot3, a3, Omega3) plus algebraic pi11."""
    Fv = float(F(z))
    if not (Fv > 0.0):
        raise ValueError(f"frame factor must be positive at z={z!r}, got {Fv!r}")
    p, u3, a3, Om3 = y
    dy = np.array(
        [
            (-u3 * p - u3 * a3 * a3 / 3.0 + 2.0 * a3 * u3 * u3 / 3.0) / Fv,
            (3.0 * p - u3 * u3 + 2.0 * a3 * u3) / Fv,
            (1.5 * p + 1.5 * a3 * a3) / Fv,
            -u3 * Om3 / Fv,
        ]
    )
    return dy, case_a2_pi11(p, u3, a3)


@dataclass(frozen=True)
class CaseA2State:
    """Case A2 point: free (p, udot3, a3, Omega3) with algebraic pi11."""

    p: float
    udot3: float
    a3: float
    Omega3: float = 0.0

    @property
    def pi11(self):
        return case_a2_pi11(self.p, self.udot3, self.a3)

    def special_state(self) -> SpecialState:
        return SpecialState(
            p=self.p, pi11=self.pi11, udot3=self.udot3, a3=self.a3,
            Omega3=self.Omega3,
        )


def _a2_e3_closure(p, udot3, a3, Omega3):
    p = np.asarray(p, dtype=float)
    u3 = np.asarray(udot3, dtype=float)
    a = np.asarray(a3, dtype=float)
    e3p = -u3 * p - u3 * a * a / 3.0 + 2.0 * a * u3 * u3 / 3.0
    e3u = 3.0 * p - u3 * u3 + 2.0 * a * u3
    e3a = 1.5 * p + 1.5 * a * a
    e3pi = 0.5 * e3p - a * e3a + e3a * u3 + a * e3u
    return SpecialState(
        p=e3p, pi11=e3pi, udot3=e3u, a3=e3a, Omega3=-u3 * np.asarray(Omega3),
    )


def a2_trajectory_jet(z, p, udot3, a3, Omega3) -> SpecialJet:
    """Jet for case A2 data with e_3 entries supplied by the ODE closure."""
    value = CaseA2State(p, udot3, a3, Omega3).special_state()
    return SpecialJet.build(z, value, e3=_a2_e3_closure(p, udot3, a3, Omega3))


# ---------------------------------------------------------------------------
# embedding into the full 1+3 system
# ---------------------------------------------------------------------------


def _bcast(x, shape):
    return np.broadcast_to(np.asarray(x, dtype=float), shape)


def _vec(shape, x1, x2, x3):
    return np.stack([_bcast(x1, shape), _bcast(x2, shape), _bcast(x3, shape)], axis=-1)


def _symmat(shape, m11, m22, m33, m12, m13, m23):
    r1 = np.stack([_bcast(m11, shape), _bcast(m12, shape), _bcast(m13, shape)], axis=-1)
    r2 = np.stack([_bcast(m12, shape), _bcast(m22, shape), _bcast(m23, shape)], axis=-1)
    r3 = np.stack([_bcast(m13, shape), _bcast(m23, shape), _bcast(m33, shape)], axis=-1)
    return np.stack([r1, r2, r3], axis=-2)


def embed_special(jet: SpecialJet) -> JetArrays:
    """Embed a special jet into the full 1+3 variable set.

    Conformally flat elastic data: E = H = 0, q = 0, Lambda = 0 and
    mu = 3p (vanishing NP curvature scalar); pi = diag(pi11, pi11, -2 pi11).
    This is the input to the master cross-check against the general system.
    """
    fields = [getattr(jet.value, f.name) for f in dataclasses.fields(SpecialState)]
    shape = np.broadcast_shapes(*(np.shape(np.asarray(x)) for x in fields))
    ja = JetArrays(shape)

    def fill(dst_value, dst_deriv, take):
        sts = (jet.value,) + jet.deriv
        arrays = [take(st) for st in sts]
        dst_value[...] = arrays[0]
        ncomp = dst_value.ndim - len(shape)
        for a in range(4):
            idx = (Ellipsis, a) + (slice(None),) * ncomp
            dst_deriv[idx] = arrays[a + 1]

    def pi_of(st):
        return _symmat(shape, st.pi11, st.pi11, -2.0 * np.asarray(st.pi11), 0.0, 0.0, 0.0)

    def sigma_of(st):
        return _symmat(shape, st.sigma11, st.sigma22, st.sigma33,
                       st.sigma12, st.sigma13, st.sigma23)

    def n_of(st):
        return _symmat(shape, st.n11, st.n22, st.n33, st.n12, st.n13, st.n23)

    fill(ja.mu, ja.dmu, lambda st: _bcast(3.0 * np.asarray(st.p), shape))
    fill(ja.p, ja.dp, lambda st: _bcast(st.p, shape))
    fill(ja.Theta, ja.dTheta, lambda st: _bcast(st.Theta, shape))
    fill(ja.udot, ja.dudot, lambda st: _vec(shape, st.udot1, st.udot2, st.udot3))
    fill(ja.omega, ja.domega, lambda st: _vec(shape, st.omega1, st.omega2, st.omega3))
    fill(ja.Omega, ja.dOmega, lambda st: _vec(shape, st.Omega1, st.Omega2, st.Omega3))
    fill(ja.a, ja.da, lambda st: _vec(shape, st.a1, st.a2, st.a3))
    fill(ja.pi, ja.dpi, pi_of)
    fill(ja.sigma, ja.dsigma, sigma_of)
    fill(ja.n, ja.dn, n_of)
    # q, E, H, Lam stay zero
    return ja
