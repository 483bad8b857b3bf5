"""Residual evaluators for the general 1+3 orthonormal-frame system.

Evolution equations are checked as residuals, provided e_0-derivative minus
equation right-hand side, so any candidate solution can be verified without
time integration.  Constraint equations are evaluated directly (they must
vanish).  All evaluators accept a batch of jets through ``JetArrays``:
scalar fields have shape S, vectors S+(3,), tensors S+(3,3), and every
derivative array carries one extra frame axis of length 4 in front of the
component axes, d*[..., a] = e_a applied to the field.  S may be () for a
single jet or (N,) for a grid of them.

Residual norms are max-abs: a single violated component must not be
averaged away.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields as dataclass_fields
from typing import NamedTuple

import numpy as np

from .core import (
    EPS,
    ConnectionState,
    DerivativeProvider,
    StateJet,
    SymThree,
    ThreeVector,
    TracefreeSymThree,
    spatial_commutation_compose,
)

__all__ = [
    "JetArrays",
    "ResidualReport",
    "EfeResiduals",
    "JacobiResiduals",
    "BianchiResiduals",
    "b_tensor",
    "curly_S",
    "curly_R",
    "efe_residuals",
    "jacobi_residuals",
    "bianchi_residuals",
    "residual_report",
    "commutator_structure",
    "commutator_residual",
]

log = logging.getLogger(__name__)

ID3 = np.eye(3)

_SCALARS = ("mu", "p", "Lam", "Theta")
_VECTORS = ("q", "udot", "omega", "Omega", "a")
_TENSORS = ("pi", "sigma", "n", "E", "H")
# Lam is constant; it has no derivative slot.
_DERIV_FIELDS = tuple(f for f in _SCALARS + _VECTORS + _TENSORS if f != "Lam")


class JetArrays:
    """Struct-of-arrays form of one or many state jets.

    Built once per evaluation sweep; treat instances as frozen after
    assembly.
    """

    def __init__(self, shape: tuple[int, ...] = ()):
        self.shape = tuple(shape)
        for name in _SCALARS:
            setattr(self, name, np.zeros(shape))
        for name in _VECTORS:
            setattr(self, name, np.zeros(shape + (3,)))
        for name in _TENSORS:
            setattr(self, name, np.zeros(shape + (3, 3)))
        for name in _DERIV_FIELDS:
            base = getattr(self, name)
            d = np.zeros(self.shape + (4,) + base.shape[len(shape):])
            setattr(self, "d" + name, d)

    @classmethod
    def from_jet(cls, jet: StateJet) -> "JetArrays":
        jet.require_complete()
        ja = cls(())
        states = (jet.value,) + tuple(jet.deriv)
        for slot, st in enumerate(states):
            m, c, w = st.matter, st.connection, st.weyl
            values = {
                "mu": m.mu,
                "p": m.p,
                "Theta": c.Theta,
                "q": m.q.as_array(),
                "udot": c.udot.as_array(),
                "omega": c.omega.as_array(),
                "Omega": c.Omega.as_array(),
                "a": c.a.as_array(),
                "pi": m.pi.as_matrix(),
                "sigma": c.sigma.as_matrix(),
                "n": c.n.as_matrix(),
                "E": w.E.as_matrix(),
                "H": w.H.as_matrix(),
            }
            if slot == 0:
                for name, val in values.items():
                    getattr(ja, name)[...] = val
                ja.Lam[...] = m.Lam
            else:
                for name, val in values.items():
                    getattr(ja, "d" + name)[slot - 1] = val
        return ja

    @classmethod
    def from_jets(cls, jets) -> "JetArrays":
        singles = [cls.from_jet(j) for j in jets]
        ja = cls((len(singles),))
        for name in _SCALARS + _VECTORS + _TENSORS:
            getattr(ja, name)[...] = np.stack([getattr(s, name) for s in singles])
        for name in _DERIV_FIELDS:
            getattr(ja, "d" + name)[...] = np.stack(
                [getattr(s, "d" + name) for s in singles]
            )
        return ja


def _as_arrays(jet) -> JetArrays:
    if isinstance(jet, JetArrays):
        return jet
    if isinstance(jet, StateJet):
        return JetArrays.from_jet(jet)
    raise TypeError(f"expected StateJet or JetArrays, got {type(jet).__name__}")


def _sym(T):
    return 0.5 * (T + np.swapaxes(T, -1, -2))


def _outer(u, v):
    return np.einsum("...a,...b->...ab", u, v)


def _dot(u, v):
    return np.einsum("...a,...a->...", u, v)


def _ddot(A, B):
    return np.einsum("...ab,...ab->...", A, B)


def _matvec(A, v):
    return np.einsum("...ab,...b->...a", A, v)


def _tr(A):
    return np.einsum("...aa->...", A)


def _eps_vec(M):
    # eps_{abc} M_{bc} contracted into a vector
    return np.einsum("abc,...bc->...a", EPS, M)


def _eps_sym(inner):
    # inner[..., g, b, d] -> sym over (a, b) of eps_{gda} inner_{gbd}
    return _sym(np.einsum("gda,...gbd->...ab", EPS, inner))


# ---------------------------------------------------------------------------
# auxiliary curvature quantities (field5)-(field7)
# ---------------------------------------------------------------------------


def _b_tensor_arr(n):
    return 2.0 * np.einsum("...ag,...gb->...ab", n, n) - _tr(n)[..., None, None] * n


def b_tensor(n: SymThree) -> SymThree:
    """b_ab = 2 n_ag n^g_b - n^g_g n_ab."""
    return SymThree.from_matrix(_b_tensor_arr(n.as_matrix()))


def _curly_S_arr(ja: JetArrays):
    grad_a = ja.da[..., 1:, :]          # e_alpha(a_beta)
    grad_n = ja.dn[..., 1:, :, :]       # e_gamma(n_{beta delta})
    b = _b_tensor_arr(ja.n)
    div_a = _tr(grad_a)
    inner = grad_n - 2.0 * np.einsum("...g,...bd->...gbd", ja.a, ja.n)
    S = (
        _sym(grad_a)
        + b
        - (div_a + _tr(b))[..., None, None] * ID3 / 3.0
        - _eps_sym(inner)
    )
    # the assembled trace is an index-convention self-check; project it away
    pre_trace = _tr(S)
    S = S - pre_trace[..., None, None] * ID3 / 3.0
    return S, pre_trace


def curly_S(jet) -> TracefreeSymThree:
    """Trace-free 3-curvature source of the shear evolution equation."""
    S, pre_trace = _curly_S_arr(_as_arrays(jet))
    worst = float(np.max(np.abs(pre_trace))) if pre_trace.size else float(pre_trace)
    if worst > 1e-14 * max(1.0, float(np.max(np.abs(S))) if S.size else 0.0):
        log.debug("curly_S pre-projection trace %.3e", worst)
    if S.ndim == 2:
        return TracefreeSymThree.project(SymThree.from_matrix(S))
    raise ValueError("curly_S returns a typed tensor for single jets only")


def _curly_R_arr(ja: JetArrays):
    grad_a = ja.da[..., 1:, :]
    b = _b_tensor_arr(ja.n)
    return 2.0 * (2.0 * _tr(grad_a) - 3.0 * _dot(ja.a, ja.a)) - 0.5 * _tr(b)


def curly_R(jet) -> float:
    """Spatial curvature scalar *R = 2(2 e_a - 3 a_a)(a^a) - b^a_a / 2."""
    return float(_curly_R_arr(_as_arrays(jet)))


# ---------------------------------------------------------------------------
# Einstein field equations (field1)-(field4)
# ---------------------------------------------------------------------------


def _efe_arr(ja: JetArrays):
    sigma2 = 0.5 * _ddot(ja.sigma, ja.sigma)
    omega2 = _dot(ja.omega, ja.omega)
    grad_udot = ja.dudot[..., 1:, :]    # e_alpha(udot_beta)

    # field1: Raychaudhuri
    rhs1 = (
        -ja.Theta**2 / 3.0
        + _tr(grad_udot)
        + _dot(ja.udot, ja.udot)
        - 2.0 * _dot(ja.a, ja.udot)
        - 2.0 * sigma2
        + 2.0 * omega2
        - 0.5 * (ja.mu + 3.0 * ja.p)
        + ja.Lam
    )
    res_theta = ja.dTheta[..., 0] - rhs1

    # field2: shear evolution.  The sign of the n-udot coupling is pinned by
    # exact-solution nullity: the rigidly rotating flat-space congruence
    # (vacuum, E = H = 0, with n_23 and udot_1 nonzero) satisfies the system
    # only with +eps n udot, so that sign is used here.
    S, _ = _curly_S_arr(ja)
    scalar_part = (
        _tr(grad_udot)
        + _dot(ja.udot, ja.udot)
        + _dot(ja.a, ja.udot)
        + 2.0 * _dot(ja.omega, ja.Omega)
    )
    inner = 2.0 * np.einsum("...g,...bd->...gdb", ja.Omega, ja.sigma) + np.einsum(
        "...bd,...g->...gdb", ja.n, ja.udot
    )
    # inner[..., g, d, b] = 2 Omega_g sigma_bd + n_bd udot_g
    eps_term = _sym(np.einsum("gda,...gdb->...ab", EPS, inner))
    rhs2 = (
        -ja.Theta[..., None, None] * ja.sigma
        + _sym(grad_udot)
        + _outer(ja.udot, ja.udot)
        + _sym(_outer(ja.a, ja.udot))
        + 2.0 * _sym(_outer(ja.omega, ja.Omega))
        + ja.pi
        - S
        - scalar_part[..., None, None] * ID3 / 3.0
        + eps_term
    )
    res_sigma = ja.dsigma[..., 0, :, :] - rhs2

    # field3: Gauss (Friedmann) constraint
    gauss = (
        ja.mu
        - ja.Theta**2 / 3.0
        + sigma2
        - omega2
        - 2.0 * _dot(ja.omega, ja.Omega)
        - 0.5 * _curly_R_arr(ja)
        + ja.Lam
    )

    # field4: Codazzi (momentum) constraint
    dsig = ja.dsigma[..., 1:, :, :]     # e_gamma(sigma_{alpha beta})
    inner4 = (
        ja.domega[..., 1:, :]
        + 2.0 * _outer(ja.udot, ja.omega)
        - _outer(ja.a, ja.omega)
        + np.einsum("...bd,...dg->...bg", ja.n, ja.sigma)
    )
    codazzi = (
        np.einsum("...bab->...a", dsig)
        - 3.0 * _matvec(ja.sigma, ja.a)
        - (2.0 / 3.0) * ja.dTheta[..., 1:]
        + _matvec(ja.n, ja.omega)
        + ja.q
        - _eps_vec(inner4)
    )
    return res_theta, res_sigma, gauss, codazzi


# ---------------------------------------------------------------------------
# Jacobi identities (jacobi1)-(jacobi5)
# ---------------------------------------------------------------------------


def _jacobi_arr(ja: JetArrays):
    womO = ja.omega - ja.Omega
    dwomO = ja.domega - ja.dOmega

    # jacobi1: e_0(a)
    rhs_a = (
        -(ja.dTheta[..., 1:] + (ja.udot + ja.a) * ja.Theta[..., None]) / 3.0
        + 0.5
        * (
            np.einsum("...bab->...a", ja.dsigma[..., 1:, :, :])
            + _matvec(ja.sigma, ja.udot - 2.0 * ja.a)
        )
        - 0.5
        * _eps_vec(
            dwomO[..., 1:, :] + _outer(ja.udot - 2.0 * ja.a, womO)
        )
    )
    res_a = ja.da[..., 0, :] - rhs_a

    # jacobi2: e_0(n)
    grad_w = dwomO[..., 1:, :]          # e_alpha(omega - Omega)_beta
    inner = (
        ja.dsigma[..., 1:, :, :]
        + np.einsum("...g,...bd->...gbd", ja.udot, ja.sigma)
        - 2.0 * np.einsum("...bg,...d->...gbd", ja.n, womO)
    )
    rhs_n = (
        -ja.Theta[..., None, None] * ja.n / 3.0
        - (_sym(grad_w) + _sym(_outer(ja.udot, womO)))
        + 2.0 * _sym(np.einsum("...ag,...bg->...ab", ja.sigma, ja.n))
        + (_tr(grad_w) + _dot(ja.udot, womO))[..., None, None] * ID3
        - _eps_sym(inner)
    )
    res_n = ja.dn[..., 0, :, :] - rhs_n

    # jacobi3: e_0(omega)
    inner3 = 0.5 * (ja.dudot[..., 1:, :] - _outer(ja.a, ja.udot)) + _outer(
        ja.omega, ja.Omega
    )
    rhs_w = (
        -(2.0 / 3.0) * ja.Theta[..., None] * ja.omega
        + _matvec(ja.sigma, ja.omega)
        + 0.5 * _matvec(ja.n, ja.udot)
        - _eps_vec(inner3)
    )
    res_w = ja.domega[..., 0, :] - rhs_w

    # jacobi4: vector constraint
    j4 = (
        np.einsum("...bab->...a", ja.dn[..., 1:, :, :])
        - 2.0 * _matvec(ja.n, ja.a)
        - (2.0 / 3.0) * ja.Theta[..., None] * ja.omega
        - 2.0 * _matvec(ja.sigma, ja.omega)
        + _eps_vec(ja.da[..., 1:, :] + 2.0 * _outer(ja.omega, ja.Omega))
    )

    # jacobi5: scalar constraint
    j5 = _tr(ja.domega[..., 1:, :]) - _dot(ja.udot + 2.0 * ja.a, ja.omega)
    return res_a, res_n, res_w, j4, j5


# ---------------------------------------------------------------------------
# Bianchi identities (bianchi1)-(bianchi5) and the H-divergence identity
# ---------------------------------------------------------------------------


def _bianchi_arr(ja: JetArrays):
    mu_p = ja.mu + ja.p
    trn = _tr(ja.n)

    # bianchi1: energy conservation
    rhs_mu = (
        -mu_p * ja.Theta
        - (_tr(ja.dq[..., 1:, :]) + 2.0 * _dot(ja.udot - ja.a, ja.q))
        - _ddot(ja.sigma, ja.pi)
    )
    res_mu = ja.dmu[..., 0] - rhs_mu

    # bianchi2: momentum conservation
    inner2 = _outer(ja.omega + ja.Omega, ja.q) + np.einsum(
        "...bd,...dg->...bg", ja.n, ja.pi
    )
    rhs_q = (
        -(4.0 / 3.0) * ja.Theta[..., None] * ja.q
        - ja.dp[..., 1:]
        - mu_p[..., None] * ja.udot
        - (
            np.einsum("...bab->...a", ja.dpi[..., 1:, :, :])
            + _matvec(ja.pi, ja.udot - 3.0 * ja.a)
        )
        - _matvec(ja.sigma, ja.q)
        + _eps_vec(inner2)
    )
    res_q = ja.dq[..., 0, :] - rhs_q

    # bianchi3: e_0(E + pi/2)
    X = ja.E - ja.pi / 6.0
    Y = ja.E + 0.5 * ja.pi
    grad_q = ja.dq[..., 1:, :]
    inner3 = (
        ja.dH[..., 1:, :, :]
        + np.einsum("...g,...bd->...gbd", 2.0 * ja.udot - ja.a, ja.H)
        - np.einsum("...g,...bd->...gbd", ja.omega - 2.0 * ja.Omega, Y)
        + 0.5 * np.einsum("...bg,...d->...gbd", ja.n, ja.q)
    )
    rhs_E = (
        -0.5 * mu_p[..., None, None] * ja.sigma
        - ja.Theta[..., None, None] * (ja.E + ja.pi / 6.0)
        - 0.5 * (_sym(grad_q) + _sym(_outer(2.0 * ja.udot + ja.a, ja.q)))
        + 3.0 * _sym(np.einsum("...ag,...bg->...ab", ja.sigma, X))
        + 0.5 * trn[..., None, None] * ja.H
        + (
            0.5 * (_tr(grad_q) + _dot(2.0 * ja.udot + ja.a, ja.q))
            - 3.0 * _ddot(ja.sigma, X)
            + 3.0 * _ddot(ja.n, ja.H)
        )[..., None, None]
        * ID3
        / 3.0
        + _eps_sym(inner3)
        - 3.0 * _sym(np.einsum("...ag,...bg->...ab", ja.n, ja.H))
    )
    res_E = ja.dE[..., 0, :, :] + 0.5 * ja.dpi[..., 0, :, :] - rhs_E

    # bianchi4: e_0(H)
    Z = ja.E - 0.5 * ja.pi
    inner4 = (
        ja.dE[..., 1:, :, :]
        - 0.5 * ja.dpi[..., 1:, :, :]
        - np.einsum("...g,...bd->...gbd", ja.a, Z)
        + 2.0 * np.einsum("...g,...bd->...gbd", ja.udot, ja.E)
        - 0.5 * np.einsum("...bg,...d->...gbd", ja.sigma, ja.q)
        + np.einsum("...g,...bd->...gbd", ja.omega - 2.0 * ja.Omega, ja.H)
    )
    rhs_H = (
        -ja.Theta[..., None, None] * ja.H
        + 3.0 * _sym(np.einsum("...ag,...bg->...ab", ja.sigma, ja.H))
        - 1.5 * _sym(_outer(ja.omega, ja.q))
        - 0.5 * trn[..., None, None] * Z
        + 3.0 * _sym(np.einsum("...ag,...bg->...ab", ja.n, Z))
        - (_ddot(ja.sigma, ja.H) - 0.5 * _dot(ja.omega, ja.q) + _ddot(ja.n, Z))[
            ..., None, None
        ]
        * ID3
        - _eps_sym(inner4)
    )
    res_H = ja.dH[..., 0, :, :] - rhs_H

    # bianchi5: div E constraint
    inner5 = (
        np.einsum("...bd,...dg->...bg", ja.sigma, ja.H)
        + 1.5 * _outer(ja.omega, ja.q)
        + np.einsum("...bd,...dg->...bg", ja.n, Y)
    )
    div_E = (
        np.einsum("...bab->...a", ja.dE[..., 1:, :, :] + 0.5 * ja.dpi[..., 1:, :, :])
        - 3.0 * _matvec(Y, ja.a)
        - ja.dmu[..., 1:] / 3.0
        + ja.Theta[..., None] * ja.q / 3.0
        - 0.5 * _matvec(ja.sigma, ja.q)
        + 3.0 * _matvec(ja.H, ja.omega)
        - _eps_vec(inner5)
    )

    # final identity: div H constraint
    inner6 = (
        0.5 * (ja.dq[..., 1:, :] - _outer(ja.a, ja.q))
        + np.einsum("...bd,...dg->...bg", ja.sigma, Y)
        - np.einsum("...bd,...dg->...bg", ja.n, ja.H)
    )
    div_H = (
        np.einsum("...bab->...a", ja.dH[..., 1:, :, :])
        - 3.0 * _matvec(ja.H, ja.a)
        - mu_p[..., None] * ja.omega
        - 3.0 * _matvec(X, ja.omega)
        - 0.5 * _matvec(ja.n, ja.q)
        + _eps_vec(inner6)
    )
    return res_mu, res_q, res_E, res_H, div_E, div_H


# ---------------------------------------------------------------------------
# public wrappers and the assembled report
# ---------------------------------------------------------------------------


class EfeResiduals(NamedTuple):
    e0_theta: float
    e0_sigma: TracefreeSymThree
    gauss: float
    codazzi: ThreeVector


class JacobiResiduals(NamedTuple):
    e0_a: ThreeVector
    e0_n: SymThree
    e0_omega: ThreeVector
    jacobi4: ThreeVector
    jacobi5: float


class BianchiResiduals(NamedTuple):
    e0_mu: float
    e0_q: ThreeVector
    e0_E_pi: TracefreeSymThree
    e0_H: TracefreeSymThree
    div_E: ThreeVector
    div_H: ThreeVector


def efe_residuals(jet) -> EfeResiduals:
    """Residuals of the Einstein evolution and constraint equations."""
    rt, rs, g, cod = _efe_arr(_as_arrays(jet))
    return EfeResiduals(
        float(rt),
        TracefreeSymThree.project(SymThree.from_matrix(_sym(rs))),
        float(g),
        ThreeVector.from_array(cod),
    )


def jacobi_residuals(jet) -> JacobiResiduals:
    ra, rn, rw, j4, j5 = _jacobi_arr(_as_arrays(jet))
    return JacobiResiduals(
        ThreeVector.from_array(ra),
        SymThree.from_matrix(_sym(rn)),
        ThreeVector.from_array(rw),
        ThreeVector.from_array(j4),
        float(j5),
    )


def bianchi_residuals(jet) -> BianchiResiduals:
    rm, rq, rE, rH, dE, dH = _bianchi_arr(_as_arrays(jet))
    return BianchiResiduals(
        float(rm),
        ThreeVector.from_array(rq),
        TracefreeSymThree.project(SymThree.from_matrix(_sym(rE))),
        TracefreeSymThree.project(SymThree.from_matrix(_sym(rH))),
        ThreeVector.from_array(dE),
        ThreeVector.from_array(dH),
    )


@dataclass
class ResidualReport:
    """All residual blocks of the general system, possibly batched.

    Block arrays keep their tensor character; norms are max-abs over every
    component (and over the batch).
    """

    e0_theta: np.ndarray
    e0_sigma: np.ndarray
    gauss: np.ndarray
    codazzi: np.ndarray
    e0_a: np.ndarray
    e0_n: np.ndarray
    e0_omega: np.ndarray
    jacobi4: np.ndarray
    jacobi5: np.ndarray
    e0_mu: np.ndarray
    e0_q: np.ndarray
    e0_E_pi: np.ndarray
    e0_H: np.ndarray
    div_E: np.ndarray
    div_H: np.ndarray

    BLOCK_LABELS = {
        "e0_theta": "field1",
        "e0_sigma": "field2",
        "gauss": "field3",
        "codazzi": "field4",
        "e0_a": "jacobi1",
        "e0_n": "jacobi2",
        "e0_omega": "jacobi3",
        "jacobi4": "jacobi4",
        "jacobi5": "jacobi5",
        "e0_mu": "bianchi1",
        "e0_q": "bianchi2",
        "e0_E_pi": "bianchi3",
        "e0_H": "bianchi4",
        "div_E": "bianchi5",
        "div_H": "divH",
    }

    def __post_init__(self):
        for f in dataclass_fields(self):
            arr = np.asarray(getattr(self, f.name))
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"non-finite residual in block {f.name}")
            setattr(self, f.name, arr)

    def blocks(self):
        for f in dataclass_fields(self):
            yield self.BLOCK_LABELS[f.name], getattr(self, f.name)

    def block_norms(self) -> dict[str, float]:
        return {label: float(np.max(np.abs(arr))) for label, arr in self.blocks()}

    def max_residual(self) -> float:
        return max(self.block_norms().values())

    def per_point_max(self) -> np.ndarray:
        """Max-abs residual per batch entry (batched reports only)."""
        batch = self.e0_theta.shape
        if batch == ():
            return np.asarray(self.max_residual())
        out = np.zeros(batch)
        for _, arr in self.blocks():
            flat = arr.reshape(batch + (-1,))
            out = np.maximum(out, np.max(np.abs(flat), axis=-1))
        return out


def residual_report(jet) -> ResidualReport:
    """Evaluate every block of the general system on a jet or jet batch."""
    ja = _as_arrays(jet)
    rt, rs, g, cod = _efe_arr(ja)
    ra, rn, rw, j4, j5 = _jacobi_arr(ja)
    rm, rq, rE, rH, dE, dH = _bianchi_arr(ja)
    return ResidualReport(rt, rs, g, cod, ra, rn, rw, j4, j5, rm, rq, rE, rH, dE, dH)


# ---------------------------------------------------------------------------
# commutators
# ---------------------------------------------------------------------------


def commutator_structure(c: ConnectionState) -> np.ndarray:
    """Structure functions gamma^c_{ab} of the frame, [e_a, e_b] = gamma^c_{ab} e_c.

    Returned as gamma[c, a, b] with a, b, c in 0..3, antisymmetric in (a, b).
    """
    gamma = np.zeros((4, 4, 4))
    udot = c.udot.as_array()
    womO = c.omega.as_array() - c.Omega.as_array()
    sigma = c.sigma.as_matrix()
    spatial = spatial_commutation_compose(c.a, c.n)

    # [e_0, e_alpha] block
    gamma[0, 0, 1:] = udot
    coeff = c.Theta * ID3 / 3.0 + sigma + np.einsum("big,g->bi", EPS, womO)
    gamma[1:, 0, 1:] = -coeff
    gamma[:, 1:, 0] = -gamma[:, 0, 1:]

    # [e_alpha, e_beta] block
    gamma[0, 1:, 1:] = -2.0 * np.einsum("ibg,g->ib", EPS, c.omega.as_array())
    gamma[1:, 1:, 1:] = spatial
    return gamma


def commutator_residual(
    provider: DerivativeProvider, field: str, a: int, b: int, point: float
) -> float:
    """e_a(e_b f) - e_b(e_a f) - gamma^c_{ab} e_c(f); zero for consistent data."""
    gamma = commutator_structure(provider.connection(point))
    mixed = provider.second_derivative(point, field, a, b) - provider.second_derivative(
        point, field, b, a
    )
    first = np.array([provider.derivative(point, field, c) for c in range(4)])
    return float(mixed - gamma[:, a, b] @ first)
