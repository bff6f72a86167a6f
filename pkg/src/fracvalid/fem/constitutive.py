"""Plane-strain finite-strain J2 plasticity with power-law isotropic hardening.

Formulation: multiplicative elastoplasticity based on logarithmic elastic
strains.  The stored state is the inverse plastic metric G = Cp^-1 (plus its
out-of-plane component) and the accumulated plastic strain.  Each update
forms the elastic trial b_e = F G F^T, moves to principal logarithmic
strains, performs a standard small-strain radial return with the hardening
curve sigma_Y (1 + alpha/eps_Y)^N, and maps back with the exponential of the
corrected strains.  Hencky hyperelasticity (kappa, mu on log strains) closes
the model.

Stress output is the first Piola-Kirchhoff tensor P = tau F^-T; the
consistent tangent dP/dF is assembled analytically through the chain
principal-return -> eigenprojections -> b_e -> F, so Newton converges
quadratically and the tangent can be verified against finite differences
of the stress update.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ComputationError
from ..materials import Material, flow_stress, hardening_modulus

_EYE2 = np.eye(2)


class ElementInversion(ComputationError):
    """Deformation state with non-positive volume ratio or collapsed b_e."""


@dataclass
class PlasticState:
    """Per integration point history (arrays over all points)."""

    G: np.ndarray  # (n, 2, 2) inverse plastic metric, in plane
    g33: np.ndarray  # (n,) out-of-plane component
    alpha: np.ndarray  # (n,) accumulated plastic strain

    def copy(self) -> "PlasticState":
        return PlasticState(self.G.copy(), self.g33.copy(), self.alpha.copy())


def init_state(n: int) -> PlasticState:
    return PlasticState(
        G=np.broadcast_to(_EYE2, (n, 2, 2)).copy(),
        g33=np.ones(n),
        alpha=np.zeros(n),
    )


def _eig2_sym(b: np.ndarray):
    """Closed-form eigen decomposition of symmetric 2x2 tensors.

    Returns eigenvalues (e1 >= e2) and the projection M1 onto the first
    eigenvector (M2 = I - M1).
    """
    b11, b22, b12 = b[:, 0, 0], b[:, 1, 1], b[:, 0, 1]
    m = 0.5 * (b11 + b22)
    d = np.sqrt(np.maximum(0.25 * (b11 - b22) ** 2 + b12**2, 0.0))
    e1 = m + d
    e2 = m - d
    # eigenvector of e1: pick the better-conditioned of the two candidate forms
    v1 = np.stack([b12, e1 - b11], axis=1)
    v2 = np.stack([e1 - b22, b12], axis=1)
    n1 = np.einsum("ni,ni->n", v1, v1)
    n2 = np.einsum("ni,ni->n", v2, v2)
    v = np.where((n1 >= n2)[:, None], v1, v2)
    norm = np.sqrt(np.einsum("ni,ni->n", v, v))
    degenerate = norm < 1e-14 * np.maximum(e1, 1.0)
    v = np.where(degenerate[:, None], np.array([1.0, 0.0]), v / np.where(norm == 0, 1.0, norm)[:, None])
    M1 = np.einsum("ni,nj->nij", v, v)
    return e1, e2, M1


class PlaneStrainJ2:
    """Vectorised constitutive driver for all integration points at once."""

    def __init__(self, material: Material, newton_tol: float = 1e-11, max_iter: int = 50):
        self.mat = material
        self.mu = material.mu
        self.kappa = material.kappa
        self.newton_tol = newton_tol * material.sigma_Y
        self.max_iter = max_iter

    # -------------------------------------------------------------- core
    def evaluate(self, F: np.ndarray, state: PlasticState, tangent: bool = True):
        """Stress update from total deformation gradients ``F`` (n, 2, 2).

        Returns ``(P, A, info)`` with ``A = dP/dF`` (or None) and ``info``
        holding the candidate new state plus Kirchhoff/Cauchy stresses.
        The input state is not modified; callers commit ``info['state']``
        once a step is accepted.
        """
        mu, kappa = self.mu, self.kappa
        n = F.shape[0]
        detF = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
        if np.any(~np.isfinite(detF)) or np.any(detF <= 0.0):
            raise ElementInversion("non-positive det(F) at an integration point")

        b = np.einsum("nik,nkl,njl->nij", F, state.G, F)
        e1, e2, M1 = _eig2_sym(b)
        if np.any(e2 <= 0.0) or np.any(state.g33 <= 0.0):
            raise ElementInversion("collapsed elastic stretch at an integration point")
        M2 = _EYE2[None, :, :] - M1

        eps = np.stack([0.5 * np.log(e1), 0.5 * np.log(e2), 0.5 * np.log(state.g33)], axis=1)
        tr = eps.sum(axis=1)
        p = kappa * tr
        dev = eps - tr[:, None] / 3.0
        s_tr = 2.0 * mu * dev
        q_tr = np.sqrt(1.5 * np.einsum("na,na->n", s_tr, s_tr))

        f_yield = q_tr - flow_stress(self.mat, state.alpha)
        plastic = f_yield > 0.0
        dgamma = np.zeros(n)
        if plastic.any():
            dgamma[plastic] = self._solve_dgamma(
                q_tr[plastic], state.alpha[plastic]
            )
        alpha_new = state.alpha + dgamma
        safe_q = np.where(q_tr > 0.0, q_tr, 1.0)
        ratio = 1.0 - 3.0 * mu * dgamma / safe_q
        s = ratio[:, None] * s_tr
        tau_pr = p[:, None] + s
        eps_e = ratio[:, None] * dev + tr[:, None] / 3.0

        # principal consistent tangent d tau_A / d eps_B^trial
        D = np.empty((n, 3, 3))
        D[:] = kappa
        diag = 2.0 * mu * ratio
        D += diag[:, None, None] * (np.eye(3)[None] - 1.0 / 3.0)
        if plastic.any():
            H = hardening_modulus(self.mat, alpha_new)
            coef = np.where(
                plastic,
                (9.0 * mu**2 / safe_q**2)
                * (1.0 / (3.0 * mu + H) - dgamma / safe_q),
                0.0,
            )
            D -= coef[:, None, None] * np.einsum("na,nb->nab", s_tr, s_tr)

        tau = tau_pr[:, 0, None, None] * M1 + tau_pr[:, 1, None, None] * M2
        tau33 = tau_pr[:, 2]

        Finv = np.empty_like(F)
        Finv[:, 0, 0] = F[:, 1, 1]
        Finv[:, 1, 1] = F[:, 0, 0]
        Finv[:, 0, 1] = -F[:, 0, 1]
        Finv[:, 1, 0] = -F[:, 1, 0]
        Finv /= detF[:, None, None]
        P = np.einsum("nik,njk->nij", tau, Finv)

        # new state: exponential map of the corrected elastic strains
        be_new = (
            np.exp(2.0 * eps_e[:, 0])[:, None, None] * M1
            + np.exp(2.0 * eps_e[:, 1])[:, None, None] * M2
        )
        G_new = np.einsum("nik,nkl,njl->nij", Finv.transpose(0, 2, 1), be_new, Finv.transpose(0, 2, 1))
        # Finv.T columns: G_new = F^-1 be F^-T
        G_new = 0.5 * (G_new + G_new.transpose(0, 2, 1))
        state_new = PlasticState(G=G_new, g33=np.exp(2.0 * eps_e[:, 2]), alpha=alpha_new)

        sig_flow_mid = 0.5 * (
            flow_stress(self.mat, state.alpha) + flow_stress(self.mat, alpha_new)
        )
        info = {
            "state": state_new,
            "tau": tau,
            "tau33": tau33,
            "detF": detF,
            "cauchy": tau / detF[:, None, None],
            "cauchy33": tau33 / detF,
            "dgamma": dgamma,
            "dissipation": sig_flow_mid * dgamma,
            "q": ratio * q_tr,
        }
        if not tangent:
            return P, None, info

        A = self._tangent(F, Finv, state.G, b, e1, e2, M1, M2, tau_pr, D, tau)
        return P, A, info

    # ---------------------------------------------------------- internals
    def _solve_dgamma(self, q_tr: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        """Scalar radial-return equation, Newton from zero (monotone convergent)."""
        mu = self.mu
        dg = np.zeros_like(q_tr)
        for _ in range(self.max_iter):
            a = alpha + dg
            g = q_tr - 3.0 * mu * dg - flow_stress(self.mat, a)
            if np.all(np.abs(g) < self.newton_tol):
                break
            dgdx = -3.0 * mu - hardening_modulus(self.mat, a)
            dg = np.maximum(dg - g / dgdx, 0.0)
        else:
            raise ComputationError("radial return did not converge")
        return dg

    def _tangent(self, F, Finv, G, b, e1, e2, M1, M2, tau_pr, D, tau):
        """Assemble dP/dF = (dtau/db : db/dF) F^-T + tau d(F^-T)/dF."""
        n = F.shape[0]
        # dtau/db, first part: sum_AB D[A,B] M_A (x) M_B / (2 e_B), in-plane A,B
        e = np.stack([e1, e2], axis=1)
        Ms = np.stack([M1, M2], axis=1)  # (n, 2, 2, 2)
        w = D[:, :2, :2] / (2.0 * e[:, None, :])  # (n, A, B)
        dtau_db = np.einsum("nab,naij,nbkl->nijkl", w, Ms, Ms)
        # second part: (tau1 - tau2)/(e1 - e2) with the confluent limit
        de = e1 - e2
        small = np.abs(de) < 1e-8 * (e1 + e2)
        c12 = np.where(
            small,
            (D[:, 0, 0] - D[:, 0, 1]) / (e1 + e2),  # = (D11-D12)/(2*ebar)
            (tau_pr[:, 0] - tau_pr[:, 1]) / np.where(small, 1.0, de),
        )
        sym = 0.5 * (
            np.einsum("nik,njl->nijkl", M1, M2)
            + np.einsum("nil,njk->nijkl", M1, M2)
            + np.einsum("nik,njl->nijkl", M2, M1)
            + np.einsum("nil,njk->nijkl", M2, M1)
        )
        dtau_db += c12[:, None, None, None, None] * sym

        GFt = np.einsum("nkl,nml->nkm", G, F)  # (G F^T)[N, l] indexed [l?]
        FG = np.einsum("nik,nkl->nil", F, G)
        # db_kl/dF_mN = delta_km (G F^T)_Nl + delta_lm (F G)_kN
        t1 = np.einsum("nijml,nlN->nijmN", dtau_db, GFt.transpose(0, 2, 1))
        t2 = np.einsum("nijkm,nkN->nijmN", dtau_db, FG)
        dtau_dF = t1 + t2

        A = np.einsum("nikmN,nJk->niJmN", dtau_dF, Finv)
        A -= np.einsum("nik,nJm,nNk->niJmN", tau, Finv, Finv)
        return A
