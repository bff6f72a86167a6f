"""Q8 plane-strain finite element model and load-controlled Newton ramp.

Elements are 8-node serendipity quadrilaterals with reduced 2x2 Gauss
integration (the standard choice against incompressibility locking in J2
plasticity).  Assembly is total-Lagrangian: internal forces from the first
Piola-Kirchhoff stress on reference shape-function gradients, tangent from
the analytic dP/dF.  Loading is a dead traction patch scaled by a load
factor; each step converges by full Newton with automatic cutbacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConvergenceError, InputError
from ..materials import Material
from .constitutive import ElementInversion, PlaneStrainJ2, PlasticState, init_state
from .geometry import KIND_CANTILEVER, KIND_DCB
from .mesh import Mesh, edge_nodes, pick_load_patch

_G = 1.0 / math.sqrt(3.0)
#: 2x2 Gauss points in the element parent domain, weight 1 each.
GAUSS_POINTS = np.array([[-_G, -_G], [_G, -_G], [_G, _G], [-_G, _G]])

_EDGE_GAUSS = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_EDGE_WEIGHTS = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])

_CORNER_XI = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def q8_shape(xi: float, eta: float):
    """Serendipity shape functions and parent-space gradients at (xi, eta)."""
    N = np.empty(8)
    dN = np.empty((8, 2))
    for a in range(4):
        xa, ea = _CORNER_XI[a]
        N[a] = 0.25 * (1 + xa * xi) * (1 + ea * eta) * (xa * xi + ea * eta - 1)
        dN[a, 0] = 0.25 * xa * (1 + ea * eta) * (2 * xa * xi + ea * eta)
        dN[a, 1] = 0.25 * ea * (1 + xa * xi) * (xa * xi + 2 * ea * eta)
    N[4] = 0.5 * (1 - xi**2) * (1 - eta)
    dN[4] = [-xi * (1 - eta), -0.5 * (1 - xi**2)]
    N[5] = 0.5 * (1 + xi) * (1 - eta**2)
    dN[5] = [0.5 * (1 - eta**2), -eta * (1 + xi)]
    N[6] = 0.5 * (1 - xi**2) * (1 + eta)
    dN[6] = [-xi * (1 + eta), 0.5 * (1 - xi**2)]
    N[7] = 0.5 * (1 - xi) * (1 - eta**2)
    dN[7] = [-0.5 * (1 - eta**2), -eta * (1 - xi)]
    return N, dN


_N_TABLE = np.empty((4, 8))
_DN_TABLE = np.empty((4, 8, 2))
for _q, (_xi, _eta) in enumerate(GAUSS_POINTS):
    _N_TABLE[_q], _DN_TABLE[_q] = q8_shape(_xi, _eta)


def q8_reference_operators(nodes: np.ndarray, elems: np.ndarray):
    """Reference-configuration gradients, Jacobians and ip coordinates.

    Returns ``dNdX`` (ne, 4, 8, 2), ``detJ`` (ne, 4) and ``ip_coords``
    (ne, 4, 2).
    """
    X = nodes[elems]  # (ne, 8, 2)
    J = np.einsum("qam,nab->nqmb", _DN_TABLE, X)  # dx_b / dxi_m
    detJ = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    Jinv = np.empty_like(J)
    Jinv[..., 0, 0] = J[..., 1, 1]
    Jinv[..., 1, 1] = J[..., 0, 0]
    Jinv[..., 0, 1] = -J[..., 0, 1]
    Jinv[..., 1, 0] = -J[..., 1, 0]
    Jinv /= detJ[..., None, None]
    dNdX = np.einsum("qam,nqmb->nqab", _DN_TABLE, Jinv)
    ip_coords = np.einsum("qa,nab->nqb", _N_TABLE, X)
    return dNdX, detJ, ip_coords


def consistent_edge_load(nodes, elems, edges, traction) -> np.ndarray:
    """Nodal forces equivalent to a uniform dead traction on Q8 edges.

    ``traction`` is force per unit reference length (per unit thickness).
    """
    t = np.asarray(traction, dtype=float)
    f = np.zeros(nodes.shape[0] * 2)
    for e, le in edges:
        n1, n2, nm = edge_nodes(elems, int(e), int(le))
        X = nodes[[n1, n2, nm]]
        for xi, w in zip(_EDGE_GAUSS, _EDGE_WEIGHTS):
            Ne = np.array([0.5 * xi * (xi - 1), 0.5 * xi * (xi + 1), 1 - xi**2])
            dNe = np.array([xi - 0.5, xi + 0.5, -2 * xi])
            jac = np.linalg.norm(dNe @ X)
            for local, node in enumerate((n1, n2, nm)):
                f[2 * node : 2 * node + 2] += w * Ne[local] * t * jac
    return f


class FEModel:
    """Mesh + material + boundary conditions, ready for assembly."""

    def __init__(self, mesh: Mesh, material: Material, fixed_dofs, load_vector):
        self.mesh = mesh
        self.material = material
        self.con = PlaneStrainJ2(material)
        self.dNdX, self.detJ, ip_coords = q8_reference_operators(mesh.nodes, mesh.elems)
        if np.any(self.detJ <= 0):
            raise InputError("mesh contains inverted elements")
        self.wdet = self.detJ  # unit Gauss weights at 2x2
        self.n_ip = mesh.n_elems * 4
        self.ip_coords = ip_coords.reshape(-1, 2)
        self.ndof = mesh.n_nodes * 2
        self.dofmap = np.empty((mesh.n_elems, 16), dtype=int)
        self.dofmap[:, 0::2] = 2 * mesh.elems
        self.dofmap[:, 1::2] = 2 * mesh.elems + 1
        self._rows = np.broadcast_to(self.dofmap[:, :, None], (mesh.n_elems, 16, 16))
        self._cols = np.broadcast_to(self.dofmap[:, None, :], (mesh.n_elems, 16, 16))
        fixed = np.zeros(self.ndof, dtype=bool)
        fixed[np.asarray(fixed_dofs, dtype=int)] = True
        self.fixed = fixed
        self.free = np.flatnonzero(~fixed)
        self.f_ext_unit = np.asarray(load_vector, dtype=float)

    def deformation_gradients(self, u: np.ndarray) -> np.ndarray:
        u_el = u.reshape(-1, 2)[self.mesh.elems]
        F = np.einsum("nqaJ,nai->nqiJ", self.dNdX, u_el)
        F[..., 0, 0] += 1.0
        F[..., 1, 1] += 1.0
        return F.reshape(-1, 2, 2)

    def internal_force(self, P_flat: np.ndarray) -> np.ndarray:
        P = P_flat.reshape(self.mesh.n_elems, 4, 2, 2)
        f_el = np.einsum("nqaJ,nqiJ,nq->nai", self.dNdX, P, self.wdet)
        f = np.zeros(self.ndof)
        np.add.at(f, self.dofmap, f_el.reshape(-1, 16))
        return f

    def tangent_matrix(self, A_flat: np.ndarray) -> sp.csr_matrix:
        A = A_flat.reshape(self.mesh.n_elems, 4, 2, 2, 2, 2)
        K_el = np.einsum(
            "nqaJ,nqiJmN,nqbN,nq->naibm", self.dNdX, A, self.dNdX, self.wdet
        ).reshape(-1, 16, 16)
        K = sp.coo_matrix(
            (K_el.ravel(), (self._rows.ravel(), self._cols.ravel())),
            shape=(self.ndof, self.ndof),
        ).tocsr()
        return K


def model_for_mesh(mesh: Mesh, material: Material) -> FEModel:
    """Apply the per-family boundary conditions and unit load patch."""
    kind = mesh.geom.kind
    fixed: list[int] = []
    if kind == KIND_DCB:
        # symmetry plane ahead of the crack; specimen base fully fixed
        fixed.extend(2 * mesh.node_sets["symmetry"] + 1)
        fixed.extend(2 * mesh.node_sets["base"])
        fixed.extend(2 * mesh.node_sets["base"] + 1)
        edges = pick_load_patch(mesh, "crack_face", target=mesh.geom.e, axis=0)
        traction = (0.0, 1.0)  # opens the crack (half model, upper face)
    elif kind == KIND_CANTILEVER:
        fixed.extend(2 * mesh.node_sets["clamp"])
        fixed.extend(2 * mesh.node_sets["clamp"] + 1)
        edges = pick_load_patch(mesh, "top_surface", target=mesh.geom.L2, axis=0)
        traction = (0.0, -1.0)  # presses the beam end down
    else:
        raise InputError(f"unknown geometry kind {kind!r}")
    load = consistent_edge_load(mesh.nodes, mesh.elems, edges, traction)
    return FEModel(mesh, material, np.unique(fixed), load)


@dataclass
class SolutionState:
    """Converged snapshot of one load level."""

    applied_load: float
    displacements: np.ndarray  # (n_nodes * 2,)
    converged: bool
    residuals: list  # Newton residual norms of the final step
    cauchy: np.ndarray  # (n_ip, 2, 2) in-plane Cauchy stress
    cauchy_zz: np.ndarray  # (n_ip,)
    plastic_strain: np.ndarray  # (n_ip,)
    work_density: np.ndarray  # (n_ip,) accumulated stress work per ref volume
    F: np.ndarray  # (n_ip, 2, 2)
    P: np.ndarray  # (n_ip, 2, 2)
    message: str = ""


@dataclass
class _Checkpoint:
    lam: float
    u: np.ndarray
    state: PlasticState
    F: np.ndarray
    P: np.ndarray
    work: np.ndarray
    cauchy: np.ndarray
    cauchy_zz: np.ndarray
    u_prev: np.ndarray | None
    dlam_prev: float


class RampSolver:
    """Quasi-static load ramp with full Newton and automatic cutbacks."""

    def __init__(
        self,
        model: FEModel,
        tol_rel: float = 1e-8,
        max_iter: int = 18,
        max_cutbacks: int = 11,
    ):
        self.model = model
        self.tol_rel = tol_rel
        self.max_iter = max_iter
        self.max_cutbacks = max_cutbacks
        n_ip = model.n_ip
        self.lam = 0.0
        self.u = np.zeros(model.ndof)
        self.state = init_state(n_ip)
        eye = np.broadcast_to(np.eye(2), (n_ip, 2, 2)).copy()
        self.F = eye
        self.P = np.zeros((n_ip, 2, 2))
        self.work = np.zeros(n_ip)
        self.cauchy = np.zeros((n_ip, 2, 2))
        self.cauchy_zz = np.zeros(n_ip)
        self.total_dissipation = 0.0
        self.last_residuals: list[float] = []
        self.n_solves = 0
        self._u_prev: np.ndarray | None = None
        self._dlam_prev = 0.0

    # -------------------------------------------------------------- state
    def snapshot(self) -> _Checkpoint:
        return _Checkpoint(
            lam=self.lam,
            u=self.u.copy(),
            state=self.state.copy(),
            F=self.F.copy(),
            P=self.P.copy(),
            work=self.work.copy(),
            cauchy=self.cauchy.copy(),
            cauchy_zz=self.cauchy_zz.copy(),
            u_prev=None if self._u_prev is None else self._u_prev.copy(),
            dlam_prev=self._dlam_prev,
        )

    def restore(self, snap: _Checkpoint) -> None:
        self.lam = snap.lam
        self.u = snap.u.copy()
        self.state = snap.state.copy()
        self.F = snap.F.copy()
        self.P = snap.P.copy()
        self.work = snap.work.copy()
        self.cauchy = snap.cauchy.copy()
        self.cauchy_zz = snap.cauchy_zz.copy()
        self._u_prev = None if snap.u_prev is None else snap.u_prev.copy()
        self._dlam_prev = snap.dlam_prev

    def current_solution(self, converged: bool = True, message: str = "") -> SolutionState:
        return SolutionState(
            applied_load=self.lam,
            displacements=self.u.copy(),
            converged=converged,
            residuals=list(self.last_residuals),
            cauchy=self.cauchy.copy(),
            cauchy_zz=self.cauchy_zz.copy(),
            plastic_strain=self.state.alpha.copy(),
            work_density=self.work.copy(),
            F=self.F.copy(),
            P=self.P.copy(),
            message=message,
        )

    # --------------------------------------------------------------- ramp
    def step_to(self, lam_target: float) -> SolutionState:
        """Advance the load factor, subdividing on non-convergence."""
        if lam_target < self.lam:
            raise InputError("load factor must be non-decreasing")
        if lam_target == self.lam:
            return self.current_solution()
        remaining = lam_target - self.lam
        dlam = remaining
        cutbacks = 0
        while self.lam < lam_target - 1e-14 * lam_target:
            dlam = min(dlam, lam_target - self.lam)
            if self._attempt(self.lam + dlam):
                continue
            cutbacks += 1
            dlam *= 0.5
            if cutbacks > self.max_cutbacks:
                raise ConvergenceError(
                    f"step to load {lam_target:g} failed after "
                    f"{self.max_cutbacks} cutbacks (stuck at {self.lam:g})"
                )
        return self.current_solution()

    def _attempt(self, lam_new: float) -> bool:
        model = self.model
        u_trial = self.u.copy()
        if self._u_prev is not None and self._dlam_prev > 0.0:
            # secant predictor from the previous converged step
            u_trial += (self.u - self._u_prev) * ((lam_new - self.lam) / self._dlam_prev)
        f_ext = lam_new * model.f_ext_unit
        ref = np.linalg.norm(f_ext[model.free])
        residuals: list[float] = []
        info = None
        converged = False
        for _ in range(self.max_iter):
            try:
                P, A, info = model.con.evaluate(
                    model.deformation_gradients(u_trial), self.state, tangent=True
                )
            except ElementInversion:
                return False
            r = f_ext - model.internal_force(P)
            rn = float(np.linalg.norm(r[model.free]))
            residuals.append(rn)
            if not np.isfinite(rn):
                return False
            if rn <= self.tol_rel * ref:
                converged = True
                break
            K = model.tangent_matrix(A)
            Kff = K[model.free][:, model.free].tocsc()
            try:
                du = spla.splu(Kff).solve(r[model.free])
            except RuntimeError:
                return False
            self.n_solves += 1
            if not np.all(np.isfinite(du)):
                return False
            u_trial[model.free] += du
        if not converged:
            return False
        # commit
        F_new = model.deformation_gradients(u_trial)
        dW = 0.5 * np.einsum("nij,nij->n", self.P + P, F_new - self.F)
        self._u_prev = self.u.copy()
        self._dlam_prev = lam_new - self.lam
        self.u = u_trial
        self.lam = lam_new
        self.state = info["state"]
        self.F = F_new
        self.P = P
        self.work += dW
        self.cauchy = info["cauchy"]
        self.cauchy_zz = info["cauchy33"]
        self.total_dissipation += float(
            np.einsum("n,n->", info["dissipation"], model.wdet.ravel())
        )
        self.last_residuals = residuals
        return True


def solve_ramp(
    mesh: Mesh,
    material: Material,
    schedule,
    tol_rel: float = 1e-8,
    keep: str = "all",
) -> list[SolutionState]:
    """Run a load-factor schedule (strictly increasing from zero).

    ``keep='all'`` returns one :class:`SolutionState` per step; ``'last'``
    returns only the final state.
    """
    schedule = np.asarray(schedule, dtype=float)
    if schedule.size == 0 or np.any(np.diff(schedule) <= 0) or schedule[0] < 0:
        raise InputError("schedule must be strictly increasing load factors from 0")
    model = model_for_mesh(mesh, material)
    solver = RampSolver(model, tol_rel=tol_rel)
    out: list[SolutionState] = []
    for lam in schedule:
        sol = solver.step_to(float(lam))
        if keep == "all":
            out.append(sol)
    if keep != "all":
        out.append(solver.current_solution())
    return out
