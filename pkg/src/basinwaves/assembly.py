"""Assembly of the dispersive wave operators and load vectors.

The scalar operator couples the free surface through
    A(phi, chi) = (phi, chi) + 1/6 (D grad phi, D grad chi),
and the vector operator couples the velocity through
    B(phi, chi) = (D phi, D chi) + 1/6 (div(D^2 phi), div(D^2 chi))
                  - 1/6 <div(D^2 phi), D^2 chi . n>
                  - 1/6 <D^2 phi . n, div(D^2 chi)>
                  + gamma/h <D^2 phi . n, chi . n>,
where the boundary terms impose the slip condition u.n = 0 weakly
(Nitsche). The bathymetry always enters through its L^2 projection D_h
onto the scalar space; div(D^2 phi) is expanded cellwise with the product
rule on the discrete D_h.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .elements import edge_quadrature, triangle_quadrature
from .space import Field, FunctionSpace, l2_project


class PenaltyTooSmallError(ValueError):
    """The Nitsche operator failed its positive-definiteness probe."""


@dataclass
class Bathymetry:
    """Still-water depth descriptor with its discrete representation."""

    func: object              # callable (x, y) -> depth, array-friendly
    d_min: float
    kind: str = "analytic"
    expr: object = None       # optional sympy expression in (x, y)

    def __post_init__(self):
        if self.d_min <= 0:
            raise ValueError("non-cavitation requires d_min > 0")

    def project(self, space_r: FunctionSpace) -> Field:
        return l2_project(space_r, self.func)


# ---------------------------------------------------------------------------
# quadrature tables

class VolumeTables:
    """Per-cell geometry and basis tables at a fixed volume quadrature rule."""

    def __init__(self, mesh, quad_degree: int):
        self.mesh = mesh
        self.rule = triangle_quadrature(quad_degree)
        v = mesh.vertices
        a = v[mesh.cells[:, 0]]
        J1 = v[mesh.cells[:, 1]] - a
        J2 = v[mesh.cells[:, 2]] - a
        self.detj = J1[:, 0] * J2[:, 1] - J1[:, 1] * J2[:, 0]
        inv = np.empty((mesh.num_cells, 2, 2))
        inv[:, 0, 0] = J2[:, 1]
        inv[:, 0, 1] = -J2[:, 0]
        inv[:, 1, 0] = -J1[:, 1]
        inv[:, 1, 1] = J1[:, 0]
        self.jinv = inv / self.detj[:, None, None]
        self.wdet = self.rule.weights[None, :] * self.detj[:, None]
        pts = self.rule.points
        self.xq = (a[:, None, :] + pts[None, :, 0:1] * J1[:, None, :]
                   + pts[None, :, 1:2] * J2[:, None, :])
        self._space_tables = {}

    def tables_for(self, space: FunctionSpace):
        """(phi, gphi) with shapes (nloc, nq) and (nc, nloc, nq, 2)."""
        key = id(space)
        if key not in self._space_tables:
            vals, grads = space.element.tabulate(self.rule.points)
            gphi = np.einsum("iqj,cjk->ciqk", grads, self.jinv)
            self._space_tables[key] = (vals, np.ascontiguousarray(gphi))
        return self._space_tables[key]

    def scalar_values(self, space, coeffs):
        phi, _ = self.tables_for(space)
        return np.einsum("ci,iq->cq", coeffs[space.dof_map], phi)

    def scalar_gradients(self, space, coeffs):
        _, gphi = self.tables_for(space)
        return np.einsum("ciqk,ci->cqk", gphi, coeffs[space.dof_map])

    def scatter(self, space, local):
        """Accumulate (nc, nloc) local contributions into a global vector."""
        return np.bincount(space.dof_map.ravel(), weights=local.ravel(),
                           minlength=space.num_scalar_dofs)


class EdgeTables:
    """Boundary-edge basis tables at a fixed edge quadrature rule."""

    def __init__(self, mesh, quad_degree: int):
        self.mesh = mesh
        self.rule = edge_quadrature(quad_degree)
        t = self.rule.points[:, 0]
        ne = len(mesh.boundary_edges)
        self.normals = mesh.boundary_normals
        self.cells = mesh.boundary_cells
        self.lengths = mesh.boundary_edge_lengths()
        # physical quadrature points per edge and their reference coordinates
        # in the owning cell
        self.xq = np.empty((ne, len(t), 2))
        self.refq = np.empty((ne, len(t), 2))
        v = mesh.vertices
        for e, (a, b) in enumerate(mesh.boundary_edges):
            p, q = v[a], v[b]
            self.xq[e] = p[None, :] + t[:, None] * (q - p)[None, :]
            ci = self.cells[e]
            v0 = v[mesh.cells[ci, 0]]
            J = np.column_stack([v[mesh.cells[ci, 1]] - v0,
                                 v[mesh.cells[ci, 2]] - v0])
            self.refq[e] = np.linalg.solve(J, (self.xq[e] - v0).T).T
        self.wl = self.rule.weights[None, :] * self.lengths[:, None]
        self._space_tables = {}

    def tables_for(self, space: FunctionSpace):
        """(phi, gphi) with shapes (ne, nloc, nq) and (ne, nloc, nq, 2)."""
        key = id(space)
        if key not in self._space_tables:
            ne, nq = self.xq.shape[:2]
            nloc = space.element.num_nodes
            phi = np.empty((ne, nloc, nq))
            gphi = np.empty((ne, nloc, nq, 2))
            v = self.mesh.vertices
            for e in range(ne):
                vals, grads = space.element.tabulate(self.refq[e])
                ci = self.cells[e]
                v0 = v[self.mesh.cells[ci, 0]]
                J = np.column_stack([v[self.mesh.cells[ci, 1]] - v0,
                                     v[self.mesh.cells[ci, 2]] - v0])
                jinv = np.linalg.inv(J)
                phi[e] = vals
                gphi[e] = np.einsum("iqj,jk->iqk", grads, jinv)
            self._space_tables[key] = (phi, gphi)
        return self._space_tables[key]

    def scalar_values(self, space, coeffs):
        phi, _ = self.tables_for(space)
        return np.einsum("ei,eiq->eq", coeffs[space.dof_map[self.cells]], phi)

    def scalar_gradients(self, space, coeffs):
        _, gphi = self.tables_for(space)
        return np.einsum("eiqk,ei->eqk", gphi, coeffs[space.dof_map[self.cells]])


# ---------------------------------------------------------------------------
# sparse assembly helpers

def _coo_from_local(dof_map, local, n):
    """Global CSC matrix from (nc, nloc, nloc) local blocks."""
    nloc = dof_map.shape[1]
    rows = np.repeat(dof_map, nloc, axis=1).ravel()
    cols = np.tile(dof_map, (1, nloc)).ravel()
    return sp.csc_matrix((local.ravel(), (rows, cols)), shape=(n, n))


def _vector_dofs(space_p, cells=None):
    """(ncells, 2*nloc) global vector-space DOFs, x block then y block."""
    dm = space_p.dof_map if cells is None else space_p.dof_map[cells]
    n = space_p.num_scalar_dofs
    return np.concatenate([dm, dm + n], axis=1)


def assemble_A(space_r: FunctionSpace, D_h: Field,
               vol: Optional[VolumeTables] = None) -> sp.csc_matrix:
    """Scalar surface operator (phi,chi) + 1/6 (D grad phi, D grad chi)."""
    if vol is None:
        vol = VolumeTables(space_r.mesh, 2 * space_r.degree + 3)
    phi, gphi = vol.tables_for(space_r)
    Dq = vol.scalar_values(space_r, D_h.coeffs)
    w = vol.wdet
    mass = np.einsum("cq,iq,jq->cij", w, phi, phi)
    stiff = np.einsum("cq,ciqk,cjqk->cij", w * Dq ** 2 / 6.0, gphi, gphi)
    return _coo_from_local(space_r.dof_map, mass + stiff, space_r.num_scalar_dofs)


def _div_basis_tables(phi, gphi, Dq, gDq):
    """div(D^2 phi_i e_k) tables: S[k] with shape (nc, nloc, nq).

    div(D^2 phi e_k) = 2 D (d_k D) phi + D^2 d_k phi, with D = D_h cellwise.
    """
    out = []
    for k in range(2):
        if phi.ndim == 2:      # volume tables: phi (nloc, nq)
            term = 2.0 * (Dq * gDq[..., k])[:, None, :] * phi[None, :, :]
            term = term + (Dq ** 2)[:, None, :] * gphi[..., k]
        else:                   # edge tables: phi (ne, nloc, nq)
            term = 2.0 * (Dq * gDq[..., k])[:, None, :] * phi
            term = term + (Dq ** 2)[:, None, :] * gphi[..., k]
        out.append(term)
    return out


def assemble_B(space_p: FunctionSpace, D_h: Field, gamma: float, h: float,
               vol: Optional[VolumeTables] = None,
               edges: Optional[EdgeTables] = None,
               check_pd: bool = True) -> sp.csc_matrix:
    """Nitsche-regularized velocity operator (symmetric)."""
    if gamma <= 0:
        raise PenaltyTooSmallError(f"penalty gamma must be positive, got {gamma}")
    mesh = space_p.mesh
    deg = 2 * space_p.degree + 3
    if vol is None:
        vol = VolumeTables(mesh, deg)
    if edges is None:
        edges = EdgeTables(mesh, deg)

    space_r = D_h.space
    phi, gphi = vol.tables_for(space_p)
    Dq = vol.scalar_values(space_r, D_h.coeffs)
    gDq = vol.scalar_gradients(space_r, D_h.coeffs)
    w = vol.wdet
    nloc = space_p.element.num_nodes
    nc = mesh.num_cells

    S = _div_basis_tables(phi, gphi, Dq, gDq)  # [k] -> (nc, nloc, nq)
    local = np.zeros((nc, 2 * nloc, 2 * nloc))
    mass = np.einsum("cq,iq,jq->cij", w * Dq ** 2, phi, phi)
    for k in range(2):
        sl = slice(k * nloc, (k + 1) * nloc)
        local[:, sl, sl] += mass
    for k in range(2):
        for l in range(2):
            blk = np.einsum("cq,ciq,cjq->cij", w / 6.0, S[k], S[l])
            local[:, k * nloc:(k + 1) * nloc, l * nloc:(l + 1) * nloc] += blk

    ndof = 2 * space_p.num_scalar_dofs
    B = _coo_from_local(_vector_dofs(space_p), local, ndof)

    # boundary terms
    phie, gphie = edges.tables_for(space_p)
    Dqe = edges.scalar_values(space_r, D_h.coeffs)
    gDqe = edges.scalar_gradients(space_r, D_h.coeffs)
    Se = _div_basis_tables(phie, gphie, Dqe, gDqe)   # [k] -> (ne, nloc, nq)
    wl = edges.wl
    n = edges.normals
    ne = len(edges.cells)
    edofs = _vector_dofs(space_p, edges.cells)
    locb = np.zeros((ne, 2 * nloc, 2 * nloc))
    D2phi_n = [(Dqe ** 2)[:, None, :] * phie * n[:, k, None, None]
               for k in range(2)]                     # D^2 phi_i n_k
    for k in range(2):
        for l in range(2):
            # test basis (k,i), trial basis (l,j)
            c1 = np.einsum("eq,eiq,ejq->eij", wl / 6.0, D2phi_n[k], Se[l])
            c2 = np.einsum("eq,eiq,ejq->eij", wl / 6.0, Se[k], D2phi_n[l])
            pen = np.einsum("eq,eiq,ejq->eij",
                            wl * (gamma / h) * Dqe ** 2,
                            phie * n[:, k, None, None],
                            phie * n[:, l, None, None])
            locb[:, k * nloc:(k + 1) * nloc, l * nloc:(l + 1) * nloc] += \
                pen - c1 - c2
    nloc2 = 2 * nloc
    rows = np.repeat(edofs, nloc2, axis=1).ravel()
    cols = np.tile(edofs, (1, nloc2)).ravel()
    B = B + sp.csc_matrix((locb.ravel(), (rows, cols)), shape=(ndof, ndof))
    B.sum_duplicates()
    if check_pd:
        _probe_positive_definite(B, gamma)
    return B


def _probe_positive_definite(B, gamma):
    """Check positive definiteness by the pivot signs of an unpivoted
    symmetric factorization (Sylvester's law of inertia)."""
    try:
        lu = spla.splu(B, diag_pivot_thresh=0.0,
                       permc_spec="MMD_AT_PLUS_A")
        pivots = lu.U.diagonal()
        ok = bool(np.all(pivots > 0))
    except RuntimeError:  # factorization breakdown: a zero pivot
        ok = False
    if not ok:
        raise PenaltyTooSmallError(
            f"velocity operator is not positive definite at gamma={gamma}; "
            "increase the Nitsche penalty")


# ---------------------------------------------------------------------------
# operator set

@dataclass
class OperatorSet:
    """Assembled operators with reusable factorizations."""

    A: sp.csc_matrix
    B: sp.csc_matrix
    lu_A: object
    lu_B: object
    gamma: float
    h_penalty: float

    @classmethod
    def build(cls, space_r, space_p, D_h: Field, gamma: float,
              vol=None, edges=None, check_pd=True) -> "OperatorSet":
        h = space_r.mesh.h_max
        A = assemble_A(space_r, D_h, vol=vol)
        B = assemble_B(space_p, D_h, gamma, h, vol=vol, edges=edges,
                       check_pd=check_pd)
        return cls(A=A, B=B, lu_A=spla.splu(A), lu_B=spla.splu(B),
                   gamma=gamma, h_penalty=h)

    def solve_A(self, rhs):
        return self.lu_A.solve(rhs)

    def solve_B(self, rhs):
        return self.lu_B.solve(rhs)


# ---------------------------------------------------------------------------
# load vectors

def assemble_mass_rhs(space_r, vol: VolumeTables, D_flux_q, eta: np.ndarray,
                      u: np.ndarray, space_p) -> np.ndarray:
    """Load L_i = ((D + eta) u, grad chi_i), the mass-balance flux term.

    D_flux_q are the precomputed bathymetry values at the volume quadrature
    points; eta and u are coefficient vectors.
    """
    _, gphi_r = vol.tables_for(space_r)
    phi_p, _ = vol.tables_for(space_p)
    etaq = vol.scalar_values(space_r, eta)
    np_dofs = space_p.num_scalar_dofs
    total = vol.wdet * (D_flux_q + etaq)
    dm = space_p.dof_map
    uxq = np.einsum("ci,iq->cq", u[:np_dofs][dm], phi_p)
    uyq = np.einsum("ci,iq->cq", u[np_dofs:][dm], phi_p)
    local = np.einsum("cq,ciq->ci", total * uxq, gphi_r[..., 0])
    local += np.einsum("cq,ciq->ci", total * uyq, gphi_r[..., 1])
    return vol.scatter(space_r, local)


def assemble_momentum_rhs(space_p, vol: VolumeTables, D_disp_sq_q,
                          eta: np.ndarray, u: np.ndarray, g: float,
                          space_r) -> np.ndarray:
    """Load L = -(grad(g eta + |u|^2/2), D^2 chi) on the vector space."""
    phi_p, gphi_p = vol.tables_for(space_p)
    geta = vol.scalar_gradients(space_r, eta)
    np_dofs = space_p.num_scalar_dofs
    dm = space_p.dof_map
    ux, uy = u[:np_dofs], u[np_dofs:]
    uxq = np.einsum("ci,iq->cq", ux[dm], phi_p)
    uyq = np.einsum("ci,iq->cq", uy[dm], phi_p)
    guxq = np.einsum("ciqk,ci->cqk", gphi_p, ux[dm])
    guyq = np.einsum("ciqk,ci->cqk", gphi_p, uy[dm])
    w = vol.wdet * D_disp_sq_q
    out = np.empty(2 * np_dofs)
    for k in range(2):
        Gk = g * geta[..., k] + uxq * guxq[..., k] + uyq * guyq[..., k]
        local = np.einsum("cq,iq->ci", -w * Gk, phi_p)
        out[k * np_dofs:(k + 1) * np_dofs] = vol.scatter(space_p, local)
    return out


def assemble_scalar_load(space, vol: VolumeTables, fvals_q) -> np.ndarray:
    """Load L_i = (f, chi_i) from values of f at the volume quadrature points."""
    phi, _ = vol.tables_for(space)
    local = np.einsum("cq,iq->ci", vol.wdet * fvals_q, phi)
    return vol.scatter(space, local)


def assemble_vector_load(space_p, vol: VolumeTables, fx_q, fy_q,
                         weight_q=None) -> np.ndarray:
    """Load L_(k,i) = (w f_k, chi_i) on the vector space (w defaults to 1)."""
    phi, _ = vol.tables_for(space_p)
    w = vol.wdet if weight_q is None else vol.wdet * weight_q
    n = space_p.num_scalar_dofs
    out = np.empty(2 * n)
    out[:n] = vol.scatter(space_p, np.einsum("cq,iq->ci", w * fx_q, phi))
    out[n:] = vol.scatter(space_p, np.einsum("cq,iq->ci", w * fy_q, phi))
    return out


# ---------------------------------------------------------------------------
# norm matrices

def norm_matrices(space: FunctionSpace, h: float = None) -> dict:
    """Gram matrices: v' M v gives the squared norm of the FE function.

    Scalar spaces: L2 and H1. Vector spaces: L2, H1, Hdiv and the Nitsche
    triple norm (Hdiv plus h-weighted boundary divergence and 1/h-weighted
    normal trace).
    """
    mesh = space.mesh
    if h is None:
        h = mesh.h_max
    deg = 2 * space.degree + 3
    vol = VolumeTables(mesh, deg)
    phi, gphi = vol.tables_for(space)
    w = vol.wdet
    mass = np.einsum("cq,iq,jq->cij", w, phi, phi)
    stiff = np.einsum("cq,ciqk,cjqk->cij", w, gphi, gphi)
    if space.rank == 1:
        n = space.num_scalar_dofs
        L2 = _coo_from_local(space.dof_map, mass, n)
        H1 = _coo_from_local(space.dof_map, mass + stiff, n)
        return {"L2": L2, "H1": H1}

    nloc = space.element.num_nodes
    nc = mesh.num_cells
    ndof = 2 * space.num_scalar_dofs
    vdofs = _vector_dofs(space)

    def block_diag(local):
        full = np.zeros((nc, 2 * nloc, 2 * nloc))
        for k in range(2):
            sl = slice(k * nloc, (k + 1) * nloc)
            full[:, sl, sl] = local
        return full

    L2 = _coo_from_local(vdofs, block_diag(mass), ndof)
    H1 = _coo_from_local(vdofs, block_diag(mass + stiff), ndof)
    divloc = np.zeros((nc, 2 * nloc, 2 * nloc))
    for k in range(2):
        for l in range(2):
            divloc[:, k * nloc:(k + 1) * nloc, l * nloc:(l + 1) * nloc] = \
                np.einsum("cq,ciq,cjq->cij", w, gphi[..., k], gphi[..., l])
    Hdiv = L2 + _coo_from_local(vdofs, divloc, ndof)

    edges = EdgeTables(mesh, deg)
    phie, gphie = edges.tables_for(space)
    wl = edges.wl
    nrm = edges.normals
    ne = len(edges.cells)
    edofs = _vector_dofs(space, edges.cells)
    locb = np.zeros((ne, 2 * nloc, 2 * nloc))
    for k in range(2):
        for l in range(2):
            bdiv = np.einsum("eq,eiq,ejq->eij", wl * h,
                             gphie[..., k], gphie[..., l])
            btrace = np.einsum("eq,eiq,ejq->eij", wl / h,
                               phie * nrm[:, k, None, None],
                               phie * nrm[:, l, None, None])
            locb[:, k * nloc:(k + 1) * nloc, l * nloc:(l + 1) * nloc] = \
                bdiv + btrace
    nloc2 = 2 * nloc
    rows = np.repeat(edofs, nloc2, axis=1).ravel()
    cols = np.tile(edofs, (1, nloc2)).ravel()
    triple = Hdiv + sp.csc_matrix((locb.ravel(), (rows, cols)),
                                  shape=(ndof, ndof))
    return {"L2": L2, "H1": H1, "Hdiv": Hdiv, "triple": triple}
