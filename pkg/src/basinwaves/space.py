"""Global continuous Lagrange spaces on triangle meshes.

Scalar spaces of degree r and 2-vector spaces of degree p share the same
machinery; a vector space stores two stacked scalar blocks (all x-components,
then all y-components).

The DOF map is built topologically (vertex / edge / cell-interior entities),
so inter-element continuity is exact by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .elements import lagrange_element, triangle_quadrature


class PointLocationError(ValueError):
    """Query point outside the mesh."""


def _classify_local_nodes(element):
    """Split reference nodes into vertex, edge and interior groups.

    Returns (vertex_of, edge_of) where vertex_of maps local node -> local
    vertex or -1, and edge_of maps local node -> (local_edge, slot along the
    edge counted from its first endpoint) or None.
    Local edges: 0:(v0,v1), 1:(v1,v2), 2:(v2,v0).
    """
    d = element.degree
    vertex_of = np.full(element.num_nodes, -1, dtype=int)
    edge_of = [None] * element.num_nodes
    for l, (x, y) in enumerate(element.nodes):
        i = round(x * d)
        j = round(y * d)
        if (i, j) == (0, 0):
            vertex_of[l] = 0
        elif (i, j) == (d, 0):
            vertex_of[l] = 1
        elif (i, j) == (0, d):
            vertex_of[l] = 2
        elif j == 0:
            edge_of[l] = (0, i - 1)          # along v0 -> v1, param i/d
        elif i + j == d:
            edge_of[l] = (1, j - 1)          # along v1 -> v2, param j/d
        elif i == 0:
            edge_of[l] = (2, d - j - 1)      # along v2 -> v0, param (d-j)/d
    return vertex_of, edge_of


_LOCAL_EDGES = ((0, 1), (1, 2), (2, 0))


@dataclass
class FunctionSpace:
    """Continuous Lagrange space S_h of a given degree, scalar or 2-vector."""

    mesh: object
    degree: int
    rank: int = 1  # 1: scalar, 2: 2-vector
    element: object = None
    dof_map: np.ndarray = None          # (nc, nloc) scalar DOF indices
    node_coords: np.ndarray = None      # (num_scalar_dofs, 2)
    boundary_dofs: np.ndarray = None    # scalar DOFs whose node lies on the boundary
    boundary_dof_normals: np.ndarray = None
    _eval_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.rank not in (1, 2):
            raise ValueError(f"rank must be 1 or 2, got {self.rank}")
        self.element = lagrange_element(self.degree)
        self._build_dofmap()
        self._build_boundary_dofs()

    # -- construction ------------------------------------------------------

    def _build_dofmap(self):
        mesh, element, d = self.mesh, self.element, self.degree
        vertex_of, edge_of = _classify_local_nodes(element)
        nv = mesh.num_vertices
        edge_base: dict = {}
        next_dof = nv
        per_edge = d - 1
        nloc = element.num_nodes
        dof_map = np.empty((mesh.num_cells, nloc), dtype=int)
        coords = {}

        for ci, cell in enumerate(mesh.cells):
            v = mesh.vertices[cell]
            J = np.column_stack([v[1] - v[0], v[2] - v[0]])
            phys = v[0] + element.nodes @ J.T
            for l in range(nloc):
                if vertex_of[l] >= 0:
                    g = int(cell[vertex_of[l]])
                elif edge_of[l] is not None:
                    le, slot = edge_of[l]
                    a, b = cell[_LOCAL_EDGES[le][0]], cell[_LOCAL_EDGES[le][1]]
                    key = (min(a, b), max(a, b))
                    if key not in edge_base:
                        edge_base[key] = next_dof
                        next_dof += per_edge
                    # slot counted from the lower-numbered endpoint
                    g = edge_base[key] + (slot if a < b else per_edge - 1 - slot)
                else:
                    g = next_dof
                    next_dof += 1
                dof_map[ci, l] = g
                coords[g] = phys[l]
        self.dof_map = dof_map
        self.node_coords = np.empty((next_dof, 2))
        for g, xy in coords.items():
            self.node_coords[g] = xy

    def _build_boundary_dofs(self):
        mesh = self.mesh
        ndof = self.num_scalar_dofs
        on_bdry = np.zeros(ndof, dtype=bool)
        normals = np.zeros((ndof, 2))
        scale = max(1.0, float(np.abs(mesh.vertices).max()))
        tol = 1e-12 * scale
        pts = self.node_coords
        for (a, b), n in zip(mesh.boundary_edges, mesh.boundary_normals):
            p = mesh.vertices[a]
            q = mesh.vertices[b]
            t = q - p
            L2 = t @ t
            rel = pts - p
            s = (rel @ t) / L2
            dist = np.abs(rel[:, 0] * t[1] - rel[:, 1] * t[0]) / np.sqrt(L2)
            hit = (dist <= tol) & (s >= -tol) & (s <= 1 + tol)
            on_bdry |= hit
            normals[hit] += n
        self.boundary_dofs = np.flatnonzero(on_bdry)
        nrm = np.linalg.norm(normals[self.boundary_dofs], axis=1)
        nrm[nrm == 0] = 1.0
        self.boundary_dof_normals = normals[self.boundary_dofs] / nrm[:, None]

    # -- basic queries -----------------------------------------------------

    @property
    def num_scalar_dofs(self) -> int:
        return self.node_coords.shape[0]

    @property
    def dim(self) -> int:
        return self.rank * self.num_scalar_dofs

    def component_slices(self):
        n = self.num_scalar_dofs
        return [slice(k * n, (k + 1) * n) for k in range(self.rank)]

    # -- point location / evaluation ---------------------------------------

    def locate(self, point):
        """Cell containing the point, with its reference coordinates."""
        key = (float(point[0]), float(point[1]))
        if key in self._eval_cache:
            return self._eval_cache[key]
        mesh = self.mesh
        v = mesh.vertices
        a = v[mesh.cells[:, 0]]
        J1 = v[mesh.cells[:, 1]] - a
        J2 = v[mesh.cells[:, 2]] - a
        det = J1[:, 0] * J2[:, 1] - J1[:, 1] * J2[:, 0]
        rel = np.asarray(point, dtype=float) - a
        xi = (rel[:, 0] * J2[:, 1] - rel[:, 1] * J2[:, 0]) / det
        eta = (J1[:, 0] * rel[:, 1] - J1[:, 1] * rel[:, 0]) / det
        tol = 1e-12
        ok = (xi >= -tol) & (eta >= -tol) & (xi + eta <= 1 + tol)
        hits = np.flatnonzero(ok)
        if hits.size == 0:
            raise PointLocationError(f"point {tuple(point)} outside the mesh")
        ci = int(hits[0])
        res = (ci, (float(xi[ci]), float(eta[ci])))
        self._eval_cache[key] = res
        return res


@dataclass
class Field:
    """Coefficient vector of a discrete function."""

    space: FunctionSpace
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if self.coeffs.shape != (self.space.dim,):
            raise ValueError(
                f"coefficient length {self.coeffs.shape} does not match "
                f"space dimension {self.space.dim}")

    def copy(self) -> "Field":
        return Field(self.space, self.coeffs.copy())


def _call_pointwise(f, x, y, rank):
    """Evaluate a user function on coordinate arrays, tolerating scalar-only
    callables."""
    try:
        out = f(x, y)
    except (TypeError, ValueError):
        if rank == 1:
            return np.array([f(xi, yi) for xi, yi in zip(x, y)])
        vals = np.array([f(xi, yi) for xi, yi in zip(x, y)])
        return vals[:, 0], vals[:, 1]
    if rank == 1:
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()
    ux, uy = out
    return (np.broadcast_to(np.asarray(ux, dtype=float), x.shape).copy(),
            np.broadcast_to(np.asarray(uy, dtype=float), x.shape).copy())


def interpolate(space: FunctionSpace, f) -> Field:
    """Nodal interpolant of a pointwise function.

    Scalar spaces take f(x, y) -> value; vector spaces take
    f(x, y) -> (ux, uy). Array-broadcasting callables are used directly.
    """
    x, y = space.node_coords[:, 0], space.node_coords[:, 1]
    if space.rank == 1:
        return Field(space, _call_pointwise(f, x, y, 1))
    ux, uy = _call_pointwise(f, x, y, 2)
    return Field(space, np.concatenate([ux, uy]))


def l2_project(space: FunctionSpace, f, quad_degree=None) -> Field:
    """L^2 projection of a pointwise function onto the space."""
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    mesh, element = space.mesh, space.element
    if quad_degree is None:
        quad_degree = min(12, 2 * space.degree + 6)
    rule = triangle_quadrature(quad_degree)
    vals, _ = element.tabulate(rule.points)      # (nloc, nq)
    v = mesh.vertices
    a = v[mesh.cells[:, 0]]
    J1 = v[mesh.cells[:, 1]] - a
    J2 = v[mesh.cells[:, 2]] - a
    detj = J1[:, 0] * J2[:, 1] - J1[:, 1] * J2[:, 0]
    # physical quadrature points, (nc, nq, 2)
    xq = (a[:, None, :] + rule.points[None, :, 0:1] * J1[:, None, :]
          + rule.points[None, :, 1:2] * J2[:, None, :])
    wdet = rule.weights[None, :] * detj[:, None]

    local_mass = np.einsum("q,iq,jq->ij", rule.weights, vals, vals)
    nloc = element.num_nodes
    rows = np.repeat(space.dof_map, nloc, axis=1).ravel()
    cols = np.tile(space.dof_map, (1, nloc)).ravel()
    data = (detj[:, None, None] * local_mass[None, :, :]).ravel()
    n = space.num_scalar_dofs
    M = sp.csc_matrix((data, (rows, cols)), shape=(n, n))
    lu = spla.splu(M)

    def project_component(fvals):
        loc = np.einsum("cq,iq,cq->ci", wdet, vals, fvals)
        rhs = np.bincount(space.dof_map.ravel(), weights=loc.ravel(), minlength=n)
        return lu.solve(rhs)

    X = xq[..., 0].ravel()
    Y = xq[..., 1].ravel()
    if space.rank == 1:
        fv = _call_pointwise(f, X, Y, 1).reshape(xq.shape[:2])
        return Field(space, project_component(fv))
    ux, uy = _call_pointwise(f, X, Y, 2)
    cx = project_component(ux.reshape(xq.shape[:2]))
    cy = project_component(uy.reshape(xq.shape[:2]))
    return Field(space, np.concatenate([cx, cy]))


def eval_at(field: Field, point):
    """Value of the FE function at a physical point (scalar or 2-vector)."""
    space = field.space
    ci, ref = space.locate(point)
    vals, _ = space.element.tabulate(np.array([ref]))
    dofs = space.dof_map[ci]
    if space.rank == 1:
        return float(field.coeffs[dofs] @ vals[:, 0])
    n = space.num_scalar_dofs
    return np.array([field.coeffs[dofs] @ vals[:, 0],
                     field.coeffs[n + dofs] @ vals[:, 0]])
