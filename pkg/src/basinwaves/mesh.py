"""Conforming triangulations of axis-aligned rectangles.

Two structured generators are provided: a single-diagonal split (two
triangles per subrectangle) and a symmetric union-jack split (four
triangles per subrectangle).  All queries work on any valid triangle
mesh stored in the same arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class MeshConfigError(ValueError):
    """Invalid mesh construction parameters."""


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh with boundary metadata.

    vertices : (nv, 2) coordinates in meters
    cells    : (nc, 3) vertex indices, counterclockwise
    boundary_edges   : (nbe, 2) vertex index pairs
    boundary_cells   : (nbe,) owning cell of each boundary edge
    boundary_normals : (nbe, 2) outward unit normals
    h_max : max side length over all triangles
    """

    vertices: np.ndarray
    cells: np.ndarray
    boundary_edges: np.ndarray
    boundary_cells: np.ndarray
    boundary_normals: np.ndarray
    h_max: float
    bounds: tuple = field(default=None)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_cells(self) -> int:
        return self.cells.shape[0]

    def cell_areas(self) -> np.ndarray:
        """Signed areas of all cells (positive for CCW orientation)."""
        v = self.vertices
        a, b, c = (v[self.cells[:, k]] for k in range(3))
        ab, ac = b - a, c - a
        return 0.5 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])

    def boundary_edge_lengths(self) -> np.ndarray:
        p = self.vertices[self.boundary_edges[:, 0]]
        q = self.vertices[self.boundary_edges[:, 1]]
        return np.linalg.norm(q - p, axis=1)

    def dump(self, path) -> None:
        """Plain-text dump: header `vertices N cells M`, then coordinates
        and 0-based connectivity."""
        with open(path, "w") as f:
            f.write(f"vertices {self.num_vertices} cells {self.num_cells}\n")
            for x, y in self.vertices:
                f.write(f"{float(x)!r} {float(y)!r}\n")
            for i, j, k in self.cells:
                f.write(f"{i} {j} {k}\n")


def _boundary_data(vertices, cells):
    """Find boundary edges, their owning cells and outward unit normals.

    An edge is on the boundary iff it belongs to exactly one cell.
    """
    edge_count: dict = {}
    for ci, cell in enumerate(cells):
        for a, b in ((cell[0], cell[1]), (cell[1], cell[2]), (cell[2], cell[0])):
            key = (min(a, b), max(a, b))
            edge_count.setdefault(key, []).append((ci, a, b))
    bedges, bcells, bnormals = [], [], []
    for key, owners in edge_count.items():
        if len(owners) > 2:
            raise MeshConfigError(f"edge {key} shared by {len(owners)} cells")
        if len(owners) != 1:
            continue
        ci, a, b = owners[0]
        t = vertices[b] - vertices[a]
        n = np.array([t[1], -t[0]])
        n /= np.linalg.norm(n)
        centroid = vertices[cells[ci]].mean(axis=0)
        mid = 0.5 * (vertices[a] + vertices[b])
        if np.dot(n, mid - centroid) < 0:
            n = -n
        bedges.append((a, b))
        bcells.append(ci)
        bnormals.append(n)
    return (np.array(bedges, dtype=int),
            np.array(bcells, dtype=int),
            np.array(bnormals))


def structured_rect_mesh(nx: int, ny: int, bounds=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """Uniform criss-cross mesh of [x0,x1]x[y0,y1] with 2*nx*ny triangles.

    Each subrectangle is split along the bottom-left/top-right diagonal,
    so h_max is the diagonal of one subrectangle.
    """
    x0, x1, y0, y1 = bounds
    if nx < 1 or ny < 1:
        raise MeshConfigError(f"subdivisions must be >= 1, got nx={nx}, ny={ny}")
    if not (x1 > x0 and y1 > y0):
        raise MeshConfigError(f"degenerate bounds {bounds}")
    return tensor_rect_mesh(np.linspace(x0, x1, nx + 1),
                            np.linspace(y0, y1, ny + 1))


def tensor_rect_mesh(xs, ys) -> Mesh:
    """Criss-cross mesh over the tensor grid xs x ys (possibly graded).

    Each subrectangle is split along the bottom-left/top-right diagonal;
    h_max is the largest subrectangle diagonal.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or ys.size < 2:
        raise MeshConfigError("need at least two coordinates per direction")
    if np.any(np.diff(xs) <= 0) or np.any(np.diff(ys) <= 0):
        raise MeshConfigError("grid coordinates must be strictly increasing")
    nx, ny = xs.size - 1, ys.size - 1
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return i * (ny + 1) + j

    cells = np.empty((2 * nx * ny, 3), dtype=int)
    c = 0
    for i in range(nx):
        for j in range(ny):
            a = vid(i, j)
            b = vid(i + 1, j)
            cc = vid(i + 1, j + 1)
            d = vid(i, j + 1)
            cells[c] = (a, b, cc)
            cells[c + 1] = (a, cc, d)
            c += 2

    h_max = float(np.hypot(np.max(np.diff(xs)), np.max(np.diff(ys))))
    bedges, bcells, bnormals = _boundary_data(vertices, cells)
    return Mesh(vertices=vertices, cells=cells, boundary_edges=bedges,
                boundary_cells=bcells, boundary_normals=bnormals,
                h_max=h_max, bounds=(xs[0], xs[-1], ys[0], ys[-1]))


def crisscross_rect_mesh(nx: int, ny: int,
                         bounds=(0.0, 1.0, 0.0, 1.0)) -> Mesh:
    """Symmetric criss-cross mesh: both diagonals of every subrectangle,
    giving 4*nx*ny triangles meeting at the subrectangle centers.

    Unlike the single-diagonal split, this mesh has no preferred direction,
    and h_max equals the subrectangle side for square subrectangles.
    """
    x0, x1, y0, y1 = bounds
    if nx < 1 or ny < 1:
        raise MeshConfigError(f"subdivisions must be >= 1, got nx={nx}, ny={ny}")
    if not (x1 > x0 and y1 > y0):
        raise MeshConfigError(f"degenerate bounds {bounds}")

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    corners = np.column_stack([X.ravel(), Y.ravel()])
    xc = 0.5 * (xs[:-1] + xs[1:])
    yc = 0.5 * (ys[:-1] + ys[1:])
    XC, YC = np.meshgrid(xc, yc, indexing="ij")
    centers = np.column_stack([XC.ravel(), YC.ravel()])
    vertices = np.vstack([corners, centers])
    ncorner = corners.shape[0]

    def vid(i, j):
        return i * (ny + 1) + j

    def cid(i, j):
        return ncorner + i * ny + j

    cells = np.empty((4 * nx * ny, 3), dtype=int)
    c = 0
    for i in range(nx):
        for j in range(ny):
            a = vid(i, j)
            b = vid(i + 1, j)
            cc = vid(i + 1, j + 1)
            d = vid(i, j + 1)
            m = cid(i, j)
            cells[c] = (a, b, m)
            cells[c + 1] = (b, cc, m)
            cells[c + 2] = (cc, d, m)
            cells[c + 3] = (d, a, m)
            c += 4

    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    h_max = float(max(dx, dy))
    bedges, bcells, bnormals = _boundary_data(vertices, cells)
    return Mesh(vertices=vertices, cells=cells, boundary_edges=bedges,
                boundary_cells=bcells, boundary_normals=bnormals,
                h_max=h_max, bounds=(x0, x1, y0, y1))


def boundary_edges_of(mesh: Mesh):
    """List of (edge vertex pair, outward unit normal, length)."""
    lengths = mesh.boundary_edge_lengths()
    return [(tuple(e), n, float(l)) for e, n, l in
            zip(mesh.boundary_edges, mesh.boundary_normals, lengths)]
