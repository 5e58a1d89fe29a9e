"""Error norms against exact solutions, elliptic projections, and
experimental convergence rates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import EdgeTables, VolumeTables
from .elements import MAX_QUAD_DEGREE


# ---------------------------------------------------------------------------
# elliptic projections

def elliptic_project_scalar(system, f, grad_f) -> np.ndarray:
    """Projection R_h f: A(R_h f, chi) = A(f, chi) with the analytic f.

    grad_f(x, y) -> (fx, fy). Returns coefficients in the eta space.
    """
    vol = system.vol
    space_r = system.space_r
    phi, gphi = vol.tables_for(space_r)
    X, Y = vol.xq[..., 0], vol.xq[..., 1]
    fq = f(X, Y)
    gx, gy = grad_f(X, Y)
    Dq2 = system.vol.scalar_values(space_r, system.D_disp.coeffs) ** 2
    w = vol.wdet
    local = np.einsum("cq,iq->ci", w * fq, phi)
    local += np.einsum("cq,ciq->ci", w * Dq2 / 6.0 * gx, gphi[..., 0])
    local += np.einsum("cq,ciq->ci", w * Dq2 / 6.0 * gy, gphi[..., 1])
    load = vol.scatter(space_r, local)
    return system.ops.solve_A(load)


def elliptic_project_vector(system, u0, div_u0) -> np.ndarray:
    """Projection R_h u0: B(R_h u0, chi) = B(u0, chi) with the analytic u0.

    u0(x, y) -> (ux, uy), div_u0(x, y) -> scalar. All Nitsche boundary terms
    are integrated as written even when u0 . n vanishes analytically.
    """
    vol, edges = system.vol, system.edges
    space_r, space_p = system.space_r, system.space_p
    phi, gphi = vol.tables_for(space_p)
    Dq = vol.scalar_values(space_r, system.D_disp.coeffs)
    gDq = vol.scalar_gradients(space_r, system.D_disp.coeffs)
    X, Y = vol.xq[..., 0], vol.xq[..., 1]
    uxq, uyq = u0(X, Y)
    divq = div_u0(X, Y)
    # div(D^2 u0) with the discrete bottom, product rule cellwise
    div_d2u = 2.0 * Dq * (gDq[..., 0] * uxq + gDq[..., 1] * uyq) + Dq ** 2 * divq
    w = vol.wdet
    npd = space_p.num_scalar_dofs
    load = np.empty(2 * npd)
    uq = (uxq, uyq)
    for k in range(2):
        # (D u0, D chi) + 1/6 (div(D^2 u0), div(D^2 chi_k))
        Sk = 2.0 * Dq * gDq[..., k]
        local = np.einsum("cq,iq->ci", w * Dq ** 2 * uq[k], phi)
        local += np.einsum("cq,iq->ci", w / 6.0 * div_d2u * Sk, phi)
        local += np.einsum("cq,ciq->ci", w / 6.0 * div_d2u * Dq ** 2,
                           gphi[..., k])
        load[k * npd:(k + 1) * npd] = vol.scatter(space_p, local)

    # boundary terms
    phie, gphie = edges.tables_for(space_p)
    Dqe = edges.scalar_values(space_r, system.D_disp.coeffs)
    gDqe = edges.scalar_gradients(space_r, system.D_disp.coeffs)
    Xe, Ye = edges.xq[..., 0], edges.xq[..., 1]
    uxe, uye = u0(Xe, Ye)
    dive = div_u0(Xe, Ye)
    div_d2ue = 2.0 * Dqe * (gDqe[..., 0] * uxe + gDqe[..., 1] * uye) \
        + Dqe ** 2 * dive
    un = uxe * edges.normals[:, 0, None] + uye * edges.normals[:, 1, None]
    wl = edges.wl
    gamma, h = system.ops.gamma, system.ops.h_penalty
    cells = edges.cells
    dm = space_p.dof_map[cells]
    for k in range(2):
        nk = edges.normals[:, k, None]
        # -1/6 <div(D^2 u0), D^2 chi . n>
        loc = np.einsum("eq,eiq->ei", -wl / 6.0 * div_d2ue * Dqe ** 2 * nk, phie)
        # -1/6 <D^2 u0 . n, div(D^2 chi)>
        Ske = 2.0 * Dqe * gDqe[..., k]
        loc += np.einsum("eq,eiq->ei", -wl / 6.0 * Dqe ** 2 * un * Ske, phie)
        loc += np.einsum("eq,eiq->ei", -wl / 6.0 * Dqe ** 4 * un, gphie[..., k])
        # gamma/h <D^2 u0 . n, chi . n>
        loc += np.einsum("eq,eiq->ei",
                         wl * (gamma / h) * Dqe ** 2 * un * nk, phie)
        np.add.at(load, k * npd + dm, loc)
    return system.ops.solve_B(load)


# ---------------------------------------------------------------------------
# error norms

@dataclass
class ErrorRow:
    h: float
    L2_eta: float
    H1_eta: float
    L2_u: float
    Hdiv_u: float
    H1_u: float
    trace_u_n: float


@dataclass
class ErrorReport:
    rows: list = field(default_factory=list)

    def add(self, row: ErrorRow):
        self.rows.append(row)

    def rates(self, attr: str):
        hs = [r.h for r in self.rows]
        errs = [getattr(r, attr) for r in self.rows]
        return convergence_rates(hs, errs)

    def write_csv(self, path):
        cols = ["L2_eta", "H1_eta", "L2_u", "Hdiv_u", "H1_u"]
        header = ("h,err_L2_eta,rate,err_H1_eta,rate,err_L2_u,rate,"
                  "err_div_u,rate,err_H1_u,rate,trace_u_n")
        rate_tables = {c: self.rates(c) for c in cols}
        with open(path, "w") as f:
            f.write(header + "\n")
            for i, r in enumerate(self.rows):
                parts = [f"{r.h:.10g}"]
                for c in cols:
                    parts.append(f"{getattr(r, c):.10g}")
                    rate = rate_tables[c][i - 1] if i > 0 else float("nan")
                    parts.append(f"{rate:.3f}" if np.isfinite(rate) else "")
                parts.append(f"{r.trace_u_n:.10g}")
                f.write(",".join(parts) + "\n")


def convergence_rates(hs, errors):
    """Experimental rates log(E_i/E_{i+1}) / log(h_i/h_{i+1}) for adjacent
    levels; length len(hs) - 1."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 2:
        return np.array([])
    return np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])


def error_norms(system, yvec, exact, t: float) -> ErrorRow:
    """All error norms of a discrete state against an analytic solution.

    exact provides eta, ux, uy, grad_eta, grad_ux, grad_uy, div_u as
    (x, y, t) callables (see ManufacturedSolution). Quadrature runs two
    degrees above the assembly rule.
    """
    deg = min(MAX_QUAD_DEGREE, 2 * system.degree_u + 4)
    vol = VolumeTables(system.mesh, deg)
    space_r, space_p = system.space_r, system.space_p
    eta_c, u_c = system.split(yvec)
    X, Y = vol.xq[..., 0], vol.xq[..., 1]
    w = vol.wdet

    e_eta = vol.scalar_values(space_r, eta_c) - exact.eta(X, Y, t)
    ge = vol.scalar_gradients(space_r, eta_c)
    gex = ge[..., 0] - exact.grad_eta[0](X, Y, t)
    gey = ge[..., 1] - exact.grad_eta[1](X, Y, t)
    L2_eta = np.sqrt(np.sum(w * e_eta ** 2))
    H1_eta = np.sqrt(L2_eta ** 2 + np.sum(w * (gex ** 2 + gey ** 2)))

    npd = space_p.num_scalar_dofs
    ux, uy = u_c[:npd], u_c[npd:]
    phi_p, _ = vol.tables_for(space_p)
    dm = space_p.dof_map
    e_ux = np.einsum("ci,iq->cq", ux[dm], phi_p) - exact.ux(X, Y, t)
    e_uy = np.einsum("ci,iq->cq", uy[dm], phi_p) - exact.uy(X, Y, t)
    gux = vol.scalar_gradients(space_p, ux)
    guy = vol.scalar_gradients(space_p, uy)
    e_div = gux[..., 0] + guy[..., 1] - exact.div_u(X, Y, t)
    e_guxx = gux[..., 0] - exact.grad_ux[0](X, Y, t)
    e_guxy = gux[..., 1] - exact.grad_ux[1](X, Y, t)
    e_guyx = guy[..., 0] - exact.grad_uy[0](X, Y, t)
    e_guyy = guy[..., 1] - exact.grad_uy[1](X, Y, t)
    L2_u = np.sqrt(np.sum(w * (e_ux ** 2 + e_uy ** 2)))
    Hdiv_u = np.sqrt(L2_u ** 2 + np.sum(w * e_div ** 2))
    H1_u = np.sqrt(L2_u ** 2 + np.sum(
        w * (e_guxx ** 2 + e_guxy ** 2 + e_guyx ** 2 + e_guyy ** 2)))

    trace = boundary_normal_trace(system, u_c)
    return ErrorRow(h=system.mesh.h_max, L2_eta=float(L2_eta),
                    H1_eta=float(H1_eta), L2_u=float(L2_u),
                    Hdiv_u=float(Hdiv_u), H1_u=float(H1_u),
                    trace_u_n=float(trace))


def boundary_normal_trace(system, u_coeffs) -> float:
    """||u_h . n|| over the boundary, by edge quadrature."""
    edges = system.edges
    space_p = system.space_p
    npd = space_p.num_scalar_dofs
    uxe = edges.scalar_values(space_p, u_coeffs[:npd])
    uye = edges.scalar_values(space_p, u_coeffs[npd:])
    un = uxe * edges.normals[:, 0, None] + uye * edges.normals[:, 1, None]
    return float(np.sqrt(np.sum(edges.wl * un ** 2)))


def triple_norm(system, u_coeffs) -> float:
    """Nitsche norm: Hdiv plus h-weighted boundary divergence and
    1/h-weighted normal trace."""
    vol, edges = system.vol, system.edges
    space_p = system.space_p
    npd = space_p.num_scalar_dofs
    ux, uy = u_coeffs[:npd], u_coeffs[npd:]
    phi_p, _ = vol.tables_for(space_p)
    dm = space_p.dof_map
    uxq = np.einsum("ci,iq->cq", ux[dm], phi_p)
    uyq = np.einsum("ci,iq->cq", uy[dm], phi_p)
    divq = vol.scalar_gradients(space_p, ux)[..., 0] \
        + vol.scalar_gradients(space_p, uy)[..., 1]
    w = vol.wdet
    hdiv2 = np.sum(w * (uxq ** 2 + uyq ** 2 + divq ** 2))
    _, gphie = edges.tables_for(space_p)
    dive = edges.scalar_gradients(space_p, ux)[..., 0] \
        + edges.scalar_gradients(space_p, uy)[..., 1]
    uxe = edges.scalar_values(space_p, ux)
    uye = edges.scalar_values(space_p, uy)
    un = uxe * edges.normals[:, 0, None] + uye * edges.normals[:, 1, None]
    h = system.ops.h_penalty
    bdy = h * np.sum(edges.wl * dive ** 2) + np.sum(edges.wl * un ** 2) / h
    return float(np.sqrt(hdiv2 + bdy))
