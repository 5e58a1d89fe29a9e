"""The semidiscrete BBM-BBM system: right-hand sides, bathymetry profiles,
manufactured forcing, and solitary-wave initial data.

Two model variants are supported. The full variant keeps the variable
bathymetry D(x) inside the dispersive operators; the simplified variant
replaces it there by a constant reference depth D0 while keeping the true
depth in the nonlinear flux (D + eta) u. The two coincide exactly when the
bottom is flat.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import sympy as sym

from .assembly import (Bathymetry, EdgeTables, OperatorSet, VolumeTables,
                       assemble_mass_rhs, assemble_momentum_rhs,
                       assemble_scalar_load, assemble_vector_load)
from .space import Field, FunctionSpace, interpolate


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time integration."""


# ---------------------------------------------------------------------------
# bathymetry profiles

def flat_bottom(depth: float) -> Bathymetry:
    x, y = sym.symbols("x y")
    return Bathymetry(func=lambda X, Y: np.full_like(np.asarray(X, float), depth),
                      d_min=depth, kind="flat", expr=sym.Float(depth) + 0 * x)


def gaussian_dip_bottom() -> Bathymetry:
    """Unit-depth bottom with a small Gaussian dip, used by the forced
    convergence study."""
    x, y = sym.symbols("x y")
    expr = 1 - sym.Rational(1, 100) * sym.exp(-(x ** 2 + y ** 2))
    return Bathymetry(func=lambda X, Y: 1.0 - 1e-2 * np.exp(-(X ** 2 + Y ** 2)),
                      d_min=0.99, kind="gaussian-dip", expr=expr)


def shoaling_bottom(depth: float = 0.44, slope: float = 1.0 / 50.0,
                    toe: float = 0.0, x_end: float = 20.0) -> Bathymetry:
    """Flat depth for x < toe, then a plane slope up to x_end."""
    d_min = depth - slope * (x_end - toe)
    if d_min <= 0:
        raise ValueError("slope reaches zero depth inside the basin")

    def func(X, Y):
        X = np.asarray(X, dtype=float)
        return np.where(X < toe, depth, depth - slope * (X - toe))

    return Bathymetry(func=func, d_min=d_min, kind="shoal")


# ---------------------------------------------------------------------------
# configuration and state

@dataclass
class ModelConfig:
    bathymetry: Bathymetry
    variant: str = "full"            # "full" | "simplified"
    g: float = 9.81
    gamma: float = 1000.0
    forcing: str = "none"            # "none" | "manufactured"
    ref_depth: float = None          # D0, required by the simplified variant

    def __post_init__(self):
        if self.variant not in ("full", "simplified"):
            raise ValueError(f"unknown model variant {self.variant!r}")
        if self.variant == "simplified" and not (self.ref_depth and self.ref_depth > 0):
            raise ValueError("simplified variant requires a reference depth > 0")
        if self.forcing not in ("none", "manufactured"):
            raise ValueError(f"unknown forcing mode {self.forcing!r}")


@dataclass
class State:
    eta: Field
    u: Field
    t: float = 0.0

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.eta.coeffs, self.u.coeffs])


# ---------------------------------------------------------------------------
# manufactured solution

_X, _Y, _T = sym.symbols("x y t")


def manufactured_exact():
    """The separable exact solution used by the convergence study; satisfies
    the slip conditions on the unit square and is curl-free."""
    eta = sym.exp(_T) * sym.cos(sym.pi * _X) * sym.cos(sym.pi * _Y)
    ux = sym.exp(_T) * sym.cos(sym.pi * _Y) * sym.sin(sym.pi * _X)
    uy = sym.exp(_T) * sym.cos(sym.pi * _X) * sym.sin(sym.pi * _Y)
    return eta, ux, uy


def _lamb(expr):
    return sym.lambdify((_X, _Y, _T), expr, modules="numpy")


class ManufacturedSolution:
    """Exact fields, their derivatives and the forcing terms obtained by
    substituting the exact solution into the strong equations."""

    def __init__(self, bathymetry: Bathymetry, g: float = 1.0):
        if bathymetry.expr is None:
            raise ValueError("manufactured forcing needs an analytic bottom")
        D = bathymetry.expr
        eta, ux, uy = manufactured_exact()
        x, y, t = _X, _Y, _T

        def div(fx, fy):
            return sym.diff(fx, x) + sym.diff(fy, y)

        eta_t = sym.diff(eta, t)
        flux_x = (D + eta) * ux
        flux_y = (D + eta) * uy
        F_eta = eta_t + div(flux_x, flux_y) \
            - sym.Rational(1, 6) * div(D ** 2 * sym.diff(eta_t, x),
                                       D ** 2 * sym.diff(eta_t, y))
        q = g * eta + (ux ** 2 + uy ** 2) / 2
        div_d2ut = div(D ** 2 * sym.diff(ux, t), D ** 2 * sym.diff(uy, t))
        F_ux = sym.diff(ux, t) + sym.diff(q, x) - sym.Rational(1, 6) * sym.diff(div_d2ut, x)
        F_uy = sym.diff(uy, t) + sym.diff(q, y) - sym.Rational(1, 6) * sym.diff(div_d2ut, y)

        self.g = g
        self.eta = _lamb(eta)
        self.ux = _lamb(ux)
        self.uy = _lamb(uy)
        self.eta_t = _lamb(eta_t)
        self.ux_t = _lamb(sym.diff(ux, t))
        self.uy_t = _lamb(sym.diff(uy, t))
        self.grad_eta = (_lamb(sym.diff(eta, x)), _lamb(sym.diff(eta, y)))
        self.grad_ux = (_lamb(sym.diff(ux, x)), _lamb(sym.diff(ux, y)))
        self.grad_uy = (_lamb(sym.diff(uy, x)), _lamb(sym.diff(uy, y)))
        self.div_u = _lamb(div(ux, uy))
        self.F_eta = _lamb(sym.simplify(F_eta))
        self.F_ux = _lamb(sym.simplify(F_ux))
        self.F_uy = _lamb(sym.simplify(F_uy))


# ---------------------------------------------------------------------------
# solitary wave

def solitary_wave_ic(amplitude: float, depth: float, x0: float,
                     g: float = 9.81):
    """Line solitary wave approximation, uniform in y.

    eta = A sech^2(kappa (x - x0)), u_x = c eta / (D0 + eta), u_y = 0, with
    the weakly-nonlinear speed c = sqrt(g D0) (1 + A / (2 D0)) and width
    kappa = sqrt(3 A / (4 D0)) / (D0 sqrt(1 + A / D0)).

    Returns (eta_func, u_func, c, kappa) as array-friendly callables.
    """
    A, D0 = amplitude, depth
    if A <= 0 or D0 <= 0:
        raise ValueError("amplitude and depth must be positive")
    if A / D0 > 0.8:
        warnings.warn(f"A/D0 = {A / D0:.2f} is outside the long-wave regime",
                      stacklevel=2)
    c = np.sqrt(g * D0) * (1.0 + A / (2.0 * D0))
    kappa = np.sqrt(3.0 * A / (4.0 * D0)) / (D0 * np.sqrt(1.0 + A / D0))

    def eta_func(X, Y):
        X = np.asarray(X, dtype=float)
        return A / np.cosh(kappa * (X - x0)) ** 2

    def u_func(X, Y):
        e = eta_func(X, Y)
        return c * e / (D0 + e), np.zeros_like(e)

    return eta_func, u_func, float(c), float(kappa)


# ---------------------------------------------------------------------------
# semidiscrete system

@dataclass
class SemidiscreteSystem:
    """Everything needed to evaluate the method-of-lines right-hand side.

    Operators are assembled and factorized once; each evaluation performs two
    load assemblies and two sparse triangular solves.
    """

    mesh: object
    cfg: ModelConfig
    degree_eta: int = 1
    degree_u: int = 2
    check_pd: bool = True
    quad_margin: int = 3

    def __post_init__(self):
        cfg = self.cfg
        self.space_r = FunctionSpace(self.mesh, self.degree_eta, rank=1)
        self.space_p = FunctionSpace(self.mesh, self.degree_u, rank=2)
        deg = 2 * max(self.degree_eta, self.degree_u) + self.quad_margin
        self.vol = VolumeTables(self.mesh, min(deg, 12))
        self.edges = EdgeTables(self.mesh, min(deg, 12))

        self.D_flux = cfg.bathymetry.project(self.space_r)
        if cfg.variant == "simplified":
            coeffs = np.full(self.space_r.num_scalar_dofs, cfg.ref_depth)
            self.D_disp = Field(self.space_r, coeffs)
        else:
            self.D_disp = self.D_flux
        self.ops = OperatorSet.build(self.space_r, self.space_p, self.D_disp,
                                     cfg.gamma, vol=self.vol, edges=self.edges,
                                     check_pd=self.check_pd)
        self.D_flux_q = self.vol.scalar_values(self.space_r, self.D_flux.coeffs)
        self.D_disp_sq_q = self.vol.scalar_values(self.space_r,
                                                  self.D_disp.coeffs) ** 2
        self._n_eta = self.space_r.num_scalar_dofs
        self._xq = self.vol.xq[..., 0]
        self._yq = self.vol.xq[..., 1]
        if cfg.forcing == "manufactured":
            self.forcing = ManufacturedSolution(cfg.bathymetry, g=cfg.g)
        else:
            self.forcing = None

    # -- state packing -----------------------------------------------------

    def split(self, yvec):
        return yvec[:self._n_eta], yvec[self._n_eta:]

    def state_from_vector(self, yvec, t=0.0) -> State:
        eta_c, u_c = self.split(yvec)
        return State(eta=Field(self.space_r, eta_c),
                     u=Field(self.space_p, u_c), t=t)

    def interpolate_initial(self, eta0, u0) -> np.ndarray:
        eta = interpolate(self.space_r, eta0)
        u = interpolate(self.space_p, u0)
        return np.concatenate([eta.coeffs, u.coeffs])

    # -- dynamics ----------------------------------------------------------

    def rhs(self, t: float, yvec: np.ndarray) -> np.ndarray:
        eta_c, u_c = self.split(yvec)
        load_eta = assemble_mass_rhs(self.space_r, self.vol, self.D_flux_q,
                                     eta_c, u_c, self.space_p)
        load_u = assemble_momentum_rhs(self.space_p, self.vol,
                                       self.D_disp_sq_q, eta_c, u_c,
                                       self.cfg.g, self.space_r)
        if self.forcing is not None:
            f = self.forcing
            load_eta = load_eta + assemble_scalar_load(
                self.space_r, self.vol, f.F_eta(self._xq, self._yq, t))
            load_u = load_u + assemble_vector_load(
                self.space_p, self.vol,
                f.F_ux(self._xq, self._yq, t), f.F_uy(self._xq, self._yq, t),
                weight_q=self.D_disp_sq_q)
        eta_t = self.ops.solve_A(load_eta)
        u_t = self.ops.solve_B(load_u)
        return np.concatenate([eta_t, u_t])

    # -- conserved quantities ---------------------------------------------

    def conserved_quantities(self, yvec) -> tuple:
        """Excess mass M = int eta and energy E = 1/2 int g eta^2 +
        (D + eta) |u|^2, both by quadrature with the projected bottom."""
        eta_c, u_c = self.split(yvec)
        etaq = self.vol.scalar_values(self.space_r, eta_c)
        phi_p, _ = self.vol.tables_for(self.space_p)
        dm = self.space_p.dof_map
        npd = self.space_p.num_scalar_dofs
        uxq = np.einsum("ci,iq->cq", u_c[:npd][dm], phi_p)
        uyq = np.einsum("ci,iq->cq", u_c[npd:][dm], phi_p)
        w = self.vol.wdet
        M = float(np.sum(w * etaq))
        E = 0.5 * float(np.sum(w * (self.cfg.g * etaq ** 2
                                    + (self.D_flux_q + etaq)
                                    * (uxq ** 2 + uyq ** 2))))
        return M, E
