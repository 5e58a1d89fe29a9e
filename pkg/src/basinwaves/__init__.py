"""Finite-element solver for a regularized BBM-BBM shallow-water system in
closed basins, with slip walls imposed weakly via Nitsche penalties."""

from .mesh import (Mesh, crisscross_rect_mesh, structured_rect_mesh,
                   tensor_rect_mesh, boundary_edges_of)
from .space import Field, FunctionSpace, interpolate, l2_project, eval_at
from .assembly import Bathymetry, OperatorSet, assemble_A, assemble_B
from .model import (ModelConfig, SemidiscreteSystem, State, flat_bottom,
                    gaussian_dip_bottom, shoaling_bottom, solitary_wave_ic)
from .timeloop import RunConfig, rk4_step, run

__all__ = [
    "Mesh", "crisscross_rect_mesh", "structured_rect_mesh",
    "tensor_rect_mesh", "boundary_edges_of",
    "Field", "FunctionSpace", "interpolate", "l2_project", "eval_at",
    "Bathymetry", "OperatorSet", "assemble_A", "assemble_B",
    "ModelConfig", "SemidiscreteSystem", "State", "flat_bottom",
    "gaussian_dip_bottom", "shoaling_bottom", "solitary_wave_ic",
    "RunConfig", "rk4_step", "run",
]
