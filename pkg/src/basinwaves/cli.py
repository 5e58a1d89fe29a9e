"""Experiment drivers and command-line interface.

Subcommands:
  converge  -- forced manufactured-solution refinement study on the unit square
  shoal     -- solitary-wave shoaling in the [-50,20]x[0,1] basin
  run       -- generic single run driven by a flat key=value config file
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, model
from .mesh import crisscross_rect_mesh, structured_rect_mesh, tensor_rect_mesh
from .model import (ModelConfig, SemidiscreteSystem, flat_bottom,
                    gaussian_dip_bottom, shoaling_bottom, solitary_wave_ic)
from .timeloop import RunConfig, run

DEFAULT_GAUGES = [(0.0, 0.5), (16.25, 0.5), (17.75, 0.5)]


# ---------------------------------------------------------------------------
# convergence study

def converge_study(r: int, p: int, levels: int = 5, gamma: float = 1000.0,
                   dt: float = 5e-4, T: float = 1.0, out_dir=None,
                   verbose: bool = False) -> analysis.ErrorReport:
    """Run the forced convergence study on grids N = 8 + 4i, i < levels.

    The union-jack mesh is used so that the triangulation has no preferred
    diagonal direction; a single-diagonal split pollutes the velocity
    gradients with a directional curl-mode error of reduced order.
    """
    report = analysis.ErrorReport()
    cfg = ModelConfig(bathymetry=gaussian_dip_bottom(), g=1.0, gamma=gamma,
                      forcing="manufactured")
    for i in range(levels):
        N = 8 + 4 * i
        mesh = crisscross_rect_mesh(N, N, (0.0, 1.0, 0.0, 1.0))
        system = SemidiscreteSystem(mesh, cfg, degree_eta=r, degree_u=p,
                                    check_pd=(i == 0))
        ms = system.forcing
        eta0 = analysis.elliptic_project_scalar(
            system, lambda X, Y: ms.eta(X, Y, 0.0),
            lambda X, Y: (ms.grad_eta[0](X, Y, 0.0), ms.grad_eta[1](X, Y, 0.0)))
        u0 = analysis.elliptic_project_vector(
            system, lambda X, Y: (ms.ux(X, Y, 0.0), ms.uy(X, Y, 0.0)),
            lambda X, Y: ms.div_u(X, Y, 0.0))
        y, _, _ = run(system, np.concatenate([eta0, u0]),
                      RunConfig(dt=dt, T_final=T, log_every=10 ** 9))
        row = analysis.error_norms(system, y, ms, T)
        report.add(row)
        if verbose:
            print(f"N={N:3d}  L2(eta)={row.L2_eta:.4e}  "
                  f"Hdiv(u)={row.Hdiv_u:.4e}", flush=True)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        report.write_csv(out / f"converge_r{r}_p{p}.csv")
    return report


# ---------------------------------------------------------------------------
# shoaling experiment

def shoal_run(amplitude: float, variant: str = "full", nx: int = 720,
              ny: int = 10, dt: float = 1e-3, T: float = 17.0,
              r: int = 1, p: int = 2, depth: float = 0.44,
              x0: float = -20.0, gamma: float = 1000.0,
              gauges=None, out_dir=None, tag: str = "",
              check_pd: bool = False, shore_dx: float = None,
              shore_from: float = 10.0):
    """Propagate a solitary wave over the 1/50 shoaling slope.

    With shore_dx set, the grid is graded: uniform spacing 70/nx offshore
    and spacing shore_dx on [shore_from, 20], where the wave steepens into
    a structure much narrower than the incident solitary wave.  The wave
    eventually hits the x = 20 wall (depth 0.04 m) around t = 18 s for
    amplitude 0.12 and develops unbounded steepness there, so runs should
    end before the wall impact.

    Returns (system, gauge series, conservation log, final state vector).
    """
    gauges = DEFAULT_GAUGES if gauges is None else gauges
    if shore_dx is None:
        mesh = structured_rect_mesh(nx, ny, (-50.0, 20.0, 0.0, 1.0))
    else:
        n_off = max(1, round((shore_from + 50.0) * nx / 70.0))
        n_sh = max(1, round((20.0 - shore_from) / shore_dx))
        xs = np.concatenate([
            np.linspace(-50.0, shore_from, n_off + 1)[:-1],
            np.linspace(shore_from, 20.0, n_sh + 1)])
        mesh = tensor_rect_mesh(xs, np.linspace(0.0, 1.0, ny + 1))
    bathy = shoaling_bottom(depth=depth)
    cfg = ModelConfig(bathymetry=bathy, variant=variant, g=9.81, gamma=gamma,
                      ref_depth=depth)
    system = SemidiscreteSystem(mesh, cfg, degree_eta=r, degree_u=p,
                                check_pd=check_pd)
    eta0, u0, c, _ = solitary_wave_ic(amplitude, depth, x0, g=cfg.g)
    y0 = system.interpolate_initial(eta0, u0)
    y, gauge_series, cons = run(system, y0,
                                RunConfig(dt=dt, T_final=T,
                                          gauge_points=gauges, log_every=10))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        suffix = f"_{tag}" if tag else ""
        gauge_series.write_csv(out / f"gauges_{variant}_A{amplitude}{suffix}.csv")
        cons.write_csv(out / f"conservation_{variant}_A{amplitude}{suffix}.csv")
        dump_state(out / f"state_{variant}_A{amplitude}{suffix}.txt", system, y, T)
    return system, gauge_series, cons, y


def dump_state(path, system, yvec, t):
    """Plain-text state dump: header, then eta and u coefficient vectors."""
    eta_c, u_c = system.split(yvec)
    with open(path, "w") as f:
        f.write("basinwaves-state 1\n")
        f.write(f"t {float(t)!r}\n")
        f.write(f"eta {len(eta_c)}\n")
        for v in eta_c:
            f.write(f"{float(v)!r}\n")
        f.write(f"u {len(u_c)}\n")
        for v in u_c:
            f.write(f"{float(v)!r}\n")


# ---------------------------------------------------------------------------
# config files

def parse_config(text: str) -> dict:
    """Flat `key = value` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def serialize_config(cfg: dict) -> str:
    return "".join(f"{k} = {v}\n" for k, v in cfg.items())


_RUN_REQUIRED = ("nx", "ny", "dt", "T")


def generic_run(cfg: dict, out_dir=None):
    """Single run from a parsed config dict."""
    missing = [k for k in _RUN_REQUIRED if k not in cfg]
    if missing:
        raise KeyError(f"missing config fields: {', '.join(missing)}")
    nx, ny = int(cfg["nx"]), int(cfg["ny"])
    bounds = tuple(float(v) for v in cfg.get("bounds", "-50,20,0,1").split(","))
    mesh = structured_rect_mesh(nx, ny, bounds)
    depth = float(cfg.get("depth", 0.44))
    kind = cfg.get("bathymetry", "flat")
    if kind == "flat":
        bathy = flat_bottom(depth)
    elif kind == "shoal":
        bathy = shoaling_bottom(depth=depth)
    elif kind == "gaussian":
        bathy = gaussian_dip_bottom()
    else:
        raise KeyError(f"unknown bathymetry kind {kind!r}")
    r = int(cfg.get("degree_eta", 1))
    p = int(cfg.get("degree_u", 2))
    mcfg = ModelConfig(bathymetry=bathy, variant=cfg.get("variant", "full"),
                       g=float(cfg.get("g", 9.81)),
                       gamma=float(cfg.get("gamma", 1000.0)),
                       ref_depth=depth)
    system = SemidiscreteSystem(mesh, mcfg, degree_eta=r, degree_u=p,
                                check_pd=cfg.get("check_pd", "0") == "1")
    if "amplitude" in cfg:
        eta0, u0, _, _ = solitary_wave_ic(float(cfg["amplitude"]), depth,
                                          float(cfg.get("x0", -20.0)),
                                          g=mcfg.g)
        y0 = system.interpolate_initial(eta0, u0)
    else:
        y0 = np.zeros(system.space_r.num_scalar_dofs + system.space_p.dim)
    gauges = []
    if cfg.get("gauges"):
        for pair in cfg["gauges"].split(";"):
            gx, gy = pair.split(":")
            gauges.append((float(gx), float(gy)))
    y, gauge_series, cons = run(system, y0,
                                RunConfig(dt=float(cfg["dt"]),
                                          T_final=float(cfg["T"]),
                                          gauge_points=gauges, log_every=10))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if gauges:
            gauge_series.write_csv(out / "gauges.csv")
        cons.write_csv(out / "conservation.csv")
        dump_state(out / "state.txt", system, y, float(cfg["T"]))
    return system, gauge_series, cons, y


# ---------------------------------------------------------------------------
# argument parsing

def _parse_degrees(text):
    r, p = (int(v) for v in text.split(","))
    for d in (r, p):
        if not 1 <= d <= 4:
            raise argparse.ArgumentTypeError(
                f"polynomial degree {d} outside the supported range 1-4")
    return r, p


def build_parser():
    parser = argparse.ArgumentParser(
        prog="basinwaves",
        description="BBM-BBM basin wave solver with Nitsche slip walls")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("converge", help="manufactured-solution rate study")
    c.add_argument("--degrees", type=_parse_degrees, default=(1, 2),
                   metavar="r,p",
                   help="polynomial degrees for (eta, u); default 1,2")
    c.add_argument("--levels", type=int, default=5)
    c.add_argument("--gamma", type=float, default=1000.0)
    c.add_argument("--dt", type=float, default=5e-4)
    c.add_argument("--T", type=float, default=1.0)
    c.add_argument("--out", default="out")
    c.add_argument("--verbose", action="store_true")

    s = sub.add_parser("shoal", help="solitary-wave shoaling benchmark")
    s.add_argument("--amplitude", type=float, required=True)
    s.add_argument("--variant", choices=("full", "simplified", "both"),
                   default="full")
    s.add_argument("--nx", type=int, default=720)
    s.add_argument("--ny", type=int, default=10)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--T", type=float, default=17.0)
    s.add_argument("--shore-dx", type=float, default=None,
                   help="grade the grid to this spacing near the shore")
    s.add_argument("--shore-from", type=float, default=10.0,
                   help="x coordinate where the graded region starts")
    s.add_argument("--depth", type=float, default=0.44)
    s.add_argument("--x0", type=float, default=-20.0)
    s.add_argument("--degrees", type=_parse_degrees, default=(1, 2),
                   metavar="r,p",
                   help="polynomial degrees for (eta, u); default 1,2")
    s.add_argument("--gamma", type=float, default=1000.0)
    s.add_argument("--out", default="out")

    g = sub.add_parser("run", help="generic run from a config file")
    g.add_argument("--config", required=True)
    g.add_argument("--out", default="out")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "converge":
            r, p = args.degrees
            report = converge_study(r, p, args.levels, gamma=args.gamma,
                                    dt=args.dt, T=args.T, out_dir=args.out,
                                    verbose=args.verbose)
            if not all(np.isfinite(row.L2_eta) for row in report.rows):
                return 1
        elif args.command == "shoal":
            variants = (["full", "simplified"] if args.variant == "both"
                        else [args.variant])
            r, p = args.degrees
            for variant in variants:
                shoal_run(args.amplitude, variant=variant, nx=args.nx,
                          ny=args.ny, dt=args.dt, T=args.T, r=r, p=p,
                          depth=args.depth, x0=args.x0, gamma=args.gamma,
                          out_dir=args.out, shore_dx=args.shore_dx,
                          shore_from=args.shore_from)
        elif args.command == "run":
            path = Path(args.config)
            if not path.exists():
                print(f"config file not found: {path}", file=sys.stderr)
                return 2
            cfg = parse_config(path.read_text())
            generic_run(cfg, out_dir=args.out)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except model.BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
