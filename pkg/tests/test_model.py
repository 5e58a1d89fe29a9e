import numpy as np
import pytest
import sympy as sym

from basinwaves.mesh import structured_rect_mesh
from basinwaves.model import (BlowUpError, ManufacturedSolution, ModelConfig,
                              SemidiscreteSystem, State, flat_bottom,
                              gaussian_dip_bottom, manufactured_exact,
                              shoaling_bottom, solitary_wave_ic)
from basinwaves.space import Field
from conftest import UNIT_SQUARE, make_manufactured_system


class TestBathymetryProfiles:
    def test_flat(self):
        b = flat_bottom(0.44)
        assert np.allclose(b.func(np.linspace(-5, 5, 7), 0.0), 0.44)
        assert b.d_min == 0.44

    def test_gaussian_dip(self):
        b = gaussian_dip_bottom()
        assert b.func(0.0, 0.0) == pytest.approx(0.99)
        assert b.func(10.0, 10.0) == pytest.approx(1.0)
        assert b.expr is not None

    def test_shoal_profile(self):
        b = shoaling_bottom(depth=0.44)
        x = np.array([-50.0, -1.0, 0.0, 10.0, 20.0])
        d = b.func(x, np.zeros_like(x))
        assert np.allclose(d, [0.44, 0.44, 0.44, 0.24, 0.04])
        assert b.d_min == pytest.approx(0.04)

    def test_shoal_cavitation_rejected(self):
        with pytest.raises(ValueError):
            shoaling_bottom(depth=0.3)  # slope reaches zero depth


class TestModelConfig:
    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            ModelConfig(bathymetry=flat_bottom(1.0), variant="weird")

    def test_simplified_needs_reference_depth(self):
        with pytest.raises(ValueError):
            ModelConfig(bathymetry=flat_bottom(1.0), variant="simplified")

    def test_unknown_forcing(self):
        with pytest.raises(ValueError):
            ModelConfig(bathymetry=flat_bottom(1.0), forcing="banana")


class TestManufacturedSolution:
    def test_exact_solution_satisfies_slip_conditions(self):
        eta, ux, uy = manufactured_exact()
        x, y, t = sym.symbols("x y t")
        # u.n = 0 on all four walls of the unit square
        assert sym.simplify(ux.subs(x, 0)) == 0
        assert sym.simplify(ux.subs(x, 1)) == 0
        assert sym.simplify(uy.subs(y, 0)) == 0
        assert sym.simplify(uy.subs(y, 1)) == 0
        # grad eta . n = 0
        assert sym.simplify(sym.diff(eta, x).subs(x, 0)) == 0
        assert sym.simplify(sym.diff(eta, x).subs(x, 1)) == 0
        # curl-free velocity
        assert sym.simplify(sym.diff(uy, x) - sym.diff(ux, y)) == 0

    def test_flat_bottom_dispersive_term(self):
        """For D = 1: F_eta - div((1+eta)u) = eta_t - (1/6) lap(eta_t)
        = e^t cos(pi x) cos(pi y) (1 + pi^2/3)."""
        ms = ManufacturedSolution(flat_bottom(1.0), g=1.0)
        eta, ux, uy = manufactured_exact()
        x, y, t = sym.symbols("x y t")
        flux_div = sym.lambdify(
            (x, y, t),
            sym.diff((1 + eta) * ux, x) + sym.diff((1 + eta) * uy, y),
            "numpy")
        rng = np.random.default_rng(0)
        X, Y = rng.random(15), rng.random(15)
        for tv in (0.0, 0.5, 1.0):
            got = ms.F_eta(X, Y, tv) - flux_div(X, Y, tv)
            want = (np.exp(tv) * np.cos(np.pi * X) * np.cos(np.pi * Y)
                    * (1 + np.pi ** 2 / 3))
            assert np.allclose(got, want, atol=1e-11)

    def test_forcing_finite_at_center(self):
        ms = ManufacturedSolution(gaussian_dip_bottom(), g=1.0)
        assert ms.eta(0.5, 0.5, 0.0) == pytest.approx(0.0, abs=1e-15)
        for F in (ms.F_eta, ms.F_ux, ms.F_uy):
            assert np.isfinite(F(0.5, 0.5, 0.0))

    def test_momentum_forcing_curl_free_flat_bottom(self):
        """For constant D the momentum equation is a pure gradient, so the
        forcing must be curl-free."""
        ms = ManufacturedSolution(flat_bottom(1.0), g=1.0)
        rng = np.random.default_rng(1)
        h = 1e-5
        for _ in range(10):
            x, y, t = rng.random(3)
            dFx_dy = (ms.F_ux(x, y + h, t) - ms.F_ux(x, y - h, t)) / (2 * h)
            dFy_dx = (ms.F_uy(x + h, y, t) - ms.F_uy(x - h, y, t)) / (2 * h)
            assert dFx_dy == pytest.approx(dFy_dx, abs=1e-6)

    def test_needs_analytic_bottom(self):
        with pytest.raises(ValueError):
            ManufacturedSolution(shoaling_bottom(), g=1.0)


class TestSolitaryWave:
    def test_small_amplitude_limit(self):
        eta, u, c, kappa = solitary_wave_ic(1e-12, 0.44, 0.0)
        x = np.linspace(-5, 5, 11)
        assert np.max(np.abs(eta(x, 0 * x))) <= 1e-12
        ux, uy = u(x, 0 * x)
        assert np.max(np.abs(ux)) <= 1e-11
        assert np.max(np.abs(uy)) == 0.0

    def test_speed_value(self):
        _, _, c, _ = solitary_wave_ic(0.07, 0.44, 0.0, g=9.81)
        assert c == pytest.approx(np.sqrt(9.81 * 0.44) * (1 + 0.07 / 0.88),
                                  rel=1e-12)
        assert c == pytest.approx(2.243, abs=2e-3)

    def test_symmetry_about_center(self):
        eta, _, _, _ = solitary_wave_ic(0.12, 0.44, -20.0)
        s = np.linspace(0.1, 8.0, 17)
        assert np.allclose(eta(-20.0 + s, 0 * s), eta(-20.0 - s, 0 * s),
                           atol=1e-14)

    def test_peak_is_amplitude(self):
        eta, u, c, _ = solitary_wave_ic(0.12, 0.44, 3.0)
        assert eta(3.0, 0.0) == pytest.approx(0.12, rel=1e-13)
        ux, _ = u(3.0, 0.0)
        assert ux == pytest.approx(c * 0.12 / (0.44 + 0.12), rel=1e-13)

    def test_validity_warning(self):
        with pytest.warns(UserWarning):
            solitary_wave_ic(0.4, 0.44, 0.0)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            solitary_wave_ic(-0.1, 0.44, 0.0)
        with pytest.raises(ValueError):
            solitary_wave_ic(0.1, 0.0, 0.0)


class TestSemidiscreteRhs:
    def test_zero_state_no_forcing(self):
        mesh = structured_rect_mesh(4, 4, UNIT_SQUARE)
        cfg = ModelConfig(bathymetry=flat_bottom(1.0), g=1.0)
        system = SemidiscreteSystem(mesh, cfg, check_pd=False)
        y0 = np.zeros(system.space_r.num_scalar_dofs + system.space_p.dim)
        dy = system.rhs(0.0, y0)
        assert np.max(np.abs(dy)) == 0.0

    def test_variants_coincide_for_flat_bottom(self):
        mesh = structured_rect_mesh(6, 4, (-2.0, 2.0, 0.0, 1.0))
        systems = {
            variant: SemidiscreteSystem(
                mesh,
                ModelConfig(bathymetry=flat_bottom(0.7), variant=variant,
                            g=9.81, ref_depth=0.7),
                check_pd=False)
            for variant in ("full", "simplified")}
        dim = (systems["full"].space_r.num_scalar_dofs
               + systems["full"].space_p.dim)
        y = 0.01 * np.random.default_rng(4).standard_normal(dim)
        rhs = {v: s.rhs(0.0, y) for v, s in systems.items()}
        diff = np.max(np.abs(rhs["full"] - rhs["simplified"]))
        scale = np.max(np.abs(rhs["full"]))
        assert diff <= 1e-12 * max(scale, 1.0)

    def test_manufactured_residual_decays(self):
        """eta_t recovered from the discrete system converges to the exact
        time derivative under refinement."""
        errs = []
        for N in (8, 16):
            system = make_manufactured_system(N)
            ms = system.forcing
            y = system.interpolate_initial(
                lambda x, y_: ms.eta(x, y_, 0.0),
                lambda x, y_: (ms.ux(x, y_, 0.0), ms.uy(x, y_, 0.0)))
            dy = system.rhs(0.0, y)
            eta_t = dy[:system.space_r.num_scalar_dofs]
            exact = ms.eta_t(system.space_r.node_coords[:, 0],
                             system.space_r.node_coords[:, 1], 0.0)
            errs.append(np.max(np.abs(eta_t - exact)))
        assert errs[1] < 0.5 * errs[0]

    def test_state_vector_roundtrip(self, msys8):
        rng = np.random.default_rng(9)
        y = rng.standard_normal(msys8.space_r.num_scalar_dofs
                                + msys8.space_p.dim)
        state = msys8.state_from_vector(y, t=2.5)
        assert isinstance(state, State)
        assert state.t == 2.5
        assert np.array_equal(state.to_vector(), y)


class TestConservedQuantities:
    def test_zero_state(self, msys8):
        y = np.zeros(msys8.space_r.num_scalar_dofs + msys8.space_p.dim)
        M, E = msys8.conserved_quantities(y)
        assert M == 0.0 and E == 0.0

    def test_unit_elevation(self):
        mesh = structured_rect_mesh(4, 4, UNIT_SQUARE)
        cfg = ModelConfig(bathymetry=flat_bottom(1.0), g=1.0)
        system = SemidiscreteSystem(mesh, cfg, check_pd=False)
        y = np.concatenate([np.ones(system.space_r.num_scalar_dofs),
                            np.zeros(system.space_p.dim)])
        M, E = system.conserved_quantities(y)
        assert M == pytest.approx(1.0, rel=1e-12)
        assert E == pytest.approx(0.5, rel=1e-12)

    def test_solitary_mass_analytic(self):
        """M = int A sech^2(kappa x) dx * width = 2A/kappa."""
        A = 0.12
        mesh = structured_rect_mesh(600, 2, (-30.0, 30.0, 0.0, 1.0))
        cfg = ModelConfig(bathymetry=flat_bottom(0.44), g=9.81)
        system = SemidiscreteSystem(mesh, cfg, degree_eta=2, degree_u=2,
                                    check_pd=False)
        eta0, u0, _, kappa = solitary_wave_ic(A, 0.44, 0.0)
        y = system.interpolate_initial(eta0, u0)
        M, _ = system.conserved_quantities(y)
        assert M == pytest.approx(2 * A / kappa, abs=1e-6)


def test_blow_up_error_is_runtime_error():
    assert issubclass(BlowUpError, RuntimeError)
