import numpy as np
import pytest

from basinwaves.mesh import structured_rect_mesh
from basinwaves.model import (BlowUpError, ModelConfig, SemidiscreteSystem,
                              flat_bottom)
from basinwaves.timeloop import (ConservationLog, GaugeSeries, RunConfig,
                                 rk4_step, run)
from conftest import UNIT_SQUARE, fitted_order


class TestRk4Step:
    def test_scalar_exponential_expansion(self):
        """y' = y, dt = 0.1: RK4 reproduces the quartic Taylor polynomial."""
        y1 = rk4_step(np.array([1.0]), 0.0, 0.1, lambda t, y: y)
        expected = 1 + 0.1 + 0.1 ** 2 / 2 + 0.1 ** 3 / 6 + 0.1 ** 4 / 24
        assert y1[0] == pytest.approx(expected, abs=1e-15)

    def test_zero_rhs(self):
        y0 = np.array([2.0, -1.0, 0.5])
        y1 = rk4_step(y0, 0.0, 0.25, lambda t, y: np.zeros_like(y))
        assert np.array_equal(y0, y1)

    def test_linear_system_order4(self):
        L = np.array([[0.0, 1.0], [-4.0, 0.0]])
        y0 = np.array([1.0, 0.0])

        def exact(t):
            return np.array([np.cos(2 * t), -2 * np.sin(2 * t)])

        errs, dts = [], [0.1, 0.05, 0.025]
        for dt in dts:
            y, t = y0.copy(), 0.0
            for _ in range(round(1.0 / dt)):
                y = rk4_step(y, t, dt, lambda t_, y_: L @ y_)
                t += dt
            errs.append(np.linalg.norm(y - exact(1.0)))
        assert fitted_order(dts, errs) == pytest.approx(4.0, abs=0.1)

    def test_time_reversal(self):
        """A step of +dt then -dt returns to the start to O(dt^5)."""
        L = np.array([[0.0, 1.0], [-1.0, 0.0]])
        y0 = np.array([0.3, -0.2])
        defects = []
        for dt in (0.2, 0.1):
            y = rk4_step(y0, 0.0, dt, lambda t, y_: L @ y_)
            y = rk4_step(y, dt, -dt, lambda t, y_: L @ y_)
            defects.append(np.linalg.norm(y - y0))
        assert defects[0] <= 1e-5
        # halving dt shrinks the defect by about 2^5
        assert defects[1] <= defects[0] / 16


class TestRunConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            RunConfig(dt=0.0, T_final=1.0)
        with pytest.raises(ValueError):
            RunConfig(dt=0.5, T_final=0.1)


@pytest.fixture(scope="module")
def small_system():
    mesh = structured_rect_mesh(6, 6, UNIT_SQUARE)
    cfg = ModelConfig(bathymetry=flat_bottom(1.0), g=1.0)
    return SemidiscreteSystem(mesh, cfg, check_pd=False)


def small_initial(system, scale=0.01):
    return system.interpolate_initial(
        lambda x, y: scale * np.cos(np.pi * x) * np.cos(np.pi * y),
        lambda x, y: (0.0 * x, 0.0 * y))


class TestRun:
    def test_single_step(self, small_system):
        y0 = small_initial(small_system)
        y, gauges, cons = run(small_system, y0,
                              RunConfig(dt=0.1, T_final=0.1))
        assert len(gauges.times) == 2
        assert not np.array_equal(y, y0)

    def test_gauge_and_conservation_shapes(self, small_system):
        y0 = small_initial(small_system)
        rc = RunConfig(dt=0.05, T_final=0.5, gauge_points=[(0.5, 0.5)],
                       log_every=2)
        y, gauges, cons = run(small_system, y0, rc)
        assert gauges.values.shape == (11, 1)
        assert np.all(np.diff(gauges.times) > 0)
        assert cons.times[0] == 0.0 and cons.times[-1] == pytest.approx(0.5)

    def test_deterministic_replay(self, small_system):
        y0 = small_initial(small_system)
        rc = RunConfig(dt=0.05, T_final=0.3, gauge_points=[(0.25, 0.75)])
        out1 = run(small_system, y0, rc)
        out2 = run(small_system, y0, rc)
        assert np.array_equal(out1[0], out2[0])
        assert np.array_equal(out1[1].values, out2[1].values)

    def test_mass_conserved_unforced(self, small_system):
        y0 = small_system.interpolate_initial(
            lambda x, y: 0.05 * np.cos(np.pi * x),
            lambda x, y: (0.01 * np.sin(np.pi * x), 0.0 * y))
        _, _, cons = run(small_system, y0,
                         RunConfig(dt=0.02, T_final=1.0, log_every=5))
        drift = np.max(np.abs(cons.mass - cons.mass[0]))
        assert drift <= 1e-12

    def test_blow_up_detection(self, small_system):
        y0 = small_initial(small_system)

        def bad_rhs(t, y):
            return np.full_like(y, np.nan) if t > 0.1 else 0 * y

        import basinwaves.timeloop as tl
        system = small_system

        class Doomed:
            space_r = system.space_r

            def rhs(self, t, y):
                return bad_rhs(t, y)

            def split(self, y):
                return system.split(y)

            def conserved_quantities(self, y):
                return 0.0, 0.0

        with pytest.raises(BlowUpError):
            tl.run(Doomed(), y0, RunConfig(dt=0.1, T_final=1.0))


class TestCsvOutput:
    def test_gauge_csv_header(self, tmp_path):
        g = GaugeSeries(points=[(0.0, 0.5), (1.0, 0.5)],
                        times=np.array([0.0, 0.1]),
                        values=np.array([[1.0, 2.0], [3.0, 4.0]]))
        path = tmp_path / "g.csv"
        g.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,gauge1,gauge2"
        assert lines[1] == "0,1,2"

    def test_conservation_csv_header(self, tmp_path):
        c = ConservationLog(times=np.array([0.0]), mass=np.array([1.5]),
                            energy=np.array([2.25]))
        path = tmp_path / "c.csv"
        c.write_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,M,E"
        assert lines[1] == "0,1.5,2.25"
