import math

import numpy as np
import pytest

from kdvcm.constants import L, Q
from kdvcm import pde, reduced


@pytest.fixture(scope="module")
def solver512():
    return pde.KdVSolver(n=512, nonlinear="ab2")


class TestGrid:
    def test_spacing(self):
        g = pde.make_grid(511)
        assert g.dx * (g.n + 1) == pytest.approx(L, abs=1e-12)
        assert g.nodes[0] == pytest.approx(g.dx)

    def test_minimum_size(self):
        with pytest.raises(ValueError):
            pde.make_grid(32)

    def test_bad_mode_rejected(self):
        with pytest.raises(ValueError):
            pde.KdVSolver(n=64, nonlinear="explicit")


class TestStep:
    def test_zero_is_equilibrium(self, solver512):
        state = pde.StateField(np.zeros(512))
        out = solver512.step(state, 0.01)
        assert np.all(out.values == 0.0)
        assert out.time == pytest.approx(0.01)

    def test_linear_rotation_returns_after_one_period(self, solver512, eigen_pair):
        frame = pde.modal_frame(solver512.grid, eigen_pair)
        y0 = 1e-4 * eigen_pair.phi1(solver512.grid.nodes)
        period = 2 * math.pi / Q
        rep = solver512.solve(y0, period, period / 128, frame=frame,
                              record_every=128)
        err = math.hypot(rep.m1[-1] - 1e-4, rep.m2[-1])
        assert err <= 0.01 * 1e-4

    def test_energy_never_increases_over_1e4_steps(self, eigen_pair):
        solver = pde.KdVSolver(n=256, nonlinear="ab2")
        y0 = 1e-2 * eigen_pair.phi1(solver.grid.nodes)
        rep = solver.solve(y0, 1e4 * 1e-4, 1e-4, record_every=500)
        assert rep.max_energy_increase <= 1e-10 * rep.energy0

    def test_midpoint_monotone_at_large_steps(self, eigen_pair):
        solver = pde.KdVSolver(n=256, nonlinear="midpoint")
        y0 = 1e-2 * eigen_pair.phi1(solver.grid.nodes)
        rep = solver.solve(y0, 500.0, 0.5, record_every=20)
        assert rep.max_energy_increase <= 1e-10 * rep.energy0

    def test_modes_agree_at_small_dt(self, eigen_pair):
        ya = pde.KdVSolver(n=128, nonlinear="ab2")
        ym = pde.KdVSolver(n=128, nonlinear="midpoint")
        y0 = 1e-2 * eigen_pair.phi1(ya.grid.nodes)
        sa = pde.StateField(y0.copy())
        sm = pde.StateField(y0.copy())
        for _ in range(100):
            sa = ya.step(sa, 1e-3)
            sm = ym.step(sm, 1e-3)
        assert np.max(np.abs(sa.values - sm.values)) <= 1e-9

    def test_rejects_bad_dt(self, solver512):
        with pytest.raises(ValueError):
            solver512.step(pde.StateField(np.zeros(512)), -0.1)

    def test_instability_detected(self, eigen_pair):
        solver = pde.KdVSolver(n=128, nonlinear="ab2")
        y0 = 4e-2 * eigen_pair.phi1(solver.grid.nodes)
        with pytest.raises(RuntimeError, match="instability"):
            solver.solve(y0, 2000.0, 10.0, record_every=10)

    def test_smallness_guard(self, solver512, eigen_pair):
        y0 = 1.0 * eigen_pair.phi1(solver512.grid.nodes)
        with pytest.raises(ValueError, match="smallness"):
            solver512.solve(y0, 1.0, 0.01)


class TestEnergyIdentity:
    def test_zero_solution(self, solver512):
        rep = solver512.solve(np.zeros(512), 2.0, 0.01)
        assert pde.energy_identity_check(rep) == 0.0

    def test_defect_small_and_second_order(self, eigen_pair):
        defects = {}
        for n in (512, 1024):
            solver = pde.KdVSolver(n=n, nonlinear="midpoint")
            y0 = 1e-2 * eigen_pair.phi1(solver.grid.nodes)
            dt = 0.02 * 513 / (n + 1)  # refine dt with dx for a clean order
            rep = solver.solve(y0, 40.0, dt, record_every=round(0.1 / dt))
            defects[n] = pde.energy_identity_check(rep)
        assert defects[512] <= 1e-3
        assert defects[512] / defects[1024] == pytest.approx(4.0, rel=0.5)

    def test_phi2_run_same_order(self, eigen_pair):
        solver = pde.KdVSolver(n=512, nonlinear="midpoint")
        y0 = 1e-2 * eigen_pair.phi2(solver.grid.nodes)
        rep = solver.solve(y0, 40.0, 0.02, record_every=5)
        assert pde.energy_identity_check(rep) <= 1e-3

    def test_needs_enough_samples(self, solver512):
        rep = solver512.solve(np.zeros(512), 0.1, 0.01)
        with pytest.raises(ValueError):
            pde.energy_identity_check(rep)


class TestProjection:
    def test_phi1_projects_to_unit(self, eigen_pair):
        grid = pde.make_grid(512)
        m1, m2 = pde.project_modal(eigen_pair.phi1(grid.nodes), eigen_pair, grid)
        assert m1 == pytest.approx(1.0, abs=1e-6)
        assert m2 == pytest.approx(0.0, abs=1e-6)

    def test_manifold_coefficient_projects_to_zero(self, eigen_pair, manifold_coeffs):
        grid = pde.make_grid(512)
        m1, m2 = pde.project_modal(manifold_coeffs.a(grid.nodes), eigen_pair, grid)
        assert abs(m1) <= 1e-6 and abs(m2) <= 1e-6

    def test_linearity(self, eigen_pair):
        grid = pde.make_grid(512)
        y = 3.0 * eigen_pair.phi1(grid.nodes) - 2.0 * eigen_pair.phi2(grid.nodes)
        m1, m2 = pde.project_modal(y, eigen_pair, grid)
        assert m1 == pytest.approx(3.0, abs=1e-6)
        assert m2 == pytest.approx(-2.0, abs=1e-6)


class TestGridConvergence:
    def test_observed_order_at_least_1_8(self, eigen_pair):
        # nonlinear run; the coarse nodes are embedded in each finer grid
        vals = {}
        for n in (127, 255, 511):
            solver = pde.KdVSolver(n=n, nonlinear="midpoint")
            y0 = 1e-2 * (eigen_pair.phi1(solver.grid.nodes)
                         + 0.5 * eigen_pair.phi2(solver.grid.nodes))
            dt = 0.01 * 128 / (n + 1)
            state = pde.StateField(y0)
            for _ in range(int(round(5.0 / dt))):
                state = solver.step(state, dt)
            vals[n] = state.values
        e1 = np.max(np.abs(vals[127] - vals[255][1::2]))
        e2 = np.max(np.abs(vals[255] - vals[511][1::2]))
        order = math.log2(e1 / e2)
        assert order >= 1.8


class TestSurrogateConsistency:
    def test_modal_trajectory_tracks_reduced_model(
            self, eigen_pair, manifold_coeffs, reduced_model):
        solver = pde.KdVSolver(n=1023, nonlinear="midpoint")
        frame = pde.modal_frame(solver.grid, eigen_pair, manifold_coeffs)
        m0 = 1e-2
        y0 = pde.surrogate_values(frame, m0, 0.0)
        horizon = 50.0 / Q
        rep = solver.solve(y0, horizon, 0.1, frame=frame, record_every=10)
        traj = reduced.integrate((rep.m1[0], rep.m2[0]), horizon + 1.0, 0.01,
                                 reduced_model)
        worst = 0.0
        for tt, p1, p2 in zip(rep.times, rep.m1, rep.m2):
            k = int(round(tt / 0.01))
            if k < len(traj.m1):
                worst = max(worst, math.hypot(p1 - traj.m1[k], p2 - traj.m2[k]))
        assert worst <= 5 * m0 * m0

    def test_near_invariance_of_surrogate(self, eigen_pair, manifold_coeffs):
        solver = pde.KdVSolver(n=512, nonlinear="midpoint")
        frame = pde.modal_frame(solver.grid, eigen_pair, manifold_coeffs)
        y0 = pde.surrogate_values(frame, 1e-2, 0.0)
        rep = solver.solve(y0, 100.0, 0.05, frame=frame, record_every=10)
        # distance stays at the surrogate-defect scale O(|m|^3), far below |m|^2
        assert np.max(rep.dist) <= 1e-4

    def test_off_surrogate_transient(self, eigen_pair, manifold_coeffs):
        solver = pde.KdVSolver(n=512, nonlinear="midpoint")
        frame = pde.modal_frame(solver.grid, eigen_pair, manifold_coeffs)
        x = solver.grid.nodes
        bump = np.sin(np.pi * x / L) ** 2 * np.sin(3 * np.pi * x / L)
        y0 = 1e-2 * bump / math.sqrt(2 * solver.energy(bump))
        horizon = 100.0 / Q
        rep = solver.solve(y0, horizon, 0.05, frame=frame, record_every=4)
        i20 = np.searchsorted(rep.times, 0.2 * horizon)
        assert np.min(rep.dist[:i20]) <= 0.05 * rep.dist[0]
        rate, _ = pde.transient_decay_rate(rep)
        assert rate > 0.0


class TestExports:
    def test_csv_files(self, eigen_pair, manifold_coeffs, tmp_path):
        solver = pde.KdVSolver(n=128, nonlinear="midpoint")
        frame = pde.modal_frame(solver.grid, eigen_pair, manifold_coeffs)
        y0 = pde.surrogate_values(frame, 5e-3, 0.0)
        rep = solver.solve(y0, 5.0, 0.05, frame=frame)
        pde.write_reports(rep, tmp_path)
        energy = (tmp_path / "energy.csv").read_text().splitlines()
        assert energy[0] == "t,E,flux"
        assert len(energy) == len(rep.times) + 1
        assert (tmp_path / "modal.csv").read_text().splitlines()[0] == "t,m1,m2"
        assert (tmp_path / "distance.csv").read_text().splitlines()[0] == "t,d"
