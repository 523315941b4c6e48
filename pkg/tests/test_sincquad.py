import math

import numpy as np
import pytest

from slfd import coeffmesh, sincquad
from slfd.errors import DimensionMismatch, InvalidParameter


@pytest.fixture(scope="module")
def unit_mesh():
    return coeffmesh.build_mesh(1)


@pytest.fixture(scope="module")
def fine_grid(unit_mesh):
    return sincquad.build_grid(unit_mesh, 350)


class TestBuildGrid:
    def test_rejects_small_K(self, unit_mesh):
        with pytest.raises(InvalidParameter):
            sincquad.build_grid(unit_mesh, 7)

    def test_midpoint_node_and_weight(self, unit_mesh):
        grid = sincquad.build_grid(unit_mesh, 8)
        assert grid.z[0, 8] == 0.0
        assert grid.mu[0, 8] == 0.5

    def test_two_interval_midpoint(self):
        mesh = coeffmesh.build_mesh(2)
        grid = sincquad.build_grid(mesh, 8)
        assert grid.z[1, 8] == 0.5
        assert grid.z[0, 8] == -0.5

    def test_weights_positive(self, fine_grid):
        assert np.all(fine_grid.mu > 0.0)

    def test_nodes_strictly_increasing_moderate_K(self, unit_mesh):
        grid = sincquad.build_grid(unit_mesh, 64)
        assert np.all(np.diff(grid.z[0]) > 0.0)
        assert grid.z[0, 0] > -1.0 and grid.z[0, -1] < 1.0

    def test_fine_grid_offsets_strictly_increasing(self, fine_grid):
        # beyond ~e^{-36} the node positions collapse onto the mesh points in
        # doubles; each offset array stays strictly monotone on the half
        # where it is the distance to the nearer endpoint
        K = fine_grid.K
        assert np.all(np.diff(fine_grid.lo_offset[0, : K + 1]) > 0.0)
        assert np.all(np.diff(fine_grid.hi_offset[0, K:]) < 0.0)
        assert np.all(np.diff(fine_grid.z[0]) >= 0.0)
        assert fine_grid.z[0, 0] > -1.0 and fine_grid.z[0, -1] < 1.0

    def test_weight_sum_matches_width(self, unit_mesh):
        grid = sincquad.build_grid(unit_mesh, 128)
        assert abs(np.sum(grid.mu) * grid.h - 2.0) <= 1e-10

    def test_weight_sum_fine(self, fine_grid):
        assert abs(np.sum(fine_grid.mu) * fine_grid.h - 2.0) <= 1e-12

    def test_step_default_and_override(self, unit_mesh):
        grid = sincquad.build_grid(unit_mesh, 50)
        assert grid.h == pytest.approx(math.sqrt(2 * math.pi / 50), rel=1e-15)
        grid2 = sincquad.build_grid(unit_mesh, 50, h=0.3)
        assert grid2.h == 0.3


class TestIntegrate:
    def test_constant(self, fine_grid):
        val = sincquad.integrate(fine_grid, np.ones(fine_grid.shape))
        assert val == pytest.approx(2.0, abs=1e-12)

    def test_odd_function_cancels(self, fine_grid):
        val = sincquad.integrate(fine_grid, fine_grid.z)
        assert abs(val) <= 1e-13

    def test_endpoint_singularity(self, fine_grid):
        # the slow sqrt decay of the transformed integrand leaves a
        # truncation tail ~2*exp(-sqrt(2*pi*K)/2) ~ 1.3e-10 at K = 350
        samples = 1.0 / np.sqrt(fine_grid.one_minus_sq)
        val = sincquad.integrate(fine_grid, samples)
        assert val == pytest.approx(math.pi, abs=5e-10)

    def test_exponential_convergence(self, unit_mesh):
        errs = {}
        for K in (50, 200):
            grid = sincquad.build_grid(unit_mesh, K)
            samples = 1.0 / np.sqrt(grid.one_minus_sq)
            errs[K] = abs(sincquad.integrate(grid, samples) - math.pi)
        assert errs[200] < errs[50] / 1e3

    def test_dimension_mismatch(self, fine_grid):
        with pytest.raises(DimensionMismatch):
            sincquad.integrate(fine_grid, np.ones((2, 3)))


class TestIndefinite:
    def test_zero(self, fine_grid):
        out = sincquad.indefinite_integrate(fine_grid, 0, np.zeros(2 * 350 + 1))
        assert np.all(out == 0.0)

    def test_constant_running_integral(self, fine_grid):
        out = sincquad.indefinite_integrate(fine_grid, 0, np.ones(2 * 350 + 1))
        exact = fine_grid.lo_offset[0]  # z + 1 without cancellation
        assert np.max(np.abs(out - exact)) <= 1e-8

    def test_linear_running_integral(self, fine_grid):
        out = sincquad.indefinite_integrate(fine_grid, 0, fine_grid.z[0])
        exact = (fine_grid.z[0] ** 2 - 1.0) / 2.0
        assert np.max(np.abs(out - exact)) <= 1e-8

    def test_consistency_with_definite(self, fine_grid):
        samples = np.cos(3.0 * fine_grid.z)
        running = sincquad.indefinite_integrate(fine_grid, 0, samples[0])
        total = sincquad.integrate(fine_grid, samples)
        assert abs(running[-1] - total) <= 1e-8

    def test_multi_interval_carry(self):
        mesh = coeffmesh.build_mesh(3)
        grid = sincquad.build_grid(mesh, 200)
        samples = np.exp(grid.z)
        running = sincquad.indefinite_integrate_all(grid, samples)
        exact = np.exp(grid.z) - math.exp(-1.0)
        assert np.max(np.abs(running - exact)) <= 1e-9

    def test_dimension_mismatch(self, fine_grid):
        with pytest.raises(DimensionMismatch):
            sincquad.indefinite_integrate(fine_grid, 0, np.ones(5))
