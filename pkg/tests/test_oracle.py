import numpy as np
import pytest

from slfd import coeffmesh
from slfd.errors import InvalidParameter, NonFiniteValue
from slfd.oracle import galerkin_oracle, jacobi_eigenvalues


class TestJacobi:
    def test_diagonal_matrix(self):
        vals = jacobi_eigenvalues(np.diag([3.0, -1.0, 2.0]))
        assert vals == pytest.approx([-1.0, 2.0, 3.0])

    def test_against_lapack(self):
        rng = np.random.default_rng(42)
        for n in (5, 20, 60):
            a = rng.standard_normal((n, n))
            a = 0.5 * (a + a.T)
            ours = jacobi_eigenvalues(a)
            ref = np.linalg.eigvalsh(a)
            assert np.max(np.abs(ours - ref)) <= 1e-11 * max(1.0, np.max(np.abs(ref)))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidParameter):
            jacobi_eigenvalues(np.ones((2, 3)))


class TestGalerkinOracle:
    def test_zero_potential(self):
        vals = galerkin_oracle(lambda x: 0.0, 32)
        for n in range(6):
            assert vals[n] == pytest.approx(n * (n + 1), abs=1e-10)

    def test_constant_shift(self):
        vals = galerkin_oracle(lambda x: 7.0, 32)
        for n in range(6):
            assert vals[n] == pytest.approx(n * (n + 1) + 7.0, abs=1e-9)

    def test_linear_potential_ground_state(self):
        q = coeffmesh.Potential.from_text("x")
        vals = galerkin_oracle(q, 200)
        assert vals[0] == pytest.approx(-0.157663483, abs=1e-9)

    def test_rejects_few_modes(self):
        with pytest.raises(InvalidParameter):
            galerkin_oracle(lambda x: 0.0, 8)

    def test_singular_node_propagates(self):
        # pole at 0.25, the exact central quadrature node of [0, 0.5] on the
        # default 4-interval quadrature mesh
        q = coeffmesh.Potential.from_text("1/(x - 0.25)")
        with pytest.raises(NonFiniteValue):
            galerkin_oracle(q, 16, K=16)
