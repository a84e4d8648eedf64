import numpy as np

from eqslemma import oracle_e1, oracle_e2, sample_constraint
from eqslemma.oracles import FALSE_WITH_WITNESS, FOUND_MU, NONE_ON_GRID, TRUE_SO_FAR
from eqslemma.quadratics import evaluate, evaluate_many

from conftest import qf, zeros_qf


class TestSampleConstraint:
    def test_hyperplane(self):
        h = zeros_qf(2, b=[0.0, 0.5])  # x2
        pts = sample_constraint(h, 500, seed=1)
        assert pts.shape[0] == 500
        assert np.max(np.abs(pts[:, 1])) <= 1e-10

    def test_unit_circle(self):
        h = qf(np.eye(2), [0, 0], -1.0)
        pts = sample_constraint(h, 500, seed=2)
        assert pts.shape[0] == 500
        assert np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) <= 1e-10

    def test_hyperbola(self):
        h = qf([[0.0, 0.5], [0.5, 0.0]], [0, 0], -1.0)  # x1*x2 - 1
        pts = sample_constraint(h, 500, seed=3)
        assert np.max(np.abs(pts[:, 0] * pts[:, 1] - 1.0)) <= 1e-9

    def test_deterministic(self):
        h = qf(np.eye(3), [0, 0, 0], -2.0)
        a = sample_constraint(h, 200, seed=7)
        b = sample_constraint(h, 200, seed=7)
        assert np.array_equal(a, b)

    def test_residuals_always_tiny(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 5))
            B = rng.standard_normal((n, n))
            h = qf(0.5 * (B + B.T), rng.standard_normal(n), rng.standard_normal())
            pts = sample_constraint(h, 100, seed=int(rng.integers(1e6)))
            if pts.shape[0]:
                assert np.max(np.abs(evaluate_many(h, pts))) <= 1e-8 * (1 + h.scale())


class TestOracleE1:
    def test_refutes_negative_objective(self):
        f = qf(-np.eye(2), [0, 0], 0.0)
        h = zeros_qf(2, b=[0.0, 0.5])
        r = oracle_e1(f, h, samples=100, seed=5)
        assert r.status == FALSE_WITH_WITNESS
        assert evaluate(f, r.witness) < -1e-8
        assert abs(evaluate(h, r.witness)) <= 1e-8

    def test_inconclusive_on_true_instance(self):
        f = qf(np.diag([1.0, 0.0]), [0, 0], 0.0)  # x1^2
        h = qf([[0.0, 0.5], [0.5, 0.0]], [0, 0], -1.0)
        r = oracle_e1(f, h, samples=10_000, seed=5)
        assert r.status == TRUE_SO_FAR

    def test_nonneg_objective(self, rng):
        f = qf(np.eye(3), [0, 0, 0], 0.0)
        h = qf(rng.standard_normal((3, 3)), rng.standard_normal(3), 0.0)
        r = oracle_e1(f, h, samples=2000, seed=11)
        assert r.status == TRUE_SO_FAR


class TestOracleE2:
    def test_none_on_grid_for_exception_pair(self):
        f = qf(np.diag([1.0, -1.0]), [0, 0], 0.0)
        h = zeros_qf(2, b=[0.0, 0.5])
        grid = np.arange(-100.0, 100.0, 0.01)
        assert oracle_e2(f, h, grid).status == NONE_ON_GRID

    def test_finds_zero_multiplier(self):
        f = qf(np.eye(2), [0, 0], 0.0)
        h = zeros_qf(2, b=[0.3, 0.0], d=1.0)
        r = oracle_e2(f, h, np.linspace(-1, 1, 21))
        assert r.status == FOUND_MU

    def test_finds_interior_multiplier(self):
        f = qf(np.eye(2), [0, 0], 0.0)
        h = qf(np.diag([1.0, 0.0]), [0, 0], -1.0)  # x1^2 - 1
        r = oracle_e2(f, h, np.arange(-2.0, 1.0, 0.01))
        assert r.status == FOUND_MU
        assert -1.0 <= r.mu <= 0.0
