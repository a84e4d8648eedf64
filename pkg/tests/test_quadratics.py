import math

import numpy as np
import pytest

from eqslemma import QuadForm, build_dwp, evaluate, lift, restrict_to_affine, value_range
from eqslemma.errors import DimensionMismatch
from eqslemma.quadratics import evaluate_many, find_root

from conftest import qf, random_quadform, zeros_qf


class TestEvaluate:
    def test_cross_term(self):
        f = qf([[0.0, 0.5], [0.5, 0.0]], [0, 0], 0.0)  # x1*x2
        assert evaluate(f, [2.0, 3.0]) == pytest.approx(6.0)

    def test_affine(self):
        h = zeros_qf(2, b=[0.0, 0.5])  # x2
        assert evaluate(h, [5.0, 0.0]) == 0.0

    def test_indefinite(self):
        f = qf(np.diag([2.0, -1.0]), [0, 0], 0.0)
        assert evaluate(f, [1.0, 1.0]) == pytest.approx(1.0)

    def test_dimension_error(self):
        with pytest.raises(DimensionMismatch):
            evaluate(zeros_qf(2), [1.0])


class TestLift:
    def test_affine_lift(self):
        h = zeros_qf(2, b=[0.0, 0.5])
        np.testing.assert_allclose(
            lift(h), [[0, 0, 0], [0, 0, 0.5], [0, 0.5, 0]], atol=1e-15
        )

    def test_scalar_lift(self):
        f = qf([[1.0]], [0.0], -1.0)
        np.testing.assert_allclose(lift(f), [[1.0, 0.0], [0.0, -1.0]])

    def test_roundtrip_against_evaluation(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 5))
            q = random_quadform(rng, n)
            L = lift(q)
            for _ in range(10):
                x = rng.standard_normal(n)
                xe = np.append(x, 1.0)
                direct = evaluate(q, x)
                assert xe @ L @ xe == pytest.approx(direct, rel=1e-10, abs=1e-10)


class TestValueRange:
    def test_concave_half_line(self):
        vr = value_range(qf(np.diag([-1.0, 0.0]), [0, 0], 0.0))  # -x1^2
        assert vr.lo == -math.inf and vr.hi == pytest.approx(0.0, abs=1e-12)
        assert vr.hi_attained

    def test_nonconstant_affine(self):
        vr = value_range(zeros_qf(2, b=[0.0, 0.5]))
        assert vr.lo == -math.inf and vr.hi == math.inf

    def test_shifted_convex(self):
        vr = value_range(qf([[1.0]], [0.0], 1.0))  # x^2 + 1
        assert vr.lo == pytest.approx(1.0) and vr.hi == math.inf
        assert vr.lo_attained

    def test_soundness_by_sampling(self, rng):
        for _ in range(30):
            n = int(rng.integers(1, 5))
            q = random_quadform(rng, n)
            vr = value_range(q)
            vals = evaluate_many(q, rng.standard_normal((10_000, n)) * 3.0)
            margin = 1e-8 * (1.0 + np.max(np.abs(vals)))
            assert np.all(vals >= vr.lo - margin)
            assert np.all(vals <= vr.hi + margin)
            for end, attained, pt in (
                (vr.lo, vr.lo_attained, vr.lo_point),
                (vr.hi, vr.hi_attained, vr.hi_point),
            ):
                if attained:
                    assert pt is not None
                    assert evaluate(q, pt) == pytest.approx(end, abs=1e-6 * (1 + abs(end)))


class TestRestrictToAffine:
    def test_coordinate_plane(self):
        f = qf(np.diag([1.0, -1.0]), [0, 0], 0.0)
        r = restrict_to_affine(f, np.zeros(2), np.array([[1.0], [0.0]]))
        np.testing.assert_allclose(r.A, [[1.0]])
        np.testing.assert_allclose(r.a, [0.0])
        assert r.c == 0.0

    def test_negative_plane(self):
        f = qf(-np.eye(2), [0, 0], 0.0)
        r = restrict_to_affine(f, np.zeros(2), np.array([[1.0], [0.0]]))
        np.testing.assert_allclose(r.A, [[-1.0]])

    def test_identity_restriction(self, rng):
        q = random_quadform(rng, 3)
        r = restrict_to_affine(q, np.zeros(3), np.eye(3))
        np.testing.assert_allclose(r.A, q.A)
        np.testing.assert_allclose(r.a, q.a)
        assert r.c == pytest.approx(q.c)

    def test_consistency_with_evaluation(self, rng):
        for _ in range(10):
            q = random_quadform(rng, 4)
            x0 = rng.standard_normal(4)
            V = rng.standard_normal((4, 2))
            r = restrict_to_affine(q, x0, V)
            y = rng.standard_normal(2)
            assert evaluate(r, y) == pytest.approx(evaluate(q, x0 + V @ y), rel=1e-10, abs=1e-9)


class TestBuildDwp:
    def test_smallest_instance(self):
        p = build_dwp(np.eye(1), np.zeros(1), 0.0, np.zeros((1, 1)), np.zeros(1))
        # constraint is x^2/2 - z; objective is z^2/2
        np.testing.assert_allclose(p.constraint.A, [[0.5, 0.0], [0.0, 0.0]])
        np.testing.assert_allclose(p.constraint.a, [0.0, -0.5])
        assert p.constraint.c == 0.0
        assert evaluate(p.constraint, [2.0, 2.0]) == pytest.approx(0.0)
        # objective along the constraint at x = 2 (z = 2): value 2
        assert evaluate(p.objective, [2.0, 2.0]) == pytest.approx(2.0)

    def test_quartic_value_matches(self, rng):
        m, n = 3, 2
        Q = rng.standard_normal((m, n))
        c = rng.standard_normal(m)
        d = rng.standard_normal()
        A = rng.standard_normal((n, n))
        A = 0.5 * (A + A.T)
        a = rng.standard_normal(n)
        p = build_dwp(Q, c, d, A, a)
        for _ in range(20):
            x = rng.standard_normal(n)
            z = 0.5 * np.linalg.norm(Q @ x - c) ** 2 - d
            assert evaluate(p.constraint, np.append(x, z)) == pytest.approx(0.0, abs=1e-9)
            quartic = 0.5 * z**2 + 0.5 * x @ A @ x - a @ x
            assert evaluate(p.objective, np.append(x, z)) == pytest.approx(quartic, rel=1e-10, abs=1e-9)

    def test_zero_q_rejected(self):
        with pytest.raises(ValueError):
            build_dwp(np.zeros((1, 1)), np.zeros(1), 0.0, np.zeros((1, 1)), np.zeros(1))


class TestFindRoot:
    def test_various_shapes(self, rng):
        shapes = [
            qf(np.diag([1.0, -1.0]), [0.3, 0.1], -0.5),
            qf(np.eye(2), [0.0, 0.0], -1.0),
            qf(-np.eye(2), [0.1, 0.0], 2.0),
            zeros_qf(2, b=[0.5, 0.0], d=1.0),
            qf(np.diag([1.0, 0.0]), [0.0, 0.5], 0.0),
        ]
        for q in shapes:
            x = find_root(q)
            assert x is not None
            assert abs(evaluate(q, x)) <= 1e-7 * (1.0 + q.scale())

    def test_none_when_out_of_range(self):
        assert find_root(qf(np.eye(2), [0, 0], 1.0)) is None

    def test_random_feasible(self, rng):
        hits = 0
        for _ in range(50):
            n = int(rng.integers(1, 5))
            q = random_quadform(rng, n)
            vr = value_range(q)
            if not vr.contains(0.0):
                assert find_root(q) is None
                continue
            hits += 1
            x = find_root(q)
            assert x is not None
            assert abs(evaluate(q, x)) <= 1e-6 * (1.0 + q.scale() + np.linalg.norm(x) ** 2)
        assert hits > 10
