import numpy as np
import pytest

from eqslemma import (
    assumption1_holds,
    certificate_is_valid,
    e1_check,
    e2_certificate_search,
    evaluate,
    finsler,
    homogeneous_equivalence,
    lift,
    oracle_e1,
    regularized_certificate_is_valid,
    regularized_inequality,
    regularized_lambda,
    slemma_equality,
    slemma_inequality,
    two_sided_verdict,
    one_sided_verdict,
)
from eqslemma import linalg, slemma
from eqslemma.errors import (
    E1Violated,
    HypothesisViolation,
    InfeasibleConstraint,
    SlaterViolation,
)
from eqslemma.quadratics import QuadForm, add, regularize, squared_affine

from conftest import assert_lift_psd, qf, random_feasible_constraint, random_quadform, zeros_qf

# The recurring pairs
F_CROSS = qf([[0.0, 0.5], [0.5, 0.0]], [0, 0], 0.0)  # x1*x2
H_NEG_SQ = qf(np.diag([-1.0, 0.0]), [0, 0], 0.0)  # -x1^2
F_SADDLE = qf(np.diag([1.0, -1.0]), [0, 0], 0.0)  # x1^2 - x2^2
H_PLANE = zeros_qf(2, b=[0.0, 0.5])  # x2
F_NEG_BALL = qf(-np.eye(2), [0, 0], 0.0)  # -x1^2 - x2^2


class TestAssumption1:
    def test_one_sided(self):
        assert not assumption1_holds(H_NEG_SQ)

    def test_plane(self):
        assert assumption1_holds(H_PLANE)

    def test_shifted_convex(self):
        assert assumption1_holds(qf([[1.0]], [0.0], -1.0))  # x^2 - 1

    def test_infeasible(self):
        with pytest.raises(InfeasibleConstraint):
            assumption1_holds(qf([[1.0]], [0.0], 1.0))


class TestHomogeneousEquivalence:
    def test_mismatch_pair(self):
        v = homogeneous_equivalence(F_CROSS.A, H_NEG_SQ.A)
        assert not v.equivalence_holds
        assert v.e1_true and not v.e2_true
        assert v.details["nullspace_match"] is False

    def test_definite_b(self, rng):
        A = rng.standard_normal((3, 3))
        v = homogeneous_equivalence(0.5 * (A + A.T), np.eye(3))
        assert v.equivalence_holds
        assert v.e1_true and v.e2_true

    def test_strict_reduced(self):
        v = homogeneous_equivalence(np.eye(2), np.diag([1.0, 0.0]))
        assert v.equivalence_holds and v.e1_true and v.e2_true

    def test_rejects_indefinite(self):
        with pytest.raises(HypothesisViolation):
            homogeneous_equivalence(np.eye(2), np.diag([1.0, -1.0]))


class TestOneSidedVerdict:
    def test_reduces_to_homogeneous_case(self):
        v = one_sided_verdict(F_CROSS, H_NEG_SQ)
        assert not v.equivalence_holds
        assert v.e1_true and not v.e2_true
        assert v.branch == slemma.BRANCH_ONE_SIDED_NEITHER

    def test_strictly_positive_reduction(self):
        f = qf(np.eye(2), [0, 0], 1.0)  # x1^2 + x2^2 + 1
        v = one_sided_verdict(f, H_NEG_SQ)
        assert v.equivalence_holds and v.e1_true and v.e2_true
        assert v.branch == slemma.BRANCH_ONE_SIDED_A
        assert certificate_is_valid(f, H_NEG_SQ, v.certificate)

    def test_matched_nullspaces(self):
        f = qf(np.diag([0.0, 1.0]), [0, 0], 0.0)  # x2^2
        v = one_sided_verdict(f, H_NEG_SQ)
        # oracle: null bases of W and of the squared reduction coincide
        W, W2 = slemma._one_sided_data(f, H_NEG_SQ)
        assert linalg.same_nullspace(W, W2)
        assert v.equivalence_holds and v.e1_true and v.e2_true
        assert v.branch == slemma.BRANCH_ONE_SIDED_B
        assert certificate_is_valid(f, H_NEG_SQ, v.certificate)

    def test_definite_b_with_scalar_gap(self):
        # h = x^2 has the single root 0; f = x is zero there but admits
        # no multiplier: f + mu*x^2 is negative somewhere for every mu.
        f = qf([[0.0]], [0.5], 0.0)
        h = qf([[1.0]], [0.0], 0.0)
        v = one_sided_verdict(f, h)
        assert v.e1_true and not v.e2_true and not v.equivalence_holds


class TestTwoSidedVerdict:
    def test_exception_fires(self):
        v = two_sided_verdict(F_SADDLE, H_PLANE)
        assert not v.equivalence_holds
        assert v.e1_true and not v.e2_true
        assert v.branch == slemma.BRANCH_TWO_SIDED_EXCEPTION
        np.testing.assert_allclose(
            v.details["exception_matrix"], np.diag([1.0, 0.0]), atol=1e-12
        )

    def test_no_exception_when_two_negatives(self):
        v = two_sided_verdict(F_NEG_BALL, H_PLANE)
        assert v.equivalence_holds
        assert not v.e1_true and not v.e2_true
        x = v.counterexample
        assert abs(evaluate(H_PLANE, x)) <= 1e-6
        assert evaluate(F_NEG_BALL, x) < -1e-8

    def test_indefinite_constraint(self):
        f = qf(np.eye(2), [0, 0], 0.0)
        h = qf(np.diag([1.0, -1.0]), [0, 0], 0.0)
        v = two_sided_verdict(f, h)
        assert v.equivalence_holds and v.e1_true and v.e2_true
        assert certificate_is_valid(f, h, v.certificate)

    def test_exception_joint_shape(self):
        # On exception instances the certificate search must fail while
        # the primal implication holds: asserted jointly.
        v = slemma_equality(F_SADDLE, H_PLANE)
        assert v.branch == slemma.BRANCH_TWO_SIDED_EXCEPTION
        assert e2_certificate_search(F_SADDLE, H_PLANE) is None
        ok, _ = e1_check(F_SADDLE, H_PLANE)
        assert ok


class TestE2Search:
    def test_interval_multiplier(self):
        f = qf(np.eye(2), [0, 0], 0.0)
        h = qf(np.diag([1.0, 0.0]), [0, 0], -1.0)
        mu = e2_certificate_search(f, h)
        assert mu is not None and -1.0 - 1e-6 <= mu <= 1e-6
        # oracle: dense grid + eigenvalue check agrees a certificate exists
        grid_ok = any(
            np.linalg.eigvalsh(lift(f) + m * lift(h))[0] >= -1e-9
            for m in np.arange(-2.0, 1.0, 0.01)
        )
        assert grid_ok
        assert_lift_psd(lift(f) + mu * lift(h), 1e-8)

    def test_none_for_unbounded_pair(self):
        assert e2_certificate_search(qf(np.diag([-1.0, 0.0]), [0, 0], 0.0), H_PLANE) is None

    def test_zero_constraint(self):
        f = qf([[1.0]], [0.0], 0.0)
        h = qf([[0.0]], [0.0], 0.0)
        assert e2_certificate_search(f, h) == pytest.approx(0.0, abs=1e-6)


class TestE1Check:
    def test_true_on_exception_pair(self):
        ok, cx = e1_check(F_SADDLE, H_PLANE)
        assert ok and cx is None

    def test_false_with_witness(self):
        ok, cx = e1_check(F_NEG_BALL, H_PLANE)
        assert not ok
        assert evaluate(F_NEG_BALL, cx) < -1e-8
        assert abs(evaluate(H_PLANE, cx)) <= 1e-6

    def test_unattained_zero_infimum(self):
        f = qf(np.diag([1.0, 0.0]), [0, 0], 0.0)
        h = qf([[0.0, 0.5], [0.5, 0.0]], [0, 0], -1.0)
        ok, cx = e1_check(f, h)
        assert ok and cx is None


class TestDispatcher:
    def test_routing_matches_direct_calls(self):
        assert slemma_equality(F_CROSS, H_NEG_SQ).branch.startswith("one-sided")
        assert slemma_equality(F_SADDLE, H_PLANE).branch.startswith("two-sided")

    def test_zero_constraint_means_global_nonnegativity(self):
        h0 = zeros_qf(2)
        good = slemma_equality(qf(np.eye(2), [0.1, 0.0], 0.1), h0)
        assert good.e1_true == (np.linalg.eigvalsh(lift(qf(np.eye(2), [0.1, 0.0], 0.1)))[0] >= -1e-9)
        bad = slemma_equality(qf(np.diag([1.0, -1.0]), [0, 0], 0.0), h0)
        assert not bad.e1_true

    def test_totality_and_oracle_agreement(self, rng):
        checked = 0
        for _ in range(200):
            n = int(rng.integers(1, 5))
            f = random_quadform(rng, n)
            h = random_feasible_constraint(rng, n)
            v = slemma_equality(f, h, seed=int(rng.integers(1_000_000)))
            checked += 1
            # certificate soundness
            if v.certificate is not None:
                assert_lift_psd(
                    lift(f) + v.certificate * lift(h),
                    1e-6 * (1.0 + abs(v.certificate)) * (1.0 + f.scale() + h.scale()),
                )
            if v.counterexample is not None:
                assert evaluate(f, v.counterexample) < -1e-8
                assert abs(evaluate(h, v.counterexample)) <= 1e-5 * (1.0 + h.scale())
            # refutation-direction oracle agreement
            r = oracle_e1(f, h, samples=2000, seed=int(rng.integers(1_000_000)))
            if r.refuted:
                assert not v.e1_true
        assert checked == 200


class TestFinsler:
    def test_definite_combination(self):
        strict, mu = finsler(np.diag([1.0, -1.0]), np.eye(2))
        assert strict
        assert np.linalg.eigvalsh(np.diag([1.0, -1.0]) + mu * np.eye(2))[0] > 0

    def test_no_definite_combination(self):
        strict, mu = finsler(F_CROSS.A, H_NEG_SQ.A)
        assert not strict and mu is None

    def test_zero_b(self):
        strict, mu = finsler(np.eye(2), np.zeros((2, 2)))
        assert strict and mu == pytest.approx(0.0, abs=1e-6)


class TestInequalityLemma:
    def test_saddle_pair_both_false(self):
        v = slemma_inequality(F_SADDLE, H_PLANE)
        assert v.equivalence_holds
        assert not v.e1_true and not v.e2_true
        x = v.counterexample
        assert evaluate(H_PLANE, x) <= 1e-8
        assert evaluate(F_SADDLE, x) < -1e-8

    def test_slater_holds_for_one_sided_pair(self):
        v = slemma_inequality(F_CROSS, H_NEG_SQ)
        assert v.equivalence_holds
        assert not v.e1_true and not v.e2_true

    def test_zero_multiplier_certificate(self):
        f = qf([[1.0]], [-1.0], 1.0)  # (x-1)^2
        h = zeros_qf(1, b=[0.5], d=-1.0)  # x - 1
        v = slemma_inequality(f, h)
        assert v.e1_true and v.e2_true
        assert v.certificate >= 0.0
        assert certificate_is_valid(f, h, v.certificate)

    def test_slater_violation(self):
        with pytest.raises(SlaterViolation):
            slemma_inequality(F_SADDLE, qf(np.diag([1.0, 0.0]), [0, 0], 0.0))

    def test_random_nonneg_multiplier(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 4))
            f = random_quadform(rng, n)
            h = random_quadform(rng, n)
            from eqslemma.quadratics import value_range

            if not (value_range(h).lo < -1e-6):
                continue
            v = slemma_inequality(f, h, seed=int(rng.integers(1_000_000)))
            if v.certificate is not None:
                assert v.certificate >= 0.0
                assert_lift_psd(
                    lift(f) + v.certificate * lift(h),
                    1e-6 * (1.0 + v.certificate) * (1.0 + f.scale() + h.scale()),
                )


class TestRegularized:
    def test_exception_pair_gets_squared_certificate(self):
        cert = regularized_lambda(F_SADDLE, H_PLANE, 0.1)
        assert cert.exponent == 2
        assert regularized_certificate_is_valid(F_SADDLE, H_PLANE, cert)
        # independent eigencheck of the cushioned combination
        total = add(regularize(F_SADDLE, 0.1), squared_affine(H_PLANE), cert.lambda_eps)
        assert np.linalg.eigvalsh(lift(total))[0] >= -1e-8

    def test_quadratic_part_keeps_exponent_one(self):
        f = qf([[1.0]], [0.0], 1.0)  # x^2 + 1
        h = qf([[1.0]], [0.0], -1.0)  # x^2 - 1
        cert = regularized_lambda(f, h, 0.5)
        assert cert.exponent == 1
        assert regularized_certificate_is_valid(f, h, cert)

    def test_globally_nonnegative_objective(self, rng):
        f = qf(np.eye(2), [0, 0], 0.0)
        for _ in range(5):
            h = random_feasible_constraint(rng, 2)
            cert = regularized_lambda(f, h, 0.3)
            assert regularized_certificate_is_valid(f, h, cert)

    def test_e1_violated(self):
        with pytest.raises(E1Violated):
            regularized_lambda(F_NEG_BALL, H_PLANE, 0.1)

    def test_monotone_in_epsilon(self, rng):
        pairs = [
            (F_SADDLE, H_PLANE),
            (qf(np.eye(2), [0, 0], 0.0), random_feasible_constraint(rng, 2)),
            (qf([[1.0]], [0.0], 1.0), qf([[1.0]], [0.0], -1.0)),
        ]
        for f, h in pairs:
            cert = regularized_lambda(f, h, 0.1)
            for eps_bigger in (0.2, 0.7, 1.5):
                assert regularized_certificate_is_valid(f, h, cert, eps=eps_bigger)

    def test_inequality_variant(self):
        # Slater fails for h = x1^2; the implication restricts to x1 = 0.
        h = qf(np.diag([1.0, 0.0]), [0, 0], 0.0)
        f = qf(np.diag([0.0, 1.0]), [0, 0], 0.0)  # x2^2
        cert = regularized_inequality(f, h, 0.25)
        assert cert.lambda_eps >= 0.0

    def test_inequality_variant_needs_multiplier(self):
        h = qf(np.diag([1.0, 0.0]), [0, 0], 0.0)
        f = qf(np.diag([-1.0, 1.0]), [0, 0], 0.0)
        cert = regularized_inequality(f, h, 0.1)
        assert cert.lambda_eps >= 0.0
        # lambda = 1 is a hand-checkable certificate at eps = 0.1
        manual = add(regularize(f, 0.1), h, 1.0)
        assert np.linalg.eigvalsh(lift(manual))[0] >= -1e-9
        found = add(regularize(f, 0.1), h, cert.lambda_eps)
        assert np.linalg.eigvalsh(lift(found))[0] >= -1e-7

    def test_inequality_variant_shifted_root(self):
        # h = (x-1)^2 fails Slater; f = x - 1 vanishes on {h <= 0} = {1}.
        h = qf([[1.0]], [-1.0], 1.0)
        f = zeros_qf(1, b=[0.5], d=-1.0)
        cert = regularized_inequality(f, h, 0.2)
        assert cert.lambda_eps >= 0.0
        found = add(regularize(f, 0.2), squared_affine_or_self(h, cert), cert.lambda_eps)
        assert np.linalg.eigvalsh(lift(found))[0] >= -1e-7


def squared_affine_or_self(h: QuadForm, cert) -> QuadForm:
    if cert.exponent == 2:
        return squared_affine(QuadForm(np.zeros_like(h.A), h.a, h.c))
    return h
