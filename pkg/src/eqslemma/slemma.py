"""Decision procedures for quadratic implication lemmas.

For a pair of quadratics ``(f, h)`` with ``{h = 0}`` nonempty, the two
statements whose relationship this module decides are

* (E1)  ``h(x) = 0  =>  f(x) >= 0`` for all x, and
* (E2)  there is a real multiplier ``mu`` with ``f + mu*h >= 0`` on R^n.

(E2) always implies (E1); the converse can fail, and the failure has a
complete finite characterization split on whether ``h`` changes sign:

* ``h`` one-signed (no two-sided Slater point): the pair homogenizes to
  a reduced matrix ``W`` on the constraint manifold, and the equivalence
  holds exactly when ``W`` is definite or its null space matches the
  null space of the squared form (``one_sided_verdict``).
* ``h`` sign-changing: the equivalence always holds except in one shape,
  where the objective matrix has exactly one negative eigenvalue, the
  constraint is a non-constant affine function, and the objective is
  convex-nonnegative on the constraint hyperplane
  (``two_sided_verdict``).

The classical one-sided inequality lemma and the regularized certificate
families are derived from the equality machinery by slack augmentation
``h(x) + z^2`` and by the cushion ``eps*(x'x + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, qp1eqc
from .errors import (
    CounterexampleSearchFailed,
    E1Violated,
    HypothesisViolation,
    InfeasibleConstraint,
    SlaterViolation,
)
from .oracles import sample_constraint
from .quadratics import (
    DEFAULT_SEED,
    QuadForm,
    Qp1eqcProblem,
    add,
    evaluate,
    evaluate_many,
    lift,
    regularize,
    restrict_to_affine,
    squared_affine,
    value_range,
)

BRANCH_ONE_SIDED_A = "one-sided-a"
BRANCH_ONE_SIDED_B = "one-sided-b"
BRANCH_ONE_SIDED_NEITHER = "one-sided-neither"
BRANCH_TWO_SIDED_GENERIC = "two-sided-generic"
BRANCH_TWO_SIDED_EXCEPTION = "two-sided-exception"


@dataclass(frozen=True)
class SLemmaVerdict:
    """Outcome of an equivalence decision for one pair ``(f, h)``.

    ``equivalence_holds`` states whether (E1) and (E2) have the same
    truth value for this pair.  A returned ``certificate`` is a
    multiplier making the lifted matrix of ``f + mu*h`` PSD; a returned
    ``counterexample`` is a feasible point with negative objective.
    ``details`` carries branch-specific evidence (the reduced matrix,
    the null-space comparison, the exception matrix).
    """

    equivalence_holds: bool
    e1_true: bool
    e2_true: bool
    certificate: float | None
    counterexample: np.ndarray | None
    branch: str
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegularizedCertificate:
    """Multiplier for the cushioned inequality
    ``f + lambda_eps * h^exponent + eps*(x'x + 1) >= 0``."""

    epsilon: float
    lambda_eps: float
    exponent: int


def certificate_matrix(f: QuadForm, h: QuadForm, mu: float) -> np.ndarray:
    """Lifted matrix of ``f + mu*h`` whose PSD-ness is statement (E2)."""
    return lift(f) + mu * lift(h)


def certificate_is_valid(f: QuadForm, h: QuadForm, mu: float, tol: float | None = None) -> bool:
    M = certificate_matrix(f, h, mu)
    if tol is None:
        tol = linalg.default_tol(M)
    return linalg.lambda_min(M) >= -tol


def _check_constraint_feasible(h: QuadForm) -> None:
    if not value_range(h).contains(0.0, qp1eqc.feas_tol(h)):
        raise InfeasibleConstraint("the set {h = 0} is empty")


def assumption1_holds(h: QuadForm) -> bool:
    """True when ``h`` takes values of both signs.

    Equivalently (for feasible ``h``): it is NOT the case that the
    quadratic part is one-signed with the linear term in its range and
    zero optimal value.  Raises ``InfeasibleConstraint`` when
    ``{h = 0}`` is empty.
    """
    _check_constraint_feasible(h)
    return qp1eqc.two_sided(h)


def e2_certificate_search(
    f: QuadForm, h: QuadForm, sign_constraint: str = "free"
) -> float | None:
    """Multiplier with ``lift(f) + mu*lift(h)`` PSD, or ``None``.

    Maximizes the concave profile ``mu -> lambda_min`` of the lifted
    pencil over the real line (or the half line for
    ``sign_constraint='nonneg'``).  The feasible multiplier set is
    closed, so a maximizer that only creeps within tolerance of zero at
    the search cap is an asymptotic artifact (the profile approaches
    zero without any finite multiplier working) and is rejected; away
    from the cap the usual ``-tol`` acceptance applies.
    """
    domain = (0.0, math.inf) if sign_constraint == "nonneg" else (-math.inf, math.inf)
    M0, M1 = lift(f), lift(h)
    tol = linalg.default_tol(M0, M1)
    cap = linalg.MU_CAP
    mu, val = linalg.max_lambda_min_affine(M0, M1, domain=domain, cap=cap)
    if val >= tol:
        return float(mu)
    if val >= -tol and abs(mu) <= 0.9 * cap:
        return float(mu)
    return None


def _find_counterexample(f: QuadForm, h: QuadForm, seed: int = DEFAULT_SEED) -> np.ndarray:
    """A feasible point with f < 0, harvested from the solver or sampled."""
    out = qp1eqc.solve(Qp1eqcProblem(f, h))
    tol = linalg.default_tol(lift(f))
    if out.status == qp1eqc.ATTAINED and out.value < -tol and out.x_star is not None:
        return out.x_star
    for count in (2_000, 20_000, 200_000):
        pts = sample_constraint(h, count, seed)
        if pts.shape[0] == 0:
            continue
        vals = evaluate_many(f, pts)
        bad = np.flatnonzero(vals < -1e-8)
        if bad.size:
            # Smallest-norm witness, for readability of reports.
            return pts[bad[np.argmin(np.linalg.norm(pts[bad], axis=1))]]
    raise CounterexampleSearchFailed(
        "the implication is refutable but no witness was found by sampling"
    )


def e1_check(
    f: QuadForm, h: QuadForm, seed: int = DEFAULT_SEED
) -> tuple[bool, np.ndarray | None]:
    """Decide (E1) by globally minimizing ``f`` on ``{h = 0}``.

    Returns ``(flag, counterexample)``; the witness is present exactly
    when the implication fails.
    """
    out = qp1eqc.solve(Qp1eqcProblem(f, h))
    tol = linalg.default_tol(lift(f), lift(h))
    if out.value >= -tol:
        return True, None
    return False, _find_counterexample(f, h, seed)


def _one_sided_data(f: QuadForm, h: QuadForm):
    """Reduced matrices for a one-signed constraint.

    With ``Z`` spanning the null space of the constraint's quadratic
    part, the constraint set is ``{-B^+ b + Z y}`` and (E1) becomes
    nonnegativity of the reduced homogenized matrix
    ``W = Ztil' Atil Ztil``; (E2) homogenizes to the pencil of ``Atil``
    with ``blockdiag(B, 0)``.
    """
    B, b = h.A, h.a
    Z = linalg.null_basis(B)
    Bp = linalg.pinv(B)
    n, m = f.dim, Z.shape[1]
    corner = float(b @ Bp @ f.A @ Bp @ b - 2.0 * f.a @ Bp @ b + f.c)
    Atil = np.zeros((n + 1, n + 1))
    Atil[:n, :n] = f.A
    Atil[:n, n] = f.a - f.A @ Bp @ b
    Atil[n, :n] = Atil[:n, n]
    Atil[n, n] = corner
    Ztil = np.zeros((n + 1, m + 1))
    Ztil[:n, :m] = Z
    Ztil[n, m] = 1.0
    W = Ztil.T @ Atil @ Ztil
    W = 0.5 * (W + W.T)
    W2 = (Atil @ Ztil).T @ (Atil @ Ztil)
    return W, W2


def one_sided_verdict(f: QuadForm, h: QuadForm) -> SLemmaVerdict:
    """Equivalence decision when the constraint never changes sign.

    Requires a feasible, one-signed ``h``.  (E1) holds iff the reduced
    matrix ``W`` is PSD; (E2) iff the lifted pencil is feasible.  The
    equivalence is guaranteed by either of two certificate shapes:
    ``W`` positive definite, or ``W`` PSD with the null spaces of ``W``
    and of the squared reduction agreeing.  When (E1) itself fails both
    statements are false and the equivalence holds vacuously.
    """
    _check_constraint_feasible(h)
    if qp1eqc.two_sided(h):
        raise HypothesisViolation("one_sided_verdict requires a one-signed constraint")

    W, W2 = _one_sided_data(f, h)
    tolW = linalg.default_tol(W)
    sp = linalg.spectrum(W, tolW)
    e1 = sp.lambda_min >= -tolW
    mu = e2_certificate_search(f, h)
    e2 = mu is not None

    nullspace_match = None
    if sp.n_neg == 0 and sp.n_zero == 0:
        branch = BRANCH_ONE_SIDED_A
    elif e1:
        nullspace_match = linalg.same_nullspace(W, W2)
        branch = BRANCH_ONE_SIDED_B if nullspace_match else BRANCH_ONE_SIDED_NEITHER
    else:
        branch = BRANCH_ONE_SIDED_NEITHER

    counterexample = None
    if not e1:
        counterexample = _find_counterexample(f, h)
    return SLemmaVerdict(
        equivalence_holds=(e1 == e2),
        e1_true=e1,
        e2_true=e2,
        certificate=mu if e2 else None,
        counterexample=counterexample,
        branch=branch,
        details={"w_matrix": W, "nullspace_match": nullspace_match},
    )


def homogeneous_equivalence(A: np.ndarray, B: np.ndarray) -> SLemmaVerdict:
    """One-signed equivalence decision for a pair of quadratic forms.

    ``B`` must be positive or negative semidefinite.  With ``Z``
    spanning its null space: (E1) iff ``Z'AZ`` is PSD, (E2) iff the
    pencil ``A + mu*B`` is feasible, and equivalence is certified by
    ``B`` definite, ``Z'AZ`` definite, or matching null spaces of
    ``Z'AZ`` and ``Z'A^2Z``.
    """
    A = linalg.as_symmetric(A, "A")
    B = linalg.as_symmetric(B, "B")
    spB = linalg.spectrum(B)
    if spB.n_neg > 0 and spB.n_pos > 0:
        raise HypothesisViolation("homogeneous_equivalence requires a semidefinite B")

    Z = linalg.null_basis(B)
    ZAZ = Z.T @ A @ Z
    ZA2Z = (A @ Z).T @ (A @ Z)
    tol = linalg.default_tol(ZAZ, A)
    spW = linalg.spectrum(ZAZ, tol)
    e1 = spW.lambda_min >= -tol if ZAZ.size else True
    interval = linalg.pencil_interval(A, B)
    e2 = not interval.empty

    nullspace_match = None
    if Z.shape[1] == 0 or (spW.n_neg == 0 and spW.n_zero == 0):
        branch = BRANCH_ONE_SIDED_A
    elif e1:
        nullspace_match = linalg.same_nullspace(ZAZ, ZA2Z)
        branch = BRANCH_ONE_SIDED_B if nullspace_match else BRANCH_ONE_SIDED_NEITHER
    else:
        branch = BRANCH_ONE_SIDED_NEITHER

    mu = None
    if e2:
        mu, _ = linalg.max_lambda_min_affine(A, B)
    return SLemmaVerdict(
        equivalence_holds=(e1 == e2),
        e1_true=bool(e1),
        e2_true=e2,
        certificate=float(mu) if e2 else None,
        counterexample=None,
        branch=branch,
        details={"w_matrix": ZAZ, "nullspace_match": nullspace_match},
    )


def exception_matrix(f: QuadForm, h: QuadForm) -> np.ndarray:
    """Reduced nonnegativity matrix for an affine constraint.

    With ``x0`` the closest-to-origin solution of the affine equation
    ``2b'x + d = 0`` and ``V`` spanning the hyperplane directions, this
    is the lift of ``y -> f(x0 + Vy)``; its PSD-ness is exactly (E1).
    """
    b, d = h.a, h.c
    x0 = -(d / (2.0 * float(b @ b))) * b
    V = linalg.null_basis(b)
    grad = V.T @ (f.A @ x0 + f.a)
    n1 = V.shape[1] + 1
    M = np.zeros((n1, n1))
    M[:-1, :-1] = V.T @ f.A @ V
    M[:-1, -1] = grad
    M[-1, :-1] = grad
    M[-1, -1] = evaluate(f, x0)
    return 0.5 * (M + M.T)


def two_sided_verdict(f: QuadForm, h: QuadForm, seed: int = DEFAULT_SEED) -> SLemmaVerdict:
    """Equivalence decision when the constraint takes both signs.

    The equivalence holds except in one exceptional shape: objective
    matrix with exactly one negative eigenvalue, affine non-constant
    constraint, and objective nonnegative-convex on the constraint
    hyperplane (PSD exception matrix).  Outside the exception, (E1) and
    (E2) share a truth value that the certificate search decides.
    """
    if not assumption1_holds(h):
        raise HypothesisViolation("two_sided_verdict requires a sign-changing constraint")

    spA = linalg.spectrum(f.A)
    affine = not qp1eqc.constraint_is_quadratic(h, ref=f)
    if affine and spA.n_neg == 1 and np.linalg.norm(h.a) > 0.0:
        M = exception_matrix(f, h)
        if linalg.is_psd(M):
            return SLemmaVerdict(
                equivalence_holds=False,
                e1_true=True,
                e2_true=False,
                certificate=None,
                counterexample=None,
                branch=BRANCH_TWO_SIDED_EXCEPTION,
                details={"exception_matrix": M},
            )

    mu = e2_certificate_search(f, h)
    if mu is not None:
        return SLemmaVerdict(
            equivalence_holds=True,
            e1_true=True,
            e2_true=True,
            certificate=float(mu),
            counterexample=None,
            branch=BRANCH_TWO_SIDED_GENERIC,
        )
    counterexample = _find_counterexample(f, h, seed)
    return SLemmaVerdict(
        equivalence_holds=True,
        e1_true=False,
        e2_true=False,
        certificate=None,
        counterexample=counterexample,
        branch=BRANCH_TWO_SIDED_GENERIC,
    )


def slemma_equality(f: QuadForm, h: QuadForm, seed: int = DEFAULT_SEED) -> SLemmaVerdict:
    """Decide (E1) ~ (E2) for the equality-constrained pair ``(f, h)``.

    Routes on whether ``h`` changes sign; every verdict carries either a
    verified multiplier or a verified counterexample.  Raises
    ``InfeasibleConstraint`` for empty ``{h = 0}``.
    """
    if assumption1_holds(h):
        return two_sided_verdict(f, h, seed)
    return one_sided_verdict(f, h)


def finsler(A: np.ndarray, B: np.ndarray) -> tuple[bool, float | None]:
    """Strict homogeneous lemma: ``x'Bx = 0, x != 0  =>  x'Ax > 0``.

    Holds iff some ``A + mu*B`` is positive definite; returns the flag
    and, when it holds, a maximizing multiplier.
    """
    A = linalg.as_symmetric(A, "A")
    B = linalg.as_symmetric(B, "B")
    tol = linalg.default_tol(A, B)
    mu, val = linalg.max_lambda_min_affine(A, B)
    if val >= tol:
        return True, float(mu)
    return False, None


def _augment_slack(f: QuadForm, h: QuadForm) -> tuple[QuadForm, QuadForm]:
    """Embed the pair in one extra variable with ``h_hat = h + z^2``."""
    n = f.dim
    Af = np.zeros((n + 1, n + 1))
    Af[:n, :n] = f.A
    f_hat = QuadForm(Af, np.concatenate([f.a, [0.0]]), f.c)
    Bh = np.zeros((n + 1, n + 1))
    Bh[:n, :n] = h.A
    Bh[n, n] = 1.0
    h_hat = QuadForm(Bh, np.concatenate([h.a, [0.0]]), h.c)
    return f_hat, h_hat


def slemma_inequality(f: QuadForm, h: QuadForm, seed: int = DEFAULT_SEED) -> SLemmaVerdict:
    """Classical one-sided lemma via slack augmentation.

    Under a Slater point (``inf h < 0``) the statements
    ``h <= 0 => f >= 0`` and ``exists mu >= 0: f + mu*h >= 0`` are
    decided by applying the equality machinery to
    ``h_hat(x, z) = h(x) + z^2``; the augmented constraint always has a
    quadratic part, so the exceptional case cannot trigger, and the
    recovered multiplier is nonnegative (clamped within tolerance).
    """
    vr = value_range(h)
    if not (vr.lo < -qp1eqc.feas_tol(h)):
        raise SlaterViolation("no point with h < 0 exists")
    f_hat, h_hat = _augment_slack(f, h)
    inner = two_sided_verdict(f_hat, h_hat, seed)
    mu = inner.certificate
    if mu is not None:
        if mu < 0.0:
            # Theory forces mu >= 0; only a tolerance-sized undershoot is
            # acceptable, and it is clamped.
            tol = linalg.default_tol(lift(f), lift(h))
            if mu < -max(tol, 1e-8 * (1.0 + abs(mu))):
                raise AssertionError(f"one-sided multiplier came out negative: {mu}")
            mu = 0.0
        if not certificate_is_valid(f, h, mu):
            # Rare boundary polish: redo the search on the half line.
            mu = e2_certificate_search(f, h, sign_constraint="nonneg")
    counterexample = inner.counterexample[:-1] if inner.counterexample is not None else None
    return SLemmaVerdict(
        equivalence_holds=inner.equivalence_holds,
        e1_true=inner.e1_true,
        e2_true=inner.e2_true,
        certificate=mu,
        counterexample=counterexample,
        branch=inner.branch,
        details=inner.details,
    )


def regularized_lambda(f: QuadForm, h: QuadForm, eps: float) -> RegularizedCertificate:
    """Certificate for ``f + lambda*h^phi + eps*(x'x + 1) >= 0``.

    The exponent ``phi`` is 1 for constraints with a quadratic part and
    2 for affine constraints (whose square is again a quadratic).  A
    certificate exists for every ``eps > 0`` exactly when (E1) holds,
    which is verified first (``E1Violated`` otherwise).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    _check_constraint_feasible(h)
    ok, _ = e1_check(f, h)
    if not ok:
        raise E1Violated("the base implication fails, no certificate family exists")
    if qp1eqc.constraint_is_quadratic(h, ref=f):
        exponent, target = 1, h
    else:
        exponent, target = 2, squared_affine(QuadForm(np.zeros_like(h.A), h.a, h.c))
    f_eps = regularize(f, eps)
    M0, M1 = lift(f_eps), lift(target)
    tol = linalg.default_tol(M0, M1)
    # Existence is guaranteed but with no magnitude bound, so the search
    # bracket starts at 1/eps and the concave maximizer expands it.
    lam, val = linalg.max_lambda_min_affine(M0, M1, cap=max(1e12, 10.0 / eps))
    if val < -tol:
        raise AssertionError("certificate search failed although one must exist")
    return RegularizedCertificate(float(eps), float(lam), exponent)


def regularized_certificate_is_valid(
    f: QuadForm, h: QuadForm, cert: RegularizedCertificate, eps: float | None = None
) -> bool:
    """Re-verify a regularized certificate (optionally at a larger eps)."""
    eps = cert.epsilon if eps is None else eps
    if cert.exponent == 2:
        target = squared_affine(QuadForm(np.zeros_like(h.A), h.a, h.c))
    else:
        target = h
    total = add(regularize(f, eps), target, cert.lambda_eps)
    return linalg.is_psd(lift(total))


def regularized_inequality(f: QuadForm, h: QuadForm, eps: float) -> RegularizedCertificate:
    """Nonnegative certificate for the one-sided regularized lemma.

    Applies when the Slater condition fails non-vacuously: ``h >= 0``
    everywhere with minimum exactly 0, so ``{h <= 0} = {h = 0}``.  The
    slack augmentation ``h + z^2`` transfers the question to the
    equality machinery; the multiplier is nonnegative by a limit
    argument and is clamped within tolerance.
    """
    vr = value_range(h)
    ft = qp1eqc.feas_tol(h)
    if vr.lo < -ft:
        raise HypothesisViolation("Slater holds; use the unregularized one-sided lemma")
    if not vr.contains(0.0, ft):
        raise InfeasibleConstraint("{h <= 0} is empty")
    f_hat, h_hat = _augment_slack(f, h)
    cert = regularized_lambda(f_hat, h_hat, eps)
    lam = cert.lambda_eps
    if lam < 0.0:
        tol = linalg.default_tol(lift(f), lift(h))
        if lam < -max(tol, 1e-8):
            raise AssertionError(f"regularized multiplier came out negative: {lam}")
        lam = 0.0
    return RegularizedCertificate(float(eps), float(lam), cert.exponent)
