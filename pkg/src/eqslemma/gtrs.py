"""Interval-constrained quadratic minimization and the interval lemma.

``inf { f(x) : l <= h(x) <= u }`` splits into two regimes: when the
objective is convex and some unconstrained stationary point is feasible
the constraint is inactive; otherwise the optimum presses against one of
the two level sets ``h = l`` or ``h = u`` and the equality solver
finishes the job.

The companion decision problem — does ``l <= h <= u  =>  f >= 0`` force
a signed multiplier certificate — holds under strict feasibility except
in a single affine exceptional shape, certified by a one-parameter
semidefinite test in ``nu >= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, qp1eqc, slemma
from .errors import InfeasibleProblem, StrictFeasibilityViolation
from .quadratics import (
    QuadForm,
    GtrsProblem,
    Qp1eqcProblem,
    evaluate,
    find_root,
    lift,
    restrict_to_affine,
    value_range,
)

INTERIOR = "Interior"
LOWER_BOUNDARY = "LowerBoundary"
UPPER_BOUNDARY = "UpperBoundary"

#: Value ties between outcomes are broken within this margin.
TIE_TOL = 1e-9


@dataclass(frozen=True)
class GtrsOutcome:
    status: str
    value: float
    x_star: np.ndarray | None = None
    mu_star: float | None = None
    source: str = INTERIOR


@dataclass(frozen=True)
class IntervalSLemmaVerdict:
    equivalence_holds: bool
    i1_true: bool
    i2_true: bool
    mu: float | None
    exception_nu: float | None
    details: dict = field(default_factory=dict)


def _shifted(h: QuadForm, level: float) -> QuadForm:
    return QuadForm(h.A, h.a, h.c - level)


def strict_feasibility(p: GtrsProblem) -> bool:
    """True when some point satisfies ``l < h(x) < u`` strictly.

    A quadratic attains every interior value of its range and each
    finite endpoint, so the test is an interval intersection with
    attention to endpoints.
    """
    vr = value_range(p.constraint)
    lo, hi = vr.lo, vr.hi
    if p.l >= p.u:
        return False
    if max(lo, p.l) < min(hi, p.u):
        return True
    # Degenerate range (constant h) or touching endpoints.
    if lo == hi:
        return p.l < lo < p.u
    for end, attained in ((lo, vr.lo_attained), (hi, vr.hi_attained)):
        if attained and p.l < end < p.u:
            return True
    return False


def _feasible(p: GtrsProblem) -> bool:
    vr = value_range(p.constraint)
    ft = qp1hyper_tol(p)
    return max(vr.lo, p.l) <= min(vr.hi, p.u) + ft


def qp1hyper_tol(p: GtrsProblem) -> float:
    return qp1eqc.feas_tol(p.constraint) * (1.0 + abs(p.l) + abs(p.u))


def _boundary_solve(p: GtrsProblem, level: float) -> qp1eqc.SolveOutcome | None:
    shifted = _shifted(p.constraint, level)
    if not value_range(shifted).contains(0.0, qp1eqc.feas_tol(shifted)):
        return None
    return qp1eqc.solve(Qp1eqcProblem(p.objective, shifted))


def solve_gtrs(p: GtrsProblem) -> GtrsOutcome:
    """Globally solve ``inf { f(x) : l <= h(x) <= u }``.

    When ``f`` is convex with a stationary point and the constraint's
    values over the stationary set meet ``[l, u]``, the unconstrained
    minimum is the answer (``Interior``).  Otherwise the optimum is the
    better of the two boundary equality problems; ``Unattained`` beats
    ``Attained`` only when its infimum is strictly smaller, and exact
    value ties go to the lower boundary.
    """
    if not _feasible(p):
        raise InfeasibleProblem("no point satisfies l <= h(x) <= u")
    f, h = p.objective, p.constraint

    spA = linalg.spectrum(f.A)
    if spA.n_neg == 0 and linalg.in_range(f.A, f.a):
        x_hat = -linalg.pinv(f.A) @ f.a
        N = linalg.null_basis(f.A)
        over_stationary = restrict_to_affine(h, x_hat, N)
        hr = value_range(over_stationary)
        ft = qp1hyper_tol(p)
        lo_t, hi_t = max(hr.lo, p.l), min(hr.hi, p.u)
        if lo_t <= hi_t + ft:
            target = min(max(0.5 * (lo_t + hi_t), p.l), p.u)
            y = find_root(_shifted(over_stationary, target))
            if y is None and hr.lo == hr.hi:
                y = np.zeros(N.shape[1])
            if y is not None:
                x_star = x_hat + N @ y
                return GtrsOutcome(
                    qp1eqc.ATTAINED, evaluate(f, x_star), x_star=x_star, source=INTERIOR
                )

    lower = _boundary_solve(p, p.l)
    upper = _boundary_solve(p, p.u)
    candidates = [(out, src) for out, src in ((lower, LOWER_BOUNDARY), (upper, UPPER_BOUNDARY)) if out]
    if not candidates:
        raise InfeasibleProblem("both boundary level sets are empty")

    for out, src in candidates:
        if out.status == qp1eqc.UNBOUNDED:
            return GtrsOutcome(qp1eqc.UNBOUNDED, -math.inf, source=src)

    def better(a, b):
        (out_a, _), (out_b, _) = a, b
        if out_a.value < out_b.value - TIE_TOL * (1.0 + abs(out_b.value)):
            return a
        if out_b.value < out_a.value - TIE_TOL * (1.0 + abs(out_a.value)):
            return b
        # Value tie: an attained outcome wins; then the lower boundary.
        if (out_a.status == qp1eqc.ATTAINED) != (out_b.status == qp1eqc.ATTAINED):
            return a if out_a.status == qp1eqc.ATTAINED else b
        return a

    best = candidates[0]
    for cand in candidates[1:]:
        best = better(best, cand)
    out, src = best
    return GtrsOutcome(out.status, out.value, x_star=out.x_star, mu_star=out.mu_star, source=src)


def interval_exception_pencil(
    f: QuadForm, h: QuadForm, l: float, u: float
) -> tuple[np.ndarray, np.ndarray]:
    """Affine family ``M0 + nu*M1`` of the interval exception test.

    Built for affine ``h = 2b'x + d`` with ``V`` spanning the hyperplane
    directions; PSD-feasibility of some ``nu >= 0`` marks the
    exceptional shape of the interval lemma.
    """
    A, a, c = f.A, f.a, f.c
    b, d = h.a, h.c
    bb2 = 2.0 * float(b @ b)
    V = linalg.null_basis(b)
    k = V.shape[1]
    M0 = np.zeros((k + 2, k + 2))
    M0[:k, :k] = V.T @ A @ V
    M0[:k, k] = (V.T @ A @ b) / bb2
    M0[k, :k] = M0[:k, k]
    M0[:k, k + 1] = V.T @ a
    M0[k + 1, :k] = M0[:k, k + 1]
    M0[k, k] = float(b @ A @ b) / (bb2 * bb2)
    M0[k, k + 1] = float(a @ b) / bb2
    M0[k + 1, k] = M0[k, k + 1]
    M0[k + 1, k + 1] = c
    M1 = np.zeros((k + 2, k + 2))
    M1[k, k] = 1.0
    M1[k, k + 1] = -0.5 * (l + u - 2.0 * d)
    M1[k + 1, k] = M1[k, k + 1]
    M1[k + 1, k + 1] = (l - d) * (u - d)
    return M0, M1


def _i2_search(f: QuadForm, h: QuadForm, l: float, u: float, prefer: str):
    """Signed multiplier certificate for the interval statement.

    The certificate is ``f + mu_minus*(h - u) + mu_plus*(l - h) >= 0``
    where exactly one of the two signed parts is active; each side is a
    one-parameter concave eigenvalue maximization over ``sigma >= 0``.
    """
    lower_gen = QuadForm(-h.A, -h.a, l - h.c)  # l - h
    upper_gen = QuadForm(h.A, h.a, h.c - u)  # h - u
    order = [(lower_gen, 1.0), (upper_gen, -1.0)]
    if prefer == UPPER_BOUNDARY:
        order.reverse()
    for gen, sign in order:
        M0, M1 = lift(f), lift(gen)
        tol = linalg.default_tol(M0, M1)
        sigma, val = linalg.max_lambda_min_affine(M0, M1, domain=(0.0, math.inf))
        if val >= -tol:
            return sign * float(sigma)
    return None


def interval_slemma(f: QuadForm, h: QuadForm, l: float, u: float) -> IntervalSLemmaVerdict:
    """Decide ``l <= h <= u => f >= 0``  ~  signed-multiplier certificate.

    Requires strict feasibility.  A degenerate interval ``l == u`` is
    routed to the equality lemma.  The exceptional shape mirrors the
    equality one: affine non-constant ``h``, exactly one negative
    objective eigenvalue, and a PSD point of the ``nu``-family.
    """
    if l > u:
        raise ValueError("interval bounds must satisfy l <= u")
    if l == u:
        inner = slemma.slemma_equality(f, _shifted(h, l))
        mu = -inner.certificate if inner.certificate is not None else None
        return IntervalSLemmaVerdict(
            equivalence_holds=inner.equivalence_holds,
            i1_true=inner.e1_true,
            i2_true=inner.e2_true,
            mu=mu,
            exception_nu=None,
            details={"routed_to_equality": True, "branch": inner.branch},
        )
    problem = GtrsProblem(f, h, l, u)
    if not strict_feasibility(problem):
        raise StrictFeasibilityViolation("no point with l < h(x) < u")

    spA = linalg.spectrum(f.A)
    affine = not qp1eqc.constraint_is_quadratic(h, ref=f)
    if affine and spA.n_neg == 1 and np.linalg.norm(h.a) > 0.0:
        M0, M1 = interval_exception_pencil(f, h, l, u)
        tol = linalg.default_tol(M0, M1)
        # lambda_min of the nu-family is concave; bracket doubles to 2^40.
        nu, val = linalg.max_lambda_min_affine(M0, M1, domain=(0.0, math.inf), cap=2.0**40)
        if val >= -tol:
            return IntervalSLemmaVerdict(
                equivalence_holds=False,
                i1_true=True,
                i2_true=False,
                mu=None,
                exception_nu=float(nu),
                details={"exception_value": val},
            )

    out = solve_gtrs(problem)
    tol = linalg.default_tol(lift(f), lift(h))
    i1 = out.value >= -tol
    mu = _i2_search(f, h, l, u, out.source) if i1 else None
    i2 = mu is not None
    return IntervalSLemmaVerdict(
        equivalence_holds=(i1 == i2),
        i1_true=i1,
        i2_true=i2,
        mu=mu,
        exception_nu=None,
        details={"gtrs_value": out.value, "source": out.source},
    )
