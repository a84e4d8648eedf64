"""Global solver for ``inf { f(x) : h(x) = 0 }``.

The Lagrangian dual of this problem is one-dimensional: maximize

    d(mu) = c + mu*d0 - (a + mu*b)' (A + mu*B)^+ (a + mu*b)

over the multipliers ``mu`` for which ``A + mu*B`` is positive
semidefinite and ``a + mu*b`` lies in its range.  ``d`` is concave and
upper semicontinuous there, so a golden-section maximization over the
pencil interval replaces any semidefinite-programming machinery while
remaining exact up to tolerance.  Strong duality holds whenever the
constraint changes sign and has a genuine quadratic part, which is what
lets the dual value be reported as the primal infimum; the remaining
shapes (affine or one-signed constraints) reduce to an unconstrained
quadratic over the constraint's solution manifold.

A finite infimum can fail to be attained only when the dual admits a
single feasible multiplier and the constraint, restricted to the
Kuhn-Tucker set at that multiplier, misses zero; the solver reports that
situation as ``Unattained`` together with the witnessing data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    HardCaseRecoveryFailed,
    HypothesisViolation,
    InfeasibleConstraint,
)
from .quadratics import (
    DEFAULT_SEED,
    QuadForm,
    Qp1eqcProblem,
    evaluate,
    find_root,
    restrict_to_affine,
    value_range,
)

#: Scale-aware feasibility tolerance for the constraint value.
FEAS_COEFF = 1e-7

#: Eigenvalues of A + mu*B below this (times the pencil scale) are
#: treated as null directions when forming Kuhn-Tucker points.  Looser
#: than the generic rank cutoff because the dual optimum is located to
#: about 1e-10 and the pencil is exactly singular there in hard cases.
KT_NULL_COEFF = 1e-8

UNBOUNDED = "Unbounded"
UNATTAINED = "Unattained"
ATTAINED = "Attained"


def feas_tol(h: QuadForm) -> float:
    """Tolerance on |h(x)| for calling a point feasible."""
    scale = abs(h.c) + float(np.linalg.norm(h.a))
    if h.A.size:
        scale += float(np.max(np.abs(h.A)))
    return FEAS_COEFF * (1.0 + scale)


def constraint_is_quadratic(h: QuadForm, ref: QuadForm | None = None) -> bool:
    """False when the quadratic part of ``h`` counts as zero.

    The cutoff is absolute relative to the objective's scale because the
    exceptional behaviour of the equality lemma is not scale-invariant
    in ``B`` alone.
    """
    ref_scale = float(np.max(np.abs(ref.A))) if ref is not None and ref.A.size else 0.0
    bnorm = float(np.max(np.abs(h.A))) if h.A.size else 0.0
    return bnorm > 1e-12 * (1.0 + ref_scale)


def two_sided(h: QuadForm) -> bool:
    """True when ``h`` takes both signs (checked through its range)."""
    vr = value_range(h)
    return vr.lo < -feas_tol(h) and vr.hi > feas_tol(h)


@dataclass(frozen=True)
class AttainabilityWitness:
    """Data certifying that no Kuhn-Tucker point is feasible.

    ``scalar`` is the extreme value of the constraint over the
    Kuhn-Tucker set ``y0 + V y``: a positive minimum when that
    restriction is convex, a negative maximum when concave.
    """

    y0: np.ndarray
    V: np.ndarray
    scalar: float


@dataclass(frozen=True)
class SolveOutcome:
    status: str
    value: float
    x_star: np.ndarray | None = None
    mu_star: float | None = None
    witness: AttainabilityWitness | None = None
    dual_interval: linalg.PencilInterval | None = None


@dataclass(frozen=True)
class DualProfile:
    """Trace of the one-dimensional dual maximization."""

    interval: linalg.PencilInterval
    mu_star: float
    value: float


def _pencil_matrix(p: Qp1eqcProblem, mu: float) -> np.ndarray:
    return p.objective.A + mu * p.constraint.A


def _pencil_vector(p: Qp1eqcProblem, mu: float) -> np.ndarray:
    return p.objective.a + mu * p.constraint.a


def _kt_cutoff(p: Qp1eqcProblem, mu: float) -> float:
    scaleA = float(np.max(np.abs(p.objective.A), initial=0.0))
    scaleB = float(np.max(np.abs(p.constraint.A), initial=0.0))
    return KT_NULL_COEFF * (1.0 + scaleA + abs(mu) * scaleB)


def _kt_decomposition(p: Qp1eqcProblem, mu: float, cutoff: float | None = None):
    """Stationary point and null basis of ``A + mu*B`` at the dual point.

    Returns ``(y0, V, resid)`` where ``y0`` minimizes the Lagrangian over
    the range directions, ``V`` spans the (tolerance) null space, and
    ``resid`` is the norm of the gradient component that no stationary
    point can cancel (nonzero exactly when ``a + mu*b`` leaves the range).
    """
    M = _pencil_matrix(p, mu)
    g = _pencil_vector(p, mu)
    vals, vecs = np.linalg.eigh(M)
    if cutoff is None:
        cutoff = _kt_cutoff(p, mu)
    null_mask = vals <= cutoff
    coords = vecs.T @ g
    inv = np.where(null_mask, 0.0, 1.0 / np.where(vals == 0.0, 1.0, vals))
    y0 = -vecs @ (inv * coords)
    V = vecs[:, null_mask]
    resid = float(np.linalg.norm(coords[null_mask]))
    return y0, V, resid


def dual_value(p: Qp1eqcProblem, mu: float) -> float:
    """Lagrangian dual value at ``mu``; ``-inf`` off the feasible set.

    Feasibility needs ``A + mu*B`` positive semidefinite and
    ``a + mu*b`` in its range; then the infimum of the Lagrangian is
    ``c + mu*d0 - (a + mu*b)'(A + mu*B)^+(a + mu*b)``.
    """
    M = _pencil_matrix(p, mu)
    tol = linalg.default_tol(p.objective.A, p.constraint.A)
    if linalg.lambda_min(M) < -tol:
        return -math.inf
    y0, _, resid = _kt_decomposition(p, mu)
    g = _pencil_vector(p, mu)
    if resid > KT_NULL_COEFF * (1.0 + float(np.linalg.norm(g))):
        return -math.inf
    const = p.objective.c + mu * p.constraint.c
    return const + float(g @ y0)


def _dual_derivative(p: Qp1eqcProblem, mu: float) -> float:
    # Envelope identity: d'(mu) = h(x(mu)) at the Lagrangian minimizer.
    # The stationary point is formed with a rank-level cutoff (not the
    # looser hard-case one) so that near a range-infeasible endpoint the
    # exploding gradient component is kept and the derivative correctly
    # dives instead of being truncated.
    M = _pencil_matrix(p, mu)
    scale = float(np.max(np.abs(M), initial=0.0))
    y0, _, _ = _kt_decomposition(p, mu, cutoff=linalg.RANK_CUTOFF * (1.0 + scale))
    return evaluate(p.constraint, y0)


def _maximize_dual(p: Qp1eqcProblem, lo: float, hi: float) -> tuple[float, float]:
    """Maximize the dual over ``[lo, hi]`` (interior range-feasible).

    The dual is numerically flat within ~sqrt(eps) of a smooth interior
    maximum, so value comparisons alone cannot place the maximizer
    accurately enough for primal recovery.  The envelope identity
    ``d'(mu) = h(stationary point at mu)`` gives a full-precision,
    nonincreasing derivative whose zero is bisected instead; values are
    only used to pick a finite starting bracket and to arbitrate the
    endpoints.
    """

    def d(mu: float) -> float:
        return dual_value(p, mu)

    if math.isfinite(lo) and math.isfinite(hi):
        a, b = lo, hi
    else:
        # Probe scan for a finite bracket around the best dual value.
        if math.isfinite(lo):
            step = 1.0 + abs(lo)
            probes = [lo] + [lo + step * 2.0**k for k in range(30)]
        elif math.isfinite(hi):
            step = 1.0 + abs(hi)
            probes = [hi] + [hi - step * 2.0**k for k in range(30)]
        else:
            probes = [0.0] + [s * 2.0**k for k in range(28) for s in (1.0, -1.0)]
        probes = sorted(t for t in set(probes) if lo <= t <= hi and abs(t) <= linalg.MU_CAP)
        vals = [d(t) for t in probes]
        k = int(np.argmax(vals))
        if vals[k] == -math.inf:
            return probes[k], -math.inf
        a = probes[max(k - 1, 0)]
        b = probes[min(k + 1, len(probes) - 1)]

    # Derivative bisection strictly inside [a, b]: at the bracket edges
    # the pencil can be singular and the stationary point (hence the
    # derivative) can lose the escaping gradient component.
    delta = 1e-9 * (1.0 + b - a)
    da = _dual_derivative(p, a + delta)
    db = _dual_derivative(p, b - delta)
    if da <= 0.0:
        mu0 = a
    elif db >= 0.0:
        mu0 = b
    else:
        x, y = a + delta, b - delta
        for _ in range(200):
            mid = 0.5 * (x + y)
            if _dual_derivative(p, mid) > 0.0:
                x = mid
            else:
                y = mid
            if (y - x) <= 1e-14 * (1.0 + abs(x)):
                break
        mu0 = 0.5 * (x + y)
    v0 = d(mu0)
    for cand in (lo, hi, a, b):
        if math.isfinite(cand):
            vc = d(cand)
            margin = 1e-12 * (1.0 + abs(v0)) if math.isfinite(v0) else 0.0
            if vc > v0 + margin:
                mu0, v0 = cand, vc
    return mu0, v0


def _dual_over_interval(p: Qp1eqcProblem, interval: linalg.PencilInterval):
    """Dual maximum over a non-degenerate pencil interval.

    Returns ``(mu_star, value, feasible_is_singleton)``.  On the
    interval's interior the null space of ``A + mu*B`` is constant, so
    range feasibility there is either universal, pinned to one ``mu``,
    or empty; endpoints are checked individually.
    """
    lo, hi = interval.lo, interval.hi
    mid = interval.midpoint
    _, V0, _ = _kt_decomposition(p, mid)
    alpha = V0.T @ p.objective.a
    beta = V0.T @ p.constraint.a
    gnorm = 1.0 + float(np.linalg.norm(p.objective.a)) + float(np.linalg.norm(p.constraint.a))

    if V0.shape[1] == 0 or (
        np.linalg.norm(alpha) <= KT_NULL_COEFF * gnorm
        and np.linalg.norm(beta) <= KT_NULL_COEFF * gnorm
    ):
        mu_star, v = _maximize_dual(p, lo, hi)
        for end in (lo, hi):
            if math.isfinite(end):
                ve = dual_value(p, end)
                if ve > v:
                    mu_star, v = end, ve
        return mu_star, v, False

    candidates = []
    if np.linalg.norm(beta) > KT_NULL_COEFF * gnorm:
        mu_hat = -float(beta @ alpha) / float(beta @ beta)
        if np.linalg.norm(alpha + mu_hat * beta) <= KT_NULL_COEFF * gnorm and lo <= mu_hat <= hi:
            candidates.append(mu_hat)
    for end in (lo, hi):
        if math.isfinite(end):
            candidates.append(end)
    finite = [(mu, dual_value(p, mu)) for mu in candidates]
    finite = [(mu, v) for mu, v in finite if v > -math.inf]
    if not finite:
        return mid, -math.inf, True
    mu_star, v = max(finite, key=lambda t: t[1])
    return mu_star, v, len(finite) == 1


def range_feasible(p: Qp1eqcProblem, mu: float) -> bool:
    """True when ``a + mu*b`` lies in the range of ``A + mu*B``."""
    _, _, resid = _kt_decomposition(p, mu)
    g = _pencil_vector(p, mu)
    return resid <= KT_NULL_COEFF * (1.0 + float(np.linalg.norm(g)))


def dual_maximum(p: Qp1eqcProblem) -> DualProfile:
    """Full dual maximization: pencil interval plus concave 1-D search."""
    interval = linalg.pencil_interval(p.objective.A, p.constraint.A)
    if interval.empty:
        return DualProfile(interval, math.nan, -math.inf)
    if interval.is_singleton:
        mu = 0.5 * (interval.lo + interval.hi)
        return DualProfile(interval, mu, dual_value(p, mu))
    mu, v, _ = _dual_over_interval(p, interval)
    return DualProfile(interval, mu, v)


def _check_feasible(p: Qp1eqcProblem) -> float:
    ft = feas_tol(p.constraint)
    vr = value_range(p.constraint)
    if not vr.contains(0.0, ft):
        raise InfeasibleConstraint("the set {h = 0} is empty")
    return ft


def _solve_by_reduction(p: Qp1eqcProblem) -> SolveOutcome:
    # Affine or one-signed constraint: {h = 0} is an affine manifold
    # x0 + V y and the problem is an unconstrained quadratic in y.
    h = p.constraint
    if constraint_is_quadratic(h, ref=p.objective):
        x0 = -linalg.pinv(h.A) @ h.a
        V = linalg.null_basis(h.A)
    elif np.linalg.norm(h.a) > linalg.default_tol(h.A, h.a):
        x0 = -(h.c / (2.0 * float(h.a @ h.a))) * h.a
        V = linalg.null_basis(h.a)
    else:
        # h is the (numerically) zero function; the constraint set is R^n.
        x0 = np.zeros(h.dim)
        V = np.eye(h.dim)

    reduced = restrict_to_affine(p.objective, x0, V)
    if V.shape[1] == 0:
        return SolveOutcome(ATTAINED, reduced.c, x_star=x0)
    sp = linalg.spectrum(reduced.A)
    if sp.n_neg > 0:
        return SolveOutcome(UNBOUNDED, -math.inf)
    if not linalg.in_range(reduced.A, reduced.a):
        return SolveOutcome(UNBOUNDED, -math.inf)
    y_star = -linalg.pinv(reduced.A) @ reduced.a
    x_star = x0 + V @ y_star
    return SolveOutcome(ATTAINED, evaluate(reduced, y_star), x_star=x_star)


def recover_primal(p: Qp1eqcProblem, mu_star: float) -> np.ndarray:
    """Feasible global minimizer from the dual optimum ``mu_star``.

    The stationary point ``y0 = -(A + mu*B)^+(a + mu*b)`` is returned
    when already feasible.  Otherwise (hard case) the constraint is
    solved over the Kuhn-Tucker set ``y0 + V t w``: eigendirections of
    ``V'BV`` first, then a deterministic root of the restricted
    quadratic, then seeded random directions, at most 64 attempts.
    """
    h = p.constraint
    ft = feas_tol(h)
    y0, V, _ = _kt_decomposition(p, mu_star)
    if abs(evaluate(h, y0)) <= ft:
        return y0
    if V.shape[1] == 0:
        raise HardCaseRecoveryFailed(
            "stationary point infeasible and the pencil has no null directions"
        )
    restricted = restrict_to_affine(h, y0, V)

    def root_along(w: np.ndarray) -> np.ndarray | None:
        alpha = float(w @ restricted.A @ w)
        beta = 2.0 * float(restricted.a @ w)
        gamma = restricted.c
        if abs(alpha) <= 1e-14 * (1.0 + abs(beta)):
            if abs(beta) <= 1e-14 * (1.0 + abs(gamma)):
                return None
            t = -gamma / beta
        else:
            disc = beta * beta - 4.0 * alpha * gamma
            if disc < 0.0:
                return None
            sq = math.sqrt(disc)
            roots = [(-beta - sq) / (2.0 * alpha), (-beta + sq) / (2.0 * alpha)]
            t = min(roots, key=abs)
        return y0 + V @ (t * w)

    attempts = 0
    vb = linalg.spectrum(V.T @ h.A @ V)
    directions = [vb.eigenvectors[:, i] for i in range(vb.eigenvectors.shape[1])]
    for w in directions:
        attempts += 1
        x = root_along(w)
        if x is not None and abs(evaluate(h, x)) <= ft:
            return x

    y_root = find_root(restricted)
    attempts += 1
    if y_root is not None:
        x = y0 + V @ y_root
        if abs(evaluate(h, x)) <= ft:
            return x

    rng = np.random.default_rng(DEFAULT_SEED)
    while attempts < 64:
        attempts += 1
        w = rng.standard_normal(V.shape[1])
        w /= np.linalg.norm(w)
        x = root_along(w)
        if x is not None and abs(evaluate(h, x)) <= ft:
            return x
    raise HardCaseRecoveryFailed(
        f"no feasible Kuhn-Tucker point found after {attempts} attempts at mu*={mu_star!r}"
    )


def solve(p: Qp1eqcProblem) -> SolveOutcome:
    """Globally solve ``inf { f(x) : h(x) = 0 }``.

    Dispatch: constraints that are affine or one-signed reduce to an
    unconstrained quadratic on the solution manifold of ``h = 0``; the
    remaining two-signed quadratic constraints go through the dual
    pencil.  An empty pencil (or one with no range-feasible multiplier)
    certifies an unbounded problem; a finite dual maximum is the exact
    optimal value, attained unless the unique-multiplier test triggers.
    """
    ft = _check_feasible(p)
    if not constraint_is_quadratic(p.constraint, ref=p.objective) or not two_sided(p.constraint):
        return _solve_by_reduction(p)

    interval = linalg.pencil_interval(p.objective.A, p.constraint.A)
    if interval.empty:
        return SolveOutcome(UNBOUNDED, -math.inf, dual_interval=interval)

    if interval.is_singleton:
        mu_star = 0.5 * (interval.lo + interval.hi)
        v = dual_value(p, mu_star)
        singleton_feasible = True
    else:
        mu_star, v, singleton_feasible = _dual_over_interval(p, interval)
    if v == -math.inf:
        return SolveOutcome(UNBOUNDED, -math.inf, dual_interval=interval)

    y0, V, _ = _kt_decomposition(p, mu_star)
    restricted = restrict_to_affine(p.constraint, y0, V)
    rng = value_range(restricted)
    if not rng.contains(0.0, ft) and singleton_feasible:
        scalar = rng.lo if rng.lo > 0.0 else rng.hi
        return SolveOutcome(
            UNATTAINED,
            v,
            mu_star=mu_star,
            witness=AttainabilityWitness(y0, V, scalar),
            dual_interval=interval,
        )
    x_star = recover_primal(p, mu_star)
    return SolveOutcome(ATTAINED, v, x_star=x_star, mu_star=mu_star, dual_interval=interval)


def verify_global_optimality(p: Qp1eqcProblem, x_star: np.ndarray, mu_star: float) -> bool:
    """Saddle-point test for a claimed minimizer/multiplier pair.

    Valid only for two-signed constraints with a genuine quadratic part
    (the hypotheses under which the test characterizes global
    optimality); checks feasibility, the first-order condition
    ``(A + mu*B)x* + (a + mu*b) = 0`` and ``A + mu*B`` PSD.
    """
    if not constraint_is_quadratic(p.constraint, ref=p.objective):
        raise HypothesisViolation("optimality test requires a quadratic constraint part")
    if not two_sided(p.constraint):
        raise HypothesisViolation("optimality test requires a sign-changing constraint")
    x_star = np.asarray(x_star, dtype=float).reshape(-1)
    ft = feas_tol(p.constraint)
    if abs(evaluate(p.constraint, x_star)) > ft:
        return False
    M = _pencil_matrix(p, mu_star)
    g = _pencil_vector(p, mu_star)
    scale = 1.0 + float(np.max(np.abs(M), initial=0.0)) + float(np.linalg.norm(g))
    if float(np.linalg.norm(M @ x_star + g)) > 1e-6 * scale * (1.0 + float(np.linalg.norm(x_star))):
        return False
    tol = linalg.default_tol(p.objective.A, p.constraint.A)
    return linalg.lambda_min(M) >= -10.0 * tol


def strong_duality_gap(p: Qp1eqcProblem) -> float:
    """|primal value - dual maximum| for a problem with finite value.

    The gap vanishes (to tolerance) whenever the duality theory applies:
    two-signed quadratic constraints, and convex reductions.  For the
    exceptional affine shapes where no multiplier exists the dual is
    ``-inf`` and the gap is reported as ``inf`` rather than masked.
    """
    out = solve(p)
    if not math.isfinite(out.value):
        raise ValueError("strong_duality_gap requires a finite optimal value")
    primal = evaluate(p.objective, out.x_star) if out.x_star is not None else out.value
    profile = dual_maximum(p)
    if profile.value == -math.inf:
        return math.inf
    return abs(primal - profile.value)
