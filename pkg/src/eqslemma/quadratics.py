"""Quadratic-function data model and range computations.

A quadratic function is stored as ``q(x) = x'Ax + 2a'x + c`` with a
symmetric matrix ``A``.  Affine functions are degenerate quadratics with
``A = 0``; that representation is deliberate because the central
exceptional case of the equality lemma pivots exactly on ``A = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionMismatch

#: Default seed for every sampling fallback in the package.
DEFAULT_SEED = 20240101


@dataclass(frozen=True, eq=False)
class QuadForm:
    """One quadratic function ``q(x) = x'Ax + 2a'x + c``."""

    A: np.ndarray
    a: np.ndarray
    c: float

    def __post_init__(self):
        A = linalg.as_symmetric(self.A, "A")
        a = np.asarray(self.a, dtype=float).reshape(-1)
        if a.shape[0] != A.shape[0]:
            raise DimensionMismatch(
                f"linear term has length {a.shape[0]}, matrix is {A.shape[0]}x{A.shape[0]}"
            )
        if not np.all(np.isfinite(a)) or not math.isfinite(float(self.c)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def __call__(self, x: np.ndarray) -> float:
        return evaluate(self, x)

    def scale(self) -> float:
        """Data magnitude, used by scale-aware tolerances."""
        parts = [abs(self.c), float(np.linalg.norm(self.a))]
        if self.A.size:
            parts.append(float(np.max(np.abs(self.A))))
        return max(parts)


def evaluate(q: QuadForm, x: np.ndarray) -> float:
    """Value ``q(x) = x'Ax + 2a'x + c``."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != q.dim:
        raise DimensionMismatch(f"point has length {x.shape[0]}, expected {q.dim}")
    return float(x @ q.A @ x + 2.0 * q.a @ x + q.c)


def evaluate_many(q: QuadForm, X: np.ndarray) -> np.ndarray:
    """Vectorized evaluation on rows of ``X`` (shape ``(m, n)``)."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != q.dim:
        raise DimensionMismatch("sample dimension mismatch")
    return np.einsum("ij,jk,ik->i", X, q.A, X) + 2.0 * X @ q.a + q.c


def gradient(q: QuadForm, x: np.ndarray) -> np.ndarray:
    return 2.0 * (q.A @ np.asarray(x, dtype=float) + q.a)


def lift(q: QuadForm) -> np.ndarray:
    """Homogenizing matrix ``[[A, a], [a', c]]`` of size ``n+1``.

    ``q(x) = [x; 1]' lift(q) [x; 1]`` exactly, and ``q >= 0`` on all of
    R^n iff the lift is positive semidefinite.
    """
    n = q.dim
    M = np.empty((n + 1, n + 1))
    M[:n, :n] = q.A
    M[:n, n] = q.a
    M[n, :n] = q.a
    M[n, n] = q.c
    return M


def add(p: QuadForm, q: QuadForm, weight: float = 1.0) -> QuadForm:
    """The quadratic ``p + weight * q``."""
    if p.dim != q.dim:
        raise DimensionMismatch("dimension mismatch in quadratic sum")
    return QuadForm(p.A + weight * q.A, p.a + weight * q.a, p.c + weight * q.c)


def regularize(q: QuadForm, eps: float) -> QuadForm:
    """The cushioned quadratic ``q(x) + eps * (x'x + 1)``."""
    return QuadForm(q.A + eps * np.eye(q.dim), q.a, q.c + eps)


def squared_affine(q: QuadForm) -> QuadForm:
    """Square of an affine function ``2b'x + d`` as a quadratic.

    Only valid when the quadratic part of ``q`` vanishes; the result is
    ``(2b'x + d)^2 = x'(4bb')x + 2(2d b)'x + d^2``.
    """
    if np.any(q.A):
        raise ValueError("squared_affine requires a vanishing quadratic part")
    b, d = q.a, q.c
    return QuadForm(4.0 * np.outer(b, b), 2.0 * d * b, d * d)


@dataclass(frozen=True)
class ValueRange:
    """Exact range of a quadratic over R^n, as a closed-ish interval.

    Finite endpoints of quadratic ranges are always attained; the
    attainment flags exist so that infinite ends read naturally and so
    that degenerate callers can rely on them.  When an endpoint is
    attained a witness point is recorded.
    """

    lo: float
    hi: float
    lo_attained: bool
    hi_attained: bool
    lo_point: np.ndarray | None = None
    hi_point: np.ndarray | None = None

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= v <= self.hi + tol

    def interior_contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo + tol < v < self.hi - tol


def value_range(q: QuadForm) -> ValueRange:
    """Range of ``q`` over all of R^n.

    Indefinite quadratic part gives the whole line.  A semidefinite part
    gives a half line whose finite end is ``c - a'A^+a`` provided the
    linear term lies in the range of ``A``; otherwise the linear term
    escapes along the null space and the range is again the whole line.
    A vanishing quadratic part leaves an affine function: a point for
    ``a = 0``, the whole line otherwise.
    """
    sp = linalg.spectrum(q.A)
    n = q.dim
    if sp.n_neg > 0 and sp.n_pos > 0:
        return ValueRange(-math.inf, math.inf, False, False)
    if sp.n_pos == 0 and sp.n_neg == 0:
        # constant or affine
        if np.linalg.norm(q.a) <= linalg.default_tol(q.A, q.a):
            x0 = np.zeros(n)
            return ValueRange(q.c, q.c, True, True, x0, x0)
        return ValueRange(-math.inf, math.inf, False, False)
    sign = 1.0 if sp.n_pos > 0 else -1.0
    if not linalg.in_range(q.A, q.a):
        return ValueRange(-math.inf, math.inf, False, False)
    x0 = -linalg.pinv(q.A) @ q.a
    v0 = evaluate(q, x0)
    if sign > 0:
        return ValueRange(v0, math.inf, True, False, lo_point=x0)
    return ValueRange(-math.inf, v0, False, True, hi_point=x0)


def restrict_to_affine(q: QuadForm, x0: np.ndarray, V: np.ndarray) -> QuadForm:
    """Restriction of ``q`` to the affine set ``{x0 + V y}``.

    Returns the quadratic in the reduced variable ``y``:
    ``A' = V'AV``, ``a' = V'(A x0 + a)``, ``c' = q(x0)``.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V.reshape(-1, 1)
    if x0.shape[0] != q.dim or V.shape[0] != q.dim:
        raise DimensionMismatch("affine restriction shapes do not match")
    A_red = V.T @ q.A @ V
    a_red = V.T @ (q.A @ x0 + q.a)
    return QuadForm(A_red, a_red, evaluate(q, x0))


def find_root(q: QuadForm, tol: float | None = None) -> np.ndarray | None:
    """A point with ``q(x) = 0``, or ``None`` when 0 is outside the range.

    Deterministic construction: locate a point on each side of zero
    (using the range analysis), then solve the exact scalar quadratic
    along a direction of suitable curvature.  Used by the hard-case
    recovery and by the interval solver's interior branch.
    """
    if tol is None:
        tol = linalg.default_tol(q.A) * (1.0 + abs(q.c) + float(np.linalg.norm(q.a)))
    vr = value_range(q)
    if not vr.contains(0.0, tol):
        return None
    n = q.dim
    if n == 0:
        return np.zeros(0) if abs(q.c) <= tol else None
    sp = linalg.spectrum(q.A)

    if sp.n_pos == 0 and sp.n_neg == 0:
        if np.linalg.norm(q.a) <= tol:
            return np.zeros(n) if abs(q.c) <= tol else None
        # affine: 2a'x + c = 0
        return -(q.c / (2.0 * float(q.a @ q.a))) * q.a

    def scalar_root(anchor: np.ndarray, u: np.ndarray) -> np.ndarray | None:
        # q(anchor + t u) = alpha t^2 + beta t + gamma
        alpha = float(u @ q.A @ u)
        beta = 2.0 * float((q.A @ anchor + q.a) @ u)
        gamma = evaluate(q, anchor)
        if abs(alpha) <= 1e-14 * (1.0 + abs(beta) + abs(gamma)):
            if abs(beta) <= 1e-14 * (1.0 + abs(gamma)):
                return anchor if abs(gamma) <= tol else None
            return anchor - (gamma / beta) * u
        disc = beta * beta - 4.0 * alpha * gamma
        if disc < 0.0:
            return None
        root = (-beta + math.copysign(math.sqrt(disc), -beta or 1.0)) / (2.0 * alpha)
        other = gamma / (alpha * root) if root != 0.0 else -beta / alpha
        t = root if abs(root) <= abs(other) else other
        return anchor + t * u

    def point_with_sign(sign: float) -> np.ndarray | None:
        # A point where sign * q <= 0.
        if sign > 0:
            if vr.lo_attained and vr.lo <= tol:
                return vr.lo_point
        else:
            if vr.hi_attained and vr.hi >= -tol:
                return vr.hi_point
        # Unbounded side: walk until the sign is achieved.
        if sign > 0 and sp.n_neg > 0:
            u = sp.eigenvectors[:, 0]
        elif sign < 0 and sp.n_pos > 0:
            u = sp.eigenvectors[:, -1]
        else:
            # Linear escape along a null direction with a'w != 0.
            Z = linalg.null_basis(q.A)
            w = Z @ (Z.T @ q.a)
            nw = np.linalg.norm(w)
            if nw == 0.0:
                return None
            u = -sign * w / nw
        t = 1.0
        for _ in range(200):
            x = t * u
            if sign * evaluate(q, x) <= 0.0:
                return x
            t *= 2.0
        return None

    neg = point_with_sign(1.0)
    pos = point_with_sign(-1.0)
    if neg is None or pos is None:
        return None
    for anchor, col in ((neg, -1), (pos, 0)):
        u = sp.eigenvectors[:, col]  # strongest curvature toward the other sign
        x = scalar_root(anchor, u)
        if x is not None and abs(evaluate(q, x)) <= 1e3 * tol:
            return x
    # Fall back to the chord between the two sign witnesses.
    x = scalar_root(neg, pos - neg)
    if x is not None and abs(evaluate(q, x)) <= 1e3 * tol:
        return x
    return None


@dataclass(frozen=True)
class Qp1eqcProblem:
    """Minimize a quadratic subject to one quadratic equality ``h(x) = 0``."""

    objective: QuadForm
    constraint: QuadForm

    def __post_init__(self):
        if self.objective.dim != self.constraint.dim:
            raise DimensionMismatch("objective and constraint dimensions differ")
        if self.objective.dim < 1:
            raise DimensionMismatch("problem dimension must be at least 1")


@dataclass(frozen=True)
class GtrsProblem:
    """Minimize a quadratic subject to ``l <= h(x) <= u``."""

    objective: QuadForm
    constraint: QuadForm
    l: float
    u: float

    def __post_init__(self):
        if self.objective.dim != self.constraint.dim:
            raise DimensionMismatch("objective and constraint dimensions differ")
        if not (self.l <= self.u):
            raise ValueError("interval bounds must satisfy l <= u")


@dataclass(frozen=True)
class NumrangeProblem:
    """Joint image of one quadratic and ``p`` affine maps ``2b_i'x + d_i``."""

    f: QuadForm
    affines: list = field(default_factory=list)

    def __post_init__(self):
        cleaned = []
        for i, (b, d) in enumerate(self.affines):
            b = np.asarray(b, dtype=float).reshape(-1)
            if b.shape[0] != self.f.dim:
                raise DimensionMismatch(f"affine row {i} has wrong dimension")
            cleaned.append((b, float(d)))
        object.__setattr__(self, "affines", cleaned)

    @property
    def p(self) -> int:
        return len(self.affines)


def build_dwp(
    Q: np.ndarray, c: np.ndarray, d: float, A: np.ndarray, a: np.ndarray
) -> Qp1eqcProblem:
    """Lift the double-well quartic to an equality-constrained quadratic.

    The quartic ``(1/2)((1/2)||Qx - c||^2 - d)^2 + (1/2)x'Ax - a'x`` is
    rewritten over ``(x, z)`` as objective ``(1/2)z^2 + (1/2)x'Ax - a'x``
    with constraint ``(1/2)||Qx - c||^2 - d - z = 0``.
    """
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    c = np.asarray(c, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float).reshape(-1)
    A = linalg.as_symmetric(A, "A")
    n = Q.shape[1]
    if not np.any(Q):
        raise ValueError("Q must be nonzero")
    if c.shape[0] != Q.shape[0] or a.shape[0] != n or A.shape[0] != n:
        raise DimensionMismatch("inconsistent double-well shapes")

    A_obj = np.zeros((n + 1, n + 1))
    A_obj[:n, :n] = 0.5 * A
    A_obj[n, n] = 0.5
    a_obj = np.concatenate([-0.5 * a, [0.0]])
    objective = QuadForm(A_obj, a_obj, 0.0)

    B_con = np.zeros((n + 1, n + 1))
    B_con[:n, :n] = 0.5 * (Q.T @ Q)
    b_con = np.concatenate([-0.5 * Q.T @ c, [-0.5]])
    constraint = QuadForm(B_con, b_con, 0.5 * float(c @ c) - float(d))
    return Qp1eqcProblem(objective, constraint)
