"""Brute-force oracles used to audit every decision procedure.

These never prove universal statements: a "TrueSoFar" outcome is
explicitly inconclusive, while any returned witness is re-checkable at
full precision.  All randomness flows through an explicit seed, so
identical seeds reproduce identical samples bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .quadratics import DEFAULT_SEED, QuadForm, evaluate_many, lift, value_range

TRUE_SO_FAR = "TrueSoFar"
FALSE_WITH_WITNESS = "FalseWithWitness"
FOUND_MU = "FoundMu"
NONE_ON_GRID = "NoneOnGrid"


def sample_constraint(h: QuadForm, count: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Up to ``count`` points on ``{h = 0}``, found by exact line roots.

    Each draw takes a Gaussian anchor ``x0`` and unit direction ``u``
    and solves the scalar quadratic ``h(x0 + t*u) = 0`` exactly, keeping
    every real root.  One-signed constraints touch zero only on their
    optimum manifold (a random line never crosses), so that affine set
    is sampled directly instead.  May return fewer than ``count`` points
    (never fabricates any); deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    n = h.dim

    vr = value_range(h)
    scale = 1.0 + h.scale()
    if not (vr.lo < -1e-9 * scale and vr.hi > 1e-9 * scale):
        # {h = 0} is the optimum manifold x0 + Z y (empty if 0 is not the
        # optimal value).
        if not vr.contains(0.0, 1e-7 * scale):
            return np.zeros((0, n))
        x0 = vr.lo_point if vr.lo_attained else vr.hi_point
        Z = linalg.null_basis(h.A) if np.any(h.A) else np.eye(n)
        Y = rng.standard_normal((count, Z.shape[1]))
        return x0 + Y @ Z.T

    out: list[np.ndarray] = []
    batch = max(64, count)
    draws = 0
    while len(out) < count and draws < 20 * count + 200:
        m = min(batch, 4096)
        draws += m
        X0 = rng.standard_normal((m, n))
        U = rng.standard_normal((m, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        alpha = np.einsum("ij,jk,ik->i", U, h.A, U)
        beta = 2.0 * (np.einsum("ij,jk,ik->i", U, h.A, X0) + U @ h.a)
        gamma = evaluate_many(h, X0)

        quad = np.abs(alpha) > 1e-14 * (1.0 + np.abs(beta) + np.abs(gamma))
        disc = beta * beta - 4.0 * alpha * gamma
        ok = quad & (disc >= 0.0)
        if np.any(ok):
            sq = np.sqrt(disc[ok])
            a_, b_ = alpha[ok], beta[ok]
            for t in ((-b_ - sq) / (2.0 * a_), (-b_ + sq) / (2.0 * a_)):
                out.extend(X0[ok] + t[:, None] * U[ok])
        lin = (~quad) & (np.abs(beta) > 1e-14 * (1.0 + np.abs(gamma)))
        if np.any(lin):
            t = -gamma[lin] / beta[lin]
            out.extend(X0[lin] + t[:, None] * U[lin])
    if not out:
        return np.zeros((0, n))
    return np.asarray(out[:count])


@dataclass(frozen=True)
class OracleE1Result:
    status: str
    witness: np.ndarray | None
    samples_used: int

    @property
    def refuted(self) -> bool:
        return self.status == FALSE_WITH_WITNESS


def oracle_e1(
    f: QuadForm, h: QuadForm, samples: int = 10_000, seed: int = DEFAULT_SEED
) -> OracleE1Result:
    """Refutation attempt for ``h = 0 => f >= 0`` by manifold sampling."""
    pts = sample_constraint(h, samples, seed)
    if pts.shape[0] == 0:
        return OracleE1Result(TRUE_SO_FAR, None, 0)
    vals = evaluate_many(f, pts)
    k = int(np.argmin(vals))
    if vals[k] < -1e-8:
        return OracleE1Result(FALSE_WITH_WITNESS, pts[k], pts.shape[0])
    return OracleE1Result(TRUE_SO_FAR, None, pts.shape[0])


@dataclass(frozen=True)
class OracleE2Result:
    status: str
    mu: float | None

    @property
    def found(self) -> bool:
        return self.status == FOUND_MU


def oracle_e2(f: QuadForm, h: QuadForm, mu_grid: np.ndarray) -> OracleE2Result:
    """Dense-grid certificate scan: smallest eigenvalue of the lifted
    pencil at every grid multiplier."""
    M0, M1 = lift(f), lift(h)
    tol = 1e-9 * (1.0 + float(np.max(np.abs(M0))) + float(np.max(np.abs(M1))))
    best_mu, best_val = None, -np.inf
    for mu in np.asarray(mu_grid, dtype=float):
        val = float(np.linalg.eigvalsh(M0 + mu * M1)[0])
        if val > best_val:
            best_mu, best_val = float(mu), val
    if best_val >= -tol:
        return OracleE2Result(FOUND_MU, best_mu)
    return OracleE2Result(NONE_ON_GRID, None)
