"""Dense symmetric linear-algebra kernel.

Every decision in this package eventually reduces to eigenvalue facts
about small dense symmetric matrices: sign counts, pseudoinverses, null
spaces, and the feasibility interval of the pencil ``A + mu*B``.  This
module owns those primitives together with one explicit tolerance
policy, so that "is this eigenvalue zero?" is answered the same way
everywhere.

Tolerance policy
----------------
* Sign classification of an eigenvalue uses the absolute threshold
  ``tol = 1e-9 * (1 + max_abs_entry)`` of the matrices involved, unless
  the caller supplies an explicit ``tol``.
* Rank decisions (pseudoinverse and null-space cutoffs) drop singular
  values with ``sigma <= 1e-10 * sigma_max``.
* Pencil endpoints are declared infinite once ``|mu|`` reaches ``1e8``
  with the pencil still feasible; the exact algebraic characterization
  of unbounded endpoints is deliberately not implemented (cap heuristic).

All functions are pure: they never mutate their inputs and hold no
module state, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

SIGN_TOL_COEFF = 1e-9
RANK_CUTOFF = 1e-10
MU_CAP = 1e8
ENDPOINT_XTOL = 1e-10
GOLDEN_XTOL = 1e-10

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def default_tol(*mats: np.ndarray) -> float:
    """Absolute eigenvalue-sign threshold for the given matrices."""
    scale = 0.0
    for m in mats:
        if np.size(m):
            scale = max(scale, float(np.max(np.abs(m))))
    return SIGN_TOL_COEFF * (1.0 + scale)


def as_symmetric(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate and symmetrize a square matrix as ``(M + M.T) / 2``.

    Asymmetry beyond ``1e-8`` relative is reported with a warning; the
    symmetrized matrix is used either way.  Non-finite entries are
    rejected.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    skew = np.max(np.abs(M - M.T)) if M.size else 0.0
    if skew > 1e-8 * (1.0 + (np.max(np.abs(M)) if M.size else 0.0)):
        import warnings

        warnings.warn(f"{name} symmetrized; relative asymmetry {skew:.3e}")
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class Spectrum:
    """Full eigendecomposition of a symmetric matrix with sign counts.

    ``eigenvalues`` are ascending and ``eigenvectors[:, i]`` is the unit
    eigenvector for ``eigenvalues[i]``.  Eigenvalues with absolute value
    at most ``tol`` count as zero.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    tol: float

    @property
    def n_neg(self) -> int:
        return int(np.sum(self.eigenvalues < -self.tol))

    @property
    def n_zero(self) -> int:
        return int(np.sum(np.abs(self.eigenvalues) <= self.tol))

    @property
    def n_pos(self) -> int:
        return int(np.sum(self.eigenvalues > self.tol))

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0]) if self.eigenvalues.size else math.inf

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1]) if self.eigenvalues.size else -math.inf


def spectrum(M: np.ndarray, tol: float | None = None) -> Spectrum:
    """Eigendecomposition of a symmetric matrix under the sign policy."""
    M = as_symmetric(M)
    if tol is None:
        tol = default_tol(M)
    vals, vecs = np.linalg.eigh(M) if M.size else (np.zeros(0), np.zeros((0, 0)))
    return Spectrum(vals, vecs, tol)


def lambda_min(M: np.ndarray) -> float:
    """Smallest eigenvalue; ``+inf`` for the empty matrix."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return math.inf
    return float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])


def is_psd(M: np.ndarray, tol: float | None = None) -> bool:
    """True when all eigenvalues exceed ``-tol``."""
    if tol is None:
        tol = default_tol(M)
    return lambda_min(M) >= -tol


def pinv(M: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a symmetric matrix.

    Computed by spectral inversion: eigenvalues with
    ``|lam| <= 1e-10 * max|lam|`` are treated as zero and not inverted.
    The ``tol`` argument is accepted for signature symmetry but the rank
    cutoff is the policy above (an explicit ``tol`` overrides it).
    """
    M = as_symmetric(M)
    if M.size == 0:
        return M
    vals, vecs = np.linalg.eigh(M)
    cutoff = tol if tol is not None else RANK_CUTOFF * np.max(np.abs(vals), initial=0.0)
    inv = np.where(np.abs(vals) > cutoff, 1.0 / np.where(vals == 0, 1.0, vals), 0.0)
    P = (vecs * inv) @ vecs.T
    return 0.5 * (P + P.T)


def _canonical_sign(basis: np.ndarray) -> np.ndarray:
    # Flip each column so its largest-magnitude entry is positive; makes
    # reported bases reproducible across LAPACK builds.
    if basis.size == 0:
        return basis
    idx = np.argmax(np.abs(basis), axis=0)
    signs = np.sign(basis[idx, np.arange(basis.shape[1])])
    signs[signs == 0] = 1.0
    return basis * signs


def null_basis(M: np.ndarray, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the null space of ``M``.

    ``M`` may be rectangular or a bare vector (treated as one row).
    Returns an ``n x k`` matrix, ``k = dim N(M)``; ``k = 0`` for
    injective ``M``.  Singular values below ``1e-10 * sigma_max`` (or an
    explicit ``tol``) count as zero.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    n = M.shape[1]
    if M.shape[0] == 0 or not np.any(M):
        return np.eye(n)
    _, s, vt = np.linalg.svd(M, full_matrices=True)
    cutoff = tol if tol is not None else RANK_CUTOFF * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > cutoff))
    return _canonical_sign(vt[rank:].T)


def range_basis(M: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the column space of ``M``."""
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.size == 0 or not np.any(M):
        return np.zeros((M.shape[0], 0))
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0]))
    return u[:, :rank]


def in_range(M: np.ndarray, v: np.ndarray, tol: float | None = None) -> bool:
    """True when ``v`` lies in the column space of ``M``.

    The test is ``||(I - M M^+) v|| <= tol * (1 + ||v||)`` with the
    projector built from an orthonormal range basis.
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    if tol is None:
        tol = default_tol(np.asarray(M, dtype=float))
    U = range_basis(M)
    resid = v - U @ (U.T @ v)
    return float(np.linalg.norm(resid)) <= tol * (1.0 + float(np.linalg.norm(v)))


def same_nullspace(M1: np.ndarray, M2: np.ndarray, tol: float | None = None) -> bool:
    """True when N(M1) and N(M2) agree as subspaces (up to tolerance)."""
    N1 = null_basis(M1, tol)
    N2 = null_basis(M2, tol)
    if N1.shape[1] != N2.shape[1]:
        return False
    if N1.shape[1] == 0:
        return True
    # Mutual projection residuals; both bases are orthonormal.
    r12 = np.linalg.norm(N1 - N2 @ (N2.T @ N1))
    r21 = np.linalg.norm(N2 - N1 @ (N1.T @ N2))
    return max(r12, r21) <= 1e-7 * (1.0 + N1.shape[1])


def _golden_max(g, a: float, b: float, xtol: float) -> tuple[float, float]:
    # Golden-section maximization of a unimodal (here: concave) function.
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while (b - a) > xtol * (1.0 + abs(a) + abs(b)):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    t = 0.5 * (a + b)
    return t, g(t)


def maximize_concave(
    g,
    domain: tuple[float, float] = (-math.inf, math.inf),
    xtol: float = GOLDEN_XTOL,
    cap: float = 1e12,
) -> tuple[float, float]:
    """Maximize a concave scalar function over a closed interval.

    Infinite domain sides are handled by a geometric probe scan (powers
    of two out to ``cap``) followed by golden-section refinement on the
    bracket around the best probe.  When the supremum sits beyond the
    cap the cap point itself is returned, which is the documented
    behaviour for pencil endpoints.
    """
    lo, hi = domain
    if lo > hi:
        raise ValueError("empty domain")
    if lo == hi:
        return lo, g(lo)
    if math.isfinite(lo) and math.isfinite(hi):
        return _golden_max(g, lo, hi, xtol)

    probes = [0.0] if lo < 0.0 < hi else []
    k = 0.0
    while 2.0**k <= cap:
        t = 2.0**k
        if lo < t < hi:
            probes.append(t)
        if lo < -t < hi:
            probes.append(-t)
        k += 1.0
    for end in (lo, hi):
        if math.isfinite(end):
            probes.append(end)
        else:
            probes.append(math.copysign(cap, end))
    probes = sorted(set(probes))
    vals = [g(t) for t in probes]
    top = max(vals)
    # Ties (e.g. a constant profile) break toward the origin so that
    # reported maximizers are as small as possible.
    flat = 1e-15 * (1.0 + abs(top))
    best = min(
        (i for i, v in enumerate(vals) if v >= top - flat),
        key=lambda i: abs(probes[i]),
    )
    lo_i, hi_i = max(best - 1, 0), min(best + 1, len(probes) - 1)
    if vals[lo_i] >= top - flat and vals[hi_i] >= top - flat:
        # Plateau across the whole bracket: the probe itself is a maximizer.
        return probes[best], vals[best]
    a, b = probes[lo_i], probes[hi_i]
    if a == b:
        return a, vals[best]
    return _golden_max(g, a, b, xtol)


def max_lambda_min_affine(
    M0: np.ndarray,
    M1: np.ndarray,
    domain: tuple[float, float] = (-math.inf, math.inf),
    xtol: float = GOLDEN_XTOL,
    cap: float = 1e12,
) -> tuple[float, float]:
    """Maximize the concave map ``t -> lambda_min(M0 + t*M1)``.

    Returns ``(t_star, value)``.  The map is concave because it is a
    pointwise infimum of the linear functions ``t -> v'(M0 + t*M1)v``
    over unit vectors ``v``.
    """
    M0 = as_symmetric(M0, "M0")
    M1 = as_symmetric(M1, "M1")
    if M0.shape != M1.shape:
        raise DimensionMismatch("M0 and M1 must have equal shapes")

    def g(t: float) -> float:
        return float(np.linalg.eigvalsh(M0 + t * M1)[0])

    return maximize_concave(g, domain, xtol=xtol, cap=cap)


@dataclass(frozen=True)
class PencilInterval:
    """The set ``{mu : A + mu*B is positive semidefinite}``.

    A closed interval, possibly empty, a single point, or unbounded on
    either side.  ``lo_attained`` / ``hi_attained`` record whether the
    endpoint eigenvalue test ``|lambda_min(A + mu*B)| <= tol`` held at
    the reported endpoint (always false for infinite endpoints).
    """

    lo: float
    hi: float
    empty: bool
    lo_attained: bool
    hi_attained: bool
    tol: float

    @property
    def is_singleton(self) -> bool:
        # Tolerance policy: hi - lo <= 1e-7 * (1 + |lo|); not a paper claim.
        return (
            not self.empty
            and math.isfinite(self.lo)
            and math.isfinite(self.hi)
            and (self.hi - self.lo) <= 1e-7 * (1.0 + abs(self.lo))
        )

    def contains(self, mu: float) -> bool:
        return (not self.empty) and self.lo <= mu <= self.hi

    @property
    def midpoint(self) -> float:
        if self.empty:
            raise ValueError("empty interval has no midpoint")
        if math.isfinite(self.lo) and math.isfinite(self.hi):
            return 0.5 * (self.lo + self.hi)
        if math.isfinite(self.lo):
            return self.lo + 1.0
        if math.isfinite(self.hi):
            return self.hi - 1.0
        return 0.0


def _polish_profile_max(A: np.ndarray, B: np.ndarray, mu0: float) -> float:
    # Derivative of lambda_min(A + mu*B) at a simple eigenvalue is
    # v'Bv for the bottom eigenvector v; it is nonincreasing in mu, so a
    # sign bisection pins the maximizer to machine precision where value
    # comparisons stall at sqrt(eps).
    def slope(mu: float) -> float:
        _, vecs = np.linalg.eigh(A + mu * B)
        v = vecs[:, 0]
        return float(v @ B @ v)

    w = 1e-5 * (1.0 + abs(mu0))
    lo, hi = mu0 - w, mu0 + w
    if not (slope(lo) > 0.0 > slope(hi)):
        return mu0
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if (hi - lo) <= 1e-16 * (1.0 + abs(mid)):
            break
    return 0.5 * (lo + hi)


def _bisect_endpoint(g, feas: float, infeas: float) -> float:
    # g(feas) >= 0 > g(infeas); shrink to the sign change.
    while abs(infeas - feas) > ENDPOINT_XTOL * (1.0 + abs(feas)):
        mid = 0.5 * (feas + infeas)
        if g(mid) >= 0.0:
            feas = mid
        else:
            infeas = mid
    return feas


def pencil_interval(A: np.ndarray, B: np.ndarray, tol: float | None = None) -> PencilInterval:
    """Feasibility interval of the matrix pencil ``A + mu*B``.

    Strategy: ``mu -> lambda_min(A + mu*B)`` is concave, so a
    golden-section maximization over an expanding bracket either finds a
    feasible ``mu`` or certifies emptiness (max below ``-tol``).
    Finite endpoints are then located by bisection on the smallest
    eigenvalue; an endpoint is declared infinite when the pencil is
    still clearly feasible at ``|mu| = 1e8``.
    """
    A = as_symmetric(A, "A")
    B = as_symmetric(B, "B")
    if A.shape != B.shape:
        raise DimensionMismatch("pencil members must have equal shapes")
    if tol is None:
        tol = default_tol(A, B)

    if not np.any(B):
        feasible = lambda_min(A) >= -tol
        return PencilInterval(-math.inf, math.inf, not feasible, False, False, tol)

    def g(mu: float) -> float:
        return float(np.linalg.eigvalsh(A + mu * B)[0])

    mu_star, g_star = maximize_concave(g, (-MU_CAP, MU_CAP), cap=MU_CAP)
    if g_star < -tol:
        return PencilInterval(math.nan, math.nan, True, False, False, tol)
    if g_star <= tol:
        # The feasible set degenerates to (numerically) one point.  The
        # profile is flat to machine precision near a smooth touching
        # maximum, so polish the point by bisecting the sign of the
        # eigenvalue derivative v'Bv (nonincreasing by concavity).
        mu_star = _polish_profile_max(A, B, mu_star)
        return PencilInterval(mu_star, mu_star, False, True, True, tol)

    ends = []
    for direction in (1.0, -1.0):
        step = 1.0 + abs(mu_star)
        probe = mu_star + direction * step
        crossing = None
        while abs(probe) <= MU_CAP:
            if g(probe) < -tol:
                crossing = probe
                break
            probe = mu_star + direction * (abs(probe - mu_star) * 2.0)
        if crossing is None:
            edge = math.copysign(MU_CAP, direction)
            gedge = g(edge)
            if gedge >= tol:
                ends.append((math.copysign(math.inf, direction), False))
            elif gedge >= -tol:
                ends.append((edge, True))
            else:
                ends.append((_bisect_endpoint(g, mu_star, edge), True))
        else:
            ends.append((_bisect_endpoint(g, mu_star, crossing), True))
    (hi, hi_att), (lo, lo_att) = ends
    return PencilInterval(lo, hi, False, lo_att, hi_att, tol)
