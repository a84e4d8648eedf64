"""Shared instance generators and assertion helpers."""

import numpy as np
import pytest

from eqslemma import QuadForm
from eqslemma import linalg
from eqslemma.quadratics import evaluate, evaluate_many


def qf(A, a, c) -> QuadForm:
    return QuadForm(np.asarray(A, dtype=float), np.asarray(a, dtype=float), float(c))


def zeros_qf(n: int, b=None, d: float = 0.0) -> QuadForm:
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    return QuadForm(np.zeros((n, n)), b, d)


def random_sym(rng, n, scale=1.0):
    M = rng.standard_normal((n, n))
    return scale * 0.5 * (M + M.T)


def random_orthogonal(rng, n):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return Q


def random_psd(rng, n, rank=None):
    rank = n if rank is None else rank
    C = rng.standard_normal((rank, n))
    return C.T @ C


def random_quadform(rng, n, scale=1.0):
    return QuadForm(random_sym(rng, n, scale), scale * rng.standard_normal(n), scale * rng.standard_normal())


def random_feasible_constraint(rng, n, kind=None):
    """A constraint with {h = 0} nonempty, of a requested shape.

    Kinds: 'generic' (anchored root), 'one_sided' (PSD/NSD quadratic part
    with exact zero optimum), 'affine' (no quadratic part).
    """
    if kind is None:
        kind = rng.choice(["generic", "generic", "one_sided", "affine"])
    if kind == "affine":
        b = rng.standard_normal(n)
        while np.linalg.norm(b) < 0.3:
            b = rng.standard_normal(n)
        return QuadForm(np.zeros((n, n)), b, rng.standard_normal())
    if kind == "one_sided":
        sign = 1.0 if rng.random() < 0.5 else -1.0
        rank = int(rng.integers(1, n + 1))
        B = sign * random_psd(rng, n, rank)
        w = rng.standard_normal(n)
        b = B @ w
        d = float(b @ linalg.pinv(B) @ b)
        return QuadForm(B, b, d)
    B = random_sym(rng, n)
    b = rng.standard_normal(n)
    anchor = rng.standard_normal(n)
    h = QuadForm(B, b, 0.0)
    return QuadForm(B, b, -evaluate(h, anchor))


def conjugate(q: QuadForm, Q: np.ndarray) -> QuadForm:
    """The quadratic ``x -> q(Q x)`` for orthogonal ``Q``."""
    return QuadForm(Q.T @ q.A @ Q, Q.T @ q.a, q.c)


def assert_lift_psd(M: np.ndarray, tol: float):
    lam = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
    assert lam >= -tol, f"matrix not PSD: lambda_min = {lam}"


def sampled_min(f: QuadForm, pts: np.ndarray) -> float:
    if pts.shape[0] == 0:
        return np.inf
    return float(np.min(evaluate_many(f, pts)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)
