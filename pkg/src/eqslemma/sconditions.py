"""The four classical sufficient conditions for the equality lemma.

Each predicate concerns only the constraint pair data and is sufficient
(never necessary) for the equivalence whenever the constraint changes
sign.  Their implication structure — strict definiteness implies both
the spectral-domination and the stationarity conditions, and a
homogeneous constraint implies the stationarity condition — is pinned by
the property tests.

Condition 4 is stated in the literature through a quantified implication
over a root ``zeta`` of ``h``; it simplifies to a closed form:
``h(0) = 0`` together with ``b in R(B)`` for semidefinite ``B``, while
indefinite ``B`` additionally forces the root to satisfy
``B*zeta + b = 0`` exactly, which (with ``b`` orthogonal to ``N(B)``)
pins ``h`` at the value ``-b'B^+b`` on the solution set and therefore
requires ``b'B^+b = 0``.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .quadratics import QuadForm


def _strictly_definite(sp: linalg.Spectrum) -> bool:
    return sp.n_zero == 0 and (sp.n_neg == 0 or sp.n_pos == 0) and sp.eigenvalues.size > 0


def scondition(k: int, f: QuadForm, h: QuadForm) -> bool:
    """Evaluate sufficient condition ``k`` in ``{1, 2, 3, 4}``.

    1. strict convexity or concavity of the constraint;
    2. spectral domination: some ``eta`` with ``A - eta*B`` PSD;
    3. homogeneity of the constraint;
    4. vanishing at the origin plus the stationarity condition above.
    """
    A, B, b, d = f.A, h.A, h.a, h.c
    tol = linalg.default_tol(A, B)
    ztol = linalg.default_tol(B, b) * (1.0 + abs(d))

    if k == 1:
        return _strictly_definite(linalg.spectrum(B, tol))
    if k == 2:
        _, val = linalg.max_lambda_min_affine(A, -B)
        return val >= -tol
    if k == 3:
        return float(np.linalg.norm(b)) <= ztol and abs(d) <= ztol
    if k == 4:
        if abs(d) > ztol:
            return False
        if not linalg.in_range(B, b):
            return False
        sp = linalg.spectrum(B, tol)
        if sp.n_neg > 0 and sp.n_pos > 0:
            return abs(float(b @ linalg.pinv(B) @ b)) <= ztol
        return True
    raise ValueError("condition index must be 1, 2, 3, or 4")


def all_sconditions(f: QuadForm, h: QuadForm) -> dict[int, bool]:
    return {k: scondition(k, f, h) for k in (1, 2, 3, 4)}
