"""Secure SPD linear-system solvers and their plaintext twins.

Two interactive routes solve [A] w = [b] for symmetric positive definite A:

* inverse method: mask with a random shared matrix, open R*A, invert it
  locally, recover [inv(A)] = inv(R*A) [R], multiply by [b], open w;
* pivoting-free elimination: forward-eliminate the shared augmented
  matrix (positive definiteness keeps every pivot nonzero, so no row
  swaps), then back-substitute, opening one coordinate of w per step.

Costs are part of the contract: the inverse method consumes d^3 + d^2
multiplications and d^2 + d direct openings (2d^3 + 3d^2 + d openings in
total); elimination consumes d^3/3 + d^2 - d/3 explicit multiplications,
(d^2 + d)/2 inversions and d direct openings ((2/3)d^3 + (7/2)d^2 +
(11/6)d openings). Tests assert these as exact integers.

``insecure_gauss`` and ``insecure_inverse`` mirror the same arithmetic
order without masking; ``factorization_solve`` is the independent oracle.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .engine import Session, mat_mul_plain_shared
from .errors import (
    DegeneratePivotError,
    NearSingularMaskError,
    NotPositiveDefiniteError,
    ShapeMismatchError,
    SingularMaskMatrixError,
    SingularMatrixError,
    ZeroPivotError,
)
from .sharing import SharedMatrix, SharedVector

METHOD_SECURE_INVERSE = "secure-inverse"
METHOD_SECURE_GAUSS = "secure-gauss"
METHOD_INSECURE_INVERSE = "insecure-inverse"
METHOD_INSECURE_GAUSS = "insecure-gauss"


@dataclass(frozen=True)
class SolveReport:
    """Solution plus the ledger movement this solve caused."""

    w: np.ndarray
    method: str
    openings: int
    multiplications: int
    inversions: int
    retries: int = 0


def _check_system(a: SharedMatrix, b: SharedVector) -> int:
    d, d2 = a.shape
    if d != d2:
        raise ShapeMismatchError(f"coefficient matrix must be square, got {a.shape}")
    if len(b) != d:
        raise ShapeMismatchError(f"right-hand side length {len(b)} does not match {a.shape}")
    return d


def local_invert(m: np.ndarray, eps_singular: float = 1e-12) -> np.ndarray:
    """Plaintext inverse via LU with partial pivoting; flags tiny pivots."""
    m = np.asarray(m, dtype=float)
    with warnings.catch_warnings():
        # the pivot-magnitude check below is the authoritative singularity signal
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if not np.all(np.isfinite(pivots)) or pivots.min() < eps_singular:
        raise SingularMatrixError(f"matrix is numerically singular (min pivot {pivots.min():.3e})")
    return scipy.linalg.lu_solve((lu, piv), np.eye(m.shape[0]), check_finite=False)


def solve_inverse_method(a: SharedMatrix, b: SharedVector, session: Session) -> SolveReport:
    """Mask, open, invert locally, un-mask, multiply, open the solution."""
    d = _check_system(a, b)
    before = session.ledger.snapshot()
    last_error: SingularMatrixError | None = None
    for attempt in range(session.max_retries):
        r = session.deal_random_matrix(d)
        ra_shared = session.secure_mat_mul(r, a)  # d^3 multiplications
        ra = session.open_matrix(ra_shared)  # d^2 direct openings
        try:
            ra_inv = local_invert(ra, session.eps_singular)
        except SingularMatrixError as exc:  # fresh mask matrix and retry
            last_error = exc
            continue
        a_inv = mat_mul_plain_shared(ra_inv, r)  # local: inv(RA) R = [inv(A)]
        w_shared = session.secure_mat_mul(a_inv, b)  # d^2 multiplications
        w = session.open_vector(w_shared)  # d direct openings
        delta = session.ledger.since(before)
        return SolveReport(
            w=w,
            method=METHOD_SECURE_INVERSE,
            openings=delta.openings,
            multiplications=delta.multiplications,
            inversions=delta.inversions,
            retries=attempt,
        )
    raise SingularMaskMatrixError(
        f"mask product stayed singular after {session.max_retries} attempts"
    ) from last_error


def solve_gauss(a: SharedMatrix, b: SharedVector, session: Session) -> SolveReport:
    """Pivoting-free elimination on the shared augmented matrix."""
    d = _check_system(a, b)
    before = session.ledger.snapshot()
    c = [list(a.row(i)) + [b[i]] for i in range(d)]
    try:
        for k in range(d):
            for i in range(k + 1, d):
                # the pivot is re-inverted per row below it: one inversion and
                # one multiplication per (k, i) pair is the documented cost
                frac = session.beaver_multiply(c[i][k], session.secure_invert(c[k][k]))
                for j in range(k, d + 1):
                    c[i][j] = c[i][j] - session.beaver_multiply(frac, c[k][j])
        w = np.zeros(d)
        for i in range(d - 1, -1, -1):
            acc = c[i][d]
            for j in range(i + 1, d):
                acc = acc - w[j] * c[i][j]  # w[j] is already public
            w[i] = session.open(session.beaver_multiply(acc, session.secure_invert(c[i][i])))
    except NearSingularMaskError as exc:
        raise DegeneratePivotError("elimination hit an effectively zero pivot") from exc
    delta = session.ledger.since(before)
    return SolveReport(
        w=w,
        method=METHOD_SECURE_GAUSS,
        openings=delta.openings,
        multiplications=delta.multiplications,
        inversions=delta.inversions,
    )


def eliminate_forward(c: np.ndarray, eps_pivot: float = 1e-12) -> np.ndarray:
    """Plaintext pivoting-free forward elimination of an augmented matrix."""
    c = np.array(c, dtype=float)
    d = c.shape[0]
    for k in range(d):
        if abs(c[k, k]) < eps_pivot:
            raise ZeroPivotError(f"zero pivot in column {k}; input is not positive definite")
        for i in range(k + 1, d):
            frac = c[i, k] / c[k, k]
            c[i, k:] -= frac * c[k, k:]
    return c


def insecure_gauss(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Plaintext mirror of the elimination route (same order, no masking)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = a.shape[0]
    c = eliminate_forward(np.hstack([a, b.reshape(-1, 1)]))
    w = np.zeros(d)
    for i in range(d - 1, -1, -1):
        w[i] = (c[i, d] - c[i, i + 1 : d] @ w[i + 1 : d]) / c[i, i]
    return w


def insecure_inverse(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Plaintext mirror of the inverse route: explicit inverse, then multiply."""
    return local_invert(np.asarray(a, dtype=float)) @ np.asarray(b, dtype=float)


def factorization_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Independent oracle: Cholesky solve of the SPD system."""
    try:
        cf = scipy.linalg.cho_factor(np.asarray(a, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("oracle requires a positive definite matrix") from exc
    return scipy.linalg.cho_solve(cf, np.asarray(b, dtype=float))
