"""Forward (apply) and inverse (solve) directions of each factorization
map's derivative.

The derivative of the product map at an interior base point is a linear
isomorphism between the factor tangent space and all n-by-n matrices; the
solve routines invert it by reducing to a structural split:

* QR:        m = q^T e r^-1 splits into skew + upper, giving u = q s, v = t r.
* Cholesky:  m = l^-1 e l^-T is symmetric and halves onto the lower triangle.
* LDU:       m = l^-1 e u^-1 splits into strictly-lower + diagonal +
             strictly-upper parts, rescaled by d on the outer factors.

No explicit inverse is ever formed; every r^-1, l^-1, u^-1, d^-1 is a
triangular or diagonal solve.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from .core import (
    DEFAULT_TOLERANCES,
    LDUTangent,
    QRTangent,
    ToleranceConfig,
    hs_norm,
    split_lower_diag_upper,
    split_skew_upper,
    sym_to_lower,
    validate_matrix,
)
from .errors import (
    BaseMismatch,
    NotSymmetric,
    ShapeError,
    SingularD,
    SingularL,
    SingularR,
)

__all__ = [
    "qr_derivative_apply",
    "qr_derivative_solve",
    "cholesky_derivative_apply",
    "cholesky_derivative_solve",
    "ldu_derivative_apply",
    "ldu_derivative_solve",
]


def _require_lower(m: np.ndarray, name: str) -> None:
    if np.any(np.triu(m, 1) != 0.0):
        raise ShapeError(f"{name} must be lower triangular (exact zeros above the diagonal)")


def _require_upper(m: np.ndarray, name: str) -> None:
    if np.any(np.tril(m, -1) != 0.0):
        raise ShapeError(f"{name} must be upper triangular (exact zeros below the diagonal)")


def _require_unit_diag(m: np.ndarray, name: str) -> None:
    if np.any(np.diag(m) != 1.0):
        raise ShapeError(f"{name} must have a unit diagonal")


def _require_diagonal(m: np.ndarray, name: str) -> None:
    if np.any((m - np.diag(np.diag(m))) != 0.0):
        raise ShapeError(f"{name} must be diagonal")


def _solve_right_triangular(c, r, lower=False, unit_diagonal=False):
    # x @ r = c, solved as r^T x^T = c^T
    return solve_triangular(
        r, c.T, trans="T", lower=lower, unit_diagonal=unit_diagonal, check_finite=False
    ).T


def qr_derivative_apply(q, r, tan: QRTangent) -> np.ndarray:
    """First-order response u @ r + q @ v of the product q @ r to the
    tangent (u, v). The tangent must be based at this q."""
    q = validate_matrix(q, "q")
    r = validate_matrix(r, "r")
    if tan.u.shape != q.shape:
        raise ShapeError("tangent dimension does not match the base point")
    if not np.array_equal(tan.base_q, q):
        raise BaseMismatch("tangent is based at a different q")
    return tan.u @ r + q @ tan.v


def qr_derivative_solve(q, r, e, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> QRTangent:
    """Tangent (u, v) with u @ r + q @ v = e, for invertible r.

    q^T u comes out skew-symmetric and v upper triangular with an exactly
    zero strict lower triangle; e = 0 yields the exactly zero tangent.

    Raises SingularR when a diagonal entry of r is below the singularity
    threshold.
    """
    q = validate_matrix(q, "q")
    r = validate_matrix(r, "r")
    e = validate_matrix(e, "e")
    if not (q.shape == r.shape == e.shape):
        raise ShapeError("q, r, e must have matching shapes")
    if float(np.min(np.abs(np.diag(r)))) <= cfg.singularity_tol * (1.0 + hs_norm(r)):
        raise SingularR("r has a diagonal entry below the singularity threshold")
    m = _solve_right_triangular(q.T @ e, r)
    s, t = split_skew_upper(m)
    return QRTangent(q @ s, t @ r, base_q=q, cfg=cfg)


def cholesky_derivative_apply(l, v) -> np.ndarray:
    """First-order response l @ v^T + v @ l^T (always symmetric) of the
    product l @ l^T to a lower-triangular tangent v."""
    l = validate_matrix(l, "l")
    v = validate_matrix(v, "v")
    if l.shape != v.shape:
        raise ShapeError("l and v must have matching shapes")
    _require_lower(l, "l")
    _require_lower(v, "v")
    return l @ v.T + v @ l.T


def cholesky_derivative_solve(l, e, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Lower-triangular tangent v with l @ v^T + v @ l^T = e, for symmetric e
    and l with positive diagonal.

    Raises SingularL on a near-zero diagonal of l, NotSymmetric on
    asymmetric e.
    """
    l = validate_matrix(l, "l")
    e = validate_matrix(e, "e")
    if l.shape != e.shape:
        raise ShapeError("l and e must have matching shapes")
    _require_lower(l, "l")
    if float(np.min(np.abs(np.diag(l)))) <= cfg.singularity_tol * (1.0 + hs_norm(l)):
        raise SingularL("l has a diagonal entry below the singularity threshold")
    if hs_norm(e - e.T) > cfg.structural_tol * (1.0 + hs_norm(e)):
        raise NotSymmetric("e is not symmetric within structural tolerance")
    y = solve_triangular(l, e, lower=True, check_finite=False)
    m = solve_triangular(l, y.T, lower=True, check_finite=False).T
    m = 0.5 * (m + m.T)  # the two solves break exact symmetry at roundoff
    return l @ sym_to_lower(m, cfg)


def ldu_derivative_apply(l, d, u, tan: LDUTangent) -> np.ndarray:
    """First-order response a @ d @ u + l @ s @ u + l @ d @ b of the product
    l @ d @ u to the tangent triple (a, s, b)."""
    l = validate_matrix(l, "l")
    d = validate_matrix(d, "d")
    u = validate_matrix(u, "u")
    if not (l.shape == d.shape == u.shape == tan.a.shape):
        raise ShapeError("base point and tangent must have matching shapes")
    _require_lower(l, "l")
    _require_unit_diag(l, "l")
    _require_upper(u, "u")
    _require_unit_diag(u, "u")
    _require_diagonal(d, "d")
    return tan.a @ d @ u + l @ tan.s @ u + l @ d @ tan.b


def ldu_derivative_solve(l, d, u, e, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> LDUTangent:
    """Tangent triple (a, s, b) with a @ d @ u + l @ s @ u + l @ d @ b = e.

    Raises SingularD when a diagonal entry of d is below the singularity
    threshold.
    """
    l = validate_matrix(l, "l")
    d = validate_matrix(d, "d")
    u = validate_matrix(u, "u")
    e = validate_matrix(e, "e")
    if not (l.shape == d.shape == u.shape == e.shape):
        raise ShapeError("l, d, u, e must have matching shapes")
    _require_lower(l, "l")
    _require_unit_diag(l, "l")
    _require_upper(u, "u")
    _require_unit_diag(u, "u")
    _require_diagonal(d, "d")
    dvec = np.diag(d)
    # absolute threshold: blow-up base points mix tiny and huge entries in d
    if float(np.min(np.abs(dvec))) <= cfg.singularity_tol:
        raise SingularD("d has a diagonal entry below the singularity threshold")
    y = solve_triangular(l, e, lower=True, unit_diagonal=True, check_finite=False)
    m = _solve_right_triangular(y, u, lower=False, unit_diagonal=True)
    ml, md, mu = split_lower_diag_upper(m)
    a = (l @ ml) / dvec[None, :]
    b = (mu / dvec[:, None]) @ u
    return LDUTangent(a, md, b)
