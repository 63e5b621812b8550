"""Factorization kernels: the inverse direction of each product map.

Three conventions are fixed here and relied on everywhere else:

* QR uses Householder reflections followed by a sign pass so the diagonal of
  r is non-negative (strictly positive for invertible input, where the
  factorization is unique).
* Cholesky clamps pivots within structural tolerance of zero, extending the
  factorization to the semi-definite closure.
* LDU is Gaussian elimination without pivoting: pivoting would compute a
  different map. Its domain is exactly the matrices whose leading principal
  blocks are invertible.
"""

from __future__ import annotations

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    CholeskyFactor,
    LDUTriple,
    QRPair,
    ToleranceConfig,
    hs_norm,
    validate_matrix,
)
from .errors import NotInDomainP, NotPositiveSemiDefinite, NotSymmetric, SingularInput

__all__ = [
    "qr_factor",
    "qr_factor_mgs",
    "cholesky_factor",
    "ldu_factor",
    "leading_minor_dets",
    "in_domain_p",
    "cond_estimate",
]


def qr_factor(a, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> QRPair:
    """Factor a square matrix as q @ r, q orthogonal, r upper triangular with
    non-negative diagonal.

    Total on square inputs, singular ones included. Householder reflections
    (reflector sign chosen to avoid cancellation) give q and r; a final sign
    pass flips rows of r and the matching columns of q wherever a diagonal
    entry of r is negative. For invertible input the result is the unique
    pair with positive diagonal; for singular input only the product is
    contractual, with determinism fixed by the reflector sign convention.
    """
    a = validate_matrix(a, "a")
    n = a.shape[0]
    r = a.copy()
    q = np.eye(n)
    for j in range(n - 1):
        x = r[j:, j]
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        v = x.copy()
        v[0] += np.copysign(norm_x, x[0])
        vtv = float(v @ v)
        if vtv == 0.0:
            continue
        beta = 2.0 / vtv
        r[j:, :] -= np.outer(beta * v, v @ r[j:, :])
        q[:, j:] -= np.outer(q[:, j:] @ v, beta * v)
    r = np.triu(r)
    neg = np.diag(r) < 0.0
    if np.any(neg):
        r[neg, :] = -r[neg, :]
        q[:, neg] = -q[:, neg]
    return QRPair(q, r, cfg)


def qr_factor_mgs(a, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> QRPair:
    """Modified Gram-Schmidt factorization with positive diagonal, for
    invertible input.

    Independent of qr_factor, which makes the two kernels a cross-check pair:
    on invertible matrices the factorization is unique, so they must agree.
    A second orthogonalization sweep keeps q orthogonal to roundoff even for
    ill-conditioned input.

    Raises SingularInput when a column pivot falls below
    singularity_tol * (1 + ||a||).
    """
    a = validate_matrix(a, "a")
    n = a.shape[0]
    thresh = cfg.singularity_tol * (1.0 + hs_norm(a))
    q = np.zeros((n, n))
    r = np.zeros((n, n))
    for k in range(n):
        w = a[:, k].copy()
        for _ in range(2):
            for i in range(k):
                c = float(q[:, i] @ w)
                r[i, k] += c
                w -= c * q[:, i]
        rkk = float(np.linalg.norm(w))
        if rkk <= thresh:
            raise SingularInput(f"column pivot {k + 1} below singularity threshold")
        r[k, k] = rkk
        q[:, k] = w / rkk
    return QRPair(q, r, cfg)


def cholesky_factor(a, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> CholeskyFactor:
    """Lower-triangular square root of a symmetric positive semi-definite
    matrix: a = l @ l^T with diag(l) >= 0.

    A pivot within structural tolerance of zero is clamped to zero, which is
    legitimate only when the remainder of that column is negligible too (true
    for any semi-definite matrix); otherwise the input is rejected. Strictly
    positive pivots throughout mean the input was positive definite and the
    factor is the unique one with positive diagonal.

    Raises NotSymmetric or NotPositiveSemiDefinite (with the pivot index).
    """
    a = validate_matrix(a, "a")
    scale = 1.0 + hs_norm(a)
    if hs_norm(a - a.T) > cfg.structural_tol * scale:
        raise NotSymmetric("matrix is not symmetric within structural tolerance")
    w = 0.5 * (a + a.T)
    n = a.shape[0]
    struct = cfg.structural_tol * scale
    l = np.zeros((n, n))
    for j in range(n):
        pivot = float(w[j, j] - l[j, :j] @ l[j, :j])
        if pivot < -struct:
            raise NotPositiveSemiDefinite(j + 1)
        col = w[j + 1:, j] - l[j + 1:, :j] @ l[j, :j]
        if pivot <= struct:
            # zero pivot: a PSD matrix must have a zero residual column here
            if col.size and float(np.max(np.abs(col))) > struct:
                raise NotPositiveSemiDefinite(j + 1)
            l[j, j] = 0.0
        else:
            l[j, j] = np.sqrt(pivot)
            l[j + 1:, j] = col / l[j, j]
    return CholeskyFactor(l, cfg)


def ldu_factor(a, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> LDUTriple:
    """Unit-lower / diagonal / unit-upper factorization by elimination
    without pivoting.

    Succeeds exactly when every elimination pivot clears the singularity
    threshold, i.e. when every leading principal block is numerically
    invertible; then a = l @ d @ u and the triple is unique.

    Raises NotInDomainP carrying the 1-based index of the first failing pivot.
    """
    a = validate_matrix(a, "a")
    n = a.shape[0]
    thresh = cfg.singularity_tol * (1.0 + hs_norm(a))
    work = a.copy()
    l = np.eye(n)
    u = np.eye(n)
    d = np.zeros(n)
    for k in range(n):
        p = float(work[k, k])
        if abs(p) <= thresh:
            raise NotInDomainP(k + 1)
        d[k] = p
        l[k + 1:, k] = work[k + 1:, k] / p
        u[k, k + 1:] = work[k, k + 1:] / p
        work[k + 1:, k + 1:] -= np.outer(l[k + 1:, k], work[k, k + 1:])
    return LDUTriple(l, np.diag(d), u, cfg)


def in_domain_p(a, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> bool:
    """True when every elimination pivot clears the singularity threshold,
    i.e. all leading principal blocks are numerically invertible."""
    a = validate_matrix(a, "a")
    thresh = cfg.singularity_tol * (1.0 + hs_norm(a))
    work = a.copy()
    for k in range(a.shape[0]):
        p = float(work[k, k])
        if abs(p) <= thresh:
            return False
        work[k + 1:, k + 1:] -= np.outer(work[k + 1:, k] / p, work[k, k + 1:])
    return True


def _det_cofactor(a: np.ndarray) -> float:
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    total = 0.0
    sign = 1.0
    for j in range(n):
        minor = np.delete(a[1:, :], j, axis=1)
        total += sign * float(a[0, j]) * _det_cofactor(minor)
        sign = -sign
    return total


def leading_minor_dets(a) -> list[float]:
    """Determinants of the top-left k-by-k blocks for k = 1..n.

    Computed independently of the no-pivot elimination kernel (cofactor
    expansion up to 4x4, pivoted LU above), so the list can serve as an
    oracle for the pivot ladder d[0][0], d[0][0]*d[1][1], ... of ldu_factor.
    """
    a = validate_matrix(a, "a")
    dets = []
    for k in range(1, a.shape[0] + 1):
        block = a[:k, :k]
        if k <= 4:
            dets.append(_det_cofactor(block))
        else:
            dets.append(float(np.linalg.det(block)))
    return dets


def cond_estimate(m) -> float:
    """Cheap conditioning proxy for a triangular or diagonal factor: the
    ratio of extreme diagonal magnitudes (inf when the diagonal has a zero)."""
    dmag = np.abs(np.diag(validate_matrix(m, "m")))
    lo = float(np.min(dmag))
    if lo == 0.0:
        return float("inf")
    return float(np.max(dmag)) / lo
