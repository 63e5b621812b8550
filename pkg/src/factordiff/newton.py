"""Newton correction of approximate factorizations and predictor-corrector
tracking of factor paths along smooth matrix families.

Because each derivative is an isomorphism on the open factor domain, Newton's
method applies directly: solve the derivative equation for the residual, step,
and (for the orthogonal factor) retract back onto the group via the polar
factor. Tracking advances a factorization along a parametrized family with a
first-order prediction followed by Newton correction, halving the step (up to
four times per interval) when a correction fails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .core import (
    DEFAULT_TOLERANCES,
    CholeskyFactor,
    LDUTriple,
    QRPair,
    ToleranceConfig,
    hs_norm,
    orthogonality_defect,
    validate_matrix,
)
from .errors import (
    ConvergedOutsideChart,
    NoConvergence,
    PathLeavesDomain,
    ShapeError,
    SingularD,
    SingularL,
    SingularR,
    TooFarFromGroup,
)
from .factor import cholesky_factor, in_domain_p, ldu_factor, qr_factor
from .frechet import (
    cholesky_derivative_solve,
    ldu_derivative_solve,
    qr_derivative_solve,
)

__all__ = [
    "PathSpec",
    "TrackReport",
    "retract_orthogonal",
    "qr_newton_correct",
    "cholesky_newton_correct",
    "ldu_newton_correct",
    "track_qr",
    "track_cholesky",
    "track_ldu",
]

_MAX_HALVINGS = 4
_STEP_FAILURES = (
    NoConvergence,
    ConvergedOutsideChart,
    ShapeError,
    SingularR,
    SingularL,
    SingularD,
    TooFarFromGroup,
)


@dataclass(frozen=True)
class PathSpec:
    """A matrix family t in [0, 1] -> a(t), evaluated lazily.

    evaluate must be a pure function of t returning a square matrix of fixed
    dimension. steps is the number of tracking intervals (samples are
    t = i / steps for i = 0..steps).
    """

    evaluate: Callable[[float], np.ndarray]
    steps: int = 64
    description: str = ""

    def __post_init__(self) -> None:
        if not callable(self.evaluate):
            raise ValueError("evaluate must be callable")
        if self.steps < 1:
            raise ValueError("steps must be a positive integer")


@dataclass(frozen=True)
class TrackReport:
    """Result of tracking one factor path.

    All lists have one entry per sample t = i / steps. newton_iters[i] is the
    worst corrector iteration count among the substeps that reached sample i
    (0 for the seeded start). factor_norms[i] is the combined factor norm
    sqrt(sum of squared component norms), which is what blows up when a path
    approaches the boundary of the LDU domain. residuals[i] is the
    reconstruction residual at sample i and max_residual is their maximum.
    """

    ts: List[float]
    factors: list
    newton_iters: List[int]
    factor_norms: List[float] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    max_residual: float = 0.0


def retract_orthogonal(m, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthogonal polar factor of m, by the iteration x <- x (3I - x^T x) / 2.

    Requires m to be near the group already: the singular values of m^T m may
    deviate from 1 by at most 0.5. Raises TooFarFromGroup otherwise.
    """
    m = validate_matrix(m, "m")
    n = m.shape[0]
    gram = m.T @ m
    eig = np.linalg.eigvalsh(0.5 * (gram + gram.T))
    if float(np.max(np.abs(eig - 1.0))) > 0.5 + 1e-12:
        raise TooFarFromGroup("matrix is not within distance 0.5 of the orthogonal group")
    eye = np.eye(n)
    x = m.copy()
    for _ in range(60):
        if orthogonality_defect(x) <= cfg.structural_tol * (1.0 + hs_norm(x)):
            return x
        x = x @ (1.5 * eye - 0.5 * (x.T @ x))
    raise NoConvergence("polar retraction did not converge")


def qr_newton_correct(
    a,
    guess: QRPair,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    max_iters: int = 20,
):
    """Newton-correct an approximate orthogonal/upper-triangular pair toward
    the factorization of a.

    Each step solves the derivative equation for the residual a - q @ r,
    retracts q + u onto the orthogonal group, and adds v to r. Returns the
    corrected pair and the number of steps taken; a guess already within
    tolerance comes back unchanged with zero steps.

    Raises NoConvergence after max_iters steps, ConvergedOutsideChart if the
    diagonal of r turns negative, and propagates SingularR from the solve.
    """
    a = validate_matrix(a, "a")
    q, r = guess.q, guess.r
    tol = cfg.structural_tol * (1.0 + hs_norm(a))
    for it in range(max_iters + 1):
        residual = a - q @ r
        if hs_norm(residual) <= tol:
            return QRPair(q, r, cfg), it
        if it == max_iters:
            break
        tan = qr_derivative_solve(q, r, residual, cfg)
        q = retract_orthogonal(q + tan.u, cfg)
        r = np.triu(r + tan.v)
        if np.any(np.diag(r) < 0.0):
            raise ConvergedOutsideChart("diagonal of r went negative")
    raise NoConvergence(f"residual above tolerance after {max_iters} iterations")


def cholesky_newton_correct(
    a,
    guess: CholeskyFactor,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    max_iters: int = 20,
):
    """Newton-correct an approximate Cholesky factor toward the factorization
    of the symmetric positive definite matrix a.

    The residual is symmetrized before each solve, since roundoff breaks the
    exact symmetry the solver requires.
    """
    a = validate_matrix(a, "a")
    a = 0.5 * (a + a.T)
    l = guess.l
    tol = cfg.structural_tol * (1.0 + hs_norm(a))
    for it in range(max_iters + 1):
        residual = a - l @ l.T
        if hs_norm(residual) <= tol:
            return CholeskyFactor(l, cfg), it
        if it == max_iters:
            break
        v = cholesky_derivative_solve(l, 0.5 * (residual + residual.T), cfg)
        l = l + v
        if np.any(np.diag(l) < 0.0):
            raise ConvergedOutsideChart("diagonal of l went negative")
    raise NoConvergence(f"residual above tolerance after {max_iters} iterations")


def ldu_newton_correct(
    a,
    guess: LDUTriple,
    cfg: ToleranceConfig = DEFAULT_TOLERANCES,
    max_iters: int = 20,
):
    """Newton-correct an approximate unit-lower/diagonal/unit-upper triple
    toward the factorization of a."""
    a = validate_matrix(a, "a")
    l, d, u = guess.l, guess.d, guess.u
    tol = cfg.structural_tol * (1.0 + hs_norm(a))
    for it in range(max_iters + 1):
        residual = a - l @ d @ u
        if hs_norm(residual) <= tol:
            return LDUTriple(l, d, u, cfg), it
        if it == max_iters:
            break
        tan = ldu_derivative_solve(l, d, u, residual, cfg)
        l = l + tan.a
        d = d + tan.s
        u = u + tan.b
        if float(np.min(np.abs(np.diag(d)))) <= cfg.singularity_tol:
            raise ConvergedOutsideChart("diagonal factor lost invertibility")
    raise NoConvergence(f"residual above tolerance after {max_iters} iterations")


def _qr_domain(a: np.ndarray, t: float, cfg: ToleranceConfig) -> None:
    smallest = float(np.linalg.svd(a, compute_uv=False)[-1])
    if smallest <= cfg.singularity_tol * (1.0 + hs_norm(a)):
        raise PathLeavesDomain(t, f"a(t) numerically singular at t={t:.6g}")


def _cholesky_domain(a: np.ndarray, t: float, cfg: ToleranceConfig) -> None:
    scale = 1.0 + hs_norm(a)
    if hs_norm(a - a.T) > cfg.structural_tol * scale:
        raise PathLeavesDomain(t, f"a(t) not symmetric at t={t:.6g}")
    smallest = float(np.linalg.eigvalsh(0.5 * (a + a.T))[0])
    if smallest <= cfg.singularity_tol * scale:
        raise PathLeavesDomain(t, f"a(t) not positive definite at t={t:.6g}")


def _ldu_domain(a: np.ndarray, t: float, cfg: ToleranceConfig) -> None:
    if not in_domain_p(a, cfg):
        raise PathLeavesDomain(t, f"a(t) has a numerically zero leading pivot at t={t:.6g}")


def _qr_predict(pair: QRPair, delta: np.ndarray, cfg: ToleranceConfig) -> QRPair:
    tan = qr_derivative_solve(pair.q, pair.r, delta, cfg)
    return QRPair(retract_orthogonal(pair.q + tan.u, cfg), pair.r + tan.v, cfg)


def _cholesky_predict(fac: CholeskyFactor, delta: np.ndarray, cfg: ToleranceConfig) -> CholeskyFactor:
    v = cholesky_derivative_solve(fac.l, 0.5 * (delta + delta.T), cfg)
    return CholeskyFactor(fac.l + v, cfg)


def _ldu_predict(fac: LDUTriple, delta: np.ndarray, cfg: ToleranceConfig) -> LDUTriple:
    tan = ldu_derivative_solve(fac.l, fac.d, fac.u, delta, cfg)
    return LDUTriple(fac.l + tan.a, fac.d + tan.s, fac.u + tan.b, cfg)


def _sample(path: PathSpec, t: float, domain_check, cfg: ToleranceConfig) -> np.ndarray:
    a = validate_matrix(path.evaluate(t), f"a({t:.6g})")
    domain_check(a, t, cfg)
    return a


def _advance(path, cfg, domain_check, predict, correct, current, a_prev, t_prev, t_next, depth):
    a_next = _sample(path, t_next, domain_check, cfg)
    try:
        guess = predict(current, a_next - a_prev, cfg)
        corrected, iters = correct(a_next, guess, cfg)
        return corrected, a_next, iters
    except _STEP_FAILURES:
        if depth <= 0:
            raise NoConvergence(
                f"correction failed at t={t_next:.6g} after {_MAX_HALVINGS} step halvings"
            ) from None
        t_mid = 0.5 * (t_prev + t_next)
        current, a_mid, it1 = _advance(
            path, cfg, domain_check, predict, correct, current, a_prev, t_prev, t_mid, depth - 1
        )
        corrected, a_next, it2 = _advance(
            path, cfg, domain_check, predict, correct, current, a_mid, t_mid, t_next, depth - 1
        )
        return corrected, a_next, max(it1, it2)


def _factor_norm(fac) -> float:
    if isinstance(fac, QRPair):
        parts = (fac.q, fac.r)
    elif isinstance(fac, CholeskyFactor):
        parts = (fac.l,)
    else:
        parts = (fac.l, fac.d, fac.u)
    return float(np.sqrt(sum(hs_norm(p) ** 2 for p in parts)))


def _track(path: PathSpec, cfg: ToleranceConfig, seed, domain_check, predict, correct) -> TrackReport:
    ts = [i / path.steps for i in range(path.steps + 1)]
    a_prev = _sample(path, ts[0], domain_check, cfg)
    current = seed(a_prev, cfg)
    factors = [current]
    iters = [0]
    residuals = [hs_norm(a_prev - current.product())]
    for t_prev, t_next in zip(ts, ts[1:]):
        current, a_prev, spent = _advance(
            path, cfg, domain_check, predict, correct, current, a_prev, t_prev, t_next, _MAX_HALVINGS
        )
        factors.append(current)
        iters.append(spent)
        residuals.append(hs_norm(a_prev - current.product()))
    return TrackReport(
        ts=ts,
        factors=factors,
        newton_iters=iters,
        factor_norms=[_factor_norm(f) for f in factors],
        residuals=residuals,
        max_residual=max(residuals),
    )


def track_qr(path: PathSpec, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TrackReport:
    """Track the orthogonal/upper-triangular factor pair of an invertible
    matrix family.

    The start is seeded by direct factorization; each subsequent sample is
    reached by a derivative-solve prediction plus Newton correction. On the
    invertible domain the factor path is unique, so direct factorization at
    any sample is a valid oracle for the tracked pair.

    Raises PathLeavesDomain when a sampled matrix is numerically singular,
    NoConvergence when a correction step fails even after halving.
    """
    return _track(path, cfg, qr_factor, _qr_domain, _qr_predict, qr_newton_correct)


def track_cholesky(path: PathSpec, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TrackReport:
    """Track the Cholesky factor of a symmetric positive definite family.

    Raises PathLeavesDomain when a sample loses symmetry or definiteness.
    """
    return _track(
        path, cfg, cholesky_factor, _cholesky_domain, _cholesky_predict, cholesky_newton_correct
    )


def track_ldu(path: PathSpec, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TrackReport:
    """Track the unit-lower/diagonal/unit-upper triple of a family staying
    inside the no-pivot elimination domain.

    factor_norms records the combined factor norm per sample, which is the
    quantity that blows up as the family approaches the domain boundary while
    the inputs themselves stay bounded.

    Raises PathLeavesDomain when a sampled matrix has a numerically zero
    leading pivot.
    """
    return _track(path, cfg, ldu_factor, _ldu_domain, _ldu_predict, ldu_newton_correct)
