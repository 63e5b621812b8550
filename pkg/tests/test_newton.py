import numpy as np
import pytest
from conftest import random_square

from factordiff import (
    CholeskyFactor,
    ConvergedOutsideChart,
    LDUTriple,
    NoConvergence,
    PathLeavesDomain,
    PathSpec,
    QRPair,
    SingularR,
    TooFarFromGroup,
    cholesky_factor,
    cholesky_newton_correct,
    hs_norm,
    ldu_factor,
    ldu_newton_correct,
    orthogonality_defect,
    qr_factor,
    qr_newton_correct,
    retract_orthogonal,
    track_cholesky,
    track_ldu,
    track_qr,
)


class TestRetractOrthogonal:
    def test_fixed_point(self):
        rng = np.random.default_rng(131)
        q = qr_factor(random_square(rng, 4)).q
        assert hs_norm(retract_orthogonal(q) - q) <= 1e-12 * (1.0 + hs_norm(q))

    def test_scaled_identity(self):
        out = retract_orthogonal(1.1 * np.eye(3))
        assert hs_norm(out - np.eye(3)) <= 1e-11

    def test_reflection_unchanged(self):
        m = np.diag([1.0, -1.0])
        assert hs_norm(retract_orthogonal(m) - m) <= 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(137)
        m = np.eye(4) + 0.1 * random_square(rng, 4)
        once = retract_orthogonal(m)
        twice = retract_orthogonal(once)
        assert hs_norm(twice - once) <= 1e-12 * (1.0 + hs_norm(once))
        assert orthogonality_defect(once) <= 1e-12 * (1.0 + hs_norm(once))

    def test_too_far(self):
        with pytest.raises(TooFarFromGroup):
            retract_orthogonal(2.0 * np.eye(3))


class TestQRNewtonCorrect:
    def test_exact_guess_returns_immediately(self):
        rng = np.random.default_rng(139)
        a = random_square(rng, 5)
        pair = qr_factor(a)
        corrected, iters = qr_newton_correct(a, pair)
        assert iters == 0
        assert np.array_equal(corrected.q, pair.q)
        assert np.array_equal(corrected.r, pair.r)

    def test_near_identity_converges_quadratically(self):
        rng = np.random.default_rng(149)
        noise = random_square(rng, 5)
        a = np.eye(5) + 1e-3 * noise / hs_norm(noise)
        corrected, iters = qr_newton_correct(a, QRPair(np.eye(5), np.eye(5)))
        assert iters <= 3
        assert hs_norm(corrected.product() - a) <= 1e-12
        oracle = qr_factor(a)
        assert hs_norm(corrected.q - oracle.q) <= 1e-9
        assert hs_norm(corrected.r - oracle.r) <= 1e-9

    def test_singular_guess_propagates(self):
        a = np.eye(2)
        guess = QRPair(np.eye(2), [[1.0, 0.0], [0.0, 0.0]])
        with pytest.raises(SingularR):
            qr_newton_correct(a, guess)

    def test_no_convergence_with_zero_budget(self):
        rng = np.random.default_rng(151)
        a = np.eye(3) + 0.1 * random_square(rng, 3)
        with pytest.raises(NoConvergence):
            qr_newton_correct(a, QRPair(np.eye(3), np.eye(3)), max_iters=0)

    def test_outside_chart(self):
        # target -1 = q*r needs q = -1; additive steps from (1, 1) push r negative
        a = np.array([[-1.0]])
        with pytest.raises(ConvergedOutsideChart):
            qr_newton_correct(a, QRPair(np.eye(1), np.eye(1)))


class TestOtherCorrectors:
    def test_cholesky_corrects_perturbed_factor(self):
        rng = np.random.default_rng(157)
        m = random_square(rng, 4)
        a = m.T @ m + np.eye(4)
        a = 0.5 * (a + a.T)
        exact = cholesky_factor(a)
        fuzz = np.tril(random_square(rng, 4))
        guess = CholeskyFactor(exact.l + 1e-3 * fuzz)
        corrected, iters = cholesky_newton_correct(a, guess)
        assert iters <= 4
        assert hs_norm(corrected.product() - a) <= 1e-12 * (1.0 + hs_norm(a))
        assert hs_norm(corrected.l - exact.l) <= 1e-9

    def test_ldu_corrects_perturbed_triple(self):
        rng = np.random.default_rng(163)
        a = random_square(rng, 4) + 3.0 * np.eye(4)
        exact = ldu_factor(a)
        guess = LDUTriple(
            exact.l + 1e-3 * np.tril(random_square(rng, 4), -1),
            exact.d + np.diag(1e-3 * rng.uniform(-1, 1, 4)),
            exact.u + 1e-3 * np.triu(random_square(rng, 4), 1),
        )
        corrected, iters = ldu_newton_correct(a, guess)
        assert iters <= 4
        assert hs_norm(corrected.product() - a) <= 1e-12 * (1.0 + hs_norm(a))


class TestQuadraticConvergenceSignature:
    def test_first_step_residual_slope(self):
        from factordiff import qr_derivative_solve

        rng = np.random.default_rng(167)
        n = 5
        for _ in range(5):
            q0 = qr_factor(random_square(rng, n)).q
            r0 = np.triu(random_square(rng, n))
            np.fill_diagonal(r0, rng.uniform(0.5, 1.5, n))
            a = q0 @ r0
            base = qr_factor(a)
            deltas = (1e-2, 1e-3, 1e-4)
            residuals = []
            for delta in deltas:
                w = random_square(rng, n)
                skew = w - w.T
                vup = np.triu(random_square(rng, n))
                du = base.q @ skew
                scale = delta / np.sqrt(hs_norm(du) ** 2 + hs_norm(vup) ** 2)
                guess = QRPair(
                    retract_orthogonal(base.q + scale * du), base.r + scale * vup
                )
                tan = qr_derivative_solve(guess.q, guess.r, a - guess.product())
                q1 = retract_orthogonal(guess.q + tan.u)
                r1 = np.triu(guess.r + tan.v)
                residuals.append(hs_norm(a - q1 @ r1))
            slope = np.polyfit(np.log(deltas), np.log(residuals), 1)[0]
            assert 1.7 <= slope <= 2.3

    def test_one_newton_step_max_iters(self):
        # max_iters=1 runs exactly one step; converged-in-one returns iters=1
        rng = np.random.default_rng(173)
        noise = random_square(rng, 4)
        a = np.eye(4) + 1e-9 * noise / hs_norm(noise)
        corrected, iters = qr_newton_correct(a, QRPair(np.eye(4), np.eye(4)), max_iters=1)
        assert iters == 1


class TestPathSpec:
    def test_rejects_bad_steps(self):
        with pytest.raises(ValueError):
            PathSpec(evaluate=lambda t: np.eye(2), steps=0)

    def test_rejects_non_callable(self):
        with pytest.raises(ValueError):
            PathSpec(evaluate=np.eye(2))


class TestTrackQR:
    def test_constant_path(self):
        report = track_qr(PathSpec(lambda t: np.eye(3)))
        assert len(report.ts) == 65
        assert all(it == 0 for it in report.newton_iters)
        assert report.max_residual == 0.0
        assert len(report.factors) == len(report.ts) == len(report.factor_norms)
        assert len(report.residuals) == len(report.ts)

    def test_linear_family_matches_oracle(self):
        rng = np.random.default_rng(179)
        noise = random_square(rng, 5)
        noise = 0.4 * noise / hs_norm(noise)

        report = track_qr(PathSpec(lambda t: np.eye(5) + t * noise))
        assert max(report.newton_iters) <= 4
        worst_scale = max(1.0 + hs_norm(np.eye(5) + t * noise) for t in report.ts)
        assert report.max_residual <= 1e-12 * worst_scale
        for t, pair in zip(report.ts, report.factors):
            a_t = np.eye(5) + t * noise
            oracle = qr_factor(a_t)
            bound = 1e-8 * (1.0 + hs_norm(a_t))
            assert hs_norm(pair.q - oracle.q) <= bound
            assert hs_norm(pair.r - oracle.r) <= bound

    def test_path_through_singularity(self):
        with pytest.raises(PathLeavesDomain) as info:
            track_qr(PathSpec(lambda t: (1.0 - 2.0 * t) * np.eye(3)))
        assert info.value.t == pytest.approx(0.5, abs=1e-9)


class TestTrackCholesky:
    def test_constant_identity(self):
        report = track_cholesky(PathSpec(lambda t: np.eye(4)))
        for fac in report.factors:
            assert np.array_equal(fac.l, np.eye(4))

    def test_linear_spd_family_matches_oracle(self):
        rng = np.random.default_rng(181)
        m = random_square(rng, 5)
        bump = m.T @ m
        bump = 0.5 * (bump + bump.T)
        bump = bump / hs_norm(bump)

        report = track_cholesky(PathSpec(lambda t: np.eye(5) + t * bump))
        for t, fac in zip(report.ts, report.factors):
            oracle = cholesky_factor(np.eye(5) + t * bump)
            assert hs_norm(fac.l - oracle.l) <= 1e-8 * (1.0 + hs_norm(oracle.l))

    def test_loses_definiteness(self):
        with pytest.raises(PathLeavesDomain) as info:
            track_cholesky(PathSpec(lambda t: (1.0 - 2.0 * t) * np.eye(3)))
        assert info.value.t == pytest.approx(0.5, abs=1e-9)


class TestTrackLDU:
    def test_constant_identity(self):
        report = track_ldu(PathSpec(lambda t: np.eye(3)))
        for trip in report.factors:
            assert np.array_equal(trip.l, np.eye(3))
            assert np.array_equal(trip.d, np.eye(3))
            assert np.array_equal(trip.u, np.eye(3))

    def test_blowup_family_endpoint(self):
        eps = 1e-3

        def family(t):
            return np.array([[1.0 - t + t * eps, 1.0], [1.0, 0.0]])

        report = track_ldu(PathSpec(family))
        d22 = report.factors[-1].d[1, 1]
        assert abs(d22 - (-1.0 / eps)) <= 1e-6 * (1.0 / eps)
        # factor norms blow up as the boundary gets closer while inputs stay bounded
        assert report.factor_norms[-1] > 100.0 * report.factor_norms[0]
        assert max(hs_norm(family(t)) for t in report.ts) <= np.sqrt(3.0)

    def test_pivot_crossing_zero(self):
        with pytest.raises(PathLeavesDomain) as info:
            track_ldu(PathSpec(lambda t: np.array([[0.5 - t, 1.0], [1.0, 0.0]])))
        assert info.value.t == pytest.approx(0.5, abs=1e-9)
