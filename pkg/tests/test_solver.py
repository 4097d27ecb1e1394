import numpy as np
import pytest

from mpcreg.engine import Session
from mpcreg.errors import ShapeMismatchError, SingularMatrixError, ZeroPivotError
from mpcreg.privacy import (
    inversions_gauss,
    multiplications_gauss,
    multiplications_inverse,
    openings_gauss,
    openings_inverse,
)
from mpcreg.sharing import SharePolicy
from mpcreg.solver import (
    eliminate_forward,
    factorization_solve,
    insecure_gauss,
    insecure_inverse,
    local_invert,
    solve_gauss,
    solve_inverse_method,
)

POLICY = SharePolicy.evenly_spaced(5, 3, sigma_beta_sq=1e5)


def random_spd(d, rng, cond=100.0):
    """SPD matrix with controlled condition number."""
    q, _ = np.linalg.qr(rng.normal(size=(d, d)))
    eigs = np.logspace(0.0, np.log10(cond), d)
    return (q * eigs) @ q.T


def secure_setup(a, b, seed=0, sigma_r_sq=1e4):
    s = Session(POLICY, sigma_r_sq=sigma_r_sq, seed=seed)
    return s.share_matrix(a), s.share_vector(b), s


class TestInverseMethod:
    def test_one_dimensional(self):
        a_s, b_s, s = secure_setup([[2.0]], [1.0])
        rep = solve_inverse_method(a_s, b_s, s)
        assert rep.w == pytest.approx([0.5], abs=1e-6)
        assert rep.openings == 6  # 2d^3+3d^2+d at d=1

    def test_d14_opening_count(self):
        rng = np.random.default_rng(1)
        a = random_spd(14, rng)
        b = rng.normal(size=14)
        a_s, b_s, s = secure_setup(a, b, seed=1)
        rep = solve_inverse_method(a_s, b_s, s)
        assert rep.openings == 6090
        assert rep.multiplications == multiplications_inverse(14)
        assert rep.inversions == 0

    def test_matches_oracle_d5(self):
        rng = np.random.default_rng(2)
        a = random_spd(5, rng)
        b = rng.normal(size=5)
        a_s, b_s, s = secure_setup(a, b, seed=2)
        rep = solve_inverse_method(a_s, b_s, s)
        ref = factorization_solve(a, b)
        assert np.linalg.norm(rep.w - ref) / np.linalg.norm(ref) < 1e-4

    def test_shape_check(self):
        s = Session(POLICY, seed=0)
        with pytest.raises(ShapeMismatchError):
            solve_inverse_method(s.share_matrix(np.eye(2)), s.share_vector([1.0, 2.0, 3.0]), s)


class TestGaussMethod:
    def test_one_dimensional(self):
        a_s, b_s, s = secure_setup([[2.0]], [1.0])
        rep = solve_gauss(a_s, b_s, s)
        assert rep.w == pytest.approx([0.5], abs=1e-6)
        assert rep.openings == 6  # (2/3)d^3+(7/2)d^2+(11/6)d at d=1

    def test_diagonal_system(self):
        a_s, b_s, s = secure_setup([[2.0, 0.0], [0.0, 2.0]], [2.0, 4.0], seed=3)
        rep = solve_gauss(a_s, b_s, s)
        assert rep.w == pytest.approx([1.0, 2.0], abs=1e-5)

    def test_d14_opening_count(self):
        rng = np.random.default_rng(4)
        a = random_spd(14, rng)
        b = rng.normal(size=14)
        a_s, b_s, s = secure_setup(a, b, seed=4)
        rep = solve_gauss(a_s, b_s, s)
        assert rep.openings == 2541
        assert rep.inversions == inversions_gauss(14)
        # ledger multiplications include the one embedded in each inversion
        assert rep.multiplications - rep.inversions == multiplications_gauss(14)

    def test_matches_oracle_d5(self):
        rng = np.random.default_rng(5)
        a = random_spd(5, rng)
        b = rng.normal(size=5)
        a_s, b_s, s = secure_setup(a, b, seed=5)
        rep = solve_gauss(a_s, b_s, s)
        ref = factorization_solve(a, b)
        assert np.linalg.norm(rep.w - ref) / np.linalg.norm(ref) < 1e-4


class TestLedgerClosedForms:
    @pytest.mark.parametrize("d", range(1, 8))
    def test_both_methods_exact(self, d):
        rng = np.random.default_rng(100 + d)
        a = random_spd(d, rng)
        b = rng.normal(size=d)

        a_s, b_s, s = secure_setup(a, b, seed=d)
        rep = solve_inverse_method(a_s, b_s, s)
        assert rep.openings == openings_inverse(d)
        assert s.ledger.identity_holds()

        a_s, b_s, s = secure_setup(a, b, seed=d + 50)
        rep = solve_gauss(a_s, b_s, s)
        assert rep.openings == openings_gauss(d)
        assert s.ledger.identity_holds()


class TestInsecureTwins:
    def test_identity_system(self):
        b = np.array([3.0, -1.0, 2.0])
        assert np.array_equal(insecure_gauss(np.eye(3), b), b)
        assert np.allclose(insecure_inverse(np.eye(3), b), b)

    def test_hilbert_constructed_solution(self):
        h = np.array([[1.0 / (i + j + 1) for j in range(4)] for i in range(4)])
        b = h.sum(axis=1)  # row sums make the all-ones vector the solution
        assert np.allclose(insecure_gauss(h, b), np.ones(4), atol=1e-6)
        assert np.allclose(insecure_inverse(h, b), np.ones(4), atol=1e-6)

    def test_random_spd_d10_matches_oracle(self):
        rng = np.random.default_rng(6)
        a = random_spd(10, rng, cond=1e3)
        b = rng.normal(size=10)
        ref = factorization_solve(a, b)
        assert np.linalg.norm(insecure_gauss(a, b) - ref) / np.linalg.norm(ref) < 1e-10
        assert np.linalg.norm(insecure_inverse(a, b) - ref) / np.linalg.norm(ref) < 1e-10

    def test_zero_pivot_on_non_spd(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])  # symmetric but not PD
        with pytest.raises(ZeroPivotError):
            insecure_gauss(a, np.ones(2))

    def test_pivot_positivity_on_spd(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            d = int(rng.integers(2, 8))
            a = random_spd(d, rng, cond=1e3)
            b = rng.normal(size=d)
            reduced = eliminate_forward(np.hstack([a, b.reshape(-1, 1)]))
            assert np.all(np.diag(reduced)[:d] > 0)

    def test_local_invert_flags_singular(self):
        with pytest.raises(SingularMatrixError):
            local_invert(np.array([[1.0, 2.0], [2.0, 4.0]]))


class TestOracleEquivalence:
    def test_100_random_systems(self):
        rng = np.random.default_rng(12345)
        for trial in range(100):
            d = int(rng.integers(1, 11))
            cond = float(rng.uniform(1.0, 1e4))
            a = random_spd(d, rng, cond=cond)
            b = rng.normal(size=d)
            ref = factorization_solve(a, b)
            scale = np.linalg.norm(ref)

            a_s, b_s, s = secure_setup(a, b, seed=trial)
            w_inv = solve_inverse_method(a_s, b_s, s).w
            a_s, b_s, s = secure_setup(a, b, seed=trial + 1000)
            w_gau = solve_gauss(a_s, b_s, s).w

            assert np.linalg.norm(w_inv - ref) / scale < 1e-4, f"inverse, trial {trial}"
            assert np.linalg.norm(w_gau - ref) / scale < 1e-4, f"gauss, trial {trial}"
            assert np.linalg.norm(insecure_gauss(a, b) - ref) / scale < 1e-10
            assert np.linalg.norm(insecure_inverse(a, b) - ref) / scale < 1e-10


class TestDegradation:
    def test_error_nondecreasing_in_mask_variance(self):
        sigmas = (1e2, 1e4, 1e6)
        mean_errors = []
        for sigma_r_sq in sigmas:
            rng = np.random.default_rng(77)
            errs = []
            for trial in range(50):
                a = random_spd(5, rng, cond=100.0)
                b = rng.normal(size=5)
                ref = factorization_solve(a, b)
                a_s, b_s, s = secure_setup(a, b, seed=trial, sigma_r_sq=sigma_r_sq)
                w = solve_gauss(a_s, b_s, s).w
                errs.append(np.linalg.norm(w - ref) / np.linalg.norm(ref))
            mean_errors.append(float(np.mean(errs)))
        assert mean_errors[0] <= mean_errors[1] <= mean_errors[2]
