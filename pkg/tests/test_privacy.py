import math

import numpy as np
import pytest

from mpcreg.engine import Session
from mpcreg.errors import InvalidScenarioError
from mpcreg.privacy import (
    CostModel,
    LeakageScenario,
    gamma,
    inversions_gauss,
    leakage_bound,
    multiplications_gauss,
    multiplications_inverse,
    openings_gauss,
    openings_inverse,
    reference_leak,
    sigma_x_estimate,
    worst_case_adversary,
)
from mpcreg.sharing import SharePolicy
from mpcreg.solver import solve_gauss, solve_inverse_method

# reference setup: five parties at alpha_i = 0.2i - 0.1, basis built from
# parties 1..3 (nodes 0, 0.1, 0.3, 0.5), worst-case coalition {3, 4, 5}
REF_NODES = (0.0, 0.1, 0.3, 0.5)
REF_ADV = (0.5, 0.7, 0.9)
# mean party size with 506 rows, 80% train, 5 parties: 404/5 rows each
REF_SIGMA_X = sigma_x_estimate(404 / 5)


def ref_scenario(openings, sigma_r_sq, sigma_beta_sq, sigma_x_sq=REF_SIGMA_X):
    return LeakageScenario(
        openings=openings,
        threshold=3,
        basis_nodes=REF_NODES,
        adversary_alphas=REF_ADV,
        sigma_r_sq=sigma_r_sq,
        sigma_beta_sq=sigma_beta_sq,
        sigma_x_sq=sigma_x_sq,
        adversary_indices=(3, 4, 5),
    )


class TestOpeningPolynomials:
    def test_reference_dimension(self):
        assert openings_inverse(14) == 6090
        assert openings_gauss(14) == 2541

    def test_d1_both_six(self):
        assert openings_inverse(1) == 6
        assert openings_gauss(1) == 6

    @pytest.mark.parametrize("d", list(range(1, 60)))
    def test_gauss_count_is_integer(self, d):
        # closed form (2/3)d^3 + (7/2)d^2 + (11/6)d, evaluated exactly
        assert openings_gauss(d) * 6 == 4 * d**3 + 21 * d**2 + 11 * d

    def test_component_tallies(self):
        assert multiplications_inverse(14) == 14**3 + 14**2
        assert multiplications_gauss(14) == (14**3 + 3 * 14**2 - 14) // 3
        assert inversions_gauss(14) == (14**2 + 14) // 2

    def test_cost_model_dispatch(self):
        cm = CostModel(d=14)
        assert cm.openings("secure-inverse") == 6090
        assert cm.openings("gauss") == 2541
        with pytest.raises(ValueError):
            cm.openings("cholesky")


class TestGamma:
    def test_zero_when_adversary_holds_only_basis_points(self):
        # at basis nodes with index != 0 the secret's basis polynomial
        # vanishes, so those shares explain nothing about a mask
        scenario = LeakageScenario(
            openings=10,
            threshold=3,
            basis_nodes=REF_NODES,
            adversary_alphas=(0.1, 0.3, 0.5),
            sigma_r_sq=1e4,
            sigma_beta_sq=1e5,
            sigma_x_sq=1.0,
        )
        assert gamma(scenario) == pytest.approx(0.0, abs=1e-9)

    def test_reference_value_matches_dense_oracle(self):
        # frozen from an independent joint-Gaussian conditioning oracle:
        # gamma = Var(r) - Var(r | coalition shares), via Schur complement
        # on the explicit (t+1)-variable covariance
        assert gamma(ref_scenario(6090, 1e4, 1e5)) == pytest.approx(379.7490445192894, rel=1e-9)

    def test_dense_conditioning_oracle(self):
        # rebuild gamma from first principles: shares = M (r, beta_1..t)^T
        scen = ref_scenario(6090, 1e4, 1e5)
        from mpcreg.sharing import LagrangeBasis

        m = LagrangeBasis(REF_NODES).eval_matrix(REF_ADV).T  # (t, t+1)
        cov_inputs = np.diag([1e4, 1e5, 1e5, 1e5])
        cov_shares = m @ cov_inputs @ m.T
        cross = m @ cov_inputs[:, 0]  # Cov(shares, r)
        explained = cross @ np.linalg.solve(cov_shares, cross)
        assert gamma(scen) == pytest.approx(float(explained), rel=1e-12)

    def test_below_mask_variance(self):
        g = gamma(ref_scenario(6090, 1e4, 1e5))
        assert 0.0 <= g < 1e4

    def test_common_factor_homogeneity(self):
        g1 = gamma(ref_scenario(100, 1e4, 1e5))
        g3 = gamma(ref_scenario(100, 3e4, 3e5))
        assert g3 == pytest.approx(3.0 * g1, rel=1e-9)


# six published reference entries: (openings, sigma_r^2, sigma_beta^2) -> nats
TABLE_ENTRIES = [
    (6090, 1e4, 1e5, 0.6243),
    (6090, 1e5, 1e6, 0.1110),
    (6090, 1e6, 1e7, 0.0123),
    (2541, 1e4, 1e5, 0.3558),
    (2541, 1e5, 1e6, 0.0493),
    (2541, 1e6, 1e7, 0.005),
]


class TestLeakageBound:
    @pytest.mark.parametrize("openings,sr2,sb2,expected", TABLE_ENTRIES)
    def test_reference_table(self, openings, sr2, sb2, expected):
        bound = leakage_bound(ref_scenario(openings, sr2, sb2))
        assert bound == pytest.approx(expected, abs=5e-4)

    def test_fewer_openings_leak_less(self):
        for sr2, sb2 in ((1e4, 1e5), (1e5, 1e6), (1e6, 1e7)):
            b_inv = leakage_bound(ref_scenario(6090, sr2, sb2))
            b_gau = leakage_bound(ref_scenario(2541, sr2, sb2))
            assert b_gau < b_inv

    def test_nonnegative_over_random_valid_scenarios(self):
        rng = np.random.default_rng(2718)
        checked = 0
        while checked < 1000:
            t = int(rng.integers(1, 5))
            pts = rng.uniform(0.05, 1.0, size=2 * t)
            nodes = (0.0,) + tuple(np.sort(pts[:t]))
            adv = tuple(pts[t:])
            if len(set(nodes)) != t + 1 or len(set(adv)) != t:
                continue
            sr2 = float(10 ** rng.uniform(2, 6))
            scen = LeakageScenario(
                openings=int(rng.integers(1, 10_000)),
                threshold=t,
                basis_nodes=nodes,
                adversary_alphas=adv,
                sigma_r_sq=sr2,
                sigma_beta_sq=float(10 ** rng.uniform(2, 7)),
                sigma_x_sq=float(rng.uniform(0.01, sr2 / 10)),
            )
            assert leakage_bound(scen) >= -1e-12
            checked += 1

    def test_gamma_strictly_below_mask_variance_for_positive_beta(self):
        # with sigma_beta^2 > 0 the coalition never pins a mask exactly,
        # so the bound stays finite even for tiny beta noise
        scen = ref_scenario(6090, 1e4, 1e5)
        tiny_beta = LeakageScenario(
            openings=scen.openings,
            threshold=scen.threshold,
            basis_nodes=scen.basis_nodes,
            adversary_alphas=scen.adversary_alphas,
            sigma_r_sq=scen.sigma_r_sq,
            sigma_beta_sq=1e-9,
            sigma_x_sq=scen.sigma_x_sq,
        )
        assert gamma(tiny_beta) < 1e4
        assert leakage_bound(tiny_beta) > leakage_bound(scen)

    def test_invalid_when_mask_variance_explained(self):
        # beta noise so small that gamma rounds up to sigma_r^2 itself
        scen = ref_scenario(6090, 1e4, 1e5)
        bad = LeakageScenario(
            openings=scen.openings,
            threshold=scen.threshold,
            basis_nodes=scen.basis_nodes,
            adversary_alphas=scen.adversary_alphas,
            sigma_r_sq=scen.sigma_r_sq,
            sigma_beta_sq=1e-30,
            sigma_x_sq=scen.sigma_x_sq,
        )
        with pytest.raises(InvalidScenarioError):
            leakage_bound(bad)

    def test_adversary_size_must_match_threshold(self):
        with pytest.raises(InvalidScenarioError):
            LeakageScenario(
                openings=10,
                threshold=3,
                basis_nodes=REF_NODES,
                adversary_alphas=(0.7, 0.9),
                sigma_r_sq=1e4,
                sigma_beta_sq=1e5,
                sigma_x_sq=1.0,
            )


class TestSigmaXEstimate:
    def test_published_approximation(self):
        assert sigma_x_estimate(80) == pytest.approx(3.889, abs=1e-3)
        assert round(sigma_x_estimate(80)) == 4

    def test_zero_rows(self):
        assert sigma_x_estimate(0) == 0.0

    def test_exact_multiple(self):
        assert sigma_x_estimate(144) == pytest.approx(7.0, rel=1e-12)


class TestReferenceLeak:
    def test_equal_variances(self):
        assert reference_leak(1.0, 1.0) == pytest.approx(0.3466, abs=1e-4)

    def test_vanishes_with_large_mask(self):
        assert reference_leak(1.0, 1e12) == pytest.approx(0.0, abs=1e-9)

    def test_three_to_one(self):
        assert reference_leak(3.0, 1.0) == pytest.approx(0.5 * math.log(4.0), rel=1e-12)


class TestLedgerConsistency:
    def test_scenario_from_real_runs(self):
        rng = np.random.default_rng(55)
        d = 3
        q, _ = np.linalg.qr(rng.normal(size=(d, d)))
        a = (q * np.array([1.0, 2.0, 4.0])) @ q.T
        b = rng.normal(size=d)
        policy = SharePolicy.evenly_spaced(5, 3, sigma_beta_sq=1e5)

        for solve, closed_form in ((solve_inverse_method, openings_inverse), (solve_gauss, openings_gauss)):
            session = Session(policy, sigma_r_sq=1e4, seed=7, basis_subset=(1, 2, 3))
            rep = solve(session.share_matrix(a), session.share_vector(b), session)
            adv = worst_case_adversary(policy, session.basis_subset)
            scen = LeakageScenario.from_policy(policy, session.basis, adv, rep.openings, 1e4, 4.0)
            assert scen.openings == closed_form(d)
            assert leakage_bound(scen) >= 0.0

    def test_worst_case_adversary_reference_layout(self):
        policy = SharePolicy.evenly_spaced(5, 3)
        assert worst_case_adversary(policy, (1, 2, 3)) == (3, 4, 5)
