"""Communication-cost polynomials and the mutual-information leakage bound.

The two solvers have closed-form opening counts in the system dimension d
(``openings_inverse``, ``openings_gauss``); tests check them against the
ledger of real runs.

``leakage_bound`` evaluates an upper bound, in nats, on what a coalition
of t semi-honest parties learns about one aggregate entry x from a full
protocol run. The adversary's view is modeled as O independent openings
of x masked by N(0, sigma_r^2) noise plus its own shares of x and of
every mask. With gamma the portion of a mask's variance the coalition
explains from its shares, the bound is

    1/2 * ln( (sigma_r^2 - gamma + sigma_x^2*O) * det(C_xs - B)
              / ((sigma_r^2 - gamma) * prod_k sum_j L_j(alpha_k)^2 sigma_beta^2) )

with the t x t blocks C_xs (share covariance of x) and B (the opening
correction) given in closed form below, so no O-sized matrix is ever
materialized. Determinants are evaluated in log space; the variances can
span many orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidScenarioError, NumericalBreakdownError
from .sharing import LagrangeBasis, SharePolicy


def openings_inverse(d: int) -> int:
    """Total openings of the inverse method: 2d^3 + 3d^2 + d."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return 2 * d**3 + 3 * d**2 + d


def openings_gauss(d: int) -> int:
    """Total openings of pivoting-free elimination: (2/3)d^3 + (7/2)d^2 + (11/6)d.

    Always an integer; evaluated exactly as (4d^3 + 21d^2 + 11d) / 6.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    num = 4 * d**3 + 21 * d**2 + 11 * d
    q, rem = divmod(num, 6)
    if rem:  # cannot happen: 4d^3+21d^2+11d is divisible by 6 for every integer d
        raise ArithmeticError(f"non-integer opening count for d={d}")
    return q


def multiplications_inverse(d: int) -> int:
    """Explicit multiplications of the inverse method: d^3 + d^2."""
    return d**3 + d**2


def multiplications_gauss(d: int) -> int:
    """Explicit multiplications of elimination (inversions not included): d^3/3 + d^2 - d/3."""
    q, rem = divmod(d**3 + 3 * d**2 - d, 3)
    if rem:
        raise ArithmeticError(f"non-integer multiplication count for d={d}")
    return q


def inversions_gauss(d: int) -> int:
    """Inversions of elimination: (d^2 + d)/2."""
    return d * (d + 1) // 2


@dataclass(frozen=True)
class CostModel:
    """Opening/multiplication tallies for one system dimension."""

    d: int

    def openings(self, method: str) -> int:
        if method in ("inverse", "secure-inverse", "insecure-inverse"):
            return openings_inverse(self.d)
        if method in ("gauss", "secure-gauss", "insecure-gauss"):
            return openings_gauss(self.d)
        raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class LeakageScenario:
    """Everything the bound needs: openings, basis, adversary points, variances.

    ``basis_nodes`` are the t+1 interpolation abscissas with the secret
    anchor 0 first; ``adversary_alphas`` are the t evaluation points the
    coalition holds. ``adversary_indices`` is carried for reporting only.
    """

    openings: int
    threshold: int
    basis_nodes: tuple[float, ...]
    adversary_alphas: tuple[float, ...]
    sigma_r_sq: float
    sigma_beta_sq: float
    sigma_x_sq: float
    adversary_indices: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.openings < 1:
            raise InvalidScenarioError("need at least one opening")
        if self.threshold < 1:
            raise InvalidScenarioError("threshold must be at least 1")
        if len(self.adversary_alphas) != self.threshold:
            raise InvalidScenarioError(
                f"adversary holds {len(self.adversary_alphas)} points but the threshold is {self.threshold}"
            )
        if len(self.basis_nodes) != self.threshold + 1:
            raise InvalidScenarioError(
                f"expected {self.threshold + 1} basis nodes, got {len(self.basis_nodes)}"
            )
        if abs(self.basis_nodes[0]) > 1e-12:
            raise InvalidScenarioError("the first basis node must be 0 (the secret anchor)")
        if min(self.sigma_r_sq, self.sigma_beta_sq) <= 0 or self.sigma_x_sq < 0:
            raise InvalidScenarioError("variances must be positive (sigma_x_sq may be 0)")

    @classmethod
    def from_policy(
        cls,
        policy: SharePolicy,
        basis: LagrangeBasis,
        adversary_indices: Sequence[int],
        openings: int,
        sigma_r_sq: float,
        sigma_x_sq: float,
    ) -> "LeakageScenario":
        """Scenario for an actual session: coalition given by 1-based party indices."""
        idx = tuple(int(i) for i in adversary_indices)
        if len(set(idx)) != len(idx) or not all(1 <= i <= policy.n for i in idx):
            raise InvalidScenarioError(f"adversary indices must be distinct and in 1..{policy.n}")
        return cls(
            openings=openings,
            threshold=policy.t,
            basis_nodes=basis.nodes,
            adversary_alphas=tuple(policy.alphas[i - 1] for i in idx),
            sigma_r_sq=sigma_r_sq,
            sigma_beta_sq=policy.sigma_beta_sq,
            sigma_x_sq=sigma_x_sq,
            adversary_indices=idx,
        )

    def _basis_at_adversary(self) -> tuple[np.ndarray, np.ndarray]:
        """(L_0 values, L_1..L_t values) at the adversary's points."""
        basis = LagrangeBasis(self.basis_nodes)
        m = basis.eval_matrix(self.adversary_alphas)  # (t+1, t)
        return m[0], m[1:].T  # (t,), (t, t)


def worst_case_adversary(policy: SharePolicy, basis_subset: Sequence[int]) -> tuple[int, ...]:
    """The t-coalition holding every share outside the basis subset.

    Parties whose points are not interpolation nodes hold shares that carry
    secret-dependent information, so they all join; the coalition is topped
    up to size t with the highest-indexed basis parties.
    """
    outside = sorted(set(range(1, policy.n + 1)) - set(basis_subset))
    if len(outside) > policy.t:
        outside = outside[-policy.t :]
    fill = sorted(set(basis_subset), reverse=True)[: policy.t - len(outside)]
    return tuple(sorted(outside + list(fill)))


def gamma(scenario: LeakageScenario) -> float:
    """Variance of one mask explained by the coalition's shares of it.

    Equals Var(r) - Var(r | shares) for the joint Gaussian of a mask
    r ~ N(0, sigma_r^2) and the coalition's share vector; always in
    [0, sigma_r^2), strictly below whenever sigma_beta^2 > 0.
    """
    l0, lrest = scenario._basis_at_adversary()
    cov = np.outer(l0, l0) * scenario.sigma_r_sq + (lrest * scenario.sigma_beta_sq) @ lrest.T
    try:
        solved = np.linalg.solve(cov, l0)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdownError("singular share covariance (coincident adversary points)") from exc
    return float(scenario.sigma_r_sq**2 * (l0 @ solved))


def leakage_bound(scenario: LeakageScenario) -> float:
    """Upper bound, in nats, on the coalition's information about one entry."""
    g = gamma(scenario)
    sr2, sb2, sx2 = scenario.sigma_r_sq, scenario.sigma_beta_sq, scenario.sigma_x_sq
    o = scenario.openings
    if sr2 <= g:
        raise InvalidScenarioError(
            f"mask variance {sr2} does not exceed the explained variance {g}; bound undefined"
        )
    l0, lrest = scenario._basis_at_adversary()
    beta_var = np.sum(lrest**2, axis=1) * sb2  # share variance of x given x, per adversary point
    c_xs = np.outer(l0, l0) * sx2
    np.fill_diagonal(c_xs, l0**2 * sx2 + beta_var)
    b = (o * sx2**2 / (sr2 - g + o * sx2)) * np.outer(l0, l0)
    sign, logdet = np.linalg.slogdet(c_xs - b)
    if sign <= 0:
        raise NumericalBreakdownError("share-covariance determinant is not positive")
    log_num = math.log(sr2 - g + sx2 * o) + float(logdet)
    log_den = math.log(sr2 - g) + float(np.sum(np.log(beta_var)))
    return 0.5 * (log_num - log_den)


def sigma_x_estimate(n_rows: float, feature_range: tuple[float, float] = (0.0, 1.0)) -> float:
    """Variance of one Gram-aggregate entry: n_rows products of two U[lo,hi] draws.

    A product of two independent U[0,1] variables has variance 7/144 and a
    sum of ``n_rows`` of them scales that linearly; other ranges go through
    the raw moments of U[lo,hi].
    """
    if n_rows < 0:
        raise ValueError("row count must be nonnegative")
    lo, hi = feature_range
    width = hi - lo
    if width <= 0:
        raise ValueError("feature range must be nondegenerate")
    if (lo, hi) != (0.0, 1.0):
        # variance of U[lo,hi]*U[lo,hi] via raw moments
        m1, m2 = (lo + hi) / 2.0, (lo * lo + lo * hi + hi * hi) / 3.0
        return float(n_rows) * (m2 * m2 - (m1 * m1) ** 2)
    return float(n_rows) * 7.0 / 144.0


def reference_leak(sigma_x_sq: float, sigma_r_sq: float) -> float:
    """Exact mutual information, in nats, of one additively masked Gaussian value."""
    if sigma_x_sq <= 0 or sigma_r_sq <= 0:
        raise ValueError("variances must be positive")
    return 0.5 * math.log(1.0 + sigma_x_sq / sigma_r_sq)
