"""Linear regression target: local aggregation, secure system assembly, oracle.

The model is ``f(x) = w . x`` with squared loss and a Gaussian prior
N(mu_w, Sigma_w) on the weights; maximizing the Gibbs posterior reduces
to one symmetric positive definite linear system,

    ((2*lam/N) * sum_i X_i + inv(Sigma_w)) w = (2*lam/N) * sum_i z_i + inv(Sigma_w) mu_w,

where party i contributes only its Gram aggregates X_i = sum x x^T and
z_i = sum x y. Assembly over sharings is communication-free (sums,
scalings and public constants only); the actual solve lives in
:mod:`mpcreg.solver`. ``closed_form_solve`` is the plaintext oracle every
secure path is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .engine import Session
from .errors import NotPositiveDefiniteError, ShapeMismatchError
from .sharing import SharedMatrix, SharedVector


@dataclass(frozen=True)
class PartyDataset:
    """One party's rows: features (n_i, d) and targets (n_i,)."""

    features: np.ndarray
    targets: np.ndarray
    index: int = 0

    def __post_init__(self) -> None:
        f = np.asarray(self.features, dtype=float)
        t = np.asarray(self.targets, dtype=float)
        if f.ndim != 2 or t.ndim != 1 or f.shape[0] != t.shape[0]:
            raise ShapeMismatchError(f"features {f.shape} and targets {t.shape} do not align")
        if f.shape[0] == 0:
            raise ShapeMismatchError("a party dataset needs at least one row")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "targets", t)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class PriorSpec:
    """Gaussian prior on the weights; covariance must be symmetric positive definite."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mu = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.covariance, dtype=float)
        if mu.ndim != 1 or cov.shape != (mu.size, mu.size):
            raise ShapeMismatchError(f"prior mean {mu.shape} and covariance {cov.shape} do not align")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise NotPositiveDefiniteError("prior covariance is not symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError("prior covariance is not positive definite") from exc
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "covariance", cov)

    @classmethod
    def standard(cls, dim: int) -> "PriorSpec":
        """Zero mean, identity covariance."""
        return cls(mean=np.zeros(dim), covariance=np.eye(dim))

    @property
    def dim(self) -> int:
        return self.mean.size

    def precision(self) -> np.ndarray:
        """inv(Sigma_w), computed through the Cholesky factor."""
        c, low = scipy.linalg.cho_factor(self.covariance)
        return scipy.linalg.cho_solve((c, low), np.eye(self.dim))


@dataclass(frozen=True)
class RegressionConfig:
    """Tuning parameter, total sample count and the agreed public prior."""

    lam: float
    total_samples: int
    prior: PriorSpec

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.total_samples < 1:
            raise ValueError("total sample count must be at least 1")


@dataclass(frozen=True)
class Aggregates:
    """Per-party Gram matrix and moment vector: X_i = sum x x^T, z_i = sum x y."""

    xx: np.ndarray
    xy: np.ndarray


def local_aggregate(party: PartyDataset) -> Aggregates:
    """Gram aggregates of one party's rows; the only statistics ever shared."""
    f, t = party.features, party.targets
    xx = f.T @ f
    xx = np.triu(xx) + np.triu(xx, 1).T  # bitwise-exact symmetry
    return Aggregates(xx=xx, xy=f.T @ t)


def share_aggregates(aggs: Sequence[Aggregates], session: Session) -> list[tuple[SharedMatrix, SharedVector]]:
    """Each party shares its aggregates entrywise under the session policy."""
    return [(session.share_matrix(a.xx), session.share_vector(a.xy)) for a in aggs]


def assemble_system(
    shared_aggs: Sequence[tuple[SharedMatrix, SharedVector]],
    config: RegressionConfig,
    session: Session,
) -> tuple[SharedMatrix, SharedVector]:
    """Build the shared SPD system (A, b) from shared aggregates; zero openings.

    The prior is public, so inv(Sigma_w) and inv(Sigma_w) mu_w enter as
    plaintext constants; everything else is sharewise sums and scalings.
    """
    if not shared_aggs:
        raise ShapeMismatchError("no aggregates to assemble")
    d = config.prior.dim
    if shared_aggs[0][0].shape != (d, d) or len(shared_aggs[0][1]) != d:
        raise ShapeMismatchError(
            f"aggregates of shape {shared_aggs[0][0].shape} do not match prior dimension {d}"
        )
    scale = 2.0 * config.lam / config.total_samples
    xx_sum = shared_aggs[0][0]
    xy_sum = shared_aggs[0][1]
    for xx, xy in shared_aggs[1:]:
        xx_sum = xx_sum + xx
        xy_sum = xy_sum + xy
    precision = config.prior.precision()
    a = scale * xx_sum + precision
    b = scale * xy_sum + precision @ config.prior.mean
    return a, b


def plain_system(aggs: Sequence[Aggregates], config: RegressionConfig) -> tuple[np.ndarray, np.ndarray]:
    """The same (A, b) in plaintext; reference for the shared assembly."""
    xx = sum(a.xx for a in aggs)
    xy = sum(a.xy for a in aggs)
    scale = 2.0 * config.lam / config.total_samples
    precision = config.prior.precision()
    return scale * xx + precision, scale * xy + precision @ config.prior.mean


def closed_form_solve(aggs: Sequence[Aggregates], config: RegressionConfig) -> np.ndarray:
    """Ground-truth weights by direct factorization of the plaintext system."""
    a, b = plain_system(aggs, config)
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:  # cannot happen with an SPD prior
        raise NotPositiveDefiniteError("assembled system is numerically singular") from exc


def predict(w: np.ndarray, x: np.ndarray) -> float:
    """Linear prediction w . x."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    if w.shape != x.shape:
        raise ShapeMismatchError(f"weights {w.shape} and features {x.shape} do not align")
    return float(w @ x)


def mse(w: np.ndarray, features: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared residual of w over a test set."""
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if features.shape[1] != np.asarray(w).size or features.shape[0] != targets.size:
        raise ShapeMismatchError("test set does not align with the weight vector")
    r = features @ np.asarray(w, dtype=float) - targets
    return float(np.mean(r * r))
