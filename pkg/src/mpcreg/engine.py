"""Simulated multi-party session: preprocessing, interactive primitives, cost ledger.

A :class:`Session` plays all n parties plus a trusted dealer in-process.
The dealer hands out Beaver triples, random masks and random matrices
(free of charge: preprocessing is not online communication). The
interactive primitives (opening a value, multiplying two sharings,
inverting a sharing) each move the :class:`OpeningLedger`, which is the
ground truth for every communication-cost claim made elsewhere.

Ledger bookkeeping: an opening broadcasts one share per party. A
multiplication opens its two masked differences (2 openings); an
inversion runs one multiplication and opens the masked product (3
openings total, recorded as +1 multiplication, +1 inversion). Everything
else is local.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import IncompatibleSharingError, NearSingularMaskError, ShapeMismatchError
from .sharing import (
    LagrangeBasis,
    SharedMatrix,
    SharedScalar,
    SharedVector,
    SharePolicy,
    interpolation_weights,
    make_basis,
)

_POOL_BATCH = 256


@dataclass
class OpeningLedger:
    """Monotone counters for every communication-bearing event.

    The invariant ``openings == 2*multiplications + inversions + direct_opens``
    holds by construction; ``multiplications`` includes the multiplication
    embedded in each inversion.
    """

    openings: int = 0
    multiplications: int = 0
    inversions: int = 0
    direct_opens: int = 0

    def snapshot(self) -> "OpeningLedger":
        return replace(self)

    def since(self, before: "OpeningLedger") -> "OpeningLedger":
        return OpeningLedger(
            openings=self.openings - before.openings,
            multiplications=self.multiplications - before.multiplications,
            inversions=self.inversions - before.inversions,
            direct_opens=self.direct_opens - before.direct_opens,
        )

    def identity_holds(self) -> bool:
        return self.openings == 2 * self.multiplications + self.inversions + self.direct_opens

    def broadcast_bytes(self, n_parties: int, share_bytes: int = 8) -> int:
        """Traffic estimate: every opening sends each of n shares to n-1 peers."""
        return self.openings * n_parties * (n_parties - 1) * share_bytes


@dataclass(frozen=True)
class BeaverTriple:
    """Preprocessed sharings (a, b, c) with c = a*b."""

    a: SharedScalar
    b: SharedScalar
    c: SharedScalar


@dataclass(frozen=True)
class RandomMask:
    """Preprocessed sharing of a zero-mean Gaussian mask."""

    r: SharedScalar


class Session:
    """Single protocol run: one policy, one basis subset, one RNG, one ledger.

    All randomness (interpolation values, triples, masks) derives from the
    session seed, so identical seeds and inputs replay bit-identically.
    A session is single-threaded; run independent sessions for parallelism.
    """

    def __init__(
        self,
        policy: SharePolicy,
        sigma_r_sq: float = 1e4,
        seed: int | None = None,
        rng: np.random.Generator | None = None,
        basis_subset: tuple[int, ...] | None = None,
        eps_singular: float = 1e-12,
        max_retries: int = 3,
    ) -> None:
        if sigma_r_sq <= 0:
            raise ValueError("sigma_r_sq must be positive")
        self.policy = policy
        self.sigma_r_sq = float(sigma_r_sq)
        self.rng = rng if rng is not None else np.random.default_rng(seed)
        if basis_subset is None:
            drawn = self.rng.choice(np.arange(1, policy.n + 1), size=policy.t, replace=False)
            basis_subset = tuple(int(i) for i in drawn)
        self.basis_subset = tuple(basis_subset)
        self.basis: LagrangeBasis = make_basis(policy, self.basis_subset)
        self.eps_singular = float(eps_singular)
        self.max_retries = int(max_retries)
        self.ledger = OpeningLedger()
        self._party_eval = self.basis.eval_matrix(policy.alphas)  # (t+1, n)
        self._open_weights = interpolation_weights(np.asarray(policy.alphas))
        self._triples: list[BeaverTriple] = []
        self._masks: list[RandomMask] = []

    # -- sharing -------------------------------------------------------

    def share(self, value: float) -> SharedScalar:
        return self.share_many([value])[0]

    def share_many(self, values) -> list[SharedScalar]:
        """Share a flat sequence of secrets under the session basis."""
        vals = np.asarray(values, dtype=float).ravel()
        t = self.policy.t
        points = np.empty((len(vals), t + 1))
        points[:, 0] = vals
        points[:, 1:] = self.rng.normal(0.0, np.sqrt(self.policy.sigma_beta_sq), size=(len(vals), t))
        all_shares = points @ self._party_eval
        return [SharedScalar(row, self.policy, self.basis) for row in all_shares]

    def share_vector(self, values) -> SharedVector:
        return SharedVector(tuple(self.share_many(values)))

    def share_matrix(self, matrix) -> SharedMatrix:
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2:
            raise ShapeMismatchError(f"expected a 2-d array, got shape {m.shape}")
        flat = self.share_many(m.ravel())
        it = iter(flat)
        return SharedMatrix(tuple(tuple(next(it) for _ in range(m.shape[1])) for _ in range(m.shape[0])))

    # -- preprocessing (dealer; not counted as communication) ----------

    def _refill_triples(self) -> None:
        sig = np.sqrt(self.sigma_r_sq)
        a = self.rng.normal(0.0, sig, size=_POOL_BATCH)
        b = self.rng.normal(0.0, sig, size=_POOL_BATCH)
        sa = self.share_many(a)
        sb = self.share_many(b)
        sc = self.share_many(a * b)
        self._triples.extend(BeaverTriple(x, y, z) for x, y, z in zip(sa, sb, sc))

    def deal_triple(self) -> BeaverTriple:
        if not self._triples:
            self._refill_triples()
        return self._triples.pop()

    def deal_mask(self) -> RandomMask:
        if not self._masks:
            draws = self.rng.normal(0.0, np.sqrt(self.sigma_r_sq), size=_POOL_BATCH)
            self._masks.extend(RandomMask(s) for s in self.share_many(draws))
        return self._masks.pop()

    def deal_random_matrix(self, d: int) -> SharedMatrix:
        entries = self.rng.normal(0.0, np.sqrt(self.sigma_r_sq), size=(d, d))
        return self.share_matrix(entries)

    # -- interactive primitives ----------------------------------------

    def _broadcast(self, x: SharedScalar) -> float:
        # every opening is a broadcast of all n shares; interpolation over
        # all n points is exact for the degree-<=t sharing polynomial
        self.ledger.openings += 1
        return float(x.shares @ self._open_weights)

    def open(self, x: SharedScalar) -> float:
        """Reveal a shared value to everyone; one ledger opening."""
        if x.policy != self.policy:
            raise IncompatibleSharingError("value was shared under a different policy than this session")
        self.ledger.direct_opens += 1
        return self._broadcast(x)

    def open_vector(self, xs: SharedVector) -> np.ndarray:
        return np.array([self.open(e) for e in xs.entries])

    def open_matrix(self, xs: SharedMatrix) -> np.ndarray:
        return np.array([[self.open(e) for e in row] for row in xs.rows])

    def beaver_multiply(self, x: SharedScalar, y: SharedScalar, triple: BeaverTriple | None = None) -> SharedScalar:
        """[x]*[y] via a preprocessed triple; opens the two masked differences."""
        trip = triple if triple is not None else self.deal_triple()
        d = self._broadcast(x - trip.a)
        e = self._broadcast(y - trip.b)
        self.ledger.multiplications += 1
        return d * trip.b + e * trip.a + trip.c + d * e

    def secure_invert(self, x: SharedScalar, mask: RandomMask | None = None) -> SharedScalar:
        """[1/x] by opening the mask product r*x and scaling [r] by its inverse.

        Retries with a fresh mask when |r*x| falls below ``eps_singular``
        (at most ``max_retries`` attempts; a caller-forced mask is tried once).
        """
        attempts = 1 if mask is not None else self.max_retries
        for _ in range(attempts):
            m = mask if mask is not None else self.deal_mask()
            rx_shared = self.beaver_multiply(m.r, x)
            self.ledger.inversions += 1
            rx = self._broadcast(rx_shared)
            if abs(rx) >= self.eps_singular:
                return (1.0 / rx) * m.r
        raise NearSingularMaskError(
            f"masked product stayed below {self.eps_singular} after {attempts} attempt(s)"
        )

    def secure_mat_mul(self, x: SharedMatrix, y: SharedMatrix | SharedVector):
        """Shared matrix product, entry by entry: exactly rows*inner*cols multiplications."""
        n_rows, inner = x.shape
        if isinstance(y, SharedVector):
            if len(y) != inner:
                raise ShapeMismatchError(f"cannot multiply {x.shape} by vector of length {len(y)}")
            out = []
            for i in range(n_rows):
                acc = self.beaver_multiply(x[i, 0], y[0])
                for l in range(1, inner):
                    acc = acc + self.beaver_multiply(x[i, l], y[l])
                out.append(acc)
            return SharedVector(tuple(out))
        if isinstance(y, SharedMatrix):
            y_rows, n_cols = y.shape
            if y_rows != inner:
                raise ShapeMismatchError(f"cannot multiply {x.shape} by {y.shape}")
            rows = []
            for i in range(n_rows):
                row = []
                for j in range(n_cols):
                    acc = self.beaver_multiply(x[i, 0], y[0, j])
                    for l in range(1, inner):
                        acc = acc + self.beaver_multiply(x[i, l], y[l, j])
                    row.append(acc)
                rows.append(tuple(row))
            return SharedMatrix(tuple(rows))
        raise ShapeMismatchError(f"cannot multiply a shared matrix by {type(y).__name__}")


def mat_mul_plain_shared(m: np.ndarray, x: SharedMatrix) -> SharedMatrix:
    """Public matrix times shared matrix; pure linear algebra on shares, no ledger."""
    m = np.asarray(m, dtype=float)
    x_rows, x_cols = x.shape
    if m.ndim != 2 or m.shape[1] != x_rows:
        raise ShapeMismatchError(f"cannot multiply plaintext {m.shape} by shared {x.shape}")
    ref = x[0, 0]
    stack = np.array([[e.shares for e in row] for row in x.rows])  # (rows, cols, n)
    out = np.einsum("im,mkn->ikn", m, stack)
    return SharedMatrix(tuple(
        tuple(SharedScalar(out[i, k], ref.policy, ref.basis) for k in range(x_cols))
        for i in range(m.shape[0])
    ))
