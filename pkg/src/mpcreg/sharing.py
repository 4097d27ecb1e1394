"""Secret sharing over the reals with a Lagrange polynomial basis.

A value ``s`` is hidden in a degree-``t`` polynomial that passes through
``(0, s)`` and through ``t`` points ``(alpha_j, beta_j)`` with Gaussian
random ``beta_j``; party ``i`` receives the evaluation at its own point
``alpha_i``. Any ``t+1`` shares reconstruct ``s`` by interpolation at 0,
while ``t`` shares reveal only a variance-bounded amount.

Everything in this module is communication-free: share generation,
reconstruction, sharewise sums, and multiplication/addition by public
constants. Interactive operations (opening, products, inversion) live in
:mod:`mpcreg.engine`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateBasisError,
    IncompatibleSharingError,
    InsufficientSharesError,
    InvalidPolicyError,
    InvalidSubsetError,
    ShapeMismatchError,
)

_MIN_NODE_GAP = 1e-12


def interpolation_weights(xs: np.ndarray, at: float = 0.0) -> np.ndarray:
    """Barycentric-style Lagrange weights: value at ``at`` = weights @ ys."""
    xs = np.asarray(xs, dtype=float)
    m = len(xs)
    w = np.empty(m)
    for j in range(m):
        diff_j = xs[j] - np.delete(xs, j)
        if np.any(np.abs(diff_j) < _MIN_NODE_GAP):
            raise DegenerateBasisError(f"coincident interpolation nodes near x={xs[j]}")
        w[j] = np.prod((at - np.delete(xs, j)) / diff_j)
    return w


@dataclass(frozen=True)
class SharePolicy:
    """Sharing parameters: party count, privacy threshold, evaluation points.

    ``alphas[i-1]`` is party ``i``'s evaluation point. All points must be
    distinct and nonzero (zero is reserved for the secret itself), and the
    threshold must satisfy ``1 <= t < n``.
    """

    n: int
    t: int
    alphas: tuple[float, ...]
    sigma_beta_sq: float = 1e5

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidPolicyError(f"need at least 2 parties, got n={self.n}")
        if not 1 <= self.t < self.n:
            raise InvalidPolicyError(f"threshold must satisfy 1 <= t < n, got t={self.t}, n={self.n}")
        if len(self.alphas) != self.n:
            raise InvalidPolicyError(f"expected {self.n} evaluation points, got {len(self.alphas)}")
        pts = np.asarray(self.alphas, dtype=float)
        if np.any(np.abs(pts) < _MIN_NODE_GAP):
            raise InvalidPolicyError("evaluation points must be nonzero (0 anchors the secret)")
        if len(np.unique(pts)) != self.n:
            raise InvalidPolicyError("evaluation points must be distinct")
        if self.sigma_beta_sq <= 0:
            raise InvalidPolicyError("sigma_beta_sq must be positive")

    @classmethod
    def random(cls, n: int, t: int, sigma_beta_sq: float, rng: np.random.Generator) -> "SharePolicy":
        """Draw evaluation points uniformly at random in [0, 1)."""
        while True:
            pts = rng.uniform(0.0, 1.0, size=n)
            if np.all(pts > _MIN_NODE_GAP) and len(np.unique(pts)) == n:
                return cls(n=n, t=t, alphas=tuple(float(p) for p in pts), sigma_beta_sq=sigma_beta_sq)

    @classmethod
    def evenly_spaced(cls, n: int, t: int, sigma_beta_sq: float = 1e5) -> "SharePolicy":
        """Deterministic points alpha_i = 0.2*i - 0.1; handy for tests and demos."""
        return cls(n=n, t=t, alphas=tuple((2 * i - 1) / 10 for i in range(1, n + 1)), sigma_beta_sq=sigma_beta_sq)


@dataclass(frozen=True)
class LagrangeBasis:
    """Lagrange basis over ``t+1`` nodes, the first of which anchors the secret.

    ``eval_at(x)`` returns the vector ``(L_0(x), ..., L_t(x))``;
    ``L_i(node_j)`` is 1 when ``i == j`` and 0 otherwise.
    """

    nodes: tuple[float, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.nodes, dtype=float)
        if len(pts) < 2:
            raise DegenerateBasisError("a basis needs at least two nodes")
        gaps = np.abs(pts[:, None] - pts[None, :])[np.triu_indices(len(pts), 1)]
        if np.any(gaps < _MIN_NODE_GAP):
            raise DegenerateBasisError("coincident basis nodes")

    def __len__(self) -> int:
        return len(self.nodes)

    def eval_one(self, i: int, x: float) -> float:
        """L_i evaluated at x via the plain product formula."""
        pts = self.nodes
        num, den = 1.0, 1.0
        for j, pj in enumerate(pts):
            if j == i:
                continue
            num *= x - pj
            den *= pts[i] - pj
        return num / den

    def eval_at(self, x: float) -> np.ndarray:
        """All basis polynomials at a single point, shape (t+1,)."""
        return self.eval_matrix((x,))[:, 0]

    def eval_matrix(self, points: Sequence[float]) -> np.ndarray:
        """All basis polynomials at several points, shape (t+1, len(points))."""
        key = tuple(points)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        pts = np.asarray(self.nodes, dtype=float)
        xs = np.asarray(points, dtype=float)
        out = np.empty((len(pts), len(xs)))
        for i in range(len(pts)):
            others = np.delete(pts, i)
            out[i] = np.prod((xs[None, :] - others[:, None]) / (pts[i] - others)[:, None], axis=0)
        self._cache[key] = out
        return out


def make_basis(policy: SharePolicy, chosen_subset: Iterable[int]) -> LagrangeBasis:
    """Basis on {0} plus the evaluation points of ``t`` chosen parties.

    ``chosen_subset`` holds 1-based party indices; duplicates or a wrong
    size raise :class:`InvalidSubsetError`.
    """
    subset = list(chosen_subset)
    if len(subset) != policy.t or len(set(subset)) != len(subset):
        raise InvalidSubsetError(f"need {policy.t} distinct party indices, got {subset}")
    if not all(1 <= i <= policy.n for i in subset):
        raise InvalidSubsetError(f"party indices must lie in 1..{policy.n}, got {subset}")
    return LagrangeBasis(nodes=(0.0,) + tuple(policy.alphas[i - 1] for i in subset))


@dataclass(frozen=True)
class SharedScalar:
    """One secret, represented by its n share values (entry i owned by party i+1).

    Supports the communication-free algebra: ``x + y``, ``x - y``, ``a + x``,
    ``a * x`` for public scalars ``a``. Share-by-share products require the
    interactive protocol in :mod:`mpcreg.engine`.
    """

    shares: np.ndarray
    policy: SharePolicy
    basis: LagrangeBasis

    def _require_compatible(self, other: "SharedScalar") -> None:
        if self.policy != other.policy:
            raise IncompatibleSharingError("operands were shared under different policies")

    def _constant_shares(self, a: float) -> np.ndarray:
        # a deterministic sharing of a public constant: all betas are zero,
        # so the share vector is a * L_0(alpha_i)
        return a * self.basis.eval_matrix(self.policy.alphas)[0]

    def __add__(self, other):
        if isinstance(other, SharedScalar):
            self._require_compatible(other)
            return SharedScalar(self.shares + other.shares, self.policy, self.basis)
        if isinstance(other, (int, float, np.floating)):
            return SharedScalar(self.shares + self._constant_shares(float(other)), self.policy, self.basis)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return SharedScalar(-self.shares, self.policy, self.basis)

    def __sub__(self, other):
        if isinstance(other, SharedScalar):
            self._require_compatible(other)
            return SharedScalar(self.shares - other.shares, self.policy, self.basis)
        if isinstance(other, (int, float, np.floating)):
            return self.__add__(-float(other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, a):
        if isinstance(a, (int, float, np.floating)):
            return SharedScalar(self.shares * float(a), self.policy, self.basis)
        return NotImplemented

    __rmul__ = __mul__

    def reconstruct(self) -> float:
        """Interpolate all n shares at 0 (no ledger involved; see Session.open)."""
        return reconstruct(list(zip(range(1, self.policy.n + 1), self.shares)), self.policy)


def share_secret(
    s: float,
    policy: SharePolicy,
    rng: np.random.Generator | None = None,
    *,
    basis: LagrangeBasis | None = None,
    betas: np.ndarray | None = None,
) -> SharedScalar:
    """Share ``s``: interpolate (0, s) and t Gaussian points, evaluate everywhere.

    When ``basis`` is omitted a fresh random t-subset of parties provides the
    interpolation nodes (a session normally fixes one basis for all of its
    sharings instead). ``betas`` is a test hook that pins the random
    interpolation values.
    """
    if basis is None:
        if rng is None:
            raise ValueError("need an rng to draw a basis subset")
        subset = rng.choice(np.arange(1, policy.n + 1), size=policy.t, replace=False)
        basis = make_basis(policy, (int(i) for i in subset))
    if betas is None:
        if rng is None:
            raise ValueError("need an rng to draw interpolation values")
        betas = rng.normal(0.0, np.sqrt(policy.sigma_beta_sq), size=policy.t)
    betas = np.asarray(betas, dtype=float)
    if betas.shape != (policy.t,):
        raise ShapeMismatchError(f"expected {policy.t} interpolation values, got shape {betas.shape}")
    values = np.concatenate(([float(s)], betas))
    shares = values @ basis.eval_matrix(policy.alphas)
    return SharedScalar(shares=shares, policy=policy, basis=basis)


def reconstruct(shares: Iterable[tuple[int, float]], policy: SharePolicy) -> float:
    """Interpolate (index, value) pairs at 0; needs at least t+1 distinct parties."""
    pairs = list(shares)
    indices = [i for i, _ in pairs]
    if len(set(indices)) != len(indices):
        raise InsufficientSharesError("duplicate party indices among the shares")
    if len(pairs) < policy.t + 1:
        raise InsufficientSharesError(f"need at least {policy.t + 1} shares, got {len(pairs)}")
    xs = np.array([policy.alphas[i - 1] for i in indices])
    ys = np.array([v for _, v in pairs], dtype=float)
    return float(interpolation_weights(xs) @ ys)


@dataclass(frozen=True)
class SharedVector:
    """Entrywise shared vector; thin wrapper over a list of SharedScalar."""

    entries: tuple[SharedScalar, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ShapeMismatchError("empty shared vector")
        pol = self.entries[0].policy
        if any(e.policy != pol for e in self.entries):
            raise IncompatibleSharingError("vector entries carry different policies")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> SharedScalar:
        return self.entries[i]

    def __add__(self, other):
        if isinstance(other, SharedVector):
            if len(other) != len(self):
                raise ShapeMismatchError("vector lengths differ")
            return SharedVector(tuple(a + b for a, b in zip(self.entries, other.entries)))
        other = np.asarray(other, dtype=float)
        if other.shape != (len(self),):
            raise ShapeMismatchError("constant vector length differs")
        return SharedVector(tuple(e + c for e, c in zip(self.entries, other)))

    __radd__ = __add__

    def __mul__(self, a):
        if isinstance(a, (int, float, np.floating)):
            return SharedVector(tuple(e * float(a) for e in self.entries))
        return NotImplemented

    __rmul__ = __mul__

    def reconstruct(self) -> np.ndarray:
        return np.array([e.reconstruct() for e in self.entries])


@dataclass(frozen=True)
class SharedMatrix:
    """Entrywise shared matrix with (rows, cols) shape metadata."""

    rows: tuple[tuple[SharedScalar, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows or not self.rows[0]:
            raise ShapeMismatchError("empty shared matrix")
        width = len(self.rows[0])
        if any(len(r) != width for r in self.rows):
            raise ShapeMismatchError("ragged shared matrix")
        pol = self.rows[0][0].policy
        if any(e.policy != pol for r in self.rows for e in r):
            raise IncompatibleSharingError("matrix entries carry different policies")

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij: tuple[int, int]) -> SharedScalar:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[SharedScalar, ...]:
        return self.rows[i]

    def __add__(self, other):
        if isinstance(other, SharedMatrix):
            if other.shape != self.shape:
                raise ShapeMismatchError(f"matrix shapes differ: {self.shape} vs {other.shape}")
            return SharedMatrix(tuple(
                tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)
            ))
        other = np.asarray(other, dtype=float)
        if other.shape != self.shape:
            raise ShapeMismatchError(f"constant matrix shape {other.shape} differs from {self.shape}")
        return SharedMatrix(tuple(
            tuple(e + float(c) for e, c in zip(r, crow)) for r, crow in zip(self.rows, other)
        ))

    __radd__ = __add__

    def __mul__(self, a):
        if isinstance(a, (int, float, np.floating)):
            return SharedMatrix(tuple(tuple(e * float(a) for e in r) for r in self.rows))
        return NotImplemented

    __rmul__ = __mul__

    def reconstruct(self) -> np.ndarray:
        return np.array([[e.reconstruct() for e in r] for r in self.rows])
