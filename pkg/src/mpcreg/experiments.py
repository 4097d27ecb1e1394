"""Experiment grid: repeated evaluations over (lambda, sigma) cells.

Each repeat reshuffles the data, splits 80/20 (by default), deals the
training rows round-robin to the parties and aggregates locally; each
grid cell then runs the chosen solver (the secure ones inside a fresh
session with its own evaluation points, basis and preprocessing) and
scores mean squared error on the held-out rows. Splits depend only on
(seed, repeat), so secure and insecure runs of the same cell see the
same data.

Reports are deterministic: identical spec and seed produce byte-identical
JSON. Solver breakdowns in individual repeats are recorded per cell as
failure counts rather than aborting the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path

import numpy as np

from . import privacy
from .datasets import (
    Dataset,
    apply_minmax,
    load_csv,
    minmax_stats,
    normalize,
    partition_round_robin,
    split_and_partition,
    train_test_split,
    with_bias,
)
from .engine import Session
from .errors import NumericalBreakdownError
from .regression import (
    PriorSpec,
    RegressionConfig,
    assemble_system,
    closed_form_solve,
    local_aggregate,
    mse,
    plain_system,
    share_aggregates,
)
from .sharing import SharePolicy
from .solver import (
    METHOD_INSECURE_GAUSS,
    METHOD_INSECURE_INVERSE,
    METHOD_SECURE_GAUSS,
    METHOD_SECURE_INVERSE,
    insecure_gauss,
    insecure_inverse,
    solve_gauss,
    solve_inverse_method,
)

METHODS = (
    METHOD_SECURE_GAUSS,
    METHOD_SECURE_INVERSE,
    METHOD_INSECURE_GAUSS,
    METHOD_INSECURE_INVERSE,
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One grid: dataset, party layout, lambda and sigma axes, repeat count."""

    data_path: str
    parties: int = 5
    threshold: int = 3
    lambdas: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
    sigmas: tuple[tuple[float, float], ...] = ((1e4, 1e5),)  # (sigma_r^2, sigma_beta^2)
    method: str = METHOD_SECURE_GAUSS
    repeats: int = 10
    train_frac: float = 0.8
    seed: int = 0
    normalize_on_train: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.parties < 2:
            raise ValueError("need at least 2 parties")
        if not 1 <= self.threshold < self.parties:
            raise ValueError("threshold must satisfy 1 <= t < parties")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not 0.0 < self.train_frac < 1.0:
            raise ValueError("train fraction must lie strictly between 0 and 1")
        if not self.lambdas:
            raise ValueError("need at least one lambda value")
        if not self.sigmas:
            raise ValueError("need at least one (sigma_r^2, sigma_beta^2) pair")
        if any(l < 0 for l in self.lambdas):
            raise ValueError("lambda values must be nonnegative")
        if any(sr <= 0 or sb <= 0 for sr, sb in self.sigmas):
            raise ValueError("sigma values must be positive")

    @property
    def secure(self) -> bool:
        return self.method in (METHOD_SECURE_GAUSS, METHOD_SECURE_INVERSE)


@dataclass
class CellResult:
    """Outcome of one (lambda, sigma) cell across all repeats."""

    lam: float
    sigma_r_sq: float
    sigma_beta_sq: float
    mses: list[float] = field(default_factory=list)
    failures: int = 0
    openings: int = 0
    multiplications: int = 0
    inversions: int = 0
    leakage_nats: float | None = None

    @property
    def mean_mse(self) -> float | None:
        return float(np.mean(self.mses)) if self.mses else None

    @property
    def std_mse(self) -> float | None:
        if not self.mses:
            return None
        return float(np.std(self.mses, ddof=1)) if len(self.mses) > 1 else 0.0


@dataclass
class ExperimentReport:
    """Grid results plus the labeling needed to read them unambiguously."""

    spec: ExperimentSpec
    n_rows: int
    n_features: int
    cells: list[CellResult]

    conventions = {
        "sigma_convention": "variance",
        "partition": "round-robin",
        "leakage_unit": "nats",
    }

    def _payload(self) -> dict:
        return {
            "spec": {
                "data_path": str(self.spec.data_path),
                "parties": self.spec.parties,
                "threshold": self.spec.threshold,
                "method": self.spec.method,
                "repeats": self.spec.repeats,
                "train_frac": self.spec.train_frac,
                "seed": self.spec.seed,
                "normalize_on_train": self.spec.normalize_on_train,
            },
            "dataset": {"rows": self.n_rows, "features": self.n_features},
            "conventions": dict(
                self.conventions,
                normalization="train-only minmax" if self.spec.normalize_on_train else "full-dataset minmax",
            ),
            "cells": [
                {
                    "method": self.spec.method,
                    "lambda": c.lam,
                    "sigma_r_sq": c.sigma_r_sq,
                    "sigma_beta_sq": c.sigma_beta_sq,
                    "mean_mse": c.mean_mse,
                    "std_mse": c.std_mse,
                    "repeats": len(c.mses),
                    "failures": c.failures,
                    "openings": c.openings,
                    "multiplications": c.multiplications,
                    "inversions": c.inversions,
                    # broadcast model: n shares of 8 bytes to n-1 peers per opening
                    "opening_bytes": c.openings * self.spec.parties * (self.spec.parties - 1) * 8,
                    "leakage_nats": c.leakage_nats,
                }
                for c in self.cells
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self._payload(), indent=2) + "\n"

    def to_csv(self) -> str:
        out = StringIO()
        cols = (
            "method,lambda,sigma_r_sq,sigma_beta_sq,mean_mse,std_mse,repeats,failures,"
            "openings,multiplications,inversions,leakage_nats,sigma_convention"
        )
        out.write(cols + "\n")
        for c in self.cells:
            fields = [
                self.spec.method,
                repr(c.lam),
                repr(c.sigma_r_sq),
                repr(c.sigma_beta_sq),
                "" if c.mean_mse is None else repr(c.mean_mse),
                "" if c.std_mse is None else repr(c.std_mse),
                str(len(c.mses)),
                str(c.failures),
                str(c.openings),
                str(c.multiplications),
                str(c.inversions),
                "" if c.leakage_nats is None else repr(c.leakage_nats),
                "variance",
            ]
            out.write(",".join(fields) + "\n")
        return out.getvalue()

    def write(self, path, fmt: str = "json") -> Path:
        path = Path(path)
        text = self.to_json() if fmt == "json" else self.to_csv()
        path.write_text(text, encoding="utf-8")
        return path


def _repeat_data(base: Dataset, raw: Dataset, spec: ExperimentSpec, repeat: int):
    """Split (and, per spec, normalize) one repeat; returns (parties, test)."""
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, repeat]))
    if spec.normalize_on_train:
        train_raw, test_raw = train_test_split(raw, spec.train_frac, rng)
        stats = minmax_stats(train_raw)
        train = with_bias(apply_minmax(train_raw, stats))
        test = with_bias(apply_minmax(test_raw, stats))
        return partition_round_robin(train, spec.parties), test
    return split_and_partition(base, spec.parties, spec.train_frac, rng)


def _run_secure_cell(spec, aggs, config, cell, repeat, lam_i, sig_i, mean_party_rows):
    seed = np.random.SeedSequence([spec.seed, repeat, lam_i, sig_i, 1])
    rng = np.random.default_rng(seed)
    policy = SharePolicy.random(spec.parties, spec.threshold, cell.sigma_beta_sq, rng)
    session = Session(policy, sigma_r_sq=cell.sigma_r_sq, rng=rng)
    shared = share_aggregates(aggs, session)
    a, b = assemble_system(shared, config, session)
    solve = solve_gauss if spec.method == METHOD_SECURE_GAUSS else solve_inverse_method
    report = solve(a, b, session)
    if cell.openings == 0:
        cell.openings = report.openings
        cell.multiplications = report.multiplications
        cell.inversions = report.inversions
        scenario = privacy.LeakageScenario.from_policy(
            policy,
            session.basis,
            privacy.worst_case_adversary(policy, session.basis_subset),
            report.openings,
            cell.sigma_r_sq,
            privacy.sigma_x_estimate(mean_party_rows),
        )
        cell.leakage_nats = privacy.leakage_bound(scenario)
    return report.w


def run_grid(spec: ExperimentSpec, dataset: Dataset | None = None) -> ExperimentReport:
    """Run every (lambda, sigma) cell for ``spec.repeats`` shuffled splits."""
    raw = dataset if dataset is not None else load_csv(spec.data_path)
    base = with_bias(normalize(raw))
    cells = [
        CellResult(lam=lam, sigma_r_sq=sr, sigma_beta_sq=sb)
        for lam in spec.lambdas
        for sr, sb in spec.sigmas
    ]
    for repeat in range(spec.repeats):
        parties, test = _repeat_data(base, raw, spec, repeat)
        aggs = [local_aggregate(p) for p in parties]
        n_total = sum(p.n_rows for p in parties)
        mean_party_rows = n_total / spec.parties
        prior = PriorSpec.standard(parties[0].dim)
        idx = 0
        for lam_i, lam in enumerate(spec.lambdas):
            config = RegressionConfig(lam=lam, total_samples=n_total, prior=prior)
            for sig_i in range(len(spec.sigmas)):
                cell = cells[idx]
                idx += 1
                try:
                    if spec.method == METHOD_INSECURE_GAUSS:
                        w = insecure_gauss(*plain_system(aggs, config))
                    elif spec.method == METHOD_INSECURE_INVERSE:
                        w = insecure_inverse(*plain_system(aggs, config))
                    else:
                        w = _run_secure_cell(
                            spec, aggs, config, cell, repeat, lam_i, sig_i, mean_party_rows
                        )
                except NumericalBreakdownError:
                    cell.failures += 1
                    continue
                cell.mses.append(mse(w, test.features, test.targets))
    return ExperimentReport(spec=spec, n_rows=raw.n_rows, n_features=raw.n_features, cells=cells)


def closed_form_reference(spec: ExperimentSpec, dataset: Dataset | None = None) -> list[float]:
    """Per-lambda mean MSE of the direct factorization oracle on the same splits."""
    raw = dataset if dataset is not None else load_csv(spec.data_path)
    base = with_bias(normalize(raw))
    means: list[list[float]] = [[] for _ in spec.lambdas]
    for repeat in range(spec.repeats):
        parties, test = _repeat_data(base, raw, spec, repeat)
        aggs = [local_aggregate(p) for p in parties]
        n_total = sum(p.n_rows for p in parties)
        prior = PriorSpec.standard(parties[0].dim)
        for lam_i, lam in enumerate(spec.lambdas):
            w = closed_form_solve(aggs, RegressionConfig(lam=lam, total_samples=n_total, prior=prior))
            means[lam_i].append(mse(w, test.features, test.targets))
    return [float(np.mean(m)) for m in means]
