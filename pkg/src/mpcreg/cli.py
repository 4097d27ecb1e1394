"""Batch command-line front end.

Subcommands:

* ``regress``: run the experiment grid and emit JSON/CSV (plus figures
  when writing to a file);
* ``cost``: closed-form opening counts for a system dimension;
* ``leak``: evaluate the leakage upper bound for an explicit scenario;
* ``demo``: share/reconstruct walkthrough over numbers read from stdin.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical breakdown.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import privacy
from .datasets import bundled_housing_path
from .errors import DataFormatError, InvalidScenarioError, MpcRegError, NumericalBreakdownError
from .experiments import METHODS, ExperimentSpec, run_grid
from .sharing import SharePolicy, reconstruct, share_secret

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    # usage problems exit with 1; argparse's default of 2 is reserved for data errors
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mpcreg", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_reg = sub.add_parser("regress", help="run the experiment grid")
    p_reg.add_argument("--data", default=None, help="CSV path (defaults to the packaged housing table)")
    p_reg.add_argument("--parties", type=int, default=5)
    p_reg.add_argument("--threshold", type=int, default=3)
    p_reg.add_argument("--lambda", dest="lambdas", type=float, action="append", metavar="LAMBDA",
                       help="tuning parameter; repeatable")
    p_reg.add_argument("--sigma-r2", dest="sigma_r2", type=float, action="append",
                       help="mask variance; repeatable, zipped with --sigma-beta2")
    p_reg.add_argument("--sigma-beta2", dest="sigma_beta2", type=float, action="append",
                       help="interpolation-value variance; repeatable")
    p_reg.add_argument("--method", choices=METHODS, default="secure-gauss")
    p_reg.add_argument("--repeats", type=int, default=10)
    p_reg.add_argument("--train-frac", type=float, default=0.8)
    p_reg.add_argument("--seed", type=int, default=0)
    p_reg.add_argument("--out", default=None, help="output file; figures land beside it")
    p_reg.add_argument("--format", choices=("json", "csv"), default="json")
    p_reg.add_argument("--normalize-on-train", action="store_true",
                       help="compute min-max stats on the training split only")
    p_reg.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p_cost = sub.add_parser("cost", help="closed-form opening counts")
    p_cost.add_argument("--dim", type=int, required=True)
    p_cost.add_argument("--method", choices=("inverse", "gauss", "both"), default="both")
    p_cost.add_argument("--format", choices=("text", "json"), default="text")

    p_leak = sub.add_parser("leak", help="leakage upper bound for a scenario")
    src = p_leak.add_mutually_exclusive_group(required=True)
    src.add_argument("--openings", type=int, help="opening count O")
    src.add_argument("--dim", type=int, help="derive O from a system dimension (with --method)")
    p_leak.add_argument("--method", choices=("inverse", "gauss"), default="inverse")
    p_leak.add_argument("--threshold", type=int, required=True)
    p_leak.add_argument("--alphas", required=True,
                        help="comma-separated evaluation points of all parties; "
                             "the first t of them (plus 0) form the basis")
    p_leak.add_argument("--adversary", required=True, help="comma-separated 1-based party indices")
    p_leak.add_argument("--sigma-r2", type=float, default=1e4)
    p_leak.add_argument("--sigma-beta2", type=float, default=1e5)
    p_leak.add_argument("--sigma-x2", type=float, required=True)
    p_leak.add_argument("--format", choices=("text", "json"), default="text")

    p_demo = sub.add_parser("demo", help="share/reconstruct walkthrough on stdin numbers")
    p_demo.add_argument("--parties", type=int, default=5)
    p_demo.add_argument("--threshold", type=int, default=3)
    p_demo.add_argument("--sigma-beta2", type=float, default=1e5)
    p_demo.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_regress(args) -> int:
    data = Path(args.data) if args.data else bundled_housing_path()
    if not data.exists():
        raise DataFormatError(f"no such data file: {data}")
    lambdas = tuple(args.lambdas) if args.lambdas else (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
    r2 = args.sigma_r2 if args.sigma_r2 else [1e4]
    b2 = args.sigma_beta2 if args.sigma_beta2 else [1e5]
    if len(r2) != len(b2):
        _usage_err("--sigma-r2 and --sigma-beta2 must repeat equally often")
        return EXIT_USAGE
    spec = ExperimentSpec(
        data_path=str(data),
        parties=args.parties,
        threshold=args.threshold,
        lambdas=lambdas,
        sigmas=tuple(zip(r2, b2)),
        method=args.method,
        repeats=args.repeats,
        train_frac=args.train_frac,
        seed=args.seed,
        normalize_on_train=args.normalize_on_train,
    )
    report = run_grid(spec)
    text = report.to_json() if args.format == "json" else report.to_csv()
    if args.out:
        out = Path(args.out)
        out.write_text(text, encoding="utf-8")
        print(f"wrote {out}")
        if not args.no_figures:
            from .figures import save_report_figures

            for p in save_report_figures(report, out.parent, out.stem):
                print(f"wrote {p}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _usage_err(message: str):
    print(f"mpcreg: error: {message}", file=sys.stderr)
    return True


def _cmd_cost(args) -> int:
    if args.dim < 1:
        _usage_err("--dim must be at least 1")
        return EXIT_USAGE
    rows = []
    if args.method in ("inverse", "both"):
        rows.append(("inverse", privacy.openings_inverse(args.dim), privacy.multiplications_inverse(args.dim), 0))
    if args.method in ("gauss", "both"):
        rows.append(("gauss", privacy.openings_gauss(args.dim), privacy.multiplications_gauss(args.dim),
                     privacy.inversions_gauss(args.dim)))
    if args.format == "json":
        payload = {
            "dim": args.dim,
            "methods": {
                name: {"openings": o, "multiplications": m, "inversions": i} for name, o, m, i in rows
            },
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"d = {args.dim}")
        for name, o, m, i in rows:
            print(f"  {name:>7}: openings={o}  multiplications={m}  inversions={i}")
    return EXIT_OK


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        _usage_err(f"expected a comma-separated list of numbers, got {text!r}")
        raise SystemExit(EXIT_USAGE) from None


def _cmd_leak(args) -> int:
    alphas = _parse_floats(args.alphas)
    adversary = [int(v) for v in args.adversary.split(",") if v.strip()]
    t = args.threshold
    if len(alphas) < t:
        _usage_err(f"need at least {t} evaluation points for a threshold of {t}")
        return EXIT_USAGE
    if any(not 1 <= i <= len(alphas) for i in adversary):
        _usage_err(f"adversary indices must lie in 1..{len(alphas)}")
        return EXIT_USAGE
    openings = args.openings if args.openings is not None else (
        privacy.openings_inverse(args.dim) if args.method == "inverse" else privacy.openings_gauss(args.dim)
    )
    try:
        scenario = privacy.LeakageScenario(
            openings=openings,
            threshold=t,
            basis_nodes=(0.0,) + tuple(alphas[:t]),
            adversary_alphas=tuple(alphas[i - 1] for i in adversary),
            sigma_r_sq=args.sigma_r2,
            sigma_beta_sq=args.sigma_beta2,
            sigma_x_sq=args.sigma_x2,
            adversary_indices=tuple(adversary),
        )
    except InvalidScenarioError as exc:  # bad flag combination, not a numerical failure
        _usage_err(str(exc))
        return EXIT_USAGE
    bound = privacy.leakage_bound(scenario)
    g = privacy.gamma(scenario)
    if args.format == "json":
        print(json.dumps({
            "openings": scenario.openings,
            "threshold": scenario.threshold,
            "basis_nodes": list(scenario.basis_nodes),
            "adversary": list(scenario.adversary_indices or []),
            "adversary_alphas": list(scenario.adversary_alphas),
            "sigma_r_sq": scenario.sigma_r_sq,
            "sigma_beta_sq": scenario.sigma_beta_sq,
            "sigma_x_sq": scenario.sigma_x_sq,
            "sigma_convention": "variance",
            "gamma": g,
            "leakage_bound_nats": bound,
        }, indent=2))
    else:
        print(f"openings O      = {scenario.openings}")
        print(f"basis nodes     = {list(scenario.basis_nodes)}")
        print(f"adversary       = {list(scenario.adversary_indices or [])} at {list(scenario.adversary_alphas)}")
        print(f"variances       = sigma_r^2={scenario.sigma_r_sq:g}, sigma_beta^2={scenario.sigma_beta_sq:g}, "
              f"sigma_x^2={scenario.sigma_x_sq:g} (convention: variances)")
        print(f"gamma           = {g:.6g}")
        print(f"leakage bound   = {bound:.4f} nats")
    return EXIT_OK


def _cmd_demo(args) -> int:
    import numpy as np

    rng = np.random.default_rng(args.seed)
    policy = SharePolicy.random(args.parties, args.threshold, args.sigma_beta2, rng)
    print(f"policy: n={policy.n}, t={policy.t}, alphas={[round(a, 4) for a in policy.alphas]}")
    print("reading one number per line from stdin...")
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            value = float(line)
        except ValueError:
            raise DataFormatError(f"not a number: {line!r}") from None
        shared = share_secret(value, policy, rng)
        print(f"secret {value}:")
        for i, s in enumerate(shared.shares, start=1):
            print(f"  party {i}: {s:.6f}")
        subset = sorted(int(i) for i in rng.choice(np.arange(1, policy.n + 1), size=policy.t + 1, replace=False))
        picked = [(i, float(shared.shares[i - 1])) for i in subset]
        value_back = reconstruct(picked, policy)
        print(f"  reconstructed from parties {subset}: {value_back:.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "regress":
            return _cmd_regress(args)
        if args.command == "cost":
            return _cmd_cost(args)
        if args.command == "leak":
            return _cmd_leak(args)
        return _cmd_demo(args)
    except DataFormatError as exc:
        print(f"mpcreg: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalBreakdownError as exc:
        print(f"mpcreg: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except MpcRegError as exc:
        print(f"mpcreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"mpcreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
