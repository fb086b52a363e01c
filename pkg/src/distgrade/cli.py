"""Command line: ``distgrade grade`` and ``distgrade test``.

Exit status: 0 success, 1 usage error, 2 data error, 3 computation error.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from pathlib import Path

from .dataset import Scenario, read_long_csv, table1_fixture
from .distributions import NormalParams
from .exceptions import ComputationError, DataError, DistgradeError
from .kstest import DEFAULT_ALPHA, PMethod, ks_normality_test
from .report import FORMATS, ecdf_plot_data, grade_dataset, render_svg, render_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_COMPUTE = 0, 1, 2, 3
SEED_ENV = "DISTGRADE_SEED"
DEFAULT_REPS = 10_000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _alpha(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _reps(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid reps {text!r}") from None
    if v < 100:
        raise argparse.ArgumentTypeError("reps must be >= 100")
    return v


def _common(p):
    p.add_argument("input", nargs="?", help="long-format CSV (variable,scenario,value)")
    p.add_argument("--fixture", action="store_true", help="use the bundled Table 1 data")
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA,
                   help="significance level; reject only when p < alpha, so p == alpha is not "
                        "rejected (default 0.05)")
    p.add_argument("--method", choices=("exact", "asymptotic", "montecarlo"), default="exact",
                   help="p-value method (default exact)")
    p.add_argument("--reps", type=_reps, default=DEFAULT_REPS,
                   help="Monte Carlo replicates (default 10000)")
    p.add_argument("--seed", type=_seed, default=None,
                   help=f"Monte Carlo seed (default ${SEED_ENV}, else 0)")
    p.add_argument("--allow-fallback", action="store_true",
                   help="use the asymptotic p-value when n exceeds the exact-method cap")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.add_argument("-o", "--output", help="write the table here instead of stdout")


def build_parser():
    parser = _Parser(prog="distgrade", description="Kolmogorov-Smirnov grading of vector data.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("grade", help="test every variable/scenario of a dataset")
    _common(g)
    g.add_argument("--no-two-sample", dest="two_sample", action="store_false",
                   help="skip the baseline-vs-P2M comparisons")
    g.add_argument("--plots-dir", help="write one SVG per variable/scenario here")

    t = sub.add_parser("test", help="normality test of one variable/scenario")
    _common(t)
    t.add_argument("--variable", required=True)
    t.add_argument("--scenario", required=True, help="baseline | p2m (or the full labels)")
    t.add_argument("--mu", type=float)
    t.add_argument("--sigma", type=float)
    return parser


def _method(args):
    if args.method != "montecarlo":
        return PMethod(args.method)
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = _seed(env) if env is not None else 0
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{SEED_ENV}: {exc}") from None
    return PMethod.monte_carlo(args.reps, seed)


def _load(args):
    if args.fixture == (args.input is not None):
        raise UsageError("exactly one of INPUT or --fixture is required")
    if args.fixture:
        return table1_fixture()
    try:
        return read_long_csv(args.input)
    except OSError as exc:
        raise DataError(f"{args.input}: {exc.strerror}") from None


def _emit(text, args, out):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)


def _cmd_grade(args, out):
    ds = _load(args)
    results = grade_dataset(
        ds, args.alpha, _method(args), args.two_sample, allow_fallback=args.allow_fallback
    )
    _emit(render_table(results, args.format), args, out)
    if args.plots_dir:
        d = Path(args.plots_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in results:
            if r.normal_params is None:
                continue
            series = ecdf_plot_data(
                ds[r.variable, Scenario(r.scenario)], r.normal_params, r.variable, r.scenario
            )
            (d / f"{r.variable}_{r.scenario}.svg").write_text(render_svg(series), encoding="utf-8")


def _cmd_test(args, out):
    if (args.mu is None) != (args.sigma is None):
        raise UsageError("--mu and --sigma must be given together")
    params = None
    if args.mu is not None:
        try:
            params = NormalParams(args.mu, args.sigma)
        except ValueError as exc:
            raise UsageError(f"--sigma/--mu: {exc}") from None
    method = _method(args)
    ds = _load(args)
    if args.variable not in ds:
        raise DataError(
            f"unknown variable {args.variable!r}; available: {', '.join(ds.variables())}"
        )
    try:
        scen = Scenario.parse(args.scenario)
    except ValueError:
        scen = None
    series = ds.series(args.variable)
    if scen not in series:
        raise DataError(
            f"no scenario {args.scenario!r} for {args.variable}; available: "
            + ", ".join(s.short for s in series)
        )
    res = ks_normality_test(
        series[scen],
        params,
        args.alpha,
        method,
        variable=args.variable,
        scenario=scen.short,
        allow_fallback=args.allow_fallback,
    )
    _emit(render_table([res], args.format), args, out)


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.command == "grade":
                _cmd_grade(args, out)
            else:
                _cmd_test(args, out)
        for w in caught:
            print(f"note: {w.message}", file=err)
    except UsageError as exc:
        print(f"distgrade {args.command}: {exc}", file=err)
        return EXIT_USAGE
    except DataError as exc:
        print(f"distgrade {args.command}: data error: {exc}", file=err)
        return EXIT_DATA
    except OSError as exc:
        print(f"distgrade {args.command}: data error: {exc}", file=err)
        return EXIT_DATA
    except (ComputationError, DistgradeError, ArithmeticError, ValueError) as exc:
        print(f"distgrade {args.command}: computation error: {exc}", file=err)
        return EXIT_COMPUTE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
