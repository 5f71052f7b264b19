"""Command line interface.

Subcommands:

* ``simulate``  draw a path ensemble and emit its text serialisation,
* ``test``      run the multinomial and/or Markov Monte Carlo tests,
* ``check``     run the analytic checks (mpp, regularity, identities,
                consistency),
* ``verdict``   run the full pipeline and compare the three properties,
* ``example``   shorthand for ``verdict`` on a named preset.

Exit codes: 0 success (including a clean "reject" finding), 2 usage error,
3 rejected input or insufficient data, 4 numeric failure, 5 a genuine
three-way disagreement under the regularity conditions.

Without ``--out`` the report is written to stdout in the chosen format;
with ``--out STEM`` the report, one CSV per diagnostic series, and one PNG
per series (unless ``--no-figures``) land next to the stem.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import MrpLabError, NumericError
from .model import (
    PRESET_NAMES,
    PathEvent,
    check_consistency,
    ensemble_to_text,
    parse_config_text,
    preset,
    sample_ensemble,
)
from .properties import (
    VerdictConfig,
    integral_identities_check,
    markov_test,
    mpp_check,
    multinomial_test,
    regularity_check,
    theorem_verdict,
)
from .reporting import report_to_csv, report_to_json, summary_line, write_report

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4
EXIT_ANOMALY = 5


def _add_model_args(sub: argparse.ArgumentParser) -> None:
    grp = sub.add_mutually_exclusive_group(required=True)
    grp.add_argument("--preset", choices=PRESET_NAMES, help="built-in model")
    grp.add_argument("--model", metavar="FILE", help="model config file (key=value lines)")


def _add_common_args(sub: argparse.ArgumentParser, paths_default: int) -> None:
    sub.add_argument("--paths", type=int, default=paths_default, metavar="N")
    sub.add_argument("--horizon", type=float, default=4.0, metavar="T")
    sub.add_argument("--seed", type=int, default=7)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--out", metavar="STEM", help="output path stem for report files")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--no-figures", action="store_true", help="skip PNG rendering")


def _times(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty time list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrplab",
        description="simulate mixed renewal processes and verify the "
        "multinomial / Markov / mixed-Poisson equivalence",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sim = subs.add_parser("simulate", help="draw an ensemble and serialise it")
    _add_model_args(p_sim)
    _add_common_args(p_sim, paths_default=1000)

    p_test = subs.add_parser("test", help="Monte Carlo property tests")
    _add_model_args(p_test)
    _add_common_args(p_test, paths_default=200_000)
    p_test.add_argument(
        "--which", choices=("multinomial", "markov", "both"), default="both"
    )
    p_test.add_argument("--alpha", type=float, default=0.01)
    p_test.add_argument(
        "--times", type=_times, default=None,
        help="comma-separated partition times (defaults derive from the horizon)",
    )

    p_check = subs.add_parser("check", help="analytic checks by quadrature and grids")
    _add_model_args(p_check)
    _add_common_args(p_check, paths_default=100_000)
    p_check.add_argument(
        "--which",
        choices=("mpp", "regularity", "identities", "consistency", "all"),
        default="all",
        help="'all' runs mpp, regularity, and identities",
    )
    p_check.add_argument("--tol", type=float, default=1e-9)

    p_verdict = subs.add_parser("verdict", help="full pipeline with agreement check")
    _add_model_args(p_verdict)
    _add_common_args(p_verdict, paths_default=200_000)
    p_verdict.add_argument("--alpha", type=float, default=0.01)
    p_verdict.add_argument("--tol", type=float, default=1e-9)
    p_verdict.add_argument("--multinomial-times", type=_times, default=None)
    p_verdict.add_argument("--markov-times", type=_times, default=None)

    p_ex = subs.add_parser("example", help="verdict on a named preset")
    p_ex.add_argument("name", choices=PRESET_NAMES)
    _add_common_args(p_ex, paths_default=200_000)
    p_ex.add_argument("--alpha", type=float, default=0.01)
    p_ex.add_argument("--tol", type=float, default=1e-9)

    return parser


def _load_model(args):
    if getattr(args, "preset", None):
        return preset(args.preset)
    return parse_config_text(Path(args.model).read_text())


def _emit(report, args) -> None:
    if args.out:
        written = write_report(
            report, args.out, fmt=args.format, figures=not args.no_figures
        )
        print(summary_line(report))
        for path in written:
            print(f"wrote {path}")
    else:
        text = report_to_json(report) if args.format == "json" else report_to_csv(report)
        print(text)


def _emit_many(reports: dict, args) -> None:
    if args.out:
        for name, report in reports.items():
            written = write_report(
                report, f"{args.out}_{name}", fmt=args.format, figures=not args.no_figures
            )
            print(summary_line(report))
            for path in written:
                print(f"wrote {path}")
    elif args.format == "json":
        import json

        print(json.dumps(
            {name: r.to_dict() for name, r in reports.items()},
            indent=2, sort_keys=True, allow_nan=True,
        ))
    else:
        blocks = []
        for name, report in reports.items():
            blocks.append(f"# {name}\n{report_to_csv(report)}")
        print("\n".join(blocks))


def _cmd_simulate(args) -> int:
    model = _load_model(args)
    ens = sample_ensemble(model, args.paths, args.horizon, args.seed, workers=args.workers)
    text = ensemble_to_text(ens)
    if args.out:
        path = Path(args.out).with_suffix(".paths")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        print(f"wrote {path}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _default_multinomial_times(horizon: float) -> tuple[float, ...]:
    return (horizon / 4.0, horizon / 2.0)


def _default_markov_times(horizon: float) -> tuple[float, ...]:
    return (horizon / 4.0, horizon / 2.0, 3.0 * horizon / 4.0)


def _cmd_test(args) -> int:
    model = _load_model(args)
    ens = sample_ensemble(model, args.paths, args.horizon, args.seed, workers=args.workers)
    reports = {}
    if args.which in ("multinomial", "both"):
        times = args.times or _default_multinomial_times(args.horizon)
        reports["multinomial"] = multinomial_test(ens, times, alpha=args.alpha)
    if args.which in ("markov", "both"):
        times = args.times or _default_markov_times(args.horizon)
        reports["markov"] = markov_test(ens, times, alpha=args.alpha)
    if len(reports) == 1:
        _emit(next(iter(reports.values())), args)
    else:
        _emit_many(reports, args)
    return EXIT_OK


def _consistency_report(model, args):
    # Canned functional: does the count hit 1 by mid-horizon, inspected on
    # the middle half of the induced rate's range.
    event = PathEvent.count_equals(args.horizon / 2.0, 1)
    lo = float(model.kernel_param(float(model.mixing.quantile(0.25))))
    hi = float(model.kernel_param(float(model.mixing.quantile(0.75))))
    set_b = (min(lo, hi), max(lo, hi))
    return check_consistency(model, event, set_b, n=args.paths, seed=args.seed)


def _cmd_check(args) -> int:
    model = _load_model(args)
    reports = {}
    if args.which in ("mpp", "all"):
        reports["mpp"] = mpp_check(model, tol=args.tol, horizon=args.horizon)
    if args.which in ("regularity", "all"):
        reports["regularity"] = regularity_check(model, horizon=args.horizon)
    if args.which in ("identities", "all"):
        reports["identities"] = integral_identities_check(model)
    if args.which == "consistency":
        reports["consistency"] = _consistency_report(model, args)
    if len(reports) == 1:
        _emit(next(iter(reports.values())), args)
    else:
        _emit_many(reports, args)
    return EXIT_OK


def _verdict_config(args, multinomial_times=None, markov_times=None) -> VerdictConfig:
    return VerdictConfig(
        n_paths=args.paths,
        horizon=args.horizon,
        seed=args.seed,
        alpha=args.alpha,
        multinomial_times=multinomial_times or _default_multinomial_times(args.horizon),
        markov_times=markov_times or _default_markov_times(args.horizon),
        mpp_tol=args.tol,
        workers=args.workers,
    )


def _cmd_verdict(args) -> int:
    model = _load_model(args)
    cfg = _verdict_config(
        args,
        multinomial_times=getattr(args, "multinomial_times", None),
        markov_times=getattr(args, "markov_times", None),
    )
    report = theorem_verdict(model, cfg)
    _emit(report, args)
    if not args.out:
        print(report.summary, file=sys.stderr)
    return EXIT_ANOMALY if report.anomaly else EXIT_OK


def _cmd_example(args) -> int:
    args.preset = args.name
    args.model = None
    return _cmd_verdict(args)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "test": _cmd_test,
    "check": _cmd_check,
    "verdict": _cmd_verdict,
    "example": _cmd_example,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except MrpLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
