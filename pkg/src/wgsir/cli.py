"""Command line entry point: ``wgsir run`` and ``wgsir fit``."""

from __future__ import annotations

import argparse
import logging
import sys

from .harness import ExperimentConfig, format_results, run_experiment, run_real_data


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--variant", type=str.upper, choices=["GSIR1", "GSIR2"])
    p.add_argument("--kernel", choices=["gaussian", "laplacian"])
    p.add_argument("--L", "--slices", dest="L", type=int, help="number of slicing directions")
    p.add_argument("--seed", type=int)
    p.add_argument("--eps-grid", dest="eps_grid", type=float, nargs="+")
    p.add_argument("--d", type=int, help="fix the dimension instead of the BIC choice")
    p.add_argument("--out", help="output CSV path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgsir", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="replicated simulation of one scenario")
    run.add_argument("--scenario")
    run.add_argument("--n", type=int)
    run.add_argument("--m", type=int)
    run.add_argument("--reps", dest="replications", type=int)
    run.add_argument("--metric", type=str.upper, choices=["AUTO", "W2", "SW2"])
    run.add_argument("--true-d", dest="true_d", action="store_const", const=True,
                     help="use the model's true dimension instead of the BIC choice")
    run.add_argument("--jobs", type=int)
    run.add_argument("--timing", action="store_const", const=True,
                     help="record wall time per replication (output is then not reproducible)")
    _common(run)

    fit = sub.add_parser("fit", help="estimate sufficient predictors from measure files")
    fit.add_argument("--x", dest="x_path", help="predictor CSV (id,v1[,v2..])")
    fit.add_argument("--y", dest="y_path", help="response CSV (id,v1[,v2..])")
    fit.add_argument("--metric", type=str.upper, choices=["AUTO", "W2", "SW2"])
    fit.add_argument("--save-fit", dest="save_fit", help="write the fitted model summary as JSON")
    _common(fit)
    return parser


def _config(args: argparse.Namespace) -> ExperimentConfig:
    keys = ("scenario", "x_path", "y_path", "n", "m", "L", "replications", "seed", "variant",
            "kernel", "metric", "eps_grid", "d", "true_d", "out", "jobs", "timing")
    overrides = {k: getattr(args, k, None) for k in keys}
    if overrides.get("metric") == "AUTO":
        overrides["metric"] = "auto"
    if args.config:
        return ExperimentConfig.from_json(args.config, **overrides)
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "run":
            if cfg.scenario is None:
                raise ValueError("run needs --scenario")
            rows, summary = run_experiment(cfg)
            text = format_results(rows, summary)
            if cfg.out:
                with open(cfg.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            if summary["failures"]:
                print(f"{summary['failures']} replication(s) failed", file=sys.stderr)
        else:
            if cfg.x_path is None:
                raise ValueError("fit needs --x and --y")
            ids, pred, est = run_real_data(cfg)
            if args.save_fit:
                est.fit.to_json(args.save_fit)
            if not cfg.out:
                sys.stdout.write("id," + ",".join(f"f{j + 1}" for j in range(pred.shape[1])) + "\n")
                for key, row in zip(ids, pred):
                    sys.stdout.write(key + "," + ",".join(repr(float(v)) for v in row) + "\n")
            print(f"d_hat={est.d_hat} eps_x={est.eps_x:g} eps_y={est.eps_y:g}", file=sys.stderr)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
