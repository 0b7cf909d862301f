"""Command-line interface.

Subcommands: ``run`` (single simulation from a config file or preset),
``sweep`` (phase-diagram grid), ``verify`` (check suites), ``gns``
(interpolation-constant estimation), ``testfn`` (auxiliary test-function
construction).  Exit codes: 0 success, 2 configuration error, 3 resolution
lost (or step floor / step budget), 4 verification failure.
"""

from __future__ import annotations

import argparse
import sys

from . import runner
from .analysis import build_test_function
from .inequalities import estimate_gns_constant
from .runner import ConfigError
from .verification import run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3
EXIT_VERIFY = 4


def _cmd_run(args) -> int:
    if (args.config is None) == (args.preset is None):
        print("run: provide exactly one of --config or --preset", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.config is not None:
            cfg = runner.load_run_config(args.config)
            if args.output_dir is not None:
                from dataclasses import replace

                cfg = replace(cfg, output_dir=args.output_dir)
        else:
            cfg = runner.preset(args.preset, output_dir=args.output_dir)
        result = runner.run(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    traj = result.trajectory
    print(f"outcome={traj.outcome} steps={traj.n_steps} "
          f"final_time={traj.final_state.time:.17g}")
    for rep in result.reports:
        print(f"criterion {rep.name}: satisfied={rep.satisfied} margin={rep.margin:.6g}")
    if result.out_dir:
        print(f"artifacts written to {result.out_dir}")
    if traj.outcome in ("resolution_lost", "step_floor", "max_steps"):
        return EXIT_RESOLUTION
    return EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        cfg = runner.load_sweep_config(args.config)
        points = runner.sweep(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    n_fail = sum(1 for p in points if p.outcome == "failed")
    print(f"sweep finished: {len(points)} cells, {n_fail} failed")
    for p in points:
        print(p.csv_row())
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        results = run_suite(args.suite)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    for r in results:
        print(r.line())
    if all(r.passed for r in results):
        print(f"verify {args.suite}: all {len(results)} checks passed")
        return EXIT_OK
    print(f"verify {args.suite}: FAILURES", file=sys.stderr)
    return EXIT_VERIFY


def _cmd_gns(args) -> int:
    try:
        est = estimate_gns_constant(args.p, args.alpha, budget=args.budget, seed=args.seed)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"C_hat({args.p:g},{args.alpha:g}) = {est.C_hat:.17g} "
          f"(trials={est.trials}, seed={est.seed})")
    print(f"argmax: {est.argmax_params}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("p,alpha,C_hat,trials,seed\n")
            fh.write(est.csv_row() + "\n")
        print(f"estimate written to {args.out}")
    return EXIT_OK


def _cmd_testfn(args) -> int:
    try:
        tf = build_test_function(args.alpha, args.beta)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"alpha={tf.alpha:g} beta={tf.beta:g} bump_coefficient={tf.bump_coefficient:.17g}")
    print(f"C_omega={tf.C_omega:.17g} C_R={tf.C_R:.17g}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("x,phi,phi_prime,omega\n")
            for x, p, pp, w in zip(tf.grid.x, tf.phi, tf.phi_prime, tf.omega):
                fh.write(f"{x:.17g},{p:.17g},{pp:.17g},{w:.17g}\n")
        print(f"test function written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fkslab",
        description="Spectral laboratory for 1D chemotaxis with fractional diffusion",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation")
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--preset", help=f"named scenario: {', '.join(sorted(runner.PRESETS))}")
    p.add_argument("--output-dir", help="artifact directory (overrides config)")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("sweep", help="run a phase-diagram sweep")
    p.add_argument("--config", required=True, help="YAML sweep configuration")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["operators", "inequalities", "oracles", "all"])
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("gns", help="estimate an interpolation constant")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--budget", type=int, default=3000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the estimate as CSV")
    p.set_defaults(fn=_cmd_gns)

    p = sub.add_parser("testfn", help="build the auxiliary test function")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--out", help="write x,phi,phi_prime,omega as CSV")
    p.set_defaults(fn=_cmd_testfn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
