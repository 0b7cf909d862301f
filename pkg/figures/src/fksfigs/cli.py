"""figs: render a figure from a run (or sweep) artifact directory.

Usage: figs <kind> --run <dir> --out <file>, with kind one of profiles,
profiles_log, convergence, phase.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="figs", description=__doc__)
    ap.add_argument("kind", choices=FIGURE_KINDS)
    ap.add_argument("--run", required=True, help="run (or sweep) artifact directory")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--title", default=None)
    ap.add_argument("--xlim", type=float, nargs=2, default=None)
    ap.add_argument("--ylim", type=float, nargs=2, default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec(
        kind=args.kind,
        run_dir=args.run,
        out_path=args.out,
        xlim=tuple(args.xlim) if args.xlim else None,
        ylim=tuple(args.ylim) if args.ylim else None,
        title=args.title,
    )
    try:
        path = render(spec)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
