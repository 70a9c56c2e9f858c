"""chm-fig: render pipeline reports to figures.

    chm-fig render --kind {variance-profile|corr-heatmap|qntk-heatmap|offdiag-vs-depth}
                   --in report.json [--in more.json ...] --out fig.png [--format png|svg|pdf]

Exit codes: 0 success, 1 validation/schema error.
"""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv=None) -> int:
    parser = _Parser(prog="chm-fig", description="figure rendering for chm reports")
    sub = parser.add_subparsers(dest="command", required=True)
    ren = sub.add_parser("render", help="render one figure from report JSON")
    ren.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    ren.add_argument("--in", dest="inputs", action="append", required=True,
                     help="input report path (repeatable)")
    ren.add_argument("--out", required=True)
    ren.add_argument("--format", choices=("png", "svg", "pdf"))
    args = parser.parse_args(argv)
    try:
        path = render(FigureSpec(tuple(args.inputs), args.kind, args.out, args.format))
    except SchemaError as exc:
        print(f"chm-fig: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
