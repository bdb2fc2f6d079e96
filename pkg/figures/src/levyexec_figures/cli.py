"""Command-line front end.

One subcommand:

* ``render``  map an artifact tree to figures and write one image per figure

Exit codes: 0 on success, 2 on a schema or input problem, 1 on anything
unexpected.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .artifacts import SchemaError
from .render import plan_figures, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levyexec-figures",
        description="render experiment CSV artifacts to figure images",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser(
        "render", help="render every figure an artifact tree supports"
    )
    p_render.add_argument(
        "--in", dest="in_dir", required=True, help="artifact tree to read"
    )
    p_render.add_argument(
        "--out", dest="out_dir", required=True, help="directory to write images into"
    )
    p_render.add_argument(
        "--format", choices=("png",), default="png", help="image format"
    )
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for spec in plan_figures(args.in_dir, args.out_dir, args.format):
            print(render(spec))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
