"""Command line: isac-plot --kind fig2|fig3 --in sweep.csv --out chart.png"""

from __future__ import annotations

import argparse
import sys

from .render import KINDS, PlotSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isac-plot",
                                     description="render sweep CSVs to charts")
    parser.add_argument("--kind", choices=KINDS, required=True)
    parser.add_argument("--in", dest="input_csv", required=True)
    parser.add_argument("--out", dest="output_path", required=True)
    parser.add_argument("--linear-ec", action="store_true",
                        help="keep the detection-error axis linear")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(input_csv=args.input_csv, kind=args.kind,
                    output_path=args.output_path, log_ec=not args.linear_ec)
    path = render(spec)
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
