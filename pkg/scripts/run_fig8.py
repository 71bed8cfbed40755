#!/usr/bin/env python3
"""Sum-rate comparison of the Gaussian two-way-relay schemes versus relay
position: writes a CSV of the sweep and an SVG line plot next to it.

Usage: python scripts/run_fig8.py [--out PREFIX] [--power P] [--step STEP]
"""

import argparse

from hybridlab.cli import render_svg
from hybridlab.gaussian_twrc import fig8_sweep, sweep_to_csv


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fig8", help="output file prefix")
    parser.add_argument("--power", type=float, default=10.0,
                        help="per-node transmit power")
    parser.add_argument("--step", type=float, default=0.05,
                        help="relay-position grid step in (0, 1)")
    parser.add_argument("--path-loss-exp", type=float, default=3.0)
    args = parser.parse_args()

    count = int(round(1.0 / args.step)) - 1
    r_grid = [round(args.step * i, 10) for i in range(1, count + 1)]
    rows = fig8_sweep(P=args.power, r_grid=r_grid,
                      path_loss_exp=args.path_loss_exp)

    csv_path = args.out + ".csv"
    with open(csv_path, "w") as fh:
        fh.write(sweep_to_csv(rows))

    header = ["r", "R_CS", "R_AF", "R_NNC", "R_HC"]
    data = [[row[k] for k in header] for row in rows]
    svg_path = args.out + ".svg"
    with open(svg_path, "w") as fh:
        fh.write(render_svg(header, data))

    print(f"wrote {csv_path} ({len(rows)} rows) and {svg_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
