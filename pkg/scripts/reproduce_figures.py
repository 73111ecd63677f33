"""Run the default (N, SNR) sweep and the truncated-SISO bound experiment.

    python scripts/reproduce_figures.py --out results/

Writes sweep.csv (+ sweep.csv.meta.json) and siso_bounds.csv into the output
directory. Use plot_figures.py to turn them into figures.
"""

import argparse
import logging
from pathlib import Path

from eewf import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=2012)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    common = ["--trials", str(args.trials), "--seed", str(args.seed)]
    rc = cli.main(["sweep", "--out", str(out / "sweep.csv"), *common])
    rc = rc or cli.main(["bounds", "--out", str(out / "siso_bounds.csv"), *common])
    raise SystemExit(rc)


if __name__ == "__main__":
    main()
