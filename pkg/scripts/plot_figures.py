"""Plot a sweep CSV: efficiency, rate, transmit power and active channels vs SNR.

    python scripts/plot_figures.py results/sweep.csv --out results/

Needs matplotlib (pip install -e .[plot]).
"""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from eewf.montecarlo import read_csv

PANELS = [
    ("eta_avg", "energy efficiency [bit/s/Hz/W]", True, "efficiency.png"),
    ("rate_avg", "average rate [bit/s/Hz]", False, "rate.png"),
    ("ptx_avg", "average transmit power [W]", True, "transmit_power.png"),
    ("nchan_avg", "average active channels", False, "active_channels.png"),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--out", default=".")
    args = ap.parse_args()
    rows = read_csv(args.csv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ns = sorted({r.n for r in rows})
    for column, label, logy, name in PANELS:
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for algo, style in (("EEWF", "-o"), ("WF", "--s")):
            if column == "nchan_avg" and algo == "WF":
                continue
            for i, n in enumerate(ns):
                sel = sorted((r for r in rows if r.algorithm == algo and r.n == n), key=lambda r: r.target_snr_db)
                ax.plot(
                    [r.realized_snr_db for r in sel],
                    [getattr(r, column) for r in sel],
                    style,
                    color=f"C{i}",
                    ms=4,
                    label=f"{algo} N={n}",
                )
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7, ncol=2)
        fig.tight_layout()
        fig.savefig(out / name, dpi=150)
        plt.close(fig)
        print(f"wrote {out / name}")


if __name__ == "__main__":
    main()
