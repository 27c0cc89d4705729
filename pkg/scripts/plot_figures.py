"""Plot gaussclone CSV tables (fig2..fig5 output) with matplotlib.

Usage: python3 scripts/plot_figures.py table.csv [more.csv ...] [--outdir DIR]

Every column after the first is drawn against the first; ``abs_error_*``
columns become error bars on the matching ``h_e_*`` curve.
"""

import argparse
import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def read_table(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, data = rows[0], np.array(rows[1:], dtype=float)
    return header, data


def plot_table(path, outdir):
    header, data = read_table(path)
    x = data[:, 0]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for k, name in enumerate(header[1:], start=1):
        if name.startswith("abs_error_"):
            continue
        err_name = "abs_error_" + name.removeprefix("h_e_")
        yerr = data[:, header.index(err_name)] if err_name in header else None
        ax.errorbar(x, data[:, k], yerr=yerr, label=name, lw=1.2)
    if any(h.startswith("h_e_") for h in header):
        ax.set_yscale("log")
    ax.set_xlabel(header[0])
    ax.legend(frameon=False)
    fig.tight_layout()
    target = Path(outdir) / (Path(path).stem + ".png")
    fig.savefig(target, dpi=150)
    plt.close(fig)
    return target


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("tables", nargs="+")
    parser.add_argument("--outdir", default=".")
    args = parser.parse_args()
    for path in args.tables:
        print(plot_table(path, args.outdir))


if __name__ == "__main__":
    main()
