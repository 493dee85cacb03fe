"""Overlay classical and emulated sigma_z from a pipeline sigma_z.csv."""

from __future__ import annotations

import argparse
import csv

import matplotlib.pyplot as plt


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("--out", default="sigma_z.png")
    args = ap.parse_args()
    with open(args.csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    t = [float(r["t"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, [float(r["sigma_z_classical"]) for r in rows], "-", label="GQME")
    ax.plot(t, [float(r["sigma_z_emulated"]) for r in rows], "o", ms=4, label="emulated circuit")
    ax.set_xlabel(r"$t\,\Gamma$")
    ax.set_ylabel(r"$\sigma_z(t)$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
