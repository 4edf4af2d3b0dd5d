"""Plot the CSV tables written by `alpha-bridge figures --out DIR`.

    python scripts/plot_figures.py DIR
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def fig1(d):
    path = pd.read_csv(d / "fig1_path.csv")
    curves = pd.read_csv(d / "fig1_expectation.csv")
    fig, ax = plt.subplots()
    ax.plot(path.t, path.x, color="black", lw=0.8)
    for alpha, g in curves.groupby("alpha"):
        ax.plot(g.u, g.expectation, label=f"alpha = {alpha:g}")
    ax.set_xlabel("t")
    ax.legend()
    return fig


def fig2(d):
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for f in sorted(d.glob("fig2_T*.csv")):
        g = pd.read_csv(f)
        label = "T = " + f.stem.split("_T")[1]
        left.plot(g.alpha, g.expectation, label=label)
        right.plot(g.alpha, g.bias, label=label)
    left.set_ylabel("expectation of the MLE")
    right.set_ylabel("bias")
    for ax in (left, right):
        ax.set_xlabel("alpha")
        ax.legend()
    return fig


def fig3(d):
    g = pd.read_csv(d / "fig3.csv")
    fig, ax = plt.subplots()
    ax.plot(g["T"], g.bias)
    ax.set_xlabel("T")
    ax.set_ylabel("bias at alpha = 1/2")
    return fig


def fig4(d):
    g = pd.read_csv(d / "fig4_summary.csv")
    fig, (left, right) = plt.subplots(1, 2, figsize=(10, 4))
    for est, h in g.groupby("estimator", sort=False):
        left.plot(h.alpha, h.bias, marker="o", ms=3, label=est)
        right.plot(h.alpha, h.mse, marker="o", ms=3, label=est)
    left.axhline(0, color="grey", lw=0.5)
    left.set_ylabel("bias")
    right.set_ylabel("MSE")
    for ax in (left, right):
        ax.set_xlabel("alpha")
    left.legend(fontsize="small")
    return fig


def main():
    d = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    for name, make, needed in [
        ("fig1", fig1, "fig1_path.csv"),
        ("fig2", fig2, "fig2_T0.8.csv"),
        ("fig3", fig3, "fig3.csv"),
        ("fig4", fig4, "fig4_summary.csv"),
    ]:
        if (d / needed).exists():
            make(d).savefig(d / f"{name}.png", dpi=150, bbox_inches="tight")
            print(f"wrote {d / name}.png")


if __name__ == "__main__":
    main()
