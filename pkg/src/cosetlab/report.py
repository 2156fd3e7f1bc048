"""Report generation: sweep experiments rendered as figures plus CSV files.

Each section writes one CSV of the sweep data and one PNG figure next to
it, all derived from the same deterministic game runs, so the report can
be regenerated byte-for-byte from (out_dir, seed).
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from . import games, glx
from .gf2 import BitVector


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def bound_section(out_dir: str, max_n: int = 40) -> dict:
    """Monogamy-game operator-norm bound as a function of n."""
    ns = list(range(2, max_n + 1, 2))
    values = [float(games.monogamy_bound(n)) for n in ns]
    csv_path = os.path.join(out_dir, "monogamy_bound.csv")
    _write_csv(csv_path, ["n", "bound"], [[n, f"{v:.12g}"] for n, v in zip(ns, values)])

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ns, values, "o-", color="tab:blue")
    ax.set_xlabel("n")
    ax.set_ylabel("bound")
    ax.set_title("Pair-monogamy operator-norm bound")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(out_dir, "monogamy_bound.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": csv_path, "figure": png_path, "points": len(ns)}


def direct_product_section(out_dir: str, seed: int, trials: int) -> dict:
    """Honest measure-both-bases success rate against the 2^(-n/2) floor."""
    ns = [4, 6, 8, 10]
    rows = []
    estimates = []
    floors = []
    errs = []
    for n in ns:
        res = games.run_direct_product(n, "honest-double-measure", trials=trials, seed=seed + n)
        floor = 2.0 ** (-n / 2)
        sigma = float(np.sqrt(floor * (1 - floor) / trials))
        rows.append([n, trials, res.successes, f"{res.estimate:.12g}", f"{floor:.12g}", f"{sigma:.12g}"])
        estimates.append(res.estimate)
        floors.append(floor)
        errs.append(4 * sigma)
    csv_path = os.path.join(out_dir, "direct_product_floor.csv")
    _write_csv(csv_path, ["n", "trials", "successes", "estimate", "floor", "sigma"], rows)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.errorbar(ns, estimates, yerr=errs, fmt="o", capsize=4, label="measured", color="tab:blue")
    ax.semilogy(ns, floors, "k--", label="2^(-n/2)")
    ax.set_xlabel("n")
    ax.set_ylabel("success rate")
    ax.set_title("Measure-both-bases success in the direct product game")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(out_dir, "direct_product_floor.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": csv_path, "figure": png_path, "points": len(ns)}


def extraction_section(out_dir: str, seed: int, reps: int, n: int = 8) -> dict:
    """Extraction success against the 4*eps^2 floor over a bias sweep."""
    fractions = [0.0, 1 / 16, 1 / 8, 3 / 16, 1 / 4, 5 / 16, 3 / 8, 7 / 16, 1 / 2]
    rows = []
    biases, exacts, estimates = [], [], []
    x = BitVector.random(n, seed)
    for i, frac in enumerate(fractions):
        pred = glx.build_ip_predictor(x, noise=frac, seed=seed + i)
        exact = glx.exact_success(pred)
        est = glx.success_estimate(pred, aux=None, reps=reps, seed=seed + 100 + i)
        rows.append([f"{frac:.12g}", f"{pred.bias:.12g}", f"{exact:.12g}", f"{est:.12g}", reps])
        biases.append(pred.bias)
        exacts.append(exact)
        estimates.append(est)
    csv_path = os.path.join(out_dir, "extraction_success.csv")
    _write_csv(csv_path, ["flip_fraction", "bias", "exact", "estimate", "reps"], rows)

    fig, ax = plt.subplots(figsize=(6, 4))
    grid = np.linspace(0, 0.5, 100)
    ax.plot(grid, (2 * grid) ** 2, "k--", label="4*eps^2")
    ax.plot(biases, exacts, "o-", label="exact circuit value", color="tab:green")
    ax.plot(biases, estimates, "x", label="sampled", color="tab:red")
    ax.set_xlabel("bias eps")
    ax.set_ylabel("extraction probability")
    ax.set_title("Inner-product extraction vs. predictor bias")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    png_path = os.path.join(out_dir, "extraction_success.png")
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
    return {"csv": csv_path, "figure": png_path, "points": len(fractions)}


def generate(out_dir: str, seed: int = 0, quick: bool = False) -> dict:
    os.makedirs(out_dir, exist_ok=True)
    trials = 2000 if quick else 20000
    reps = 500 if quick else 5000
    sections = {
        "monogamy_bound": bound_section(out_dir),
        "direct_product": direct_product_section(out_dir, seed, trials),
        "extraction": extraction_section(out_dir, seed, reps),
    }
    return {
        "op": "report",
        "out_dir": out_dir,
        "seed": seed,
        "quick": quick,
        "sections": sections,
    }
